//! Fredholm determinants on half-lines by Nyström discretization, the
//! Tracy–Widom distribution functions and exact finite-N GUE edge laws.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{airy, KernelOperator};
use crate::linalg::Beta;
use crate::quad::QuadratureRule;

pub const DEFAULT_ORDER: usize = 64;
/// Below this point the TW CDFs are reported as 0 (and flagged).
pub const LEFT_CUTOFF: f64 = -12.0;
/// Allowed drift of a determinant when the quadrature order is doubled.
pub const DOUBLING_TOL: f64 = 1e-8;
/// Cost guard for `finite_n_gue_cdf`.
pub const MAX_FINITE_N: usize = 400;

/// `det(I - A)` for a dense row-major `n x n` matrix by LU with partial pivoting.
pub fn det_identity_minus(mut a: Vec<f64>, n: usize) -> f64 {
    debug_assert_eq!(a.len(), n * n);
    for v in a.iter_mut() {
        *v = -*v;
    }
    for i in 0..n {
        a[i * n + i] += 1.0;
    }
    let mut det = 1.0;
    for k in 0..n {
        let (p, pmax) = (k..n).map(|i| (i, a[i * n + k].abs())).fold((k, -1.0), |b, c| if c.1 > b.1 { c } else { b });
        if pmax == 0.0 {
            return 0.0;
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            det = -det;
        }
        let piv = a[k * n + k];
        det *= piv;
        let (top, bottom) = a.split_at_mut((k + 1) * n);
        let row_k = &top[k * n..];
        for row in bottom.chunks_exact_mut(n) {
            let f = row[k] / piv;
            if f != 0.0 {
                for (x, &y) in row[k..].iter_mut().zip(&row_k[k..]) {
                    *x -= f * y;
                }
            }
        }
    }
    det
}

/// `det(I - W^{1/2} K W^{1/2})` for an arbitrary kernel function on a rule.
pub fn fredholm_det_fn(k: impl Fn(f64, f64) -> f64, rule: &QuadratureRule) -> f64 {
    let m = rule.points.len();
    let sw: Vec<f64> = rule.weights.iter().map(|w| w.sqrt()).collect();
    let mut a = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            a[i * m + j] = sw[i] * k(rule.points[i], rule.points[j]) * sw[j];
        }
    }
    det_identity_minus(a, m)
}

/// Nyström determinant of a [`KernelOperator`] on the points of `rule`.
pub fn fredholm_det(kernel: &KernelOperator, rule: &QuadratureRule) -> Result<f64> {
    let m = rule.points.len();
    let mut a = kernel.matrix(&rule.points)?;
    let sw: Vec<f64> = rule.weights.iter().map(|w| w.sqrt()).collect();
    for i in 0..m {
        for j in 0..m {
            a[i * m + j] *= sw[i] * sw[j];
        }
    }
    Ok(det_identity_minus(a, m))
}

/// Determinant on `(s, inf)` at `order` and `2 order`; fails with
/// [`Error::NonConvergence`] if they differ by more than [`DOUBLING_TOL`].
/// Returns the higher-order value.
pub fn fredholm_det_checked(kernel: &KernelOperator, s: f64, order: usize) -> Result<f64> {
    let rule = QuadratureRule::half_line(s, order)?;
    let lo = fredholm_det(kernel, &rule)?;
    let hi = fredholm_det(kernel, &rule.doubled()?)?;
    if (lo - hi).abs() > DOUBLING_TOL {
        return Err(Error::NonConvergence(format!(
            "Fredholm determinant of {kernel:?} on ({s}, inf): order {order} gives {lo}, order {} gives {hi}",
            2 * order
        )));
    }
    Ok(hi)
}

/// A CDF value with a flag telling whether `r` fell below [`LEFT_CUTOFF`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CdfValue {
    pub cdf: f64,
    pub below_cutoff: bool,
}

/// `TW_2(r) = det(I - K_airy)` on `(r, inf)`.
pub fn tw2_cdf(r: f64) -> Result<f64> {
    tw_cdf(Beta::Complex, r, DEFAULT_ORDER).map(|v| v.cdf)
}

/// `TW_1(r) = det(I - K_1)` on `(r, inf)` with `K_1(x, y) = Ai((x + y) / 2) / 2`.
pub fn tw1_cdf(r: f64) -> Result<f64> {
    tw_cdf(Beta::Real, r, DEFAULT_ORDER).map(|v| v.cdf)
}

pub fn tw_cdf(beta: Beta, r: f64, order: usize) -> Result<CdfValue> {
    if !r.is_finite() {
        return Err(Error::validation(format!("r must be finite, got {r}")));
    }
    if r < LEFT_CUTOFF {
        return Ok(CdfValue { cdf: 0.0, below_cutoff: true });
    }
    let rule = QuadratureRule::half_line(r, order)?;
    let det = match beta {
        Beta::Complex => fredholm_det(&KernelOperator::Airy, &rule)?,
        Beta::Real => tw1_det(&rule)?,
    };
    Ok(CdfValue { cdf: det.clamp(0.0, 1.0), below_cutoff: false })
}

fn tw1_det(rule: &QuadratureRule) -> Result<f64> {
    // Ai on the pairwise midpoints; airy() only fails for x < -1e4
    for &x in &rule.points {
        airy::airy(x)?;
    }
    Ok(fredholm_det_fn(|x, y| 0.5 * airy::airy(0.5 * (x + y)).unwrap_or(0.0), rule))
}

/// `P(N^{2/3} (lambda_N - 2) <= r)` for the GUE: `det(I - K_N^edge)` on `(r, inf)`.
pub fn finite_n_gue_cdf(n: usize, r: f64) -> Result<f64> {
    finite_n_gue_cdf_order(n, r, DEFAULT_ORDER)
}

pub fn finite_n_gue_cdf_order(n: usize, r: f64, order: usize) -> Result<f64> {
    if n > MAX_FINITE_N {
        return Err(Error::validation(format!("finite-N GUE CDF is limited to N <= {MAX_FINITE_N}, got {n}")));
    }
    if n == 0 {
        return Err(Error::validation("N must be positive"));
    }
    if !r.is_finite() {
        return Err(Error::validation(format!("r must be finite, got {r}")));
    }
    // left of the spectrum's lower end in edge units the CDF vanishes
    if r < -4.0 * (n as f64).powf(2.0 / 3.0) {
        return Ok(0.0);
    }
    let rule = QuadratureRule::half_line(r, order)?;
    Ok(fredholm_det(&KernelOperator::Edge { n }, &rule)?.clamp(0.0, 1.0))
}

/// Where a [`DistributionCurve`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    FredholmAiry,
    FredholmFiniteN { n: usize },
    Empirical { n_samples: usize },
}

/// A CDF sampled on an ascending grid of edge coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionCurve {
    pub grid: Vec<f64>,
    pub cdf: Vec<f64>,
    pub provenance: Provenance,
    pub beta: Beta,
}

impl DistributionCurve {
    pub fn new(grid: Vec<f64>, cdf: Vec<f64>, provenance: Provenance, beta: Beta) -> Result<Self> {
        if grid.len() != cdf.len() || grid.is_empty() {
            return Err(Error::validation("grid and CDF values must be non-empty and of equal length"));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::validation("grid must be strictly ascending"));
        }
        if cdf.iter().any(|&c| !(0.0..=1.0).contains(&c)) {
            return Err(Error::validation("CDF values must lie in [0, 1]"));
        }
        Ok(DistributionCurve { grid, cdf, provenance, beta })
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Largest decrease between consecutive grid values (0 for monotone curves).
    pub fn monotonicity_defect(&self) -> f64 {
        self.cdf.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max)
    }

    pub fn is_monotone(&self, slack: f64) -> bool {
        self.monotonicity_defect() <= slack
    }

    /// Value at `r`: right-continuous steps for empirical curves, linear
    /// interpolation for analytic ones; constant extension outside the grid.
    pub fn eval(&self, r: f64) -> f64 {
        let g = &self.grid;
        if r < g[0] {
            return if matches!(self.provenance, Provenance::Empirical { .. }) { 0.0 } else { self.cdf[0] };
        }
        if r >= g[g.len() - 1] {
            return self.cdf[g.len() - 1];
        }
        let i = g.partition_point(|&x| x <= r) - 1;
        match self.provenance {
            Provenance::Empirical { .. } => self.cdf[i],
            _ => {
                let t = (r - g[i]) / (g[i + 1] - g[i]);
                self.cdf[i] + t * (self.cdf[i + 1] - self.cdf[i])
            }
        }
    }

    /// Generalized inverse `inf { r : F(r) >= u }` on the linear interpolant.
    pub fn quantile(&self, u: f64) -> f64 {
        let c = &self.cdf;
        if u <= c[0] {
            return self.grid[0];
        }
        let i = c.partition_point(|&v| v < u);
        if i >= c.len() {
            return self.grid[c.len() - 1];
        }
        let (c0, c1) = (c[i - 1], c[i]);
        let (g0, g1) = (self.grid[i - 1], self.grid[i]);
        if c1 == c0 {
            g1
        } else {
            g0 + (u - c0) / (c1 - c0) * (g1 - g0)
        }
    }
}

/// Ascending grid `r_min, r_min + step, ...` up to `r_max` (inclusive within
/// half a step), built by index to avoid drift.
pub fn grid(r_min: f64, r_max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && r_min.is_finite() && r_max.is_finite() && r_min < r_max) {
        return Err(Error::validation(format!("bad grid [{r_min}, {r_max}] step {step}")));
    }
    let n = ((r_max - r_min) / step + 0.5).floor() as usize;
    Ok((0..=n).map(|i| r_min + i as f64 * step).collect())
}

/// `TW_beta` on `grid`, evaluated in parallel (assembly order is the grid order).
pub fn tw_curve(beta: Beta, grid: &[f64], order: usize) -> Result<DistributionCurve> {
    let cdf = grid.par_iter().map(|&r| tw_cdf(beta, r, order).map(|v| v.cdf)).collect::<Result<Vec<_>>>()?;
    DistributionCurve::new(grid.to_vec(), cdf, Provenance::FredholmAiry, beta)
}

pub fn finite_n_gue_curve(n: usize, grid: &[f64], order: usize) -> Result<DistributionCurve> {
    let cdf = grid.par_iter().map(|&r| finite_n_gue_cdf_order(n, r, order)).collect::<Result<Vec<_>>>()?;
    DistributionCurve::new(grid.to_vec(), cdf, Provenance::FredholmFiniteN { n }, Beta::Complex)
}
