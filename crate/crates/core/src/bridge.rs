//! Counting ↔ Green-function bridge: the Poisson mollifier, smoothed
//! eigenvalue counts, the smooth cutoff `F`, the edge observable `X` and the
//! sandwich inequalities relating sharp and smoothed counts.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;
use crate::spectral::SpectralSample;

/// Absolute tolerance, in eigenvalue counts, for the quadrature path of
/// [`smoothed_count_quadrature`].
pub const COUNT_QUAD_TOL: f64 = 1e-9;

/// `theta_eta(x) = eta / (pi (x^2 + eta^2)) = Im 1/(x - i eta) / pi`.
pub fn theta_eta(x: f64, eta: f64) -> f64 {
    eta / (PI * (x * x + eta * eta))
}

/// `int_a^b theta_eta = (arctan(b / eta) - arctan(a / eta)) / pi`.
pub fn theta_eta_mass(a: f64, b: f64, eta: f64) -> f64 {
    ((b / eta).atan() - (a / eta).atan()) / PI
}

/// Scale ladder `N^{-1} << eta << l1 << l << E_L - E` at the upper edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BridgeParams {
    pub epsilon: f64,
    pub e: f64,
    pub e_l: f64,
    pub eta: f64,
    pub l1: f64,
    pub l: f64,
    pub n: usize,
}

impl BridgeParams {
    /// `E_L = 2 + 4 N^{-2/3+eps}`, `eta = N^{-1+eps}`, `l1 = N^{3 eps} eta`,
    /// `l = N^{3 eps} l1`; each gap in the ladder must be at least a factor
    /// `N^{eps/2}`.
    pub fn new(n: usize, epsilon: f64, e: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::validation(format!("N must be at least 2, got {n}")));
        }
        if !(epsilon > 0.0 && epsilon < 1.0 / 3.0) {
            return Err(Error::validation(format!("epsilon must lie in (0, 1/3), got {epsilon}")));
        }
        if !e.is_finite() {
            return Err(Error::validation("E must be finite"));
        }
        let nf = n as f64;
        let eta = nf.powf(-1.0 + epsilon);
        let l1 = nf.powf(3.0 * epsilon) * eta;
        let p = BridgeParams {
            epsilon,
            e,
            e_l: 2.0 + 4.0 * nf.powf(-2.0 / 3.0 + epsilon),
            eta,
            l1,
            l: nf.powf(3.0 * epsilon) * l1,
            n,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let nf = self.n as f64;
        let gap = nf.powf(self.epsilon / 2.0);
        let ladder = [("1/N", 1.0 / nf), ("eta", self.eta), ("l1", self.l1), ("l", self.l), ("E_L - E", self.e_l - self.e)];
        for w in ladder.windows(2) {
            let ((a, x), (b, y)) = (w[0], w[1]);
            if !(y >= gap * x) {
                return Err(Error::validation(format!(
                    "scale ladder violated: {b} = {y:e} is not >= N^(eps/2) * {a} = {:e}",
                    gap * x
                )));
            }
        }
        Ok(())
    }

    /// `eta / l1 * N^{2 eps}`; equals `N^{-eps}` on the default ladder.
    pub fn mollifier_error_term(&self) -> f64 {
        self.eta / self.l1 * (self.n as f64).powf(2.0 * self.epsilon)
    }
}

/// `Tr chi_E * theta_eta(H)` for `chi_E = 1_[E, E_L]`, by the exact
/// eigenvalue sum `(1/pi) sum_j [arctan((E_L - l_j)/eta) - arctan((E - l_j)/eta)]`.
pub fn smoothed_count(sample: &SpectralSample, e: f64, e_l: f64, eta: f64) -> f64 {
    sample.eigenvalues.iter().map(|&l| theta_eta_mass(e - l, e_l - l, eta)).sum()
}

/// The same quantity as `(N/pi) int_E^{E_L} Im m_N(y + i eta) dy`, by adaptive
/// Simpson to [`COUNT_QUAD_TOL`] counts.
pub fn smoothed_count_quadrature(sample: &SpectralSample, e: f64, e_l: f64, eta: f64) -> Result<f64> {
    if !(eta > 0.0) {
        return Err(Error::validation(format!("eta must be positive, got {eta}")));
    }
    // (N/pi) Im m_N(y + i eta) = sum_j theta_eta(y - l_j)
    let density = |y: f64| sample.eigenvalues.iter().map(|&l| theta_eta(y - l, eta)).sum::<f64>();
    // split at eigenvalues inside the window so every peak sits on a node
    let mut cuts = vec![e];
    cuts.extend(sample.eigenvalues.iter().copied().filter(|&l| l > e && l < e_l));
    cuts.push(e_l);
    let share = COUNT_QUAD_TOL / (cuts.len() - 1) as f64;
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += adaptive_simpson(density, w[0], w[1], share)?;
    }
    Ok(total)
}

/// Both evaluation paths for one window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualPath {
    pub eigen_sum: f64,
    pub quadrature: f64,
}

impl DualPath {
    pub fn abs_diff(&self) -> f64 {
        (self.eigen_sum - self.quadrature).abs()
    }

    pub fn rel_diff(&self) -> f64 {
        self.abs_diff() / self.eigen_sum.abs().max(f64::MIN_POSITIVE)
    }
}

pub fn smoothed_count_dual(sample: &SpectralSample, params: &BridgeParams) -> Result<DualPath> {
    Ok(DualPath {
        eigen_sum: smoothed_count(sample, params.e, params.e_l, params.eta),
        quadrature: smoothed_count_quadrature(sample, params.e, params.e_l, params.eta)?,
    })
}

fn bump(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        (-1.0 / u).exp()
    }
}

/// Smooth cutoff: `1` on `|x| <= 1/9`, `0` on `|x| >= 2/9`, and the
/// `exp(-1/u)` smooth step in between (non-increasing in `|x|`).
pub fn smooth_cutoff(x: f64) -> f64 {
    let a = x.abs();
    if a <= 1.0 / 9.0 {
        return 1.0;
    }
    if a >= 2.0 / 9.0 {
        return 0.0;
    }
    let u = 9.0 * a - 1.0;
    let (p, q) = (bump(1.0 - u), bump(u));
    p / (p + q)
}

/// `F'(x)`; identically zero outside `1/9 < |x| < 2/9`.
pub fn smooth_cutoff_derivative(x: f64) -> f64 {
    let a = x.abs();
    if a <= 1.0 / 9.0 || a >= 2.0 / 9.0 {
        return 0.0;
    }
    let u = 9.0 * a - 1.0;
    let (p, q) = (bump(1.0 - u), bump(u));
    let (dp, dq) = (-p / ((1.0 - u) * (1.0 - u)), q / (u * u));
    // d/du p/(p+q), chain rule through u = 9|x| - 1
    let d = (dp * q - p * dq) / ((p + q) * (p + q));
    9.0 * d * x.signum()
}

/// Edge observable `X = N int_{k1}^{k2} Im m_N(2 + x + i eta) dx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservableX {
    pub kappa1: f64,
    pub kappa2: f64,
    pub eta: f64,
}

impl ObservableX {
    /// Offsets must satisfy `k1 <= k2`, `|k_i| <= C0 N^{-2/3+eps}`.
    pub fn new(kappa1: f64, kappa2: f64, eta: f64, n: usize, epsilon: f64, c0: f64) -> Result<Self> {
        if !(kappa1 <= kappa2) {
            return Err(Error::validation(format!("need kappa1 <= kappa2, got {kappa1} > {kappa2}")));
        }
        if !(eta > 0.0) {
            return Err(Error::validation(format!("eta must be positive, got {eta}")));
        }
        let w = c0 * (n as f64).powf(-2.0 / 3.0 + epsilon);
        if kappa1.abs() > w || kappa2.abs() > w {
            return Err(Error::OutOfDomain {
                what: "kappa",
                detail: format!("edge offsets ({kappa1}, {kappa2}) exceed C0 N^(-2/3+eps) = {w:e}"),
            });
        }
        Ok(ObservableX { kappa1, kappa2, eta })
    }

    /// Closed form `sum_j [arctan((2 + k2 - l_j)/eta) - arctan((2 + k1 - l_j)/eta)]`.
    pub fn value(&self, sample: &SpectralSample) -> f64 {
        let (a, b) = (2.0 + self.kappa1, 2.0 + self.kappa2);
        if a == b {
            return 0.0;
        }
        sample
            .eigenvalues
            .iter()
            .map(|&l| PI * theta_eta_mass(a - l, b - l, self.eta))
            .sum()
    }
}

/// `Im~ P(z) = (P(z) - P(conj z)) / (2i)`.
pub fn tilde_im(p: impl Fn(Complex64) -> Complex64, z: Complex64) -> Complex64 {
    (p(z) - p(z.conj())) / Complex64::new(0.0, 2.0)
}

/// `Delta Im~ P = Im~ P(z2) - Im~ P(z1)`.
pub fn delta_im(p: impl Fn(Complex64) -> Complex64, z1: Complex64, z2: Complex64) -> Complex64 {
    tilde_im(&p, z2) - tilde_im(&p, z1)
}

/// Outcome of both sandwich inequalities for one sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichRecord {
    /// `N(E, inf)`.
    pub count_above: usize,
    /// `Tr chi_{E+l} * theta_eta(H)` and `Tr chi_{E-l} * theta_eta(H)`.
    pub smoothed_inner: f64,
    pub smoothed_outer: f64,
    /// `Tr chi_{E+l} * theta - N^{-eps} <= N(E, inf)`.
    pub lhs_ok: bool,
    /// `N(E, inf) <= Tr chi_{E-l} * theta + N^{-eps}`.
    pub rhs_ok: bool,
    /// Smallest margin of the two sides (negative on failure).
    pub slack: f64,
    /// Smallest `C` making `Tr chi_{E+l}*theta - C N^{-eps} <= N(E,inf) <= Tr chi_{E-l}*theta + C N^{-eps}`.
    pub fitted_c: f64,
    /// `|Tr chi_E(H) - Tr chi_E * theta(H)| <= C (N(E - l1, E + l1) + eta/l1 N^{2 eps})` with the given `C`.
    pub mollifier_ok: bool,
    /// Smallest `C` for the mollifier inequality (0 when both sides vanish).
    pub mollifier_c: f64,
}

pub fn sandwich_check(sample: &SpectralSample, params: &BridgeParams, c: f64) -> Result<SandwichRecord> {
    params.validate()?;
    if sample.dim() != params.n {
        return Err(Error::validation(format!("sample has N = {} but parameters have N = {}", sample.dim(), params.n)));
    }
    let BridgeParams { e, e_l, eta, l, l1, .. } = *params;
    let slack_unit = (params.n as f64).powf(-params.epsilon);
    let count_above = sample.counting_above(e);
    let ca = count_above as f64;
    let inner = smoothed_count(sample, e + l, e_l, eta);
    let outer = smoothed_count(sample, e - l, e_l, eta);
    let lhs_margin = ca - (inner - slack_unit);
    let rhs_margin = outer + slack_unit - ca;
    let excess = (inner - ca).max(ca - outer).max(0.0);

    let sharp = sample.counting(e, e_l)? as f64;
    let smooth = smoothed_count(sample, e, e_l, eta);
    let near = sample.counting(e - l1, e + l1)? as f64;
    let bound = near + params.mollifier_error_term();
    let dev = (sharp - smooth).abs();
    Ok(SandwichRecord {
        count_above,
        smoothed_inner: inner,
        smoothed_outer: outer,
        lhs_ok: lhs_margin >= 0.0,
        rhs_ok: rhs_margin >= 0.0,
        slack: lhs_margin.min(rhs_margin),
        fitted_c: excess / slack_unit,
        mollifier_ok: dev <= c * bound,
        mollifier_c: if dev == 0.0 { 0.0 } else { dev / bound },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mollifier_basics() {
        let eta = 0.3;
        assert!((theta_eta(0.0, eta) - 1.0 / (PI * eta)).abs() < 1e-15);
        assert_eq!(theta_eta(1.7, eta), theta_eta(-1.7, eta));
        assert!((theta_eta_mass(-1e12, 1e12, eta) - 1.0).abs() < 1e-12);
        let z = Complex64::new(0.4, -eta);
        assert!((theta_eta(0.4, eta) - (1.0 / z).im / PI).abs() < 1e-15);
    }

    #[test]
    fn indicator_limits() {
        let s = SpectralSample::from_eigenvalues(vec![0.5]);
        assert!((smoothed_count(&s, 0.0, 1.0, 1e-9) - 1.0).abs() < 1e-8);
        assert!((smoothed_count(&s, 0.5, 1e12, 1e-3) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn cutoff_shape() {
        assert_eq!(smooth_cutoff(0.1), 1.0);
        assert_eq!(smooth_cutoff(0.3), 0.0);
        let (a, b) = (smooth_cutoff(0.15), smooth_cutoff(0.2));
        assert!(a > 0.0 && a < 1.0 && a >= b);
        let h = 1e-6;
        let fd = (smooth_cutoff(0.16 + h) - smooth_cutoff(0.16 - h)) / (2.0 * h);
        assert!((fd - smooth_cutoff_derivative(0.16)).abs() < 1e-6);
        assert_eq!(smooth_cutoff_derivative(-0.25), 0.0);
    }

    #[test]
    fn ladder_defaults() {
        let p = BridgeParams::new(500, 0.05, 2.0).unwrap();
        assert!((p.mollifier_error_term() - 500f64.powf(-0.05)).abs() < 1e-14);
        assert!(BridgeParams::new(500, 0.05, p.e_l - p.l).is_err());
    }

    #[test]
    fn observable_single_eigenvalue() {
        let s = SpectralSample::from_eigenvalues(vec![2.0]);
        let x = ObservableX { kappa1: -0.01, kappa2: 0.02, eta: 0.005 };
        let want = (0.02f64 / 0.005).atan() - (-0.01f64 / 0.005).atan();
        assert!((x.value(&s) - want).abs() < 1e-15);
        assert_eq!(ObservableX { kappa2: -0.01, ..x }.value(&s), 0.0);
    }
}
