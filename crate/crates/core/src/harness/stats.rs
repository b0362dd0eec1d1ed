use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fredholm::{DistributionCurve, Provenance};
use crate::linalg::Beta;
use crate::rng::{self, Purpose};

pub const BOOTSTRAP_RESAMPLES: usize = 200;
pub const DKW_ALPHA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EdgeMode {
    /// `N^{2/3} (lambda_N - 2)`.
    #[default]
    Standard,
    /// `(N - 1)^{1/6} sqrt(N) (lambda_N - sqrt(4 - 2/N))`, GOE only.
    GoeRefined,
}

impl EdgeMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(EdgeMode::Standard),
            "goe_refined" => Ok(EdgeMode::GoeRefined),
            other => Err(Error::validation(format!("unknown edge scaling mode `{other}`"))),
        }
    }
}

pub fn edge_rescale(lambda_max: f64, n: usize, beta: Beta, mode: EdgeMode) -> Result<f64> {
    let nf = n as f64;
    match mode {
        EdgeMode::Standard => Ok(nf.powf(2.0 / 3.0) * (lambda_max - 2.0)),
        EdgeMode::GoeRefined if beta == Beta::Real => {
            if n < 2 {
                return Err(Error::validation("goe_refined scaling needs N >= 2"));
            }
            Ok((nf - 1.0).powf(1.0 / 6.0) * nf.sqrt() * (lambda_max - (4.0 - 2.0 / nf).sqrt()))
        }
        EdgeMode::GoeRefined => Err(Error::validation("goe_refined scaling applies to beta = 1 only")),
    }
}

/// `sqrt(ln(2 / alpha) / (2 n))`.
pub fn dkw_radius(n: usize, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * n as f64)).sqrt()
}

/// Values clamped into `[grid_min, grid_max]`, with the clamp counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct ClampCounts {
    pub below: usize,
    pub above: usize,
}

/// Empirical CDF on `grid`: `#{v <= r} / n`. Values outside the grid are
/// clamped to its ends so the curve carries total mass 1.
pub fn empirical_cdf(values: &[f64], grid: &[f64], beta: Beta) -> Result<(DistributionCurve, ClampCounts)> {
    if values.is_empty() {
        return Err(Error::validation("empirical CDF of an empty sample"));
    }
    if grid.is_empty() {
        return Err(Error::validation("empty grid"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::validation("non-finite sample value"));
    }
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    let mut clamp = ClampCounts::default();
    let mut v: Vec<f64> = values
        .iter()
        .map(|&x| {
            if x < lo {
                clamp.below += 1;
                lo
            } else if x > hi {
                clamp.above += 1;
                hi
            } else {
                x
            }
        })
        .collect();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let cdf = grid.iter().map(|&r| v.partition_point(|&x| x <= r) as f64 / n).collect();
    let curve = DistributionCurve::new(grid.to_vec(), cdf, Provenance::Empirical { n_samples: values.len() }, beta)?;
    Ok((curve, clamp))
}

/// `sup_{r > r0} |a(r) - b(r)|` over the grid points of both curves that lie
/// in their common range.
pub fn ks_distance(a: &DistributionCurve, b: &DistributionCurve, r0: f64) -> Result<f64> {
    let lo = a.grid[0].max(b.grid[0]);
    let hi = a.grid[a.len() - 1].min(b.grid[b.len() - 1]);
    if lo > hi {
        return Err(Error::validation("curves have disjoint grids"));
    }
    let pts = a.grid.iter().chain(&b.grid).copied().filter(|&r| r > r0 && r >= lo && r <= hi);
    let mut d: Option<f64> = None;
    for r in pts {
        let x = (a.eval(r) - b.eval(r)).abs();
        d = Some(d.map_or(x, |m: f64| m.max(x)));
    }
    d.ok_or_else(|| Error::validation(format!("no grid points above r0 = {r0} in the common range")))
}

/// Log-log least-squares exponent with residual-bootstrap confidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub n_values: Vec<usize>,
    pub distances: Vec<f64>,
    pub exponent: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
    /// Half-width of the central 95% bootstrap interval of the exponent.
    pub half_width: f64,
}

fn ols(x: &[f64], y: &[f64]) -> (f64, f64) {
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Fit `d(N) ~ C N^b` by OLS on `(ln N, ln d)`.
pub fn fit_rate(n_values: &[usize], distances: &[f64], seed: u64) -> Result<RateFit> {
    if n_values.len() != distances.len() || n_values.len() < 3 {
        return Err(Error::validation("a rate fit needs at least 3 (N, distance) points"));
    }
    if distances.iter().any(|&d| !(d > 0.0 && d.is_finite())) {
        return Err(Error::validation("rate fit needs positive finite distances"));
    }
    let mut sorted = n_values.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() < 2 {
        return Err(Error::validation("rate fit needs at least two distinct N"));
    }
    let x: Vec<f64> = n_values.iter().map(|&n| (n as f64).ln()).collect();
    let y: Vec<f64> = distances.iter().map(|d| d.ln()).collect();
    let (slope, intercept) = ols(&x, &y);
    let fitted: Vec<f64> = x.iter().map(|v| intercept + slope * v).collect();
    let res: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let m = res.len();
    let residual = (res.iter().map(|r| r * r).sum::<f64>() / m as f64).sqrt();
    let mut rng = rng::stream(seed, Purpose::Bootstrap, m, 0);
    let mut slopes: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| {
            let yb: Vec<f64> = fitted.iter().map(|f| f + res[rng.random_range(0..m)]).collect();
            ols(&x, &yb).0
        })
        .collect();
    slopes.sort_by(f64::total_cmp);
    let q = |p: f64| slopes[((p * (BOOTSTRAP_RESAMPLES - 1) as f64).round()) as usize];
    let half_width = 0.5 * (q(0.975) - q(0.025));
    if !slope.is_finite() {
        return Err(Error::NonConvergence("rate fit produced a non-finite exponent".into()));
    }
    Ok(RateFit {
        n_values: n_values.to_vec(),
        distances: distances.to_vec(),
        exponent: slope,
        intercept,
        residual,
        half_width,
    })
}

/// True when every pairwise distance difference is within the sum of the
/// two DKW radii, i.e. sampling noise hides any trend.
pub fn noise_dominated(distances: &[f64], radii: &[f64]) -> bool {
    let m = distances.len();
    (0..m).all(|i| (i + 1..m).all(|j| (distances[i] - distances[j]).abs() <= radii[i] + radii[j]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rescale_examples() {
        assert_eq!(edge_rescale(2.0, 100, Beta::Complex, EdgeMode::Standard).unwrap(), 0.0);
        let l = (4.0 - 2.0 / 100.0f64).sqrt();
        assert_eq!(edge_rescale(l, 100, Beta::Real, EdgeMode::GoeRefined).unwrap(), 0.0);
        let v = edge_rescale(2.1, 100, Beta::Complex, EdgeMode::Standard).unwrap();
        assert!((v - 100f64.powf(2.0 / 3.0) * 0.1).abs() < 1e-12 && (v - 2.1544).abs() < 1e-4);
        assert!(edge_rescale(2.0, 100, Beta::Complex, EdgeMode::GoeRefined).is_err());
    }

    #[test]
    fn dkw_value() {
        assert!((dkw_radius(10_000, 0.01) - 0.016276).abs() < 1e-6);
    }

    #[test]
    fn ks_of_steps() {
        let g: Vec<f64> = (0..=20).map(|i| -0.5 + 0.1 * i as f64).collect();
        let (a, _) = empirical_cdf(&[0.0], &g, Beta::Complex).unwrap();
        let (b, _) = empirical_cdf(&[1.0], &g, Beta::Complex).unwrap();
        assert_eq!(ks_distance(&a, &a, -10.0).unwrap(), 0.0);
        assert_eq!(ks_distance(&a, &b, -10.0).unwrap(), 1.0);
    }

    #[test]
    fn clamping_keeps_mass() {
        let g = vec![-1.0, 0.0, 1.0];
        let (c, k) = empirical_cdf(&[-5.0, 0.5, 9.0], &g, Beta::Real).unwrap();
        assert_eq!(k, ClampCounts { below: 1, above: 1 });
        assert_eq!(c.cdf, vec![1.0 / 3.0, 1.0 / 3.0, 1.0]);
    }

    #[test]
    fn exact_power_law() {
        let ns = [20, 50, 100, 200];
        let d: Vec<f64> = ns.iter().map(|&n| 3.0 * (n as f64).powf(-2.0 / 3.0)).collect();
        let f = fit_rate(&ns, &d, 1).unwrap();
        assert!((f.exponent + 2.0 / 3.0).abs() < 1e-12);
        assert!(f.half_width < 1e-12);
        assert!(fit_rate(&ns[..2], &d[..2], 1).is_err());
    }

    #[test]
    fn noise_domination() {
        assert!(noise_dominated(&[0.05, 0.04, 0.045], &[0.02, 0.02, 0.02]));
        assert!(!noise_dominated(&[0.05, 0.01, 0.045], &[0.01, 0.01, 0.01]));
    }
}
