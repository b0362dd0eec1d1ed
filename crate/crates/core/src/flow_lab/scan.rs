//! Monte Carlo probes along the coupled Ornstein–Uhlenbeck flow, and the
//! unmatched-term decay.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bridge::{smooth_cutoff, ObservableX};
use crate::ensembles::{flow_trajectory, sample_replicate, terminal_time, EnsembleSpec};
use crate::error::{Error, Result};
use crate::linalg::eigvalsh;
use crate::linalg::HermitianMatrix;
use crate::spectral::{eigen_decompose, psi, SpectralDomain, SpectralSample};

pub const MIN_FLOW_REPLICAS: usize = 100;
pub const MIN_UNMATCHED_REPLICAS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowObservable {
    /// `Im m_N(t, z)`.
    #[serde(rename = "im_mN", alias = "im_mn", alias = "im_m_n")]
    ImMN,
    /// `F(X(t))` with `X` over `[Re z - 2, kappa2]` at height `Im z`.
    #[serde(rename = "F_of_X", alias = "f_of_x")]
    FOfX,
    /// `Im (1/N^2) sum_{a,b} G_ab G_ba = Im (1/N^2) sum_j (l_j - z)^{-2}`.
    Type0Trace,
}

impl FlowObservable {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "im_mN" | "im_mn" | "im_m_n" => Ok(FlowObservable::ImMN),
            "F_of_X" | "f_of_x" => Ok(FlowObservable::FOfX),
            "type0_trace" => Ok(FlowObservable::Type0Trace),
            other => Err(Error::validation(format!("unknown flow observable `{other}`"))),
        }
    }
}

/// Flow-scan design: times, spectral points and replicas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowScan {
    pub t_grid: Vec<f64>,
    pub z_list: Vec<Complex64>,
    pub replicas: usize,
    pub epsilon: f64,
    pub c0: f64,
    /// Upper edge offset for `F_of_X`; defaults to `C0 N^{-2/3+eps}`.
    #[serde(default)]
    pub kappa2: Option<f64>,
}

impl FlowScan {
    /// `points` times evenly spaced over `[0, 8 log N]`.
    pub fn uniform_times(n: usize, points: usize) -> Vec<f64> {
        let t = terminal_time(n);
        (0..points).map(|k| t * k as f64 / (points - 1).max(1) as f64).collect()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.replicas < MIN_FLOW_REPLICAS {
            return Err(Error::validation(format!("flow scans need >= {MIN_FLOW_REPLICAS} replicas, got {}", self.replicas)));
        }
        if self.t_grid.first() != Some(&0.0) {
            return Err(Error::validation("t_grid must start at 0"));
        }
        if !self.t_grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::validation("t_grid must be strictly ascending"));
        }
        let tmax = terminal_time(n);
        if *self.t_grid.last().unwrap() > tmax * (1.0 + 1e-12) {
            return Err(Error::validation(format!("t_grid exceeds the terminal time 8 log N = {tmax}")));
        }
        if self.z_list.is_empty() {
            return Err(Error::validation("z_list is empty"));
        }
        let dom = SpectralDomain::edge(self.epsilon, self.c0);
        for &z in &self.z_list {
            dom.require(z, n)?;
        }
        Ok(())
    }

    fn kappa2(&self, n: usize) -> f64 {
        self.kappa2.unwrap_or(self.c0 * (n as f64).powf(-2.0 / 3.0 + self.epsilon))
    }
}

fn observe(sample: &SpectralSample, obs: FlowObservable, z: Complex64, kappa2: f64) -> Result<f64> {
    let nf = sample.dim() as f64;
    Ok(match obs {
        FlowObservable::ImMN => sample.m_n(z)?.im,
        FlowObservable::FOfX => {
            let x = ObservableX { kappa1: z.re - 2.0, kappa2: kappa2.max(z.re - 2.0), eta: z.im };
            smooth_cutoff(x.value(sample))
        }
        FlowObservable::Type0Trace => {
            let s: Complex64 = sample.eigenvalues.iter().map(|&l| 1.0 / ((l - z) * (l - z))).sum();
            (s / (nf * nf)).im
        }
    })
}

/// One `(t, z)` cell of a flow scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowRow {
    pub t: f64,
    pub z: Complex64,
    pub mean: f64,
    pub se: f64,
    /// Paired estimate of `E[O(t)] - E[O(0)]` and its standard error.
    pub diff_mean: f64,
    pub diff_se: f64,
    /// `sqrt(se(t)^2 + se(0)^2)`, the standard error without coupling.
    pub uncoupled_se: f64,
}

/// Per-`z` flatness: `max_t |mean(t) - mean(0)|` and the SE at the maximizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Flatness {
    pub z: Complex64,
    pub max_dev: f64,
    pub se_at_max: f64,
    pub t_at_max: f64,
    /// `max_t mean(t) / N^{-1/3+eps}`.
    pub fitted_c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowScanResult {
    pub n: usize,
    pub observable: FlowObservable,
    pub rows: Vec<FlowRow>,
    pub flatness: Vec<Flatness>,
}

/// Mean and SE over replicas of the observable along coupled trajectories
/// `H(t) = e^{-t/2} H0 + sqrt(1 - e^{-t}) G`, one `(H0, G)` per replica.
pub fn flow_scan(spec: &EnsembleSpec, scan: &FlowScan, observable: FlowObservable, seed: u64) -> Result<FlowScanResult> {
    spec.validate()?;
    let n = spec.dim;
    scan.validate(n)?;
    let (nt, nz) = (scan.t_grid.len(), scan.z_list.len());
    let kappa2 = scan.kappa2(n);
    let per_replica = (0..scan.replicas as u64)
        .into_par_iter()
        .map(|r| {
            let pair = flow_trajectory(spec, seed, seed, r)?;
            let mut v = Vec::with_capacity(nt * nz);
            for &t in &scan.t_grid {
                let s = SpectralSample::from_eigenvalues(eigvals(&pair.at(t)?)?);
                for &z in &scan.z_list {
                    v.push(observe(&s, observable, z, kappa2)?);
                }
            }
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    let m = scan.replicas as f64;
    let stats = |f: &dyn Fn(&Vec<f64>) -> f64| {
        let mean = per_replica.iter().map(f).sum::<f64>() / m;
        let var = per_replica.iter().map(|v| (f(v) - mean).powi(2)).sum::<f64>() / (m - 1.0);
        (mean, (var / m).sqrt())
    };
    let mut rows = Vec::with_capacity(nt * nz);
    for (ti, &t) in scan.t_grid.iter().enumerate() {
        for (zi, &z) in scan.z_list.iter().enumerate() {
            let k = ti * nz + zi;
            let (mean, se) = stats(&|v| v[k]);
            let (_, se0) = stats(&|v| v[zi]);
            let (diff_mean, diff_se) = stats(&|v| v[k] - v[zi]);
            rows.push(FlowRow { t, z, mean, se, diff_mean, diff_se, uncoupled_se: (se * se + se0 * se0).sqrt() });
        }
    }
    let scale = (n as f64).powf(-1.0 / 3.0 + scan.epsilon);
    let flatness = scan
        .z_list
        .iter()
        .enumerate()
        .map(|(zi, &z)| {
            let mine = || rows.iter().skip(zi).step_by(nz);
            let worst = mine().max_by(|a, b| a.diff_mean.abs().total_cmp(&b.diff_mean.abs())).unwrap();
            let top = mine().map(|r| r.mean).fold(f64::NEG_INFINITY, f64::max);
            Flatness { z, max_dev: worst.diff_mean.abs(), se_at_max: worst.diff_se, t_at_max: worst.t, fitted_c: top / scale }
        })
        .collect();
    Ok(FlowScanResult { n, observable, rows, flatness })
}

fn eigvals(h: &HermitianMatrix) -> Result<Vec<f64>> {
    match h {
        HermitianMatrix::Real(m) => eigvalsh(m),
        HermitianMatrix::Complex(m) => eigvalsh(m),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnmatchedTerm {
    /// `(1/N^2) sum_{a,b} G_ab G_ba G_ab`.
    Unmatched,
    /// `(1/N^2) sum_{a,b} G_aa G_bb G_aa`, the matched analogue.
    DiagonalAnalogue,
}

/// Monte Carlo estimate at one `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnmatchedRow {
    pub n: usize,
    pub z: Complex64,
    pub mean: Complex64,
    /// `|mean|` and its standard error `sqrt((var Re + var Im) / replicas)`.
    pub estimate: f64,
    pub se: f64,
    /// `Psi(z)^3`.
    pub naive_psi3: f64,
}

fn unmatched_value(g: &[Complex64], n: usize, term: UnmatchedTerm) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    match term {
        UnmatchedTerm::Unmatched => {
            for a in 0..n {
                for b in 0..n {
                    let gab = g[a * n + b];
                    s += gab * gab * g[b * n + a];
                }
            }
        }
        UnmatchedTerm::DiagonalAnalogue => {
            let tr: Complex64 = (0..n).map(|b| g[b * n + b]).sum();
            let sq: Complex64 = (0..n).map(|a| g[a * n + a] * g[a * n + a]).sum();
            s = sq * tr;
        }
    }
    s / (n * n) as f64
}

/// `|E[(1/N^2) sum G_ab G_ba G_ab]|` per `N`; `z_for(N)` must lie in `S(eps)`.
pub fn unmatched_probe(
    base: &EnsembleSpec,
    n_list: &[usize],
    z_for: impl Fn(usize) -> Complex64 + Sync,
    epsilon: f64,
    replicas: usize,
    term: UnmatchedTerm,
    seed: u64,
) -> Result<Vec<UnmatchedRow>> {
    if replicas < MIN_UNMATCHED_REPLICAS {
        return Err(Error::validation(format!("unmatched probes need >= {MIN_UNMATCHED_REPLICAS} replicas, got {replicas}")));
    }
    n_list
        .iter()
        .map(|&n| {
            let spec = EnsembleSpec { dim: n, ..base.clone() };
            spec.validate()?;
            let z = z_for(n);
            SpectralDomain::s(epsilon).require(z, n)?;
            let vals = (0..replicas as u64)
                .into_par_iter()
                .map(|r| {
                    let s = eigen_decompose(&sample_replicate(&spec, seed, r)?, true)?;
                    Ok(unmatched_value(&s.green_matrix(z)?, n, term))
                })
                .collect::<Result<Vec<_>>>()?;
            let m = replicas as f64;
            let mean: Complex64 = vals.iter().sum::<Complex64>() / m;
            let var = vals.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / (m - 1.0);
            Ok(UnmatchedRow { n, z, mean, estimate: mean.norm(), se: (var / m).sqrt(), naive_psi3: psi(z, n)?.powi(3) })
        })
        .collect()
}

/// Default probe point `z = i N^{-1/2}`.
pub fn default_unmatched_z(n: usize) -> Complex64 {
    Complex64::new(0.0, (n as f64).powf(-0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Beta;

    #[test]
    fn scan_validation() {
        let n = 50;
        let w = (n as f64).powf(-2.0 / 3.0 + 0.05);
        let mut scan = FlowScan {
            t_grid: FlowScan::uniform_times(n, 3),
            z_list: vec![Complex64::new(2.0, 0.5 * w)],
            replicas: 100,
            epsilon: 0.05,
            c0: 1.0,
            kappa2: None,
        };
        assert!(scan.validate(n).is_ok());
        scan.z_list[0] = Complex64::new(0.0, 0.5 * w);
        assert!(scan.validate(n).is_err());
        scan.z_list[0] = Complex64::new(2.0, 0.5 * w);
        scan.t_grid[0] = 0.1;
        assert!(scan.validate(n).is_err());
    }

    #[test]
    fn diagonal_analogue_matches_spectral_form() {
        let spec = EnsembleSpec::gaussian(Beta::Complex, 30).unwrap();
        let s = eigen_decompose(&sample_replicate(&spec, 1, 0).unwrap(), true).unwrap();
        let z = Complex64::new(0.1, 0.3);
        let g = s.green_matrix(z).unwrap();
        let d = unmatched_value(&g, 30, UnmatchedTerm::DiagonalAnalogue);
        let direct: Complex64 =
            (0..30).flat_map(|a| (0..30).map(move |b| (a, b))).map(|(a, b)| g[a * 31] * g[b * 31] * g[a * 31]).sum();
        assert!((d - direct / 900.0).norm() < 1e-13);
    }
}
