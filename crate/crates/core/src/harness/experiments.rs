//! Configurations and runners behind the `rmt-edgelab` subcommands (other
//! than `rate-scan`). Every config is plain JSON; unknown keys are rejected.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rate::{with_threads, EnsembleConfig, GridSpec};
use super::stats::{fit_rate, RateFit};
use crate::bridge::{sandwich_check, smoothed_count_dual, BridgeParams, SandwichRecord};
use crate::ensembles::{sample_replicate, write_container_file, write_csv as write_matrix_csv};
use crate::error::{Error, Result};
use crate::flow_lab::{
    self, all_perms, value_from_table, Flatness, FlowObservable, FlowRow, FlowScan, Perm, UnmatchedRow, UnmatchedTerm,
    WeingartenTable, WeingartenValue,
};
use crate::fredholm::{self, finite_n_gue_curve, tw_curve, MAX_FINITE_N};
use crate::kernels::KernelOperator;
use crate::linalg::Beta;
use crate::spectral::{eigen_decompose, SpectralSample};

fn one() -> usize {
    1
}
fn seed1() -> u64 {
    1
}
fn order() -> usize {
    fredholm::DEFAULT_ORDER
}

/// `sample`: draw matrices, write containers (or CSV) and eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    pub ensemble: EnsembleConfig,
    pub n: usize,
    #[serde(default = "one")]
    pub count: usize,
    #[serde(default = "seed1")]
    pub seed: u64,
    #[serde(default)]
    pub format: MatrixFormat,
    #[serde(default = "yes")]
    pub eigenvalues: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MatrixFormat {
    #[default]
    Container,
    Csv,
}

/// Files written by [`run_sample`], relative to the output directory.
pub fn run_sample(cfg: &SampleConfig, out_dir: &std::path::Path) -> Result<Vec<String>> {
    let spec = cfg.ensemble.spec(cfg.n)?;
    if cfg.count == 0 {
        return Err(Error::validation("count must be >= 1"));
    }
    let mut written = Vec::new();
    for r in 0..cfg.count as u64 {
        let h = sample_replicate(&spec, cfg.seed, r)?;
        let name = match cfg.format {
            MatrixFormat::Container => {
                let name = format!("matrix_{r}.rmt");
                write_container_file(&out_dir.join(&name), &h)?;
                name
            }
            MatrixFormat::Csv => {
                let name = format!("matrix_{r}.csv");
                write_matrix_csv(std::io::BufWriter::new(std::fs::File::create(out_dir.join(&name))?), &h)?;
                name
            }
        };
        written.push(name);
        if cfg.eigenvalues {
            let s = eigen_decompose(&h, false)?;
            let name = format!("eigenvalues_{r}.csv");
            s.write_csv(std::io::BufWriter::new(std::fs::File::create(out_dir.join(&name))?))?;
            written.push(name);
        }
    }
    Ok(written)
}

/// `tw`: Tracy–Widom CDF on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwConfig {
    pub beta: Beta,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default = "order")]
    pub order: usize,
    #[serde(default = "one")]
    pub threads: usize,
}

pub fn run_tw<W: Write>(cfg: &TwConfig, mut w: W) -> Result<()> {
    let g = cfg.grid.points()?;
    let c = with_threads(cfg.threads, || tw_curve(cfg.beta, &g, cfg.order))??;
    writeln!(w, "r,cdf")?;
    for (r, v) in c.grid.iter().zip(&c.cdf) {
        writeln!(w, "{r},{v:e}")?;
    }
    Ok(())
}

/// `finite-n`: GUE finite-`N` CDF next to `TW_2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteNConfig {
    pub n: usize,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default = "r0")]
    pub r0: f64,
    #[serde(default = "order")]
    pub order: usize,
    #[serde(default = "one")]
    pub threads: usize,
}

fn r0() -> f64 {
    -3.5
}

/// Writes `N,r,cdf,tw2,gap` and returns `sup_{r >= r0} |diff|`.
pub fn run_finite_n<W: Write>(cfg: &FiniteNConfig, mut w: W) -> Result<f64> {
    if cfg.n == 0 || cfg.n > MAX_FINITE_N {
        return Err(Error::validation(format!("finite-n needs 1 <= N <= {MAX_FINITE_N}, got {}", cfg.n)));
    }
    let g = cfg.grid.points()?;
    let (fin, tw) = with_threads(cfg.threads, || -> Result<_> {
        Ok((finite_n_gue_curve(cfg.n, &g, cfg.order)?, tw_curve(Beta::Complex, &g, cfg.order)?))
    })??;
    writeln!(w, "N,r,cdf,tw2,gap")?;
    let mut sup = 0.0f64;
    for i in 0..g.len() {
        let d = fin.cdf[i] - tw.cdf[i];
        if g[i] >= cfg.r0 {
            sup = sup.max(d.abs());
        }
        writeln!(w, "{},{},{:e},{:e},{:e}", cfg.n, g[i], fin.cdf[i], tw.cdf[i], d)?;
    }
    Ok(sup)
}

/// `kernel-check`: `|K_N^edge(x, y) - K_airy(x, y)|` over `N`, with an
/// exponent fit per point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelCheckConfig {
    #[serde(default = "kernel_ns")]
    pub n_list: Vec<usize>,
    #[serde(default = "origin")]
    pub points: Vec<[f64; 2]>,
}

fn kernel_ns() -> Vec<usize> {
    vec![50, 100, 200, 400]
}
fn origin() -> Vec<[f64; 2]> {
    vec![[0.0, 0.0]]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelGapRow {
    pub n: usize,
    pub x: f64,
    pub y: f64,
    pub edge: f64,
    pub airy: f64,
    pub gap: f64,
}

pub fn run_kernel_check(cfg: &KernelCheckConfig) -> Result<(Vec<KernelGapRow>, Vec<Option<RateFit>>)> {
    if cfg.n_list.is_empty() || cfg.points.is_empty() {
        return Err(Error::validation("kernel-check needs a non-empty n_list and points"));
    }
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for &[x, y] in &cfg.points {
        let airy = KernelOperator::Airy.eval(x, y)?;
        let mut gaps = Vec::new();
        for &n in &cfg.n_list {
            let edge = KernelOperator::Edge { n }.eval(x, y)?;
            let gap = (edge - airy).abs();
            gaps.push(gap);
            rows.push(KernelGapRow { n, x, y, edge, airy, gap });
        }
        fits.push(if cfg.n_list.len() >= 3 && gaps.iter().all(|&g| g > 0.0) { Some(fit_rate(&cfg.n_list, &gaps, 0)?) } else { None });
    }
    Ok((rows, fits))
}

pub fn write_kernel_csv<W: Write>(mut w: W, rows: &[KernelGapRow]) -> Result<()> {
    writeln!(w, "N,x,y,value,airy_value,gap")?;
    for r in rows {
        writeln!(w, "{},{},{},{:e},{:e},{:e}", r.n, r.x, r.y, r.edge, r.airy, r.gap)?;
    }
    Ok(())
}

/// `bridge-check`: dual-path smoothed counts and the sandwich bounds per seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BridgeCheckConfig {
    pub n: usize,
    #[serde(default = "eps")]
    pub epsilon: f64,
    #[serde(default = "seeds")]
    pub seeds: usize,
    #[serde(default = "gue")]
    pub ensemble: EnsembleConfig,
    /// Energy `E`; defaults to the edge `2`.
    #[serde(default = "two")]
    pub e: f64,
    /// Constant of the mollifier inequality.
    #[serde(default = "ten")]
    pub c: f64,
    #[serde(default = "seed1")]
    pub seed: u64,
    #[serde(default = "one")]
    pub threads: usize,
}

fn eps() -> f64 {
    0.05
}
fn seeds() -> usize {
    500
}
fn gue() -> EnsembleConfig {
    EnsembleConfig { beta: Beta::Complex, law: crate::ensembles::EntryLaw::gaussian() }
}
fn two() -> f64 {
    2.0
}
fn ten() -> f64 {
    10.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BridgeSeedRecord {
    pub replicate: u64,
    pub eigen_sum: f64,
    pub quadrature: f64,
    pub rel_diff: f64,
    #[serde(flatten)]
    pub sandwich: SandwichRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BridgeSummary {
    pub n: usize,
    pub epsilon: f64,
    pub seeds: usize,
    pub params: BridgeParams,
    pub max_rel_dual: f64,
    /// Fraction of seeds where both sides of the sandwich hold with slack `N^{-eps}`.
    pub sandwich_pass_fraction: f64,
    /// 99th percentile and maximum of the per-seed fitted constants.
    pub fitted_c_q99: f64,
    pub fitted_c_max: f64,
    pub mollifier_pass_fraction: f64,
}

pub fn run_bridge_check(cfg: &BridgeCheckConfig) -> Result<(Vec<BridgeSeedRecord>, BridgeSummary)> {
    let params = BridgeParams::new(cfg.n, cfg.epsilon, cfg.e)?;
    let spec = cfg.ensemble.spec(cfg.n)?;
    if cfg.seeds == 0 {
        return Err(Error::validation("seeds must be >= 1"));
    }
    let recs = with_threads(cfg.threads, || {
        (0..cfg.seeds as u64)
            .into_par_iter()
            .map(|r| {
                let s = eigen_decompose(&sample_replicate(&spec, cfg.seed, r)?, false)?;
                let d = smoothed_count_dual(&s, &params)?;
                Ok(BridgeSeedRecord {
                    replicate: r,
                    eigen_sum: d.eigen_sum,
                    quadrature: d.quadrature,
                    rel_diff: d.rel_diff(),
                    sandwich: sandwich_check(&s, &params, cfg.c)?,
                })
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let m = recs.len() as f64;
    let mut cs: Vec<f64> = recs.iter().map(|r| r.sandwich.fitted_c).collect();
    cs.sort_by(f64::total_cmp);
    let q99 = cs[((0.99 * (cs.len() - 1) as f64).ceil()) as usize];
    let summary = BridgeSummary {
        n: cfg.n,
        epsilon: cfg.epsilon,
        seeds: cfg.seeds,
        params,
        max_rel_dual: recs.iter().map(|r| r.rel_diff).fold(0.0, f64::max),
        sandwich_pass_fraction: recs.iter().filter(|r| r.sandwich.lhs_ok && r.sandwich.rhs_ok).count() as f64 / m,
        fitted_c_q99: q99,
        fitted_c_max: cs[cs.len() - 1],
        mollifier_pass_fraction: recs.iter().filter(|r| r.sandwich.mollifier_ok).count() as f64 / m,
    };
    Ok((recs, summary))
}

/// `flow-scan`: observables along the coupled flow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowScanConfig {
    pub ensemble: EnsembleConfig,
    pub n: usize,
    /// Explicit times (starting at 0); otherwise `t_points` evenly over `[0, 8 log N]`.
    #[serde(default)]
    pub t_grid: Option<Vec<f64>>,
    #[serde(default = "t_points")]
    pub t_points: usize,
    /// Spectral points `[re, im]`.
    #[serde(default)]
    pub z_list: Option<Vec<Complex64>>,
    /// Spectral points in edge units `[a, b]`: `z = 2 + a w + i b w`, `w = N^{-2/3+eps}`.
    #[serde(default)]
    pub z_edge: Option<Vec<[f64; 2]>>,
    pub replicas: usize,
    #[serde(default = "eps")]
    pub epsilon: f64,
    #[serde(default = "c0")]
    pub c0: f64,
    #[serde(default = "im_mn")]
    pub observable: FlowObservable,
    #[serde(default)]
    pub kappa2: Option<f64>,
    #[serde(default = "seed1")]
    pub seed: u64,
    #[serde(default = "one")]
    pub threads: usize,
}

fn t_points() -> usize {
    5
}
fn c0() -> f64 {
    1.0
}
fn im_mn() -> FlowObservable {
    FlowObservable::ImMN
}

impl FlowScanConfig {
    pub fn scan(&self) -> Result<FlowScan> {
        let w = (self.n as f64).powf(-2.0 / 3.0 + self.epsilon);
        let z_list = match (&self.z_list, &self.z_edge) {
            (Some(z), None) => z.clone(),
            (None, Some(e)) => e.iter().map(|&[a, b]| Complex64::new(2.0 + a * w, b * w)).collect(),
            (None, None) => vec![Complex64::new(2.0, 0.5 * w)],
            (Some(_), Some(_)) => return Err(Error::validation("give either z_list or z_edge, not both")),
        };
        let t_grid = match &self.t_grid {
            Some(t) => t.clone(),
            None if self.t_points >= 2 => FlowScan::uniform_times(self.n, self.t_points),
            None => return Err(Error::validation("t_points must be >= 2")),
        };
        Ok(FlowScan { t_grid, z_list, replicas: self.replicas, epsilon: self.epsilon, c0: self.c0, kappa2: self.kappa2 })
    }
}

pub fn run_flow_scan(cfg: &FlowScanConfig) -> Result<flow_lab::FlowScanResult> {
    let spec = cfg.ensemble.spec(cfg.n)?;
    let scan = cfg.scan()?;
    with_threads(cfg.threads, || flow_lab::flow_scan(&spec, &scan, cfg.observable, cfg.seed))?
}

pub fn write_flow_csv<W: Write>(mut w: W, rows: &[FlowRow]) -> Result<()> {
    writeln!(w, "t,z_re,z_im,mean,se")?;
    for r in rows {
        writeln!(w, "{},{},{},{:e},{:e}", r.t, r.z.re, r.z.im, r.mean, r.se)?;
    }
    Ok(())
}

/// Flow flatness verdict: `max_dev <= k SE + N^{-1/3 + margin}`.
pub fn flat_within(f: &Flatness, n: usize, k_se: f64, margin: f64) -> bool {
    f.max_dev <= k_se * f.se_at_max + (n as f64).powf(-1.0 / 3.0 + margin)
}

/// `unmatched`: decay of the unmatched average over `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnmatchedConfig {
    #[serde(default = "gue")]
    pub ensemble: EnsembleConfig,
    #[serde(default = "unmatched_ns")]
    pub n_list: Vec<usize>,
    #[serde(default = "unmatched_reps")]
    pub replicas: usize,
    /// `z = E + i N^{eta_exponent}`.
    #[serde(default)]
    pub energy: f64,
    #[serde(default = "half")]
    pub eta_exponent: f64,
    #[serde(default = "eps")]
    pub epsilon: f64,
    #[serde(default = "unmatched_term")]
    pub term: UnmatchedTerm,
    #[serde(default = "seed1")]
    pub seed: u64,
    #[serde(default = "one")]
    pub threads: usize,
}

fn unmatched_ns() -> Vec<usize> {
    vec![100, 200, 400]
}
fn unmatched_reps() -> usize {
    500
}
fn half() -> f64 {
    -0.5
}
fn unmatched_term() -> UnmatchedTerm {
    UnmatchedTerm::Unmatched
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnmatchedSummary {
    pub estimate_fit: Option<RateFit>,
    pub naive_fit: Option<RateFit>,
    /// Every estimate lies more than 3 SE below `Psi^3`.
    pub separated: bool,
}

pub fn run_unmatched(cfg: &UnmatchedConfig) -> Result<(Vec<UnmatchedRow>, UnmatchedSummary)> {
    if !cfg.n_list.windows(2).all(|w| w[0] < w[1]) || cfg.n_list.is_empty() {
        return Err(Error::validation("n_list must be non-empty and strictly ascending"));
    }
    let spec = cfg.ensemble.spec(cfg.n_list[0].max(2))?;
    let z_for = |n: usize| Complex64::new(cfg.energy, (n as f64).powf(cfg.eta_exponent));
    let rows = with_threads(cfg.threads, || {
        flow_lab::unmatched_probe(&spec, &cfg.n_list, z_for, cfg.epsilon, cfg.replicas, cfg.term, cfg.seed)
    })??;
    let ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    let fit = |v: Vec<f64>| if ns.len() >= 3 { fit_rate(&ns, &v, cfg.seed).ok() } else { None };
    let summary = UnmatchedSummary {
        estimate_fit: fit(rows.iter().map(|r| r.estimate).collect()),
        naive_fit: fit(rows.iter().map(|r| r.naive_psi3).collect()),
        separated: rows.iter().all(|r| r.estimate + 3.0 * r.se < r.naive_psi3),
    };
    Ok((rows, summary))
}

pub fn write_unmatched_csv<W: Write>(mut w: W, rows: &[UnmatchedRow]) -> Result<()> {
    writeln!(w, "N,estimate,se,naive_psi3")?;
    for r in rows {
        writeln!(w, "{},{:e},{:e},{:e}", r.n, r.estimate, r.se, r.naive_psi3)?;
    }
    Ok(())
}

/// `weingarten`: table of `Wg(N, gamma)` and its Catalan asymptotics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeingartenConfig {
    pub n: usize,
    pub dims: Vec<usize>,
    /// Cycle notation; defaults to one representative per cycle type.
    #[serde(default)]
    pub gammas: Option<Vec<String>>,
}

/// One permutation per cycle type of `S_n`.
pub fn class_representatives(n: usize) -> Vec<Perm> {
    let mut reps: Vec<Perm> = Vec::new();
    for p in all_perms(n) {
        if !reps.iter().any(|q| q.cycle_type() == p.cycle_type()) {
            reps.push(p);
        }
    }
    reps
}

pub fn run_weingarten(cfg: &WeingartenConfig) -> Result<(Vec<WeingartenValue>, Vec<f64>)> {
    if cfg.dims.is_empty() {
        return Err(Error::validation("dims is empty"));
    }
    let gammas = match &cfg.gammas {
        Some(g) => g.iter().map(|s| Perm::parse_cycles(s, cfg.n)).collect::<Result<Vec<_>>>()?,
        None => class_representatives(cfg.n),
    };
    let mut rows = Vec::new();
    let mut residuals = Vec::new();
    for &dim in &cfg.dims {
        let t = WeingartenTable::new(cfg.n, dim)?;
        residuals.push(t.orthogonality_residual());
        for g in &gammas {
            rows.push(value_from_table(&t, g)?);
        }
    }
    Ok((rows, residuals))
}

pub fn write_weingarten_csv<W: Write>(mut w: W, rows: &[WeingartenValue]) -> Result<()> {
    writeln!(w, "n,N,gamma_cycles,wg,wg_asymptotic")?;
    for r in rows {
        writeln!(w, "{},{},{},{:e},{:e}", r.n, r.dim, r.gamma_cycles, r.wg, r.wg_asymptotic)?;
    }
    Ok(())
}

/// Top eigenvalue helper for ad-hoc checks.
pub fn top_eigenvalue(sample: &SpectralSample) -> f64 {
    sample.lambda_max()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_reps_of_s4() {
        let r = class_representatives(4);
        assert_eq!(r.len(), 5);
    }

    #[test]
    fn configs_reject_unknown_keys() {
        let e: std::result::Result<TwConfig, _> = serde_json::from_str(r#"{"beta": 2, "bogus": 1}"#);
        assert!(e.is_err());
        let ok: TwConfig = serde_json::from_str(r#"{"beta": 1}"#).unwrap();
        assert_eq!(ok.grid, GridSpec::default());
    }
}
