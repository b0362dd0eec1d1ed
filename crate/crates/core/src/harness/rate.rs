use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{dkw_radius, edge_rescale, empirical_cdf, fit_rate, ks_distance, noise_dominated, ClampCounts, EdgeMode, RateFit, DKW_ALPHA};
use crate::ensembles::{sample_replicate, EnsembleSpec, EntryLaw, LawDescriptor};
use crate::error::{Error, Result};
use crate::fredholm::{self, finite_n_gue_curve, tw_curve, DistributionCurve, MAX_FINITE_N};
use crate::linalg::{eigvalsh, Beta, HermitianMatrix};

pub const MIN_REPLICAS: usize = 100;

/// Symmetry class and entry law; the dimension comes from `n_list`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub beta: Beta,
    #[serde(default = "EntryLaw::gaussian")]
    pub law: EntryLaw,
}

impl EnsembleConfig {
    pub fn spec(&self, n: usize) -> Result<EnsembleSpec> {
        EnsembleSpec::new(self.beta, n, self.law.clone())
    }

    /// Short form used on the command line: `gue`, `goe`, or
    /// `<law>[(<p>,...)]/<beta>`, e.g. `rademacher/1`, `shifted-bernoulli(0.2)/2`.
    pub fn parse_short(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gue" => return Ok(EnsembleConfig { beta: Beta::Complex, law: EntryLaw::gaussian() }),
            "goe" => return Ok(EnsembleConfig { beta: Beta::Real, law: EntryLaw::gaussian() }),
            _ => {}
        }
        let bad = || Error::validation(format!("cannot parse ensemble `{s}` (expected gue, goe or <law>[(<params>)]/<beta>)"));
        let (law, beta) = s.rsplit_once('/').ok_or_else(bad)?;
        let beta = Beta::try_from(beta.trim().parse::<u8>().map_err(|_| bad())?)?;
        let (name, params) = match law.split_once('(') {
            Some((name, rest)) => {
                let inner = rest.strip_suffix(')').ok_or_else(bad)?;
                let params = inner
                    .split(',')
                    .filter(|p| !p.trim().is_empty())
                    .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()?;
                (name, params)
            }
            None => (law, vec![]),
        };
        let law = EntryLaw::try_from(LawDescriptor { name: name.trim().to_string(), params, diag_variance: None, complex: None })?;
        Ok(EnsembleConfig { beta, law })
    }

    pub fn label(&self) -> Result<String> {
        Ok(self.spec(2)?.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub step: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { r_min: -6.0, r_max: 4.0, step: 0.02 }
    }
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>> {
        fredholm::grid(self.r_min, self.r_max, self.step)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    /// Monte Carlo: empirical law of the rescaled top eigenvalue vs `TW_beta`.
    Mc,
    /// Deterministic: finite-`N` GUE Fredholm CDF vs `TW_2`.
    Fredholm,
}

impl Channel {
    pub fn as_str(self) -> &'static str {
        match self {
            Channel::Mc => "mc",
            Channel::Fredholm => "fredholm",
        }
    }
}

fn default_r0() -> f64 {
    -3.5
}
fn default_seed() -> u64 {
    1
}
fn default_threads() -> usize {
    1
}
fn default_channels() -> Vec<Channel> {
    vec![Channel::Mc]
}

/// Rate-scan experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub ensemble: EnsembleConfig,
    pub n_list: Vec<usize>,
    pub replicas: usize,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default = "default_r0")]
    pub r0: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_threads")]
    pub threads: usize,
    #[serde(default)]
    pub mode: EdgeMode,
    #[serde(default = "default_channels")]
    pub channels: Vec<Channel>,
    /// Fredholm quadrature order.
    #[serde(default = "default_order")]
    pub order: usize,
}

fn default_order() -> usize {
    fredholm::DEFAULT_ORDER
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() {
            return Err(Error::validation("n_list is empty"));
        }
        if !self.n_list.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::validation("n_list must be strictly ascending"));
        }
        for &n in &self.n_list {
            self.ensemble.spec(n)?;
        }
        if self.channels.contains(&Channel::Mc) && self.replicas < MIN_REPLICAS {
            return Err(Error::validation(format!(
                "need >= {MIN_REPLICAS} replicas per N, got {} (DKW floor {:.4})",
                self.replicas,
                dkw_radius(self.replicas.max(1), DKW_ALPHA)
            )));
        }
        let g = self.grid.points()?;
        if !(self.r0 >= g[0] && self.r0 < g[g.len() - 1]) {
            return Err(Error::validation(format!("r0 = {} must lie within the grid [{}, {}]", self.r0, g[0], g[g.len() - 1])));
        }
        if self.threads == 0 {
            return Err(Error::validation("threads must be >= 1"));
        }
        if self.mode == EdgeMode::GoeRefined && self.ensemble.beta != Beta::Real {
            return Err(Error::validation("goe_refined scaling applies to beta = 1 only"));
        }
        if self.channels.contains(&Channel::Fredholm) {
            let gue = self.ensemble.beta == Beta::Complex;
            if !gue {
                return Err(Error::validation("the fredholm channel is available for beta = 2 only"));
            }
            if let Some(&n) = self.n_list.iter().find(|&&n| n > MAX_FINITE_N) {
                return Err(Error::validation(format!("fredholm channel supports N <= {MAX_FINITE_N}, got {n}")));
            }
        }
        if self.channels.is_empty() {
            return Err(Error::validation("no channels selected"));
        }
        Ok(())
    }
}

/// One line of the rate-scan CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub ensemble: String,
    pub beta: u8,
    pub n: usize,
    pub replicas: usize,
    pub ks: f64,
    pub dkw_radius: f64,
    pub channel: Channel,
    #[serde(default)]
    pub clamped: ClampCounts,
}

/// Exponent fit per channel, or the reason it was withheld.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelFit {
    pub channel: Channel,
    pub fit: Option<RateFit>,
    pub refused: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateScanResult {
    pub rows: Vec<RateRow>,
    pub fits: Vec<ChannelFit>,
}

/// Run `f` on a dedicated pool of `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::validation(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn lambda_max(h: &HermitianMatrix) -> Result<f64> {
    let v = match h {
        HermitianMatrix::Real(m) => eigvalsh(m)?,
        HermitianMatrix::Complex(m) => eigvalsh(m)?,
    };
    Ok(v[v.len() - 1])
}

/// Rescaled top eigenvalues of replicates `0..replicas` (replicate order).
pub fn rescaled_top_eigenvalues(spec: &EnsembleSpec, replicas: usize, seed: u64, mode: EdgeMode) -> Result<Vec<f64>> {
    (0..replicas as u64)
        .into_par_iter()
        .map(|r| edge_rescale(lambda_max(&sample_replicate(spec, seed, r)?)?, spec.dim, spec.beta, mode))
        .collect()
}

/// KS distances per `N` and channel, plus log-log rate fits.
pub fn rate_scan(cfg: &ExperimentConfig) -> Result<RateScanResult> {
    cfg.validate()?;
    with_threads(cfg.threads, || rate_scan_inner(cfg))?
}

fn rate_scan_inner(cfg: &ExperimentConfig) -> Result<RateScanResult> {
    let grid = cfg.grid.points()?;
    let beta = cfg.ensemble.beta;
    let label = cfg.ensemble.label()?;
    let tw = tw_curve(beta, &grid, cfg.order)?;
    let mut rows = Vec::new();
    for &n in &cfg.n_list {
        for &ch in &cfg.channels {
            let row = match ch {
                Channel::Mc => {
                    let spec = cfg.ensemble.spec(n)?;
                    let vals = rescaled_top_eigenvalues(&spec, cfg.replicas, cfg.seed, cfg.mode)?;
                    let (emp, clamped) = empirical_cdf(&vals, &grid, beta)?;
                    RateRow {
                        ensemble: label.clone(),
                        beta: beta.as_u8(),
                        n,
                        replicas: cfg.replicas,
                        ks: ks_distance(&emp, &tw, cfg.r0)?,
                        dkw_radius: dkw_radius(cfg.replicas, DKW_ALPHA),
                        channel: ch,
                        clamped,
                    }
                }
                Channel::Fredholm => {
                    let fin = finite_n_gue_curve(n, &grid, cfg.order)?;
                    RateRow {
                        ensemble: label.clone(),
                        beta: beta.as_u8(),
                        n,
                        replicas: 0,
                        ks: ks_distance(&fin, &tw, cfg.r0)?,
                        dkw_radius: 0.0,
                        channel: ch,
                        clamped: ClampCounts::default(),
                    }
                }
            };
            rows.push(row);
        }
    }
    let mut fits = Vec::new();
    for &ch in &cfg.channels {
        let mine: Vec<&RateRow> = rows.iter().filter(|r| r.channel == ch).collect();
        let ns: Vec<usize> = mine.iter().map(|r| r.n).collect();
        let ds: Vec<f64> = mine.iter().map(|r| r.ks).collect();
        let radii: Vec<f64> = mine.iter().map(|r| r.dkw_radius).collect();
        let fit = if ns.len() < 3 {
            ChannelFit { channel: ch, fit: None, refused: Some("fewer than 3 N values".into()) }
        } else if noise_dominated(&ds, &radii) {
            ChannelFit {
                channel: ch,
                fit: None,
                refused: Some("all pairwise distance differences are within DKW radii".into()),
            }
        } else {
            ChannelFit { channel: ch, fit: Some(fit_rate(&ns, &ds, cfg.seed)?), refused: None }
        };
        fits.push(fit);
    }
    Ok(RateScanResult { rows, fits })
}

/// CSV with columns `ensemble,beta,N,replicas,ks,dkw_radius,channel`.
pub fn write_rate_csv<W: std::io::Write>(mut w: W, rows: &[RateRow]) -> Result<()> {
    writeln!(w, "ensemble,beta,N,replicas,ks,dkw_radius,channel")?;
    for r in rows {
        writeln!(w, "{},{},{},{},{:e},{:e},{}", r.ensemble, r.beta, r.n, r.replicas, r.ks, r.dkw_radius, r.channel.as_str())?;
    }
    Ok(())
}

/// Empirical curve of the rescaled top eigenvalue for one `N`, for callers
/// that compare against other references.
pub fn empirical_top_curve(spec: &EnsembleSpec, replicas: usize, seed: u64, mode: EdgeMode, grid: &[f64]) -> Result<(DistributionCurve, ClampCounts)> {
    let vals = rescaled_top_eigenvalues(spec, replicas, seed, mode)?;
    empirical_cdf(&vals, grid, spec.beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_ensembles() {
        assert_eq!(EnsembleConfig::parse_short("GUE").unwrap().label().unwrap(), "GUE");
        let r = EnsembleConfig::parse_short("rademacher/1").unwrap();
        assert_eq!(r.beta, Beta::Real);
        let b = EnsembleConfig::parse_short("shifted-bernoulli(0.2)/2").unwrap();
        assert_eq!(b.law.parameters, vec![0.2]);
        assert!(EnsembleConfig::parse_short("rademacher/4").is_err());
        assert!(EnsembleConfig::parse_short("nope/1").is_err());
        assert!(EnsembleConfig::parse_short("goe2").is_err());
    }

    #[test]
    fn config_validation() {
        let ok: ExperimentConfig =
            serde_json::from_str(r#"{"ensemble": {"beta": 2}, "n_list": [50, 100, 200], "replicas": 100}"#).unwrap();
        ok.validate().unwrap();
        let mut c = ok.clone();
        c.replicas = 99;
        assert!(c.validate().is_err());
        let mut c = ok.clone();
        c.n_list = vec![100, 50];
        assert!(c.validate().is_err());
        let mut c = ok.clone();
        c.mode = EdgeMode::GoeRefined;
        assert!(c.validate().is_err());
        let mut c = ok;
        c.channels = vec![Channel::Fredholm];
        c.n_list = vec![100, 800];
        assert!(c.validate().is_err());
    }
}
