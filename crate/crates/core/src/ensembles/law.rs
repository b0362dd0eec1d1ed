use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Beta;

/// Highest moment order stored with every law.
pub const STORED_MOMENTS: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LawName {
    Gaussian,
    Rademacher,
    Uniform,
    ShiftedBernoulli,
    Custom,
}

impl LawName {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "gaussian" => LawName::Gaussian,
            "rademacher" => LawName::Rademacher,
            "uniform" => LawName::Uniform,
            "shifted-bernoulli" => LawName::ShiftedBernoulli,
            "custom" => LawName::Custom,
            other => return Err(Error::UnknownLaw(other.to_string())),
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LawName::Gaussian => "gaussian",
            LawName::Rademacher => "rademacher",
            LawName::Uniform => "uniform",
            LawName::ShiftedBernoulli => "shifted-bernoulli",
            LawName::Custom => "custom",
        }
    }
}

/// Law of a scaled entry `sqrt(N) h` (mean 0, variance 1).
///
/// Complex (`beta = 2`) off-diagonal entries are `(X + i Y) / sqrt 2` with
/// `X`, `Y` independent copies of the real law, which gives
/// `E|h|^2 = 1` and `E h^2 = 0`. Diagonal entries are real draws of the same
/// law scaled to variance `diag_variance` (default `2 / beta`, the Gaussian
/// ensembles' convention).
///
/// Parameters:
/// * `shifted-bernoulli`: `[p]`, the two-point law on `{sqrt((1-p)/p), -sqrt(p/(1-p))}`
///   with weights `p`, `1-p`; third cumulant `(1 - 2p) / sqrt(p (1 - p))`;
/// * `custom`: quantile values `Q(u_i)` at equally spaced `u_i = i/(m-1)`,
///   sampled by linear interpolation of the quantile function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LawDescriptor", into = "LawDescriptor")]
pub struct EntryLaw {
    pub name: LawName,
    pub parameters: Vec<f64>,
    pub diag_variance: Option<f64>,
    /// Whether complex entries may be assembled from two real draws. Always
    /// true for built-in laws; opt-in for custom tables.
    pub complex_pairs: bool,
    /// `E[(sqrt(N) h)^k]` of the real law, `k = 1..=STORED_MOMENTS`.
    pub offdiag_moments: BTreeMap<u32, f64>,
}

/// JSON form: `{"name": "...", "params": [...], "diag_variance": 2.0, "complex": true}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LawDescriptor {
    pub name: String,
    #[serde(default)]
    pub params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diag_variance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex: Option<bool>,
}

impl TryFrom<LawDescriptor> for EntryLaw {
    type Error = Error;
    fn try_from(d: LawDescriptor) -> Result<Self> {
        let name = LawName::parse(&d.name)?;
        let mut law = EntryLaw::build(name, d.params)?;
        if let Some(v) = d.diag_variance {
            law = law.with_diag_variance(v)?;
        }
        if let Some(c) = d.complex {
            if !c && name != LawName::Custom {
                return Err(Error::validation("built-in laws always have a complex variant"));
            }
            law.complex_pairs = c;
        }
        Ok(law)
    }
}

impl From<EntryLaw> for LawDescriptor {
    fn from(l: EntryLaw) -> Self {
        LawDescriptor {
            name: l.name.as_str().to_string(),
            params: l.parameters,
            diag_variance: l.diag_variance,
            complex: if l.name == LawName::Custom { Some(l.complex_pairs) } else { None },
        }
    }
}

impl EntryLaw {
    pub fn gaussian() -> Self {
        Self::build(LawName::Gaussian, vec![]).unwrap()
    }

    pub fn rademacher() -> Self {
        Self::build(LawName::Rademacher, vec![]).unwrap()
    }

    pub fn uniform() -> Self {
        Self::build(LawName::Uniform, vec![]).unwrap()
    }

    pub fn shifted_bernoulli(p: f64) -> Result<Self> {
        Self::build(LawName::ShiftedBernoulli, vec![p])
    }

    /// Custom law from an inverse-CDF table; must be centered with unit variance.
    pub fn custom(quantiles: Vec<f64>, complex_pairs: bool) -> Result<Self> {
        let mut law = Self::build(LawName::Custom, quantiles)?;
        law.complex_pairs = complex_pairs;
        Ok(law)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let d: LawDescriptor = serde_json::from_str(s)?;
        d.try_into()
    }

    pub fn by_name(name: &str) -> Result<Self> {
        Self::build(LawName::parse(name)?, vec![])
    }

    pub fn with_diag_variance(mut self, v: f64) -> Result<Self> {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::validation(format!("diagonal variance must be finite and >= 0, got {v}")));
        }
        self.diag_variance = Some(v);
        Ok(self)
    }

    fn build(name: LawName, parameters: Vec<f64>) -> Result<Self> {
        let moments = match name {
            LawName::Gaussian | LawName::Rademacher | LawName::Uniform => {
                if !parameters.is_empty() {
                    return Err(Error::validation(format!("law `{}` takes no parameters", name.as_str())));
                }
                (1..=STORED_MOMENTS).map(|k| (k, builtin_moment(name, k))).collect()
            }
            LawName::ShiftedBernoulli => {
                let p = match parameters.as_slice() {
                    [] => 0.5,
                    [p] => *p,
                    _ => return Err(Error::validation("shifted-bernoulli takes one parameter p")),
                };
                if !(p > 0.0 && p < 1.0) {
                    return Err(Error::validation(format!("shifted-bernoulli needs 0 < p < 1, got {p}")));
                }
                let (a, b) = two_point_atoms(p);
                (1..=STORED_MOMENTS).map(|k| (k, p * a.powi(k as i32) + (1.0 - p) * b.powi(k as i32))).collect()
            }
            LawName::Custom => {
                if parameters.len() < 2 || parameters.iter().any(|q| !q.is_finite()) {
                    return Err(Error::validation("custom law needs at least two finite quantile values"));
                }
                if parameters.windows(2).any(|w| w[0] > w[1]) {
                    return Err(Error::validation("custom quantile table must be nondecreasing"));
                }
                (1..=STORED_MOMENTS).map(|k| (k, quantile_table_moment(&parameters, k))).collect()
            }
        };
        let law = EntryLaw {
            name,
            parameters,
            diag_variance: None,
            complex_pairs: name != LawName::Custom,
            offdiag_moments: moments,
        };
        law.check_standardized()?;
        Ok(law)
    }

    fn check_standardized(&self) -> Result<()> {
        let m1 = self.offdiag_moments[&1];
        let m2 = self.offdiag_moments[&2];
        if m1.abs() > 1e-9 || (m2 - 1.0).abs() > 1e-9 {
            return Err(Error::validation(format!(
                "scaled off-diagonal law must have mean 0 and variance 1 (got mean {m1:e}, second moment {m2})"
            )));
        }
        if self.offdiag_moments.values().any(|m| !m.is_finite()) {
            return Err(Error::validation("law moments must be finite"));
        }
        Ok(())
    }

    /// `E[X^k]` of the standardized real law.
    pub fn moment(&self, k: u32) -> Result<f64> {
        if k == 0 {
            return Ok(1.0);
        }
        self.offdiag_moments
            .get(&k)
            .copied()
            .ok_or_else(|| Error::validation(format!("moment of order {k} not stored (max {STORED_MOMENTS})")))
    }

    pub fn diag_variance_for(&self, beta: Beta) -> f64 {
        self.diag_variance.unwrap_or(2.0 / beta.as_u8() as f64)
    }

    /// One draw of the standardized real law.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.name {
            LawName::Gaussian => rng.sample(StandardNormal),
            LawName::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            LawName::Uniform => (2.0 * rng.random::<f64>() - 1.0) * 3f64.sqrt(),
            LawName::ShiftedBernoulli => {
                let p = self.parameters.first().copied().unwrap_or(0.5);
                let (a, b) = two_point_atoms(p);
                if rng.random::<f64>() < p {
                    a
                } else {
                    b
                }
            }
            LawName::Custom => {
                let q = &self.parameters;
                let pos = rng.random::<f64>() * (q.len() - 1) as f64;
                let i = (pos.floor() as usize).min(q.len() - 2);
                let t = pos - i as f64;
                q[i] + t * (q[i + 1] - q[i])
            }
        }
    }
}

fn two_point_atoms(p: f64) -> (f64, f64) {
    (((1.0 - p) / p).sqrt(), -(p / (1.0 - p)).sqrt())
}

fn builtin_moment(name: LawName, k: u32) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    let j = k / 2;
    match name {
        // (k-1)!!
        LawName::Gaussian => (1..=j).map(|i| (2 * i - 1) as f64).product(),
        LawName::Rademacher => 1.0,
        // uniform on [-sqrt 3, sqrt 3]: 3^j / (2j + 1)
        LawName::Uniform => 3f64.powi(j as i32) / (2 * j + 1) as f64,
        _ => unreachable!(),
    }
}

/// `int_0^1 Q(u)^k du` for the piecewise-linear quantile function.
fn quantile_table_moment(q: &[f64], k: u32) -> f64 {
    let h = 1.0 / (q.len() - 1) as f64;
    let kk = k as i32;
    q.windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            if (b - a).abs() < 1e-14 * (1.0 + a.abs()) {
                h * a.powi(kk)
            } else {
                h * (b.powi(kk + 1) - a.powi(kk + 1)) / ((kk + 1) as f64 * (b - a))
            }
        })
        .sum()
}
