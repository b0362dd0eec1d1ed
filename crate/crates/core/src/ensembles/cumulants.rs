//! Cumulants of the scaled entry law.
//!
//! Real (`beta = 1`) tables hold `c^(k)`; complex tables hold the joint
//! cumulants `c^(p,q)` of `(h, conj h)`. For `h = (X + iY)/sqrt 2` with
//! independent copies `X`, `Y` of a real law with cumulants `k_n`,
//! multilinearity gives `c^(p,q) = 2^{-n/2} k_n (1 + (-1)^q i^n)`, `n = p + q`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::law::EntryLaw;
use crate::error::{Error, Result};
use crate::linalg::Beta;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CumulantSource {
    Analytic,
    Sample { n_samples: usize },
}

/// One cumulant; real tables use `q = 0` and `p = k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CumulantEntry {
    pub p: u32,
    pub q: u32,
    pub re: f64,
    pub im: f64,
}

impl CumulantEntry {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn order(&self) -> u32 {
        self.p + self.q
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulantTable {
    pub beta: Beta,
    pub entries: Vec<CumulantEntry>,
    pub source: CumulantSource,
}

impl CumulantTable {
    /// `c^(k)` of a real table.
    pub fn real(&self, k: u32) -> Option<f64> {
        if self.beta != Beta::Real {
            return None;
        }
        self.entries.iter().find(|e| e.p == k && e.q == 0).map(|e| e.re)
    }

    /// `c^(p,q)` of a complex table.
    pub fn complex(&self, p: u32, q: u32) -> Option<Complex64> {
        if self.beta != Beta::Complex {
            return None;
        }
        self.entries.iter().find(|e| e.p == p && e.q == q).map(CumulantEntry::value)
    }

    pub fn max_order(&self) -> u32 {
        self.entries.iter().map(CumulantEntry::order).max().unwrap_or(0)
    }
}

/// Moment-to-cumulant recursion `k_n = m_n - sum_{j<n} C(n-1, j-1) k_j m_{n-j}`.
pub fn moments_to_cumulants(m: &[f64]) -> Vec<f64> {
    // m[0] = 1, m[k] = E X^k
    let n = m.len();
    let mut k = vec![0.0; n];
    for i in 1..n {
        let mut acc = m[i];
        let mut binom = 1.0; // C(i-1, j-1)
        for j in 1..i {
            acc -= binom * k[j] * m[i - j];
            binom = binom * (i - j) as f64 / j as f64;
        }
        k[i] = acc;
    }
    k
}

/// Analytic cumulants of `law` up to `max_order` for the given symmetry class.
pub fn cumulants(law: &EntryLaw, beta: Beta, max_order: u32) -> Result<CumulantTable> {
    if max_order == 0 {
        return Err(Error::validation("max_order must be at least 1"));
    }
    let moments = (0..=max_order).map(|k| law.moment(k)).collect::<Result<Vec<_>>>()?;
    let mut kappa = moments_to_cumulants(&moments);
    // every admissible law is centred; drop the rounding residue of the mean
    kappa[1] = 0.0;
    let entries = match beta {
        Beta::Real => (1..=max_order).map(|k| CumulantEntry { p: k, q: 0, re: kappa[k as usize], im: 0.0 }).collect(),
        Beta::Complex => {
            if !law.complex_pairs {
                return Err(Error::validation(format!("law `{}` has no complex variant", law.name.as_str())));
            }
            let mut v = Vec::new();
            for n in 1..=max_order {
                for q in 0..=n {
                    let p = n - q;
                    let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
                    let c = (Complex64::new(1.0, 0.0) + Complex64::i().powu(n) * sign)
                        * (kappa[n as usize] * 2f64.powf(-(n as f64) / 2.0));
                    v.push(CumulantEntry { p, q, re: c.re, im: c.im });
                }
            }
            v
        }
    };
    Ok(CumulantTable { beta, entries, source: CumulantSource::Analytic })
}

/// Cumulants along the flow `H(t) = e^{-t/2} H0 + sqrt(1 - e^{-t}) G`:
/// orders `>= 3` scale by `e^{-k t / 2}`, orders 1 and 2 are preserved.
pub fn flow_cumulants(table: &CumulantTable, t: f64) -> Result<CumulantTable> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::validation(format!("flow time must be finite and >= 0, got {t}")));
    }
    let entries = table
        .entries
        .iter()
        .map(|e| {
            let k = e.order();
            let f = if k >= 3 { (-(k as f64) * t / 2.0).exp() } else { 1.0 };
            CumulantEntry { re: e.re * f, im: e.im * f, ..*e }
        })
        .collect();
    Ok(CumulantTable { entries, ..table.clone() })
}

/// Plug-in sample cumulants (from raw sample moments) of real draws.
pub fn sample_cumulants(samples: &[f64], max_order: u32) -> Result<CumulantTable> {
    if samples.len() < 2 {
        return Err(Error::validation("need at least two samples"));
    }
    let n = samples.len() as f64;
    let mut m = vec![0.0; max_order as usize + 1];
    for &x in samples {
        let mut p = 1.0;
        for mk in m.iter_mut() {
            *mk += p;
            p *= x;
        }
    }
    for mk in m.iter_mut() {
        *mk /= n;
    }
    let kappa = moments_to_cumulants(&m);
    Ok(CumulantTable {
        beta: Beta::Real,
        entries: (1..=max_order).map(|k| CumulantEntry { p: k, q: 0, re: kappa[k as usize], im: 0.0 }).collect(),
        source: CumulantSource::Sample { n_samples: samples.len() },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_cumulants_vanish_above_two() {
        let t = cumulants(&EntryLaw::gaussian(), Beta::Real, 8).unwrap();
        assert_eq!(t.real(2), Some(1.0));
        for k in 3..=8 {
            assert!(t.real(k).unwrap().abs() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn complex_second_order() {
        let t = cumulants(&EntryLaw::rademacher(), Beta::Complex, 4).unwrap();
        assert_eq!(t.complex(1, 0).unwrap(), Complex64::new(0.0, 0.0));
        assert!((t.complex(1, 1).unwrap() - 1.0).norm() < 1e-15);
        assert!(t.complex(2, 0).unwrap().norm() < 1e-15);
        // c^(2,2) = k_4 / 2 for Rademacher parts: -1
        assert!((t.complex(2, 2).unwrap() - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }
}
