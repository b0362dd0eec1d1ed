//! Haar-unitary sampling and moment checks against the Weingarten sum.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::weingarten::{all_perms, Perm, WeingartenTable};
use crate::error::{Error, Result};
use crate::linalg::Dense;
use crate::rng::{self, Purpose};

/// Haar unitary from replicate `replicate` of `seed`: a complex Ginibre
/// matrix orthonormalized column by column (Gram–Schmidt, reorthogonalized),
/// i.e. `Q` of the QR factorization with positive real `diag(R)`.
pub fn sample_haar(dim: usize, seed: u64, replicate: u64) -> Result<Dense<Complex64>> {
    if dim == 0 {
        return Err(Error::validation("unitary dimension must be positive"));
    }
    let mut rng = rng::stream(seed, Purpose::Haar, dim, replicate);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    // column-major working copy
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(s * re, s * im)
                })
                .collect()
        })
        .collect();
    for j in 0..dim {
        let (done, rest) = cols.split_at_mut(j);
        let v = &mut rest[0];
        for _ in 0..2 {
            for q in done.iter() {
                let proj: Complex64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
        }
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::NonConvergence("rank-deficient Ginibre draw".into()));
        }
        for vi in v.iter_mut() {
            *vi /= norm;
        }
    }
    Ok(Dense::from_fn(dim, |i, j| cols[j][i]))
}

/// `E[U_{i1 j1} .. U_{in jn} conj(U_{i'1 j'1}) .. conj(U_{i'n j'n})]`,
/// 0-based indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentPattern {
    pub i: Vec<usize>,
    pub j: Vec<usize>,
    pub i_bar: Vec<usize>,
    pub j_bar: Vec<usize>,
}

impl MomentPattern {
    pub fn order(&self) -> usize {
        self.i.len()
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let n = self.order();
        if n == 0 || self.j.len() != n || self.i_bar.len() != n || self.j_bar.len() != n {
            return Err(Error::validation("moment pattern index lists must be non-empty and of equal length"));
        }
        if [&self.i, &self.j, &self.i_bar, &self.j_bar].iter().any(|v| v.iter().any(|&k| k >= dim)) {
            return Err(Error::validation(format!("moment pattern index outside 0..{dim}")));
        }
        Ok(())
    }

    fn eval(&self, u: &Dense<Complex64>) -> Complex64 {
        let mut p = Complex64::new(1.0, 0.0);
        for k in 0..self.order() {
            p *= u.get(self.i[k], self.j[k]) * u.get(self.i_bar[k], self.j_bar[k]).conj();
        }
        p
    }
}

/// Exact moment `sum_{a, b in S_n} delta(i = i' o a) delta(j = j' o b) Wg(N, a^{-1} b)`.
pub fn weingarten_moment(pattern: &MomentPattern, dim: usize) -> Result<f64> {
    pattern.validate(dim)?;
    let n = pattern.order();
    let table = WeingartenTable::new(n, dim)?;
    let perms = all_perms(n);
    let matches = |x: &[usize], y: &[usize], p: &Perm| (0..n).all(|k| x[k] == y[p.0[k]]);
    let alphas: Vec<&Perm> = perms.iter().filter(|a| matches(&pattern.i, &pattern.i_bar, a)).collect();
    let betas: Vec<&Perm> = perms.iter().filter(|b| matches(&pattern.j, &pattern.j_bar, b)).collect();
    let mut total = 0.0;
    for a in &alphas {
        let ainv = a.inverse();
        for b in &betas {
            total += table.get(&ainv.compose(b))?;
        }
    }
    Ok(total)
}

/// Monte Carlo moment with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HaarMoment {
    pub mean: Complex64,
    /// `sqrt((var Re + var Im) / samples)`.
    pub se: f64,
    pub exact: f64,
    pub samples: usize,
}

impl HaarMoment {
    /// `|mean - exact| / se`.
    pub fn z_score(&self) -> f64 {
        (self.mean - self.exact).norm() / self.se.max(f64::MIN_POSITIVE)
    }
}

/// Haar moment by Monte Carlo (`n <= 3`), compared with [`weingarten_moment`].
pub fn haar_moment_mc(pattern: &MomentPattern, dim: usize, samples: usize, seed: u64) -> Result<HaarMoment> {
    if pattern.order() > 3 {
        return Err(Error::validation("Monte Carlo Haar moments are limited to order n <= 3"));
    }
    if samples < 2 {
        return Err(Error::validation("need at least 2 samples"));
    }
    let exact = weingarten_moment(pattern, dim)?;
    use rayon::prelude::*;
    let vals = (0..samples as u64)
        .into_par_iter()
        .map(|r| Ok(pattern.eval(&sample_haar(dim, seed, r)?)))
        .collect::<Result<Vec<_>>>()?;
    let s = samples as f64;
    let mean: Complex64 = vals.iter().sum::<Complex64>() / s;
    let var: f64 = vals.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / (s - 1.0);
    Ok(HaarMoment { mean, se: (var / s).sqrt(), exact, samples })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_is_unitary() {
        let u = sample_haar(6, 3, 0).unwrap();
        for a in 0..6 {
            for b in 0..6 {
                let ip: Complex64 = (0..6).map(|k| u.get(k, a).conj() * u.get(k, b)).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((ip - want).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn exact_moments() {
        let n = 4.0;
        let p = MomentPattern { i: vec![0], j: vec![0], i_bar: vec![0], j_bar: vec![0] };
        assert!((weingarten_moment(&p, 4).unwrap() - 1.0 / n).abs() < 1e-15);
        // E|U11|^4 = 2 / (N (N + 1))
        let p = MomentPattern { i: vec![0, 0], j: vec![0, 0], i_bar: vec![0, 0], j_bar: vec![0, 0] };
        assert!((weingarten_moment(&p, 4).unwrap() - 2.0 / (n * (n + 1.0))).abs() < 1e-15);
        let p = MomentPattern { i: vec![0, 0], j: vec![0, 1], i_bar: vec![0, 0], j_bar: vec![0, 2] };
        assert_eq!(weingarten_moment(&p, 4).unwrap(), 0.0);
    }
}
