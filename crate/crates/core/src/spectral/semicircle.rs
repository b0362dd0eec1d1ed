use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Semicircle density `sqrt(4 - x^2) / (2 pi)` on `[-2, 2]`.
pub fn rho_sc(x: f64) -> f64 {
    if x.abs() >= 2.0 {
        0.0
    } else {
        (4.0 - x * x).sqrt() / (2.0 * PI)
    }
}

/// `int_{-inf}^x rho_sc = 1/2 + x sqrt(4 - x^2) / (4 pi) + arcsin(x / 2) / pi`.
pub fn semicircle_cdf(x: f64) -> f64 {
    if x <= -2.0 {
        0.0
    } else if x >= 2.0 {
        1.0
    } else {
        0.5 + x * (4.0 - x * x).sqrt() / (4.0 * PI) + (x / 2.0).asin() / PI
    }
}

/// Stieltjes transform of the semicircle law: the root of `1 + z m + m^2 = 0`
/// with `Im m > 0` for `Im z > 0` (and `|m| < 1` off the cut on the real axis).
///
/// Computed as `m = -2 / (z + sqrt(z - 2) sqrt(z + 2))`; the product of
/// principal roots behaves like `z` at infinity, which selects the branch and
/// avoids cancellation for large `|z|`.
pub fn m_sc(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::validation(format!("spectral parameter must be finite, got {z}")));
    }
    if z.im == 0.0 && z.re.abs() <= 2.0 {
        return Err(Error::OutOfDomain { what: "z", detail: format!("{z} lies on the branch cut [-2, 2]") });
    }
    // lower half-plane by reflection m(conj z) = conj m(z)
    let lower = z.im < 0.0;
    let w = Complex64::new(z.re, z.im.abs());
    let s = (w - 2.0).sqrt() * (w + 2.0).sqrt();
    let m = -2.0 / (w + s);
    Ok(if lower { m.conj() } else { m })
}

/// Distance to the nearest spectral edge, `min(|E - 2|, |E + 2|)`.
pub fn kappa(e: f64) -> f64 {
    (e - 2.0).abs().min((e + 2.0).abs())
}

/// `Psi(z) = sqrt(Im m_sc / (N eta)) + 1 / (N eta)`.
pub fn psi(z: Complex64, n: usize) -> Result<f64> {
    if !(z.im > 0.0) {
        return Err(Error::OutOfDomain { what: "z", detail: format!("Psi needs Im z > 0, got {z}") });
    }
    let ne = n as f64 * z.im;
    Ok((m_sc(z)?.im / ne).sqrt() + 1.0 / ne)
}

/// `gamma_j`: `int_{-inf}^{gamma_j} rho_sc = j / N`, by bisection to `1e-13`.
pub fn classical_location(j: usize, n: usize) -> Result<f64> {
    if n == 0 || j == 0 || j > n {
        return Err(Error::validation(format!("classical location needs 1 <= j <= N, got j = {j}, N = {n}")));
    }
    if j == n {
        return Ok(2.0);
    }
    let target = j as f64 / n as f64;
    let (mut lo, mut hi) = (-2.0f64, 2.0f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if semicircle_cdf(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    S0,
    S,
    SEdge,
}

/// Spectral domains
/// * `S0 = {|E| <= 5, 0 < eta <= 10}`,
/// * `S(eps) = {|E| <= 5, N^{-1+eps} <= eta <= 10}`,
/// * `S_edge(eps, C0) = {|E - 2| <= C0 N^{-2/3+eps}, N^{-1+eps} <= eta <= N^{-2/3+eps}}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralDomain {
    pub kind: DomainKind,
    pub epsilon: f64,
    pub c0: f64,
}

impl SpectralDomain {
    pub fn s0() -> Self {
        SpectralDomain { kind: DomainKind::S0, epsilon: 0.0, c0: 0.0 }
    }

    pub fn s(epsilon: f64) -> Self {
        SpectralDomain { kind: DomainKind::S, epsilon, c0: 0.0 }
    }

    pub fn edge(epsilon: f64, c0: f64) -> Self {
        SpectralDomain { kind: DomainKind::SEdge, epsilon, c0 }
    }

    pub fn contains(&self, z: Complex64, n: usize) -> bool {
        let (e, eta) = (z.re, z.im);
        let nf = n as f64;
        match self.kind {
            DomainKind::S0 => e.abs() <= 5.0 && eta > 0.0 && eta <= 10.0,
            DomainKind::S => e.abs() <= 5.0 && eta >= nf.powf(-1.0 + self.epsilon) && eta <= 10.0,
            DomainKind::SEdge => {
                let w = nf.powf(-2.0 / 3.0 + self.epsilon);
                (e - 2.0).abs() <= self.c0 * w && eta >= nf.powf(-1.0 + self.epsilon) && eta <= w
            }
        }
    }

    pub fn require(&self, z: Complex64, n: usize) -> Result<()> {
        if self.contains(z, n) {
            Ok(())
        } else {
            Err(Error::OutOfDomain { what: "z", detail: format!("{z} is not in {:?} for N = {n}", self) })
        }
    }
}
