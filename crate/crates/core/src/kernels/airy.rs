//! Airy function of the first kind and its derivative.
//!
//! Three regimes:
//! * `MACLAURIN_LO <= x <= MACLAURIN_HI`: power series around 0;
//! * `x > MACLAURIN_HI`: `Ai` and `Ai'` through the modified Bessel functions
//!   `K_{1/3}`, `K_{2/3}` written as Laguerre-weighted integrals and summed
//!   with generalized Gauss–Laguerre rules (exact exponential decay, no
//!   cancellation);
//! * `x < MACLAURIN_LO`: the oscillatory large-argument expansion, truncated at
//!   its smallest term.

use std::f64::consts::{FRAC_PI_4, PI};
use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::{FiniteAboveNegOneF64, GaussLaguerre};

use crate::error::{Error, Result};

/// `Ai(0) = 3^{-2/3} / Gamma(2/3)`.
pub const AI0: f64 = 0.355_028_053_887_817_239_260_063_186_004_183_176_397_979_174_199_177;
/// `Ai'(0) = -3^{-1/3} / Gamma(1/3)`.
pub const AIP0: f64 = -0.258_819_403_792_806_798_405_183_560_189_203_963_479_091_138_354_934;

pub const MACLAURIN_LO: f64 = -7.0;
pub const MACLAURIN_HI: f64 = 2.0;

/// Far left end of the supported range. The contract in the kernels module
/// is `[-40, 40]`; the oscillatory expansion stays accurate much further out,
/// and the `-400` asymptotic check needs it.
pub const AIRY_MIN_X: f64 = -1.0e4;

const LAGUERRE_ORDER: usize = 60;

struct LaguerreRules {
    third: Vec<(f64, f64)>,
    two_thirds: Vec<(f64, f64)>,
    gamma_5_6: f64,
    gamma_7_6: f64,
}

fn laguerre_rules() -> &'static LaguerreRules {
    static RULES: OnceLock<LaguerreRules> = OnceLock::new();
    RULES.get_or_init(|| {
        let n = NonZeroUsize::new(LAGUERRE_ORDER).unwrap();
        let rule = |alpha: f64| {
            GaussLaguerre::new(n, FiniteAboveNegOneF64::new(alpha).unwrap()).as_node_weight_pairs().to_vec()
        };
        LaguerreRules {
            third: rule(-1.0 / 6.0),
            two_thirds: rule(1.0 / 6.0),
            gamma_5_6: statrs::function::gamma::gamma(5.0 / 6.0),
            gamma_7_6: statrs::function::gamma::gamma(7.0 / 6.0),
        }
    })
}

/// `(Ai(x), Ai'(x))`.
pub fn airy_pair(x: f64) -> Result<(f64, f64)> {
    if !x.is_finite() || x < AIRY_MIN_X {
        return Err(Error::OutOfDomain { what: "airy argument", detail: format!("x = {x}, supported x >= {AIRY_MIN_X}") });
    }
    Ok(if x > MACLAURIN_HI {
        positive_tail(x)
    } else if x >= MACLAURIN_LO {
        maclaurin(x)
    } else {
        oscillatory(-x)
    })
}

pub fn airy(x: f64) -> Result<f64> {
    airy_pair(x).map(|p| p.0)
}

pub fn airy_prime(x: f64) -> Result<f64> {
    airy_pair(x).map(|p| p.1)
}

/// `Ai = c1 f - c2 g` with the two entire solutions `f`, `g`; derivatives
/// term by term.
pub(crate) fn maclaurin(x: f64) -> (f64, f64) {
    let x3 = x * x * x;
    // f = sum a_k x^{3k},   a_k = a_{k-1} / ((3k-1) 3k)
    // g = sum b_k x^{3k+1}, b_k = b_{k-1} / (3k (3k+1))
    // derivative terms: 3k a_k x^{3k-1}, (3k+1) b_k x^{3k}
    let (mut f, mut fp, mut g, mut gp) = (1.0, 0.0, x, 1.0);
    let mut a = 1.0;
    let mut b = 1.0;
    let mut pow3 = 1.0; // x^{3(k-1)}
    for k in 1..200 {
        let kf = k as f64;
        a /= (3.0 * kf - 1.0) * (3.0 * kf);
        b /= (3.0 * kf) * (3.0 * kf + 1.0);
        let prev = pow3;
        pow3 *= x3;
        let tf = a * pow3;
        let tg = b * pow3 * x;
        let tfp = 3.0 * kf * a * prev * x * x;
        let tgp = (3.0 * kf + 1.0) * b * pow3;
        f += tf;
        g += tg;
        fp += tfp;
        gp += tgp;
        let scale = f.abs() + g.abs() + fp.abs() + gp.abs();
        if (tf.abs() + tg.abs() + tfp.abs() + tgp.abs()) <= 1e-18 * scale {
            break;
        }
    }
    (AI0 * f + AIP0 * g, AI0 * fp + AIP0 * gp)
}

/// `Ai(x) = sqrt(x/3) K_{1/3}(zeta) / pi`, `Ai'(x) = -x K_{2/3}(zeta) / (pi sqrt 3)`,
/// with `K_nu(z) = sqrt(pi/(2z)) e^{-z} / Gamma(nu + 1/2) int_0^inf e^{-t} t^{nu-1/2} (1 + t/(2z))^{nu-1/2} dt`.
fn positive_tail(x: f64) -> (f64, f64) {
    let rules = laguerre_rules();
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let inv2z = 0.5 / zeta;
    let i_third: f64 = rules.third.iter().map(|&(t, w)| w * (1.0 + t * inv2z).powf(-1.0 / 6.0)).sum();
    let i_two: f64 = rules.two_thirds.iter().map(|&(t, w)| w * (1.0 + t * inv2z).powf(1.0 / 6.0)).sum();
    let pre = (PI / (2.0 * zeta)).sqrt() * (-zeta).exp();
    let k13 = pre * i_third / rules.gamma_5_6;
    let k23 = pre * i_two / rules.gamma_7_6;
    ((x / 3.0).sqrt() * k13 / PI, -x * k23 / (PI * 3f64.sqrt()))
}

/// `Ai(-z)`, `Ai'(-z)` for large positive `z`.
fn oscillatory(z: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * z * z.sqrt();
    // u_k = Gamma(3k+1/2) / (54^k k! Gamma(k+1/2)),  v_k = -(6k+1)/(6k-1) u_k
    let (mut p_u, mut q_u, mut p_v, mut q_v) = (1.0, 0.0, 1.0, 0.0);
    let mut u = 1.0;
    let mut zpow = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..80usize {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        zpow /= zeta;
        let term = u * zpow;
        if term.abs() >= last || term.abs() < 1e-17 {
            break;
        }
        last = term.abs();
        // (-1)^j for index 2j / 2j+1
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p_u += sign * term;
            p_v += sign * v * zpow;
        } else {
            q_u += sign * term;
            q_v += sign * v * zpow;
        }
    }
    let phase = zeta - FRAC_PI_4;
    let (s, c) = phase.sin_cos();
    let amp = 1.0 / PI.sqrt();
    let ai = amp * z.powf(-0.25) * (c * p_u + s * q_u);
    let aip = amp * z.powf(0.25) * (s * p_v - c * q_v);
    (ai, aip)
}

/// `int_x^inf Ai(t) dt` by oscillation-adapted panels; the tail beyond
/// `x = 40` is below `1e-100` and dropped.
pub fn airy_tail_integral(x: f64) -> Result<f64> {
    const UPPER: f64 = 40.0;
    if x >= UPPER {
        return Ok(0.0);
    }
    airy(x)?;
    let panels = crate::quad::PanelIntegrator::new(16, 1e-3)?;
    Ok(panels.integrate(|t| airy(t).unwrap_or(0.0), x, UPPER, |t| 1.0 / (1.0 + (-t).max(0.0).sqrt())))
}

/// `int_{-inf}^x Ai(t) dt = 1 - int_x^inf Ai`.
pub fn airy_cumulative(x: f64) -> Result<f64> {
    Ok(1.0 - airy_tail_integral(x)?)
}
