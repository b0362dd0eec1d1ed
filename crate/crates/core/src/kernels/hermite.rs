//! Orthonormal Hermite functions `phi_k(x) = q_k(x) e^{-x^2/4} / sqrt(sqrt(2 pi) k!)`
//! for the weight `e^{-x^2/2}`.
//!
//! Values come from the normalized three-term recurrence
//! `phi_{k+1} = (x phi_k - sqrt(k) phi_{k-1}) / sqrt(k+1)` run on a mantissa
//! with a separately tracked logarithmic scale, so neither `q_k` nor the
//! Gaussian factor is ever formed on its own.

use std::f64::consts::PI;

/// Rescale once the mantissa passes this magnitude.
const BIG: f64 = 1e150;
const LN_BIG: f64 = 345.387_763_949_107_0; // ln(1e150)

#[inline]
fn combine(mantissa: f64, log_scale: f64) -> f64 {
    if mantissa == 0.0 {
        0.0
    } else {
        mantissa.signum() * (mantissa.abs().ln() + log_scale).exp()
    }
}

/// Runs the recurrence up to degree `n` and calls `visit(k, mantissa, log_scale)`
/// for every degree. Returns the final `(phi_{n-1}, phi_n)` mantissas and scale.
fn run(n: usize, x: f64, mut visit: impl FnMut(usize, f64, f64)) -> (f64, f64, f64) {
    let mut log_scale = -0.25 * x * x - 0.25 * (2.0 * PI).ln();
    let mut prev = 0.0;
    let mut cur = 1.0;
    visit(0, cur, log_scale);
    for k in 0..n {
        let kf = k as f64;
        let next = (x * cur - kf.sqrt() * prev) / (kf + 1.0).sqrt();
        prev = cur;
        cur = next;
        if cur.abs() > BIG {
            cur /= BIG;
            prev /= BIG;
            log_scale += LN_BIG;
        }
        visit(k + 1, cur, log_scale);
    }
    (prev, cur, log_scale)
}

/// `phi_k(x)`.
pub fn hermite_phi(k: usize, x: f64) -> f64 {
    let (_, cur, ls) = run(k, x, |_, _, _| {});
    combine(cur, ls)
}

/// `phi_k'(x) = -x/2 phi_k + sqrt(k) phi_{k-1}`.
pub fn hermite_phi_prime(k: usize, x: f64) -> f64 {
    let (prev, cur, ls) = run(k, x, |_, _, _| {});
    let p = if k == 0 { 0.0 } else { combine(prev, ls) };
    -0.5 * x * combine(cur, ls) + (k as f64).sqrt() * p
}

/// `[phi_0(x), ..., phi_kmax(x)]`.
pub fn hermite_table(kmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; kmax + 1];
    run(kmax, x, |k, m, ls| out[k] = combine(m, ls));
    out
}

/// The three top functions `(phi_{n-2}, phi_{n-1}, phi_n)` needed by the
/// Christoffel–Darboux kernel and its diagonal; missing degrees are 0.
pub fn hermite_top3(n: usize, x: f64) -> [f64; 3] {
    let mut out = [0.0; 3];
    run(n, x, |k, m, ls| {
        if k + 2 >= n {
            out[k + 2 - n] = combine(m, ls);
        }
    });
    out
}
