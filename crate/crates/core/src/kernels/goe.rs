//! GOE one-point kernel
//!
//! `K_{N,1}(x,x) = K_{N,2}(x,x) + sqrt(N)/4 phi_{N-1}(x) int sgn(x-t) phi_N(t) dt
//!                 + phi_{N-1}(x) / (2 I_{N-1}) [N odd]`,
//!
//! with `I_k = int_0^inf phi_k`. By parity the sign integral is
//! `2 int_0^x phi_N - 2 I_N [N odd]`.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use super::airy::{airy_cumulative, airy_pair};
use super::hermite::{hermite_phi, hermite_top3};
use crate::error::{Error, Result};
use crate::quad::PanelIntegrator;

/// `I_k = int_0^inf phi_k(t) dt`.
///
/// Even degrees: `I_{2m+2} = sqrt((2m+1)/(2m+2)) I_{2m}`. Odd degrees from
/// integrating `phi_k' = (sqrt(k) phi_{k-1} - sqrt(k+1) phi_{k+1}) / 2`:
/// `sqrt(k+1) I_{k+1} = sqrt(k) I_{k-1} + 2 phi_k(0)`.
pub fn half_line_integral(k: usize) -> f64 {
    let phi0 = (2.0 * PI).powf(-0.25);
    if k % 2 == 0 {
        let mut i = PI.powf(0.25) * 2f64.powf(-0.25);
        for j in (0..k).step_by(2) {
            i *= ((j + 1) as f64 / (j + 2) as f64).sqrt();
        }
        i
    } else {
        // I_1 = int_0^inf t e^{-t^2/4} dt / (2 pi)^{1/4}
        let mut i = 2.0 * phi0;
        let mut phi_at_0 = phi0; // phi_{j}(0) for even j
        let mut j = 0usize;
        while j + 1 < k {
            // advance phi_j(0) to phi_{j+2}(0), then I_{j+1} -> I_{j+3}
            phi_at_0 *= -((j + 1) as f64 / (j + 2) as f64).sqrt();
            let kk = (j + 2) as f64;
            i = (kk.sqrt() * i + 2.0 * phi_at_0) / (kk + 1.0).sqrt();
            j += 2;
        }
        i
    }
}

/// `I_{2m} = 2^{-1/4} pi^{1/4} sqrt((2m)! / (4^m (m!)^2))`, evaluated with
/// log-Gamma.
pub fn half_line_integral_even_closed_form(m: usize) -> f64 {
    let mf = m as f64;
    let ln_ratio = ln_gamma(2.0 * mf + 1.0) - 2.0 * mf * 2f64.ln() - 2.0 * ln_gamma(mf + 1.0);
    2f64.powf(-0.25) * PI.powf(0.25) * (0.5 * ln_ratio).exp()
}

/// `int_0^x phi_n(t) dt` on panels about one half-oscillation wide.
pub fn phi_integral_from_zero(n: usize, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::validation(format!("integration limit must be finite, got {x}")));
    }
    let panels = PanelIntegrator::new(16, 1e-4)?;
    let nf = n as f64;
    let floor = nf.powf(1.0 / 3.0).max(1.0);
    // local frequency sqrt(N + 1/2 - t^2/4), floored at the Airy scale
    let width = |t: f64| (PI / ((nf + 0.5 - 0.25 * t * t).max(0.0) + floor).sqrt()).min(1.0);
    // beyond the turning point the integrand decays like a Gaussian
    let turning = 2.0 * (nf + 0.5).sqrt();
    let cut = turning + 12.0 + 40.0 / turning.max(1.0);
    let upper = x.clamp(-cut, cut);
    Ok(panels.integrate(|t| hermite_phi(n, t), 0.0, upper, width))
}

/// `K_{N,1}(x, x)`.
pub fn goe_kernel(n: usize, x: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::validation("GOE kernel needs N >= 2"));
    }
    let nf = n as f64;
    let [p2, p1, p0] = hermite_top3(n, x);
    let gue = nf * p1 * p1 - (nf * (nf - 1.0)).sqrt() * p2 * p0;
    let odd = n % 2 == 1;
    let mut sgn_int = 2.0 * phi_integral_from_zero(n, x)?;
    if odd {
        sgn_int -= 2.0 * half_line_integral(n);
    }
    let mut k = gue + 0.25 * nf.sqrt() * p1 * sgn_int;
    if odd {
        k += p1 / (2.0 * half_line_integral(n - 1));
    }
    Ok(k)
}

/// `K^edge_{N,1}(x, x) = N^{-1/6} K_{N,1}(y, y)`, `y = 2 sqrt(N) + x N^{-1/6}`.
pub fn goe_edge_kernel(n: usize, x: f64) -> Result<f64> {
    let nf = n as f64;
    let c = nf.powf(-1.0 / 6.0);
    Ok(c * goe_kernel(n, 2.0 * nf.sqrt() + x * c)?)
}

/// Large-N limit `K_airy(x, x) + Ai(x) int_{-inf}^x Ai / 2`.
pub fn goe_edge_limit(x: f64) -> Result<f64> {
    let (ai, aip) = airy_pair(x)?;
    Ok(aip * aip - x * ai * ai + 0.5 * ai * airy_cumulative(x)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_line_integrals_against_quadrature() {
        for k in [0usize, 1, 2, 3, 8, 9, 20, 21] {
            let direct = phi_integral_from_zero(k, 60.0).unwrap();
            let rec = half_line_integral(k);
            assert!((direct - rec).abs() < 1e-11, "I_{k}: {direct} vs {rec}");
        }
    }

    #[test]
    fn even_closed_form() {
        for m in [0usize, 1, 5, 40] {
            let a = half_line_integral(2 * m);
            let b = half_line_integral_even_closed_form(m);
            assert!((a - b).abs() < 1e-13, "m = {m}");
        }
    }
}
