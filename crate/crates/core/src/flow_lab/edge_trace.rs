//! `(1/N) E^GUE[Im Tr G(z)]` at the edge as a deterministic kernel integral.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{KernelOperator, DEFAULT_L0};
use crate::quad::PanelIntegrator;
use crate::spectral::SpectralDomain;

pub const EDGE_TRACE_ORDER: usize = 16;

/// The three pieces of
/// `J = N^{-2/3} int K_N^edge(x, x) / |x - N^{2/3} kappa - i N^{2/3} eta|^2 dx
///    = N^{-2} E sum_j |l_j - z|^{-2}`
/// split at `-N^{2/3}` and `L0`, and `(1/N) E Im Tr G = N eta J`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeTrace {
    pub n: usize,
    pub z: Complex64,
    pub far: f64,
    pub middle: f64,
    pub right: f64,
    pub linear_statistic: f64,
    pub im_trace: f64,
}

/// Evaluate at `z` in `domain` (normally `S_edge`).
pub fn gue_edge_trace(n: usize, z: Complex64, domain: &SpectralDomain) -> Result<EdgeTrace> {
    gue_edge_trace_with(n, z, domain, EDGE_TRACE_ORDER, DEFAULT_L0)
}

pub fn gue_edge_trace_with(n: usize, z: Complex64, domain: &SpectralDomain, order: usize, l0: f64) -> Result<EdgeTrace> {
    if n < 2 {
        return Err(Error::validation("N must be at least 2"));
    }
    domain.require(z, n)?;
    let nf = n as f64;
    let s = nf.powf(2.0 / 3.0);
    let (x0, h) = (s * (z.re - 2.0), s * z.im);
    if !(l0 < 0.0 && -s < l0) {
        return Err(Error::validation(format!("split point L0 = {l0} must lie in (-N^(2/3), 0)")));
    }
    let op = KernelOperator::Edge { n };
    let weight = |x: f64| {
        let d = x - x0;
        op.diag(x).unwrap_or(f64::NAN) / (d * d + h * h)
    };
    // panels shrink towards the Lorentzian peak and follow the local
    // wavelength of the bulk oscillations
    let width = |x: f64| (0.25 * (x - x0).abs()).max(0.5 * h).min(3.0 / (1.0 + x.min(0.0).abs().sqrt()));
    let pi = PanelIntegrator::new(order, 1e-9)?;
    let left_end = -4.0 * s - 20.0;
    let far = pi.integrate(weight, left_end, -s, width) / s;
    let middle = pi.integrate(weight, -s, l0, width) / s;
    let right = pi.integrate(weight, l0, 30.0, width) / s;
    let j = far + middle + right;
    if !j.is_finite() {
        return Err(Error::NonConvergence(format!("edge trace integral at N = {n}, z = {z}")));
    }
    Ok(EdgeTrace { n, z, far, middle, right, linear_statistic: j, im_trace: nf * z.im * j })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubling_is_stable() {
        let n = 100;
        let w = (n as f64).powf(-2.0 / 3.0 + 0.05);
        let z = Complex64::new(2.0 - 0.5 * w, 0.5 * w);
        let d = SpectralDomain::edge(0.05, 1.0);
        let a = gue_edge_trace_with(n, z, &d, 16, DEFAULT_L0).unwrap();
        let b = gue_edge_trace_with(n, z, &d, 32, DEFAULT_L0).unwrap();
        assert!((a.im_trace - b.im_trace).abs() < 1e-9 * b.im_trace);
        assert!(a.far < a.middle + a.right);
        assert!(gue_edge_trace(n, Complex64::new(0.0, 0.1), &d).is_err());
    }
}
