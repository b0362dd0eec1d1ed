//! Correlation kernels: finite-N Hermite (GUE) kernels in three scalings, the
//! Airy kernel, and the GOE one-point kernels.

pub mod airy;
pub mod goe;
pub mod hermite;

pub use airy::{airy, airy_cumulative, airy_pair, airy_prime};
pub use goe::{goe_edge_kernel, goe_edge_limit, goe_kernel, half_line_integral, half_line_integral_even_closed_form};
pub use hermite::{hermite_phi, hermite_phi_prime, hermite_table};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative distance below which `K(x, y)` is evaluated by the diagonal form.
pub const DIAGONAL_SWITCH: f64 = 1e-6;

/// Default left cut `L0` of the edge comparisons.
pub const DEFAULT_L0: f64 = -6.0;

/// A kernel that can be evaluated at arbitrary points.
///
/// * `Hermite { n }`: `K_N(x, y)`, the GUE Christoffel–Darboux kernel for `sqrt(N) H`;
/// * `Rescaled { n }`: `sqrt(N) K_N(sqrt(N) x, sqrt(N) y)`, spectrum on `[-2, 2]`;
/// * `Edge { n }`: `N^{-1/6} K_N(2 sqrt(N) + x N^{-1/6}, 2 sqrt(N) + y N^{-1/6})`;
/// * `Airy`: `(Ai(x) Ai'(y) - Ai'(x) Ai(y)) / (x - y)`;
/// * `GoeOnePoint { n }`, `GoeEdge { n }`: GOE densities, diagonal only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelOperator {
    Hermite { n: usize },
    Rescaled { n: usize },
    Edge { n: usize },
    Airy,
    GoeOnePoint { n: usize },
    GoeEdge { n: usize },
}

/// Values a Christoffel–Darboux-type kernel needs at one point:
/// `K(x, y) = pref * (a(x) b(y) - b(x) a(y)) / (x - y)` off the diagonal.
#[derive(Debug, Clone, Copy)]
struct CdPoint {
    x: f64,
    a: f64,
    b: f64,
    diag: f64,
}

impl KernelOperator {
    /// Parse `kind` as used by the CLI and config files.
    pub fn parse(kind: &str, n: Option<usize>) -> Result<Self> {
        let need_n = || n.ok_or_else(|| Error::validation(format!("kernel `{kind}` needs N")));
        let op = match kind {
            "hermite" | "hermite_n" => KernelOperator::Hermite { n: need_n()? },
            "rescaled" | "rescaled_n" => KernelOperator::Rescaled { n: need_n()? },
            "edge" | "edge_n" => KernelOperator::Edge { n: need_n()? },
            "airy" => KernelOperator::Airy,
            "goe_one_point" | "goe_one_point_n" => KernelOperator::GoeOnePoint { n: need_n()? },
            "goe_edge" | "goe_edge_n" => KernelOperator::GoeEdge { n: need_n()? },
            other => return Err(Error::validation(format!("unknown kernel kind `{other}`"))),
        };
        op.validate()?;
        Ok(op)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelOperator::Airy => Ok(()),
            KernelOperator::GoeOnePoint { n } | KernelOperator::GoeEdge { n } if n < 2 => {
                Err(Error::validation("GOE kernels need N >= 2"))
            }
            KernelOperator::Hermite { n } | KernelOperator::Rescaled { n } | KernelOperator::Edge { n } if n == 0 => {
                Err(Error::validation("kernel dimension N must be positive"))
            }
            _ => Ok(()),
        }
    }

    /// Whether `K(x, y)` is defined off the diagonal (and symmetric).
    pub fn is_bivariate(&self) -> bool {
        !matches!(self, KernelOperator::GoeOnePoint { .. } | KernelOperator::GoeEdge { .. })
    }

    pub fn dim(&self) -> Option<usize> {
        match *self {
            KernelOperator::Airy => None,
            KernelOperator::Hermite { n }
            | KernelOperator::Rescaled { n }
            | KernelOperator::Edge { n }
            | KernelOperator::GoeOnePoint { n }
            | KernelOperator::GoeEdge { n } => Some(n),
        }
    }

    /// `K(x, x)`.
    pub fn diag(&self, x: f64) -> Result<f64> {
        self.validate()?;
        match *self {
            KernelOperator::GoeOnePoint { n } => goe_kernel(n, x),
            KernelOperator::GoeEdge { n } => goe_edge_kernel(n, x),
            _ => Ok(self.point(x)?.diag),
        }
    }

    /// `K(x, y)`, switching to the diagonal form when
    /// `|x - y| < DIAGONAL_SWITCH (1 + |x|)`.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        self.validate()?;
        if !self.is_bivariate() {
            if x == y {
                return self.diag(x);
            }
            return Err(Error::validation("GOE one-point kernels are only defined on the diagonal"));
        }
        let p = self.point(x)?;
        let q = self.point(y)?;
        self.entry(&p, &q)
    }

    /// Kernel matrix `K(x_i, x_j)` (row-major) on the given points.
    pub fn matrix(&self, points: &[f64]) -> Result<Vec<f64>> {
        self.validate()?;
        if !self.is_bivariate() {
            return Err(Error::validation("GOE one-point kernels have no off-diagonal values"));
        }
        let pts = points.iter().map(|&x| self.point(x)).collect::<Result<Vec<_>>>()?;
        let m = pts.len();
        let mut out = vec![0.0; m * m];
        for i in 0..m {
            out[i * m + i] = pts[i].diag;
            for j in 0..i {
                let v = self.entry(&pts[i], &pts[j])?;
                out[i * m + j] = v;
                out[j * m + i] = v;
            }
        }
        Ok(out)
    }

    fn entry(&self, p: &CdPoint, q: &CdPoint) -> Result<f64> {
        let d = p.x - q.x;
        if d.abs() < DIAGONAL_SWITCH * (1.0 + p.x.abs()) {
            // the quotient is even in (x - y) around the midpoint
            return Ok(self.point(0.5 * (p.x + q.x))?.diag);
        }
        Ok(self.prefactor() * (p.a * q.b - p.b * q.a) / d)
    }

    fn prefactor(&self) -> f64 {
        match *self {
            KernelOperator::Airy => 1.0,
            KernelOperator::Hermite { n } => (n as f64).sqrt(),
            // c sqrt(N) / d with c = d = sqrt(N), resp. c = d = N^{-1/6}
            KernelOperator::Rescaled { n } | KernelOperator::Edge { n } => (n as f64).sqrt(),
            KernelOperator::GoeOnePoint { .. } | KernelOperator::GoeEdge { .. } => f64::NAN,
        }
    }

    fn point(&self, x: f64) -> Result<CdPoint> {
        if !x.is_finite() {
            return Err(Error::validation(format!("kernel argument must be finite, got {x}")));
        }
        match *self {
            KernelOperator::Airy => {
                let (ai, aip) = airy_pair(x)?;
                Ok(CdPoint { x, a: ai, b: aip, diag: aip * aip - x * ai * ai })
            }
            KernelOperator::Hermite { n } => Ok(hermite_point(n, x, x, 1.0)),
            KernelOperator::Rescaled { n } => {
                let s = (n as f64).sqrt();
                Ok(hermite_point(n, x, s * x, s))
            }
            KernelOperator::Edge { n } => {
                let nf = n as f64;
                let c = nf.powf(-1.0 / 6.0);
                Ok(hermite_point(n, x, 2.0 * nf.sqrt() + x * c, c))
            }
            KernelOperator::GoeOnePoint { .. } | KernelOperator::GoeEdge { .. } => {
                Err(Error::validation("GOE kernels have no Christoffel–Darboux form"))
            }
        }
    }
}

/// `u` is the argument of `K_N`, `c` the outer factor in front of it.
fn hermite_point(n: usize, x: f64, u: f64, c: f64) -> CdPoint {
    let [p2, p1, p0] = hermite::hermite_top3(n, u);
    CdPoint { x, a: p0, b: p1, diag: c * gue_diag_from_top3(n, p2, p1, p0) }
}

/// `K_N(x, x) = N phi_{N-1}^2 - sqrt(N (N-1)) phi_{N-2} phi_N`.
fn gue_diag_from_top3(n: usize, p2: f64, p1: f64, p0: f64) -> f64 {
    let nf = n as f64;
    nf * p1 * p1 - (nf * (nf - 1.0)).sqrt() * p2 * p0
}

/// `K_N(x, x)` for the GUE kernel of `sqrt(N) H`.
pub fn gue_diag(n: usize, x: f64) -> f64 {
    let [p2, p1, p0] = hermite::hermite_top3(n, x);
    gue_diag_from_top3(n, p2, p1, p0)
}

/// `d/dx K_N(x, x) = -sqrt(N) phi_{N-1}(x) phi_N(x)`.
pub fn kernel_diag_derivative(n: usize, x: f64) -> f64 {
    let [_, p1, p0] = hermite::hermite_top3(n, x);
    -(n as f64).sqrt() * p1 * p0
}

/// `d/dx K_N^edge(x, x) = N^{-1/3} K_N'(y, y)` at `y = 2 sqrt(N) + x N^{-1/6}`.
pub fn edge_diag_derivative(n: usize, x: f64) -> f64 {
    let nf = n as f64;
    nf.powf(-1.0 / 3.0) * kernel_diag_derivative(n, 2.0 * nf.sqrt() + x * nf.powf(-1.0 / 6.0))
}

/// `|d_x^a d_y^b [K_N^edge - K_airy](x, y)|` with `a, b` in `{0, 1}`;
/// derivatives by central differences with a step shrinking where the Airy
/// functions oscillate (`x < 0`).
pub fn edge_kernel_gap(n: usize, x: f64, y: f64, a: u8, b: u8) -> Result<f64> {
    if a > 1 || b > 1 {
        return Err(Error::validation("derivative orders must be 0 or 1"));
    }
    let edge = KernelOperator::Edge { n };
    edge.validate()?;
    let g = |u: f64, v: f64| -> Result<f64> { Ok(edge.eval(u, v)? - KernelOperator::Airy.eval(u, v)?) };
    let step = |t: f64| 1e-3 / (1.0 + (-t).max(0.0).sqrt());
    let hx = step(x);
    let hy = step(y);
    let v = match (a, b) {
        (0, 0) => g(x, y)?,
        (1, 0) => (g(x + hx, y)? - g(x - hx, y)?) / (2.0 * hx),
        (0, 1) => (g(x, y + hy)? - g(x, y - hy)?) / (2.0 * hy),
        _ => (g(x + hx, y + hy)? - g(x + hx, y - hy)? - g(x - hx, y + hy)? + g(x - hx, y - hy)?) / (4.0 * hx * hy),
    };
    Ok(v.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn airy_kernel_at_origin() {
        let v = KernelOperator::Airy.eval(0.0, 0.0).unwrap();
        assert!((v - airy::AIP0 * airy::AIP0).abs() < 1e-15);
    }

    #[test]
    fn switch_is_continuous() {
        for op in [KernelOperator::Hermite { n: 20 }, KernelOperator::Edge { n: 100 }, KernelOperator::Airy] {
            for &x in &[-2.0, 0.3, 1.7] {
                let h = DIAGONAL_SWITCH * (1.0 + f64::abs(x));
                let inside = op.eval(x, x + 0.999 * h).unwrap();
                let outside = op.eval(x, x + 1.001 * h).unwrap();
                assert!((inside - outside).abs() < 1e-8, "{op:?} at {x}: {inside} vs {outside}");
            }
        }
    }

    #[test]
    fn scalings_agree() {
        let n = 30;
        let s = (n as f64).sqrt();
        let k = KernelOperator::Hermite { n }.eval(s * 0.4, s * -0.9).unwrap();
        let r = KernelOperator::Rescaled { n }.eval(0.4, -0.9).unwrap();
        assert!((r - s * k).abs() < 1e-12 * r.abs().max(1.0));
        let c = (n as f64).powf(-1.0 / 6.0);
        let e = KernelOperator::Edge { n }.eval(0.5, -1.0).unwrap();
        let k = KernelOperator::Hermite { n }.eval(2.0 * s + 0.5 * c, 2.0 * s - c).unwrap();
        assert!((e - c * k).abs() < 1e-12);
    }

    #[test]
    fn unknown_kind() {
        assert!(KernelOperator::parse("sine", None).is_err());
        assert!(KernelOperator::parse("edge", None).is_err());
        assert_eq!(KernelOperator::parse("airy", None).unwrap(), KernelOperator::Airy);
    }

    #[test]
    fn diag_derivative_vanishes_at_zeros() {
        // phi_N odd for odd N
        assert_eq!(kernel_diag_derivative(7, 0.0), 0.0);
    }
}
