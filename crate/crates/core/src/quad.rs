//! Quadrature: Gauss–Legendre rules, the half-line map used by the Fredholm
//! code, adaptive Simpson and oscillation-adapted Gauss–Legendre panels.

use std::f64::consts::FRAC_PI_4;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};

/// Scale of the half-line map `x = s + HALF_LINE_SCALE * tan(pi (u + 1) / 4)`.
pub const HALF_LINE_SCALE: f64 = 10.0;

/// Gauss–Legendre nodes (ascending) and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = NonZeroUsize::new(order).ok_or_else(|| Error::validation("quadrature order must be positive"))?;
    let mut pairs: Vec<(f64, f64)> = GaussLegendre::new(n).as_node_weight_pairs().to_vec();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs.into_iter().unzip())
}

/// How reference nodes on `(-1, 1)` are mapped to the integration domain.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub enum Transform {
    /// Affine map onto `[a, b]`.
    Interval { a: f64, b: f64 },
    /// `x = s + scale * tan(pi (u + 1) / 4)` onto `(s, inf)`.
    HalfLine { s: f64, scale: f64 },
}

impl Transform {
    /// Image of `u` and the Jacobian `dx/du`.
    pub fn map(&self, u: f64) -> (f64, f64) {
        match *self {
            Transform::Interval { a, b } => (0.5 * (a + b) + 0.5 * (b - a) * u, 0.5 * (b - a)),
            Transform::HalfLine { s, scale } => {
                let theta = FRAC_PI_4 * (u + 1.0);
                let c = theta.cos();
                (s + scale * theta.tan(), scale * FRAC_PI_4 / (c * c))
            }
        }
    }
}

/// A Gauss–Legendre rule pushed through a [`Transform`].
///
/// `points` and `weights` are the mapped nodes and the Jacobian-weighted
/// weights, so `sum_i weights[i] * f(points[i])` approximates the integral.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct QuadratureRule {
    pub order: usize,
    pub reference_nodes: Vec<f64>,
    pub reference_weights: Vec<f64>,
    pub transform: Transform,
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn new(order: usize, transform: Transform) -> Result<Self> {
        if let Transform::Interval { a, b } = transform {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::validation(format!("bad interval [{a}, {b}]")));
            }
        }
        if let Transform::HalfLine { s, scale } = transform {
            if !(s.is_finite() && scale > 0.0) {
                return Err(Error::validation(format!("bad half-line start {s} / scale {scale}")));
            }
        }
        let (reference_nodes, reference_weights) = gauss_legendre(order)?;
        let (points, weights) = reference_nodes
            .iter()
            .zip(&reference_weights)
            .map(|(&u, &w)| {
                let (x, jac) = transform.map(u);
                (x, w * jac)
            })
            .unzip();
        Ok(QuadratureRule { order, reference_nodes, reference_weights, transform, points, weights })
    }

    /// Rule on `(s, inf)` with the default scale.
    pub fn half_line(s: f64, order: usize) -> Result<Self> {
        Self::new(order, Transform::HalfLine { s, scale: HALF_LINE_SCALE })
    }

    pub fn interval(a: f64, b: f64, order: usize) -> Result<Self> {
        Self::new(order, Transform::Interval { a, b })
    }

    /// Same transform, twice the order.
    pub fn doubled(&self) -> Result<Self> {
        Self::new(2 * self.order, self.transform)
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Adaptive Simpson with Richardson correction.
///
/// Fails with [`Error::NonConvergence`] if the recursion depth is exhausted
/// before the local error estimate drops below its share of `tol`.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    const MAX_DEPTH: u32 = 50;
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut failed = false;
    let v = simpson_step(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH, &mut failed);
    if failed {
        Err(Error::NonConvergence(format!("adaptive Simpson on [{a}, {b}] with tol {tol:e}")))
    } else {
        Ok(v)
    }
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    failed: &mut bool,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    if depth == 0 || m <= a || m >= b {
        *failed = true;
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, failed)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, failed)
}

/// Composite Gauss–Legendre over `[a, b]` with panel widths chosen by
/// `width(x)` at the left end of each panel (clamped to `[min_width, b - a]`).
///
/// Suited to oscillatory integrands whose local wavelength is known.
pub struct PanelIntegrator {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    min_width: f64,
}

impl PanelIntegrator {
    pub fn new(order: usize, min_width: f64) -> Result<Self> {
        let (nodes, weights) = gauss_legendre(order)?;
        Ok(PanelIntegrator { nodes, weights, min_width })
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64, a: f64, b: f64, width: impl Fn(f64) -> f64) -> f64 {
        let (lo, hi, sign) = if a <= b { (a, b, 1.0) } else { (b, a, -1.0) };
        let mut total = 0.0;
        let mut x = lo;
        while x < hi {
            let w = width(x).max(self.min_width);
            let right = if x + w >= hi { hi } else { x + w };
            let half = 0.5 * (right - x);
            let mid = 0.5 * (right + x);
            total += half * self.nodes.iter().zip(&self.weights).map(|(&u, &wt)| wt * f(mid + half * u)).sum::<f64>();
            x = right;
        }
        sign * total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let r = QuadratureRule::interval(-1.0, 2.0, 5).unwrap();
        // degree 9 is exact for 5 nodes
        let v = r.integrate(|x| x.powi(9));
        assert!((v - (2f64.powi(10) - 1.0) / 10.0).abs() < 1e-11);
    }

    #[test]
    fn half_line_gaussian() {
        let r = QuadratureRule::half_line(0.0, 64).unwrap();
        assert!(r.points.iter().all(|&x| x > 0.0 && x.is_finite()));
        assert!(r.weights.iter().all(|&w| w > 0.0));
        let v = r.integrate(|x| (-x * x).exp());
        assert!((v - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn simpson_sine() {
        let v = adaptive_simpson(f64::sin, 0.0, std::f64::consts::PI, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-11);
    }

    #[test]
    fn panels_oscillatory() {
        let p = PanelIntegrator::new(16, 1e-3).unwrap();
        let v = p.integrate(|x| (40.0 * x).cos(), 0.0, 3.0, |_| 0.2);
        assert!((v - (120f64).sin() / 40.0).abs() < 1e-13);
        let back = p.integrate(|x| (40.0 * x).cos(), 3.0, 0.0, |_| 0.2);
        assert_eq!(v, -back);
    }
}
