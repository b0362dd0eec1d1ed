//! Householder reduction to real tridiagonal form followed by implicit-shift
//! QL iteration.
//!
//! The reduction works for both real symmetric and complex Hermitian input.
//! In the complex case the subdiagonal produced by the reflectors is complex;
//! a diagonal unitary similarity rotates it onto the positive reals, after
//! which a single real QL routine finishes the job.

use num_complex::Complex64;

use super::{Dense, Scalar};
use crate::error::{Error, Result};

/// Eigendecomposition `A = U diag(values) U*` with ascending eigenvalues.
///
/// `vectors` is row-major with row `j` holding the `j`-th eigenvector, so
/// `vectors[j * n + i]` is `u_j(i)`.
#[derive(Debug, Clone)]
pub struct Eigh<T> {
    pub values: Vec<f64>,
    pub vectors: Vec<T>,
}

const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalues only, ascending.
pub fn eigvalsh<T: Scalar>(a: &Dense<T>) -> Result<Vec<f64>> {
    check_hermitian(a)?;
    let tri = tridiagonalize(a, false);
    let mut d = tri.diag;
    let mut e = tri.offdiag_abs;
    tql(&mut d, &mut e, None)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Eigenvalues and orthonormal eigenvectors, ascending.
pub fn eigh<T: Scalar>(a: &Dense<T>) -> Result<Eigh<T>> {
    check_hermitian(a)?;
    let n = a.dim();
    let tri = tridiagonalize(a, true);
    let mut d = tri.diag.clone();
    let mut e = tri.offdiag_abs.clone();
    // z holds the eigenvectors of the real tridiagonal matrix as rows.
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    tql(&mut d, &mut e, Some(&mut z))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));

    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n * n);
    let mut x = vec![T::zero(); n];
    for &j in &order {
        values.push(d[j]);
        for i in 0..n {
            x[i] = tri.phases[i] * z[j * n + i];
        }
        tri.apply_reflectors(&mut x);
        vectors.extend_from_slice(&x);
    }
    Ok(Eigh { values, vectors })
}

fn check_hermitian<T: Scalar>(a: &Dense<T>) -> Result<()> {
    let defect = a.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

struct Tridiagonal<T> {
    diag: Vec<f64>,
    /// `|e_k|`, coupling `k` and `k + 1`; last entry is zero.
    offdiag_abs: Vec<f64>,
    /// Diagonal similarity making the subdiagonal real and nonnegative.
    phases: Vec<T>,
    /// Reflector vectors `u_k` (acting on indices `k+1..n`), `H_k = I - u u*`.
    reflectors: Vec<Option<Vec<T>>>,
}

impl<T: Scalar> Tridiagonal<T> {
    /// `x <- H_0 H_1 ... H_{n-3} x`.
    fn apply_reflectors(&self, x: &mut [T]) {
        for (k, u) in self.reflectors.iter().enumerate().rev() {
            let Some(u) = u else { continue };
            let tail = &mut x[k + 1..];
            let dot = u.iter().zip(tail.iter()).fold(T::zero(), |acc, (&ui, &xi)| acc + ui.conj() * xi);
            for (xi, &ui) in tail.iter_mut().zip(u) {
                *xi -= ui * dot;
            }
        }
    }
}

fn tridiagonalize<T: Scalar>(a: &Dense<T>, keep_reflectors: bool) -> Tridiagonal<T> {
    let n = a.dim();
    let (mut re, im) = T::split(a.as_slice());
    let red = match im {
        Some(mut im) => reduce_complex(&mut re, &mut im, n, keep_reflectors),
        None => reduce_real(&mut re, n, keep_reflectors),
    };
    let mut phases = vec![T::from_re(1.0); n];
    let mut offdiag_abs = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        offdiag_abs[k] = red.sub[k].norm();
        phases[k + 1] = phases[k] * T::from_complex(red.sub[k]).phase();
    }
    let reflectors = red
        .reflectors
        .into_iter()
        .map(|u| u.map(|u| u.into_iter().map(T::from_complex).collect()))
        .collect();
    Tridiagonal { diag: red.diag, offdiag_abs, phases, reflectors }
}

struct Reduction {
    diag: Vec<f64>,
    sub: Vec<Complex64>,
    reflectors: Vec<Option<Vec<Complex64>>>,
}

/// Dot product with four independent accumulators so the loop vectorizes.
#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for l in 0..4 {
            acc[l] += x[l] * y[l];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Householder reduction of a Hermitian matrix stored as separate real and
/// imaginary planes. Only the lower triangle is read or written.
fn reduce_complex(re: &mut [f64], im: &mut [f64], n: usize, keep: bool) -> Reduction {
    let mut diag = vec![0.0; n];
    let mut sub = vec![Complex64::new(0.0, 0.0); n];
    let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
    let (mut pr, mut pi) = (vec![0.0; n], vec![0.0; n]);
    let (mut wr, mut wi) = (vec![0.0; n], vec![0.0; n]);

    for k in 0..n.saturating_sub(2) {
        let off = k + 1;
        let m = n - off;
        diag[k] = re[k * n + k];
        let mut ur: Vec<f64> = (0..m).map(|j| re[(off + j) * n + k]).collect();
        let mut ui: Vec<f64> = (0..m).map(|j| im[(off + j) * n + k]).collect();
        let sigma = (dot(&ur, &ur) + dot(&ui, &ui)).sqrt();
        if sigma == 0.0 {
            reflectors.push(None);
            continue;
        }
        let x0 = Complex64::new(ur[0], ui[0]);
        let r0 = x0.norm();
        let phase = if r0 == 0.0 { Complex64::new(1.0, 0.0) } else { x0 / r0 };
        let alpha = -(phase * sigma);
        ur[0] -= alpha.re;
        ui[0] -= alpha.im;
        let scale = 1.0 / (sigma * (sigma + r0)).sqrt();
        ur.iter_mut().for_each(|x| *x *= scale);
        ui.iter_mut().for_each(|x| *x *= scale);

        // p = B u, B the trailing block, from its lower triangle.
        pr[..m].fill(0.0);
        pi[..m].fill(0.0);
        for i in 0..m {
            let base = (off + i) * n + off;
            let br = &re[base..base + i];
            let bi = &im[base..base + i];
            let (uir, uii) = (ur[i], ui[i]);
            for (((pj, qj), &b), &c) in pr[..i].iter_mut().zip(&mut pi[..i]).zip(br).zip(bi) {
                *pj += b * uir + c * uii;
                *qj += b * uii - c * uir;
            }
            let d = re[base + i];
            pr[i] += dot(br, &ur[..i]) - dot(bi, &ui[..i]) + d * uir;
            pi[i] += dot(br, &ui[..i]) + dot(bi, &ur[..i]) + d * uii;
        }
        let kappa = dot(&ur, &pr[..m]) + dot(&ui, &pi[..m]);
        for i in 0..m {
            wr[i] = pr[i] - 0.5 * kappa * ur[i];
            wi[i] = pi[i] - 0.5 * kappa * ui[i];
        }
        // B <- B - u w* - w u*
        for i in 0..m {
            let base = (off + i) * n + off;
            let (uir, uii, wir, wii) = (ur[i], ui[i], wr[i], wi[i]);
            let (wr, wi, ur, ui) = (&wr[..=i], &wi[..=i], &ur[..=i], &ui[..=i]);
            let br = &mut re[base..=base + i];
            for ((((b, &a), &c), &d), &e) in br.iter_mut().zip(wr).zip(wi).zip(ur).zip(ui) {
                *b -= uir * a + uii * c + wir * d + wii * e;
            }
            let bi = &mut im[base..=base + i];
            for ((((b, &a), &c), &d), &e) in bi.iter_mut().zip(wr).zip(wi).zip(ur).zip(ui) {
                *b -= uii * a - uir * c + wii * d - wir * e;
            }
            bi[i] = 0.0;
        }
        sub[k] = alpha;
        reflectors.push(keep.then(|| ur.iter().zip(&ui).map(|(&r, &i)| Complex64::new(r, i)).collect()));
    }
    finish(re, Some(im), n, diag, sub, reflectors)
}

fn reduce_real(re: &mut [f64], n: usize, keep: bool) -> Reduction {
    let mut diag = vec![0.0; n];
    let mut sub = vec![Complex64::new(0.0, 0.0); n];
    let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
    let mut p = vec![0.0; n];
    let mut w = vec![0.0; n];

    for k in 0..n.saturating_sub(2) {
        let off = k + 1;
        let m = n - off;
        diag[k] = re[k * n + k];
        let mut u: Vec<f64> = (0..m).map(|j| re[(off + j) * n + k]).collect();
        let sigma = dot(&u, &u).sqrt();
        if sigma == 0.0 {
            reflectors.push(None);
            continue;
        }
        let x0 = u[0];
        let alpha = if x0 < 0.0 { sigma } else { -sigma };
        u[0] -= alpha;
        let scale = 1.0 / (sigma * (sigma + x0.abs())).sqrt();
        u.iter_mut().for_each(|x| *x *= scale);

        p[..m].fill(0.0);
        for i in 0..m {
            let base = (off + i) * n + off;
            let b = &re[base..base + i];
            let ui = u[i];
            for (pj, &bj) in p[..i].iter_mut().zip(b) {
                *pj += bj * ui;
            }
            p[i] += dot(b, &u[..i]) + re[base + i] * ui;
        }
        let kappa = dot(&u, &p[..m]);
        for i in 0..m {
            w[i] = p[i] - 0.5 * kappa * u[i];
        }
        for i in 0..m {
            let base = (off + i) * n + off;
            let (ui, wi) = (u[i], w[i]);
            let b = &mut re[base..=base + i];
            for ((bj, &wj), &uj) in b.iter_mut().zip(&w[..=i]).zip(&u[..=i]) {
                *bj -= ui * wj + wi * uj;
            }
        }
        sub[k] = Complex64::new(alpha, 0.0);
        reflectors.push(keep.then(|| u.iter().map(|&r| Complex64::new(r, 0.0)).collect()));
    }
    finish(re, None, n, diag, sub, reflectors)
}

fn finish(
    re: &[f64],
    im: Option<&mut [f64]>,
    n: usize,
    mut diag: Vec<f64>,
    mut sub: Vec<Complex64>,
    reflectors: Vec<Option<Vec<Complex64>>>,
) -> Reduction {
    if n >= 2 {
        diag[n - 2] = re[(n - 2) * n + n - 2];
        let lo = (n - 1) * n + n - 2;
        sub[n - 2] = Complex64::new(re[lo], im.map_or(0.0, |im| im[lo]));
    }
    if n >= 1 {
        diag[n - 1] = re[(n - 1) * n + n - 1];
    }
    Reduction { diag, sub, reflectors }
}

/// Implicit QL on a symmetric tridiagonal matrix (`d` diagonal, `e[i]`
/// coupling `i` and `i+1`). Eigenvalues overwrite `d` (unsorted); if `z` is
/// given, its rows are rotated alongside so row `j` ends as the eigenvector
/// of `d[j]`.
fn tql(d: &mut [f64], e: &mut [f64], mut z: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let max_iter = 60 * n.max(4);
    let mut iters = 0usize;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            loop {
                iters += 1;
                if iters > max_iter {
                    return Err(Error::NonConvergence(format!(
                        "tridiagonal QL exceeded {max_iter} sweeps"
                    )));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_deref_mut() {
                        let (lo, hi) = z.split_at_mut((i + 1) * n);
                        let zi = &mut lo[i * n..];
                        let zi1 = &mut hi[..n];
                        for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                            let t = *b;
                            *b = s * *a + c * t;
                            *a = c * *a - s * t;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// `max_j ||A u_j - lambda_j u_j||_2`.
pub fn max_residual<T: Scalar>(a: &Dense<T>, eig: &Eigh<T>) -> f64 {
    let n = a.dim();
    (0..n)
        .map(|j| {
            let u = &eig.vectors[j * n..(j + 1) * n];
            let au = a.matvec(u);
            au.iter()
                .zip(u)
                .map(|(&x, &y)| (x - y * eig.values[j]).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

/// `max_ij |(U U*)_ij - delta_ij|` over the eigenvector rows.
pub fn orthonormality_defect<T: Scalar>(eig: &Eigh<T>) -> f64 {
    let n = eig.values.len();
    let mut worst = 0.0f64;
    for i in 0..n {
        let ui = &eig.vectors[i * n..(i + 1) * n];
        for j in i..n {
            let uj = &eig.vectors[j * n..(j + 1) * n];
            let dot: Complex64 = ui.iter().zip(uj).map(|(&a, &b)| (a.conj() * b).to_complex()).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).norm());
        }
    }
    worst
}
