use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::semicircle::{classical_location, m_sc, SpectralDomain};
use crate::ensembles::EnsembleSpec;
use crate::error::{Error, Result};
use crate::linalg::{eigh, eigvalsh, HermitianMatrix};

/// Eigenvectors stored row-wise: row `k` is `u_k`.
#[derive(Debug, Clone, PartialEq)]
pub enum Eigenvectors {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl Eigenvectors {
    /// `u_k(i)`.
    #[inline]
    pub fn component(&self, n: usize, k: usize, i: usize) -> Complex64 {
        match self {
            Eigenvectors::Real(v) => Complex64::new(v[k * n + i], 0.0),
            Eigenvectors::Complex(v) => v[k * n + i],
        }
    }
}

/// Ordered eigenvalues of one realized matrix, optional eigenvectors, and
/// the provenance of the matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSample {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<Eigenvectors>,
    pub seed: Option<u64>,
    pub spec: Option<EnsembleSpec>,
}

/// Diagonalize `h`; eigenvalues ascending.
pub fn eigen_decompose(h: &HermitianMatrix, want_vectors: bool) -> Result<SpectralSample> {
    let (eigenvalues, eigenvectors) = match (h, want_vectors) {
        (HermitianMatrix::Real(m), false) => (eigvalsh(m)?, None),
        (HermitianMatrix::Complex(m), false) => (eigvalsh(m)?, None),
        (HermitianMatrix::Real(m), true) => {
            let e = eigh(m)?;
            (e.values, Some(Eigenvectors::Real(e.vectors)))
        }
        (HermitianMatrix::Complex(m), true) => {
            let e = eigh(m)?;
            (e.values, Some(Eigenvectors::Complex(e.vectors)))
        }
    };
    Ok(SpectralSample { eigenvalues, eigenvectors, seed: None, spec: None })
}

impl SpectralSample {
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        SpectralSample { eigenvalues, eigenvectors: None, seed: None, spec: None }
    }

    pub fn with_provenance(mut self, seed: u64, spec: EnsembleSpec) -> Self {
        self.seed = Some(seed);
        self.spec = Some(spec);
        self
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn lambda_max(&self) -> f64 {
        *self.eigenvalues.last().expect("empty spectrum")
    }

    /// `m_N(z) = (1/N) sum_j 1 / (lambda_j - z)`.
    pub fn m_n(&self, z: Complex64) -> Result<Complex64> {
        nonreal(z)?;
        let s: Complex64 = self.eigenvalues.iter().map(|&l| 1.0 / (l - z)).sum();
        Ok(s / self.dim() as f64)
    }

    fn vectors(&self) -> Result<&Eigenvectors> {
        self.eigenvectors.as_ref().ok_or(Error::MissingEigenvectors)
    }

    /// `G_ij(z) = sum_k u_k(i) conj(u_k(j)) / (lambda_k - z)`.
    pub fn green_entry(&self, i: usize, j: usize, z: Complex64) -> Result<Complex64> {
        nonreal(z)?;
        let n = self.dim();
        if i >= n || j >= n {
            return Err(Error::validation(format!("index ({i}, {j}) out of range for N = {n}")));
        }
        let u = self.vectors()?;
        Ok((0..n).map(|k| u.component(n, k, i) * u.component(n, k, j).conj() / (self.eigenvalues[k] - z)).sum())
    }

    /// Full resolvent `G(z)`, row-major.
    pub fn green_matrix(&self, z: Complex64) -> Result<Vec<Complex64>> {
        nonreal(z)?;
        let n = self.dim();
        let u = self.vectors()?;
        let w: Vec<Complex64> = self.eigenvalues.iter().map(|&l| 1.0 / (l - z)).collect();
        let mut g = vec![Complex64::new(0.0, 0.0); n * n];
        let mut row = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..n {
            // G += w_k u_k u_k^*
            for (i, r) in row.iter_mut().enumerate() {
                *r = u.component(n, k, i) * w[k];
            }
            for i in 0..n {
                let a = row[i];
                let gi = &mut g[i * n..(i + 1) * n];
                match u {
                    Eigenvectors::Real(v) => {
                        for (x, &b) in gi.iter_mut().zip(&v[k * n..(k + 1) * n]) {
                            *x += a * b;
                        }
                    }
                    Eigenvectors::Complex(v) => {
                        for (x, &b) in gi.iter_mut().zip(&v[k * n..(k + 1) * n]) {
                            *x += a * b.conj();
                        }
                    }
                }
            }
        }
        Ok(g)
    }

    /// Local-law residuals at `z`, which must lie in `domain`.
    pub fn local_law_residuals(&self, z: Complex64, domain: &SpectralDomain) -> Result<LocalLawResiduals> {
        domain.require(z, self.dim())?;
        let n = self.dim();
        let g = self.green_matrix(z)?;
        let m = m_sc(z)?;
        let mut offdiag_max = 0.0f64;
        let mut diag_max = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let v = g[i * n + j];
                if i == j {
                    diag_max = diag_max.max((v - m).norm());
                } else {
                    offdiag_max = offdiag_max.max(v.norm());
                }
            }
        }
        let trace_dev = (self.m_n(z)? - m).norm();
        Ok(LocalLawResiduals { offdiag_max, diag_max, trace_dev })
    }

    /// Number of eigenvalues in `[e1, e2]`.
    pub fn counting(&self, e1: f64, e2: f64) -> Result<usize> {
        if !(e1 < e2) {
            return Err(Error::validation(format!("counting needs E1 < E2, got [{e1}, {e2}]")));
        }
        let lo = self.eigenvalues.partition_point(|&l| l < e1);
        let hi = self.eigenvalues.partition_point(|&l| l <= e2);
        Ok(hi - lo)
    }

    /// Number of eigenvalues in `[e, inf)`.
    pub fn counting_above(&self, e: f64) -> usize {
        self.dim() - self.eigenvalues.partition_point(|&l| l < e)
    }

    /// `|lambda_j - gamma_j| / (N^{-2/3} min(j, N - j + 1)^{-1/3})`, `j = 1..=N`.
    pub fn rigidity_residual(&self) -> Result<Vec<f64>> {
        let n = self.dim();
        let nf = n as f64;
        (1..=n)
            .map(|j| {
                let gamma = classical_location(j, n)?;
                let rate = nf.powf(-2.0 / 3.0) * (j.min(n - j + 1) as f64).powf(-1.0 / 3.0);
                Ok((self.eigenvalues[j - 1] - gamma).abs() / rate)
            })
            .collect()
    }

    /// `index,eigenvalue` CSV.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "index,eigenvalue")?;
        for (i, l) in self.eigenvalues.iter().enumerate() {
            writeln!(w, "{},{:e}", i + 1, l)?;
        }
        Ok(())
    }
}

fn nonreal(z: Complex64) -> Result<()> {
    if z.im == 0.0 || !z.im.is_finite() || !z.re.is_finite() {
        return Err(Error::validation(format!("spectral parameter must have finite nonzero imaginary part, got {z}")));
    }
    Ok(())
}

/// `max_{i != j} |G_ij|`, `max_i |G_ii - m_sc|`, `|m_N - m_sc|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalLawResiduals {
    pub offdiag_max: f64,
    pub diag_max: f64,
    pub trace_dev: f64,
}

/// `(1/N^2) sum_ij |G_ij|^2` and `Im m_N / (N eta)`; equal by the Ward identity.
pub fn ward_sides(sample: &SpectralSample, z: Complex64) -> Result<(f64, f64)> {
    let n = sample.dim() as f64;
    let g = sample.green_matrix(z)?;
    let lhs = g.iter().map(|v| v.norm_sqr()).sum::<f64>() / (n * n);
    let rhs = sample.m_n(z)?.im / (n * z.im);
    Ok((lhs, rhs))
}
