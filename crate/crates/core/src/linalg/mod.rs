//! Dense Hermitian matrices and the symmetric eigensolver.
//!
//! Storage is row-major. Complex matrices are `Vec<Complex64>`, which is laid
//! out as interleaved `(re, im)` pairs.

mod eigen;
mod scalar;

pub use eigen::{eigh, eigvalsh, max_residual, orthonormality_defect, Eigh};
pub use scalar::Scalar;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Symmetry class of an ensemble: 1 for real symmetric, 2 for complex Hermitian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Beta {
    Real = 1,
    Complex = 2,
}

impl Beta {
    pub fn as_u8(self) -> u8 {
        self as u8
    }
}

impl TryFrom<u8> for Beta {
    type Error = Error;
    fn try_from(b: u8) -> Result<Self> {
        match b {
            1 => Ok(Beta::Real),
            2 => Ok(Beta::Complex),
            other => Err(Error::validation(format!("beta must be 1 or 2, got {other}"))),
        }
    }
}

impl From<Beta> for u8 {
    fn from(b: Beta) -> u8 {
        b as u8
    }
}

/// Row-major square matrix over a [`Scalar`].
#[derive(Debug, Clone, PartialEq)]
pub struct Dense<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> Dense<T> {
    pub fn zeros(n: usize) -> Self {
        Dense { n, data: vec![T::zero(); n * n] }
    }

    pub fn from_row_major(n: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::validation(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        Ok(Dense { n, data })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Dense { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    /// `max |A_ij - conj(A_ji)|`, relative to `max |A_ij|`.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in i..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).abs());
            }
        }
        worst / scale
    }

    /// Exact Hermitian check: every `A_ij` equals `conj(A_ji)` bit for bit
    /// and the diagonal is real.
    pub fn is_exactly_hermitian(&self) -> bool {
        (0..self.n).all(|i| {
            self.get(i, i).im() == 0.0
                && (i + 1..self.n).all(|j| self.get(i, j) == self.get(j, i).conj())
        })
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).fold(T::zero(), |acc, (&a, &b)| acc + a * b))
            .collect()
    }
}

/// A Wigner-type matrix of either symmetry class.
#[derive(Debug, Clone, PartialEq)]
pub enum HermitianMatrix {
    Real(Dense<f64>),
    Complex(Dense<Complex64>),
}

impl HermitianMatrix {
    pub fn beta(&self) -> Beta {
        match self {
            HermitianMatrix::Real(_) => Beta::Real,
            HermitianMatrix::Complex(_) => Beta::Complex,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            HermitianMatrix::Real(m) => m.dim(),
            HermitianMatrix::Complex(m) => m.dim(),
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        match self {
            HermitianMatrix::Real(m) => Complex64::new(m.get(i, j), 0.0),
            HermitianMatrix::Complex(m) => m.get(i, j),
        }
    }

    pub fn max_abs(&self) -> f64 {
        match self {
            HermitianMatrix::Real(m) => m.max_abs(),
            HermitianMatrix::Complex(m) => m.max_abs(),
        }
    }

    pub fn hermitian_defect(&self) -> f64 {
        match self {
            HermitianMatrix::Real(m) => m.hermitian_defect(),
            HermitianMatrix::Complex(m) => m.hermitian_defect(),
        }
    }

    pub fn is_exactly_hermitian(&self) -> bool {
        match self {
            HermitianMatrix::Real(m) => m.is_exactly_hermitian(),
            HermitianMatrix::Complex(m) => m.is_exactly_hermitian(),
        }
    }

    /// Entrywise `a * self + b * other`; both operands must share the class.
    pub fn axpby(&self, a: f64, other: &HermitianMatrix, b: f64) -> Result<HermitianMatrix> {
        match (self, other) {
            (HermitianMatrix::Real(x), HermitianMatrix::Real(y)) if x.dim() == y.dim() => {
                let data = x.as_slice().iter().zip(y.as_slice()).map(|(&p, &q)| a * p + b * q).collect();
                Ok(HermitianMatrix::Real(Dense::from_row_major(x.dim(), data)?))
            }
            (HermitianMatrix::Complex(x), HermitianMatrix::Complex(y)) if x.dim() == y.dim() => {
                let data = x.as_slice().iter().zip(y.as_slice()).map(|(&p, &q)| p * a + q * b).collect();
                Ok(HermitianMatrix::Complex(Dense::from_row_major(x.dim(), data)?))
            }
            _ => Err(Error::validation("matrices differ in symmetry class or dimension")),
        }
    }

    /// `max_ij |self_ij - other_ij|`.
    pub fn max_abs_diff(&self, other: &HermitianMatrix) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.entry(i, j) - other.entry(i, j)).norm());
            }
        }
        worst
    }
}
