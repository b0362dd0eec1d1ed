//! Wigner and Gaussian ensembles, the Ornstein–Uhlenbeck interpolation and
//! entry cumulants.
//!
//! Each matrix is filled from its own ChaCha stream, keyed by the seed and
//! selected by `(purpose, N, replicate)`; entries `i <= j` are drawn in
//! row-major order. Equal inputs therefore give bitwise-equal matrices no
//! matter how replicates are scheduled.

mod container;
mod cumulants;
mod law;

pub use container::{read_container, read_container_file, write_container, write_container_file, write_csv, MAGIC};
pub use cumulants::{
    cumulants, flow_cumulants, moments_to_cumulants, sample_cumulants, CumulantEntry, CumulantSource, CumulantTable,
};
pub use law::{EntryLaw, LawDescriptor, LawName, STORED_MOMENTS};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Beta, Dense, HermitianMatrix};
use crate::rng::{self, Purpose};

/// Symmetry class, dimension and entry law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub beta: Beta,
    pub dim: usize,
    pub law: EntryLaw,
}

impl EnsembleSpec {
    pub fn new(beta: Beta, dim: usize, law: EntryLaw) -> Result<Self> {
        let spec = EnsembleSpec { beta, dim, law };
        spec.validate()?;
        Ok(spec)
    }

    pub fn gaussian(beta: Beta, dim: usize) -> Result<Self> {
        Self::new(beta, dim, EntryLaw::gaussian())
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::validation(format!("dimension must be at least 2, got {}", self.dim)));
        }
        if self.dim >= 1 << 20 {
            return Err(Error::validation("dimension too large"));
        }
        if self.beta == Beta::Complex && !self.law.complex_pairs {
            return Err(Error::validation(format!(
                "law `{}` has no complex variant; use beta = 1 or set \"complex\": true",
                self.law.name.as_str()
            )));
        }
        Ok(())
    }

    /// Short label such as `GUE`, `rademacher-b2`.
    pub fn label(&self) -> String {
        match (self.law.name, self.beta) {
            (LawName::Gaussian, Beta::Real) if self.law.diag_variance.is_none() => "GOE".into(),
            (LawName::Gaussian, Beta::Complex) if self.law.diag_variance.is_none() => "GUE".into(),
            (name, beta) => format!("{}-b{}", name.as_str(), beta.as_u8()),
        }
    }
}

/// Wigner matrix with `sqrt(N) H_ij` drawn from `spec.law`.
pub fn sample_wigner(spec: &EnsembleSpec, seed: u64) -> Result<HermitianMatrix> {
    sample_replicate(spec, seed, 0)
}

/// As [`sample_wigner`], from the stream of replicate `replicate`.
pub fn sample_replicate(spec: &EnsembleSpec, seed: u64, replicate: u64) -> Result<HermitianMatrix> {
    spec.validate()?;
    let mut rng = rng::stream(seed, Purpose::Matrix, spec.dim, replicate);
    Ok(fill(spec, &mut rng))
}

/// GOE (`beta = 1`) or GUE (`beta = 2`) matrix.
pub fn sample_gaussian(beta: Beta, dim: usize, seed: u64) -> Result<HermitianMatrix> {
    sample_wigner(&EnsembleSpec::gaussian(beta, dim)?, seed)
}

fn fill<R: Rng>(spec: &EnsembleSpec, rng: &mut R) -> HermitianMatrix {
    let n = spec.dim;
    let scale = 1.0 / (n as f64).sqrt();
    let dscale = spec.law.diag_variance_for(spec.beta).sqrt() * scale;
    match spec.beta {
        Beta::Real => {
            let mut m = Dense::<f64>::zeros(n);
            for i in 0..n {
                m.set(i, i, dscale * spec.law.draw(rng));
                for j in i + 1..n {
                    let v = scale * spec.law.draw(rng);
                    m.set(i, j, v);
                    m.set(j, i, v);
                }
            }
            HermitianMatrix::Real(m)
        }
        Beta::Complex => {
            let mut m = Dense::<Complex64>::zeros(n);
            let s = scale * std::f64::consts::FRAC_1_SQRT_2;
            for i in 0..n {
                m.set(i, i, Complex64::new(dscale * spec.law.draw(rng), 0.0));
                for j in i + 1..n {
                    let v = Complex64::new(s * spec.law.draw(rng), s * spec.law.draw(rng));
                    m.set(i, j, v);
                    m.set(j, i, v.conj());
                }
            }
            HermitianMatrix::Complex(m)
        }
    }
}

/// A point on a coupled Ornstein–Uhlenbeck trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowPoint {
    pub t: f64,
    pub base_seed: u64,
    pub gaussian_seed: u64,
}

/// The Gaussian summand of a trajectory: a GOE/GUE matrix from the
/// flow-Gaussian stream of `gaussian_seed`.
pub fn flow_gaussian(beta: Beta, dim: usize, gaussian_seed: u64, replicate: u64) -> Result<HermitianMatrix> {
    let spec = EnsembleSpec::gaussian(beta, dim)?;
    let mut rng = rng::stream(gaussian_seed, Purpose::FlowGaussian, dim, replicate);
    Ok(fill(&spec, &mut rng))
}

/// `H(t) = e^{-t/2} H0 + sqrt(1 - e^{-t}) G` with `G` generated from
/// `point.gaussian_seed` (`point.base_seed` is recorded for provenance; `H0`
/// is supplied by the caller).
pub fn interpolate_flow(h0: &HermitianMatrix, point: &FlowPoint) -> Result<HermitianMatrix> {
    let g = flow_gaussian(h0.beta(), h0.dim(), point.gaussian_seed, 0)?;
    FlowPair::new(h0.clone(), g)?.at(point.t)
}

/// The full trajectory of one replicate: `H0` from `base_seed` and `G` from
/// `gaussian_seed`.
pub fn flow_trajectory(spec: &EnsembleSpec, base_seed: u64, gaussian_seed: u64, replicate: u64) -> Result<FlowPair> {
    let h0 = sample_replicate(spec, base_seed, replicate)?;
    let g = flow_gaussian(spec.beta, spec.dim, gaussian_seed, replicate)?;
    FlowPair::new(h0, g)
}

/// A fixed `(H0, G)` pair evaluated at any flow time.
#[derive(Debug, Clone)]
pub struct FlowPair {
    pub h0: HermitianMatrix,
    pub g: HermitianMatrix,
}

impl FlowPair {
    pub fn new(h0: HermitianMatrix, g: HermitianMatrix) -> Result<Self> {
        if h0.beta() != g.beta() || h0.dim() != g.dim() {
            return Err(Error::validation("initial matrix and Gaussian summand differ in class or dimension"));
        }
        if !h0.is_exactly_hermitian() {
            return Err(Error::NotHermitian(h0.hermitian_defect()));
        }
        Ok(FlowPair { h0, g })
    }

    pub fn at(&self, t: f64) -> Result<HermitianMatrix> {
        if !(t >= 0.0) {
            return Err(Error::validation(format!("flow time must be >= 0, got {t}")));
        }
        if t == 0.0 {
            return Ok(self.h0.clone());
        }
        self.h0.axpby((-t / 2.0).exp(), &self.g, (-(-t).exp_m1()).sqrt())
    }
}

/// Terminal flow time `8 log N`.
pub fn terminal_time(n: usize) -> f64 {
    8.0 * (n as f64).ln()
}
