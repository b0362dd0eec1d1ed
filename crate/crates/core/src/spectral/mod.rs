//! Eigendecomposition, resolvent observables and semicircle-law references.

mod sample;
mod semicircle;

pub use sample::{eigen_decompose, ward_sides, Eigenvectors, LocalLawResiduals, SpectralSample};
pub use semicircle::{classical_location, kappa, m_sc, psi, rho_sc, semicircle_cdf, DomainKind, SpectralDomain};
