//! Entanglement entropy of inhomogeneous free-fermion chains attached to
//! q-Racah polynomials. The truncated correlation matrix of the Fermi sea is
//! diagonalized three independent ways: direct numerical diagonalization, the
//! commuting tridiagonal (Heun) operator, and the algebraic Bethe ansatz with
//! its TQ recurrence, each route cross-validating the others.

pub mod aba;
pub mod chain;
pub mod cli;
pub mod correlation;
pub mod error;
pub mod heun;
pub mod numerics;
pub mod qkernel;
pub mod tq;

pub use chain::{build_chain, spectral_data, validate, ChainModel, SpectralData};
pub use correlation::{
    correlation_data, entanglement_entropy, entropy_profile, full_correlation,
    truncated_correlation, CorrelationData, RegionSpec,
};
pub use error::{Error, Result};
pub use heun::{aw_constants, heun_operator, heun_spectrum, HeunData, HeunSpectrum};
pub use qkernel::ChainParams;
pub use tq::{solve_tq, TqSolution};
