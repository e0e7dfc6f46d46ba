//! Two-mode Gaussian dynamics under bilinear Hamiltonians.
//!
//! A bilinear interaction `H = (X1, P1) K (X2, P2)^T` combined with fast
//! local phase rotations can simulate other bilinear Hamiltonians, generate
//! entanglement and squeezing at rates fixed by the restricted singular
//! values of `K`, and implement any two-mode Gaussian unitary. This crate
//! provides the phase-space algebra and the algorithms for each of these.
//!
//! All covariance matrices use the basis `(X1, P1, X2, P2)` with the vacuum
//! normalized to the identity.

pub mod error;
pub mod gates;
pub mod linalg;
pub mod measures;
pub mod phase_space;
pub mod protocols;
pub mod rates;
pub mod sampling;
pub mod simulate;

pub use error::{Error, Result};
pub use phase_space::{
    evolve, restricted_svd, CovarianceMatrix, KMatrix, LocalRotationPair,
    RestrictedSingularValues, SymplecticTransform,
};
pub use simulate::{Protocol, ProtocolStep, SimulationPlan};
