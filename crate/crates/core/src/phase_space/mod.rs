//! Phase-space algebra: Hamiltonian matrices, symplectic evolution and
//! covariance matrices of two-mode Gaussian states.

mod covariance;
mod hamiltonian;
mod symplectic;

pub use covariance::{
    pure_standard_form, CovarianceMatrix, PureStateStandardForm, PRODUCT_TOL, PURITY_TOL,
    SYMMETRY_TOL,
};
pub use hamiltonian::{
    restricted_svd, GeneratorMatrix, KMatrix, RestrictedSingularValues, RestrictedSvd,
};
pub use symplectic::{
    evolution_standard_form, evolve, symplectic_residual, EvolutionStandardForm,
    LocalRotationPair, SymplecticTransform, SYMPLECTIC_TOL,
};

