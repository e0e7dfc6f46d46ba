use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state is not pure: det(gamma) = {det}")]
    NotPure { det: f64 },

    #[error("invalid covariance matrix: {0}")]
    InvalidCovariance(String),

    #[error("matrix is not symplectic (residual {residual:.3e})")]
    NotSymplectic { residual: f64 },

    #[error("transformation is not passive: {0}")]
    NotPassive(String),

    /// The native Hamiltonian has `s1 = |s2|` and the target is not locally
    /// equivalent to it.
    #[error("degenerate Hamiltonian (s1 = {s1}, s2 = {s2}) cannot reach the target")]
    Degenerate { s1: f64, s2: f64 },

    #[error("interaction time {t} is below the minimum {t_min}")]
    Infeasible { t: f64, t_min: f64 },

    #[error("measured block is numerically singular (condition number {condition:.3e})")]
    SingularBlock { condition: f64 },

    #[error("evolution standard form is undefined: the cosine prefactor vanishes at t = {t}")]
    SingularStandardForm { t: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for errors caused by malformed or out-of-contract input, as
    /// opposed to numerical obstructions.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::NotPure { .. }
                | Error::InvalidCovariance(_)
                | Error::NotSymplectic { .. }
                | Error::NotPassive(_)
                | Error::InvalidInput(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
