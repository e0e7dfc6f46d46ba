//! Entanglement and squeezing of two-mode Gaussian states.

use nalgebra::{Matrix4, Vector2, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg;
use crate::phase_space::CovarianceMatrix;

/// Two smallest eigenvalues closer than this are reported as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    /// Two-mode squeezing parameter.
    pub r: f64,
    /// Log-negativity, equal to `r` for pure states.
    #[serde(rename = "E0")]
    pub e0: f64,
    /// `det A = cosh^2 r`.
    #[serde(rename = "Ep")]
    pub ep: f64,
    pub negativity: f64,
    /// `cosh^2 ρ ln cosh^2 ρ - sinh^2 ρ ln sinh^2 ρ` evaluated at `ρ = r`,
    /// with `cosh r = sqrt(det A)`.
    pub entropy: f64,
    /// The same expression at `ρ = r/2`, i.e. `ρ = acosh(sqrt(det A))/2`.
    /// This is the von Neumann entropy (in nats) of either reduced state.
    pub entropy_half_r: f64,
    /// The two entropy parameterizations disagree whenever `r > 0`.
    pub entropy_convention_warning: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezingReport {
    pub lambda_min: f64,
    /// `1 / lambda_min`.
    #[serde(rename = "S")]
    pub s: f64,
    /// `log S`.
    #[serde(rename = "Q")]
    pub q: f64,
    /// Unit eigenvector of `lambda_min`.
    pub eigenvector: [f64; 4],
    pub x1_norm: f64,
    pub x2_norm: f64,
    /// The two smallest eigenvalues coincide within [`DEGENERACY_TOL`]; the
    /// eigenvector is then one arbitrary element of the eigenspace.
    pub degenerate: bool,
}

impl SqueezingReport {
    pub fn x1(&self) -> Vector2<f64> {
        Vector2::new(self.eigenvector[0], self.eigenvector[1])
    }

    pub fn x2(&self) -> Vector2<f64> {
        Vector2::new(self.eigenvector[2], self.eigenvector[3])
    }
}

/// `r = asinh sqrt(-det C)`, which equals `acosh sqrt(det A)` on pure states
/// and stays accurate for small `r`.
pub fn two_mode_squeezing(gamma: &CovarianceMatrix) -> Result<f64> {
    gamma.ensure_pure()?;
    Ok((-gamma.c().determinant()).max(0.0).sqrt().asinh())
}

/// `Λ γ Λ` with `Λ = diag(1, 1, 1, -1)`.
pub fn partial_transpose(gamma: &Matrix4<f64>) -> Matrix4<f64> {
    let lam = Matrix4::from_diagonal(&Vector4::new(1.0, 1.0, 1.0, -1.0));
    lam * gamma * lam
}

/// Smallest symplectic eigenvalue of the partial transpose.
///
/// The symplectic eigenvalues squared are the eigenvalues of
/// `J2^T γ̃ J2 γ̃`, which is similar to the symmetric positive matrix
/// `γ̃^{1/2} J2^T γ̃ J2 γ̃^{1/2}`.
pub fn min_symplectic_eigenvalue_pt(gamma: &CovarianceMatrix) -> f64 {
    let gt = partial_transpose(gamma.matrix());
    let root = linalg::sqrt_psd(&gt);
    let j = linalg::j2();
    let w = root * j.transpose() * gt * j * root;
    let (values, _) = linalg::sorted_eigen(&w);
    values[0].max(0.0).sqrt()
}

/// `N = 1 / ν̃_min`.
pub fn negativity(gamma: &CovarianceMatrix) -> f64 {
    1.0 / min_symplectic_eigenvalue_pt(gamma)
}

/// `cosh^2 ρ ln cosh^2 ρ - sinh^2 ρ ln sinh^2 ρ`.
fn pure_state_entropy(rho: f64) -> f64 {
    if rho <= 0.0 {
        return 0.0;
    }
    let c = rho.cosh().powi(2);
    let s = rho.sinh().powi(2);
    c * c.ln() - s * s.ln()
}

pub fn entanglement(gamma: &CovarianceMatrix) -> Result<EntanglementReport> {
    let r = two_mode_squeezing(gamma)?;
    let ep = gamma.a().determinant();
    Ok(EntanglementReport {
        r,
        e0: r,
        ep,
        negativity: negativity(gamma),
        entropy: pure_state_entropy(r),
        entropy_half_r: pure_state_entropy(r / 2.0),
        entropy_convention_warning: r > 0.0,
    })
}

/// Smallest eigenvalue of `γ` and its eigenvector.
pub fn squeezing(gamma: &CovarianceMatrix) -> SqueezingReport {
    let (values, vectors) = linalg::sorted_eigen(gamma.matrix());
    let v = vectors.column(0);
    let lambda_min = values[0];
    let x1 = v.rows(0, 2).norm();
    let x2 = v.rows(2, 2).norm();
    SqueezingReport {
        lambda_min,
        s: 1.0 / lambda_min,
        q: -lambda_min.ln(),
        eigenvector: [v[0], v[1], v[2], v[3]],
        x1_norm: x1,
        x2_norm: x2,
        degenerate: (values[1] - values[0]).abs() < DEGENERACY_TOL,
    }
}

/// Orthonormal basis of the eigenspace of `lambda_min`, as columns.
pub fn min_eigenspace(gamma: &CovarianceMatrix, tol: f64) -> Vec<Vector4<f64>> {
    let (values, vectors) = linalg::sorted_eigen(gamma.matrix());
    (0..4)
        .filter(|&i| values[i] - values[0] < tol)
        .map(|i| vectors.column(i).into_owned())
        .collect()
}
