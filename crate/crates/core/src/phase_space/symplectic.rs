use std::ops::Mul;

use nalgebra::{Matrix2, Matrix4};
use serde::{Deserialize, Serialize};

use super::{CovarianceMatrix, KMatrix};
use crate::error::{Error, Result};
use crate::linalg::{self, rot, wrap_angle};

/// Tolerance for `S J S^T = J`, relative to `max(1, |S|^2)`.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// Below this `|alpha|` the evolution uses its Taylor expansion.
const SERIES_THRESHOLD: f64 = 1e-12;

/// Real 4x4 symplectic matrix acting on `(X1, P1, X2, P2)`.
///
/// Composition follows operator order: the transform of `U_a U_b` is
/// `S_a * S_b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SymplecticTransform(Matrix4<f64>);

impl SymplecticTransform {
    pub fn new(m: Matrix4<f64>) -> Result<Self> {
        let residual = symplectic_residual(&m);
        let scale = m.norm_squared().max(1.0);
        if !residual.is_finite() || residual > SYMPLECTIC_TOL * scale {
            return Err(Error::NotSymplectic { residual });
        }
        Ok(Self(m))
    }

    /// Wraps a matrix known to be symplectic by construction.
    pub(crate) fn from_matrix_unchecked(m: Matrix4<f64>) -> Self {
        Self(m)
    }

    pub fn identity() -> Self {
        Self(Matrix4::identity())
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn inverse(&self) -> Self {
        let j = linalg::j2();
        Self(j * self.0.transpose() * j.transpose())
    }

    pub fn residual(&self) -> f64 {
        symplectic_residual(&self.0)
    }

    /// Passive (orthogonal) within `tol`.
    pub fn is_passive(&self, tol: f64) -> bool {
        linalg::max_abs(&(self.0 * self.0.transpose() - Matrix4::identity())) <= tol
    }

    pub fn apply(&self, gamma: &CovarianceMatrix) -> CovarianceMatrix {
        gamma.transformed(&self.0)
    }
}

impl Mul for SymplecticTransform {
    type Output = SymplecticTransform;
    fn mul(self, rhs: Self) -> Self {
        Self(self.0 * rhs.0)
    }
}

impl Mul<&SymplecticTransform> for &SymplecticTransform {
    type Output = SymplecticTransform;
    fn mul(self, rhs: &SymplecticTransform) -> SymplecticTransform {
        SymplecticTransform(self.0 * rhs.0)
    }
}

impl TryFrom<Vec<f64>> for SymplecticTransform {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        let m = linalg::from_row_major(&v).ok_or_else(|| {
            Error::InvalidInput(format!("expected 16 entries, got {}", v.len()))
        })?;
        Self::new(m)
    }
}

impl From<SymplecticTransform> for Vec<f64> {
    fn from(s: SymplecticTransform) -> Self {
        linalg::to_row_major(&s.0)
    }
}

/// `max |S J S^T - J|`.
pub fn symplectic_residual(m: &Matrix4<f64>) -> f64 {
    let j = linalg::j2();
    linalg::max_abs(&(m * j * m.transpose() - j))
}

/// Pair of single-mode phase rotations `R(phi1) ⊕ R(phi2)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LocalRotationPair {
    pub phi1: f64,
    pub phi2: f64,
}

impl LocalRotationPair {
    pub fn new(phi1: f64, phi2: f64) -> Self {
        Self { phi1, phi2 }
    }

    pub fn identity() -> Self {
        Self::default()
    }

    pub fn mode1(&self) -> Matrix2<f64> {
        rot(self.phi1)
    }

    pub fn mode2(&self) -> Matrix2<f64> {
        rot(self.phi2)
    }

    pub fn symplectic(&self) -> SymplecticTransform {
        SymplecticTransform(linalg::direct_sum(&self.mode1(), &self.mode2()))
    }

    /// Rotation applied after `self` (rotations commute mode by mode).
    pub fn then(&self, next: &LocalRotationPair) -> Self {
        Self::new(self.phi1 + next.phi1, self.phi2 + next.phi2).wrapped()
    }

    pub fn inverse(&self) -> Self {
        Self::new(-self.phi1, -self.phi2).wrapped()
    }

    pub fn wrapped(&self) -> Self {
        Self::new(wrap_angle(self.phi1), wrap_angle(self.phi2))
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        let w = self.wrapped();
        w.phi1.abs() <= tol && w.phi2.abs() <= tol
    }
}

/// `c(t) = cosh(sqrt(alpha) t)` and `s(t) = sinh(sqrt(alpha) t) / sqrt(alpha)`,
/// continued analytically to `alpha <= 0`.
pub(crate) fn flow_coefficients(alpha: f64, t: f64) -> (f64, f64) {
    if alpha.abs() < SERIES_THRESHOLD {
        let t2 = t * t;
        let c = 1.0 + alpha * t2 / 2.0 + alpha * alpha * t2 * t2 / 24.0;
        let s = t * (1.0 + alpha * t2 / 6.0 + alpha * alpha * t2 * t2 / 120.0);
        (c, s)
    } else if alpha > 0.0 {
        let w = alpha.sqrt();
        ((w * t).cosh(), (w * t).sinh() / w)
    } else {
        let w = (-alpha).sqrt();
        ((w * t).cos(), (w * t).sin() / w)
    }
}

/// Symplectic matrix of `exp(-i H t)`.
pub fn evolve(k: &KMatrix, t: f64) -> SymplecticTransform {
    let g = k.generator();
    let (c, s) = flow_coefficients(g.alpha, t);
    SymplecticTransform(Matrix4::identity() * c + g.m * s)
}

/// `S(t) = prefactor (O1 ⊕ O2) N(h1, h2) (O1 ⊕ O2)^T` where `O1, O2` come
/// from the restricted SVD `J^T K = O1 diag(s1, s2) O2^T` and
/// `N = [[1, 0, h1, 0], [0, 1, 0, h2], [-h2, 0, 1, 0], [0, -h1, 0, 1]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionStandardForm {
    pub o1: f64,
    pub o2: f64,
    pub prefactor: f64,
    pub h1: f64,
    pub h2: f64,
}

impl EvolutionStandardForm {
    pub fn middle(&self) -> Matrix4<f64> {
        let (h1, h2) = (self.h1, self.h2);
        Matrix4::new(
            1.0, 0.0, h1, 0.0, //
            0.0, 1.0, 0.0, h2, //
            -h2, 0.0, 1.0, 0.0, //
            0.0, -h1, 0.0, 1.0,
        )
    }

    pub fn reconstruct(&self) -> Matrix4<f64> {
        let o = linalg::direct_sum(&rot(self.o1), &rot(self.o2));
        o * self.middle() * o.transpose() * self.prefactor
    }
}

pub fn evolution_standard_form(k: &KMatrix, t: f64) -> Result<EvolutionStandardForm> {
    let g = k.generator();
    let (c, s) = flow_coefficients(g.alpha, t);
    if c.abs() < 1e-14 {
        return Err(Error::SingularStandardForm { t });
    }
    let svd = super::restricted_svd(&g.l());
    let ratio = s / c;
    Ok(EvolutionStandardForm {
        o1: svd.left,
        o2: -svd.right,
        prefactor: c,
        h1: ratio * svd.values.s1,
        h2: ratio * svd.values.s2,
    })
}
