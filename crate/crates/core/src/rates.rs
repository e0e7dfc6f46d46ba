//! Optimal instantaneous entanglement and squeezing rates.
//!
//! For a pure state `γ` and native `K`, local rotations applied just before
//! a short interaction select which rotated copy `R^T K S` acts. The
//! functions here return the best achievable rate and the rotation pair
//! attaining it.

use nalgebra::{DMatrix, Matrix2, SymmetricEigen, Vector2, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, sigma_z};
use crate::measures::{self, DEGENERACY_TOL};
use crate::phase_space::{restricted_svd, CovarianceMatrix, KMatrix, LocalRotationPair};

/// Below this `-det C` the state is treated as a product state and `Y` is
/// taken from the standard form instead of the block formula.
pub const ENTANGLED_TOL: f64 = 1e-14;

/// `Y` such that the rate of `r` under `K` is `tr(J^T K Y)`.
///
/// Equal to `sqrt(det A / -det C) C^T A^{-1}` for entangled states and to
/// `S2 σz S1^{-1}` from the standard form in general.
pub fn y_matrix(gamma: &CovarianceMatrix) -> Result<Matrix2<f64>> {
    gamma.ensure_pure()?;
    let (a, c) = (gamma.a(), gamma.c());
    let neg_det_c = -c.determinant();
    if neg_det_c >= ENTANGLED_TOL {
        let a_inv = a
            .try_inverse()
            .ok_or_else(|| Error::InvalidCovariance("singular reduced block".into()))?;
        Ok(c.transpose() * a_inv * (a.determinant() / neg_det_c).sqrt())
    } else {
        let f = gamma.pure_standard_form()?;
        let s1_inv = f
            .s1
            .try_inverse()
            .ok_or_else(|| Error::InvalidCovariance("singular local factor".into()))?;
        Ok(f.s2 * sigma_z() * s1_inv)
    }
}

/// Local squeezing parameter: the restricted singular values of `Y` are
/// `(e^l, -e^{-l})`.
pub fn local_squeezing_param(gamma: &CovarianceMatrix) -> Result<f64> {
    let y = y_matrix(gamma)?;
    Ok(restricted_svd(&y).values.s1.ln().max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntanglementRatePlan {
    pub l: f64,
    /// `s1 e^l - s2 e^{-l}`.
    pub gamma_rate: f64,
    /// Rotation pair to apply to the state before the interaction.
    pub pre_rotation: LocalRotationPair,
    /// Pair `(O1, O2)` with `O2 Y O1^T = diag(e^l, -e^{-l})`.
    pub diagonalizing: LocalRotationPair,
    /// Pair from the restricted SVD `J^T K = O1 diag(s1, s2) O2^T`.
    pub frame: LocalRotationPair,
    /// Row-major `Y`.
    pub y: [f64; 4],
}

/// Rate of `r` when `pair = (O1, O2)` is applied to the state first:
/// `tr(J^T K O2 Y O1^T)`.
pub fn entanglement_rate_general(
    gamma: &CovarianceMatrix,
    k: &KMatrix,
    pair: &LocalRotationPair,
) -> Result<f64> {
    if -gamma.c().determinant() < ENTANGLED_TOL {
        return Err(Error::InvalidInput(
            "the rate for fixed rotations is defined only for entangled states".into(),
        ));
    }
    let y = y_matrix(gamma)?;
    let l = linalg::j().transpose() * k.matrix();
    Ok((l * pair.mode2() * y * pair.mode1().transpose()).trace())
}

pub fn optimal_entanglement_rate(
    gamma: &CovarianceMatrix,
    k: &KMatrix,
) -> Result<EntanglementRatePlan> {
    let y = y_matrix(gamma)?;
    let ysvd = restricted_svd(&y);
    let lsvd = restricted_svd(&(linalg::j().transpose() * k.matrix()));
    let l = ysvd.values.s1.ln().max(0.0);
    let s = lsvd.values;
    Ok(EntanglementRatePlan {
        l,
        gamma_rate: s.s1 * l.exp() - s.s2 * (-l).exp(),
        pre_rotation: LocalRotationPair::new(lsvd.left + ysvd.right, -lsvd.right - ysvd.left)
            .wrapped(),
        diagonalizing: LocalRotationPair::new(ysvd.right, -ysvd.left).wrapped(),
        frame: LocalRotationPair::new(lsvd.left, -lsvd.right).wrapped(),
        y: [y[(0, 0)], y[(0, 1)], y[(1, 0)], y[(1, 1)]],
    })
}

/// `C_S = s1 - s2`.
pub fn squeezing_capability(k: &KMatrix) -> f64 {
    let s = k.singular_values();
    s.s1 - s.s2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezingRatePlan {
    /// Squeezing capability `s1 - s2`.
    pub c_s: f64,
    /// Squeezability `2 |x1| |x2|`.
    pub g_s: f64,
    pub gamma_rate: f64,
    /// Angle of the mode-1 rotation applied to the state before the
    /// interaction; mode 2 is left alone.
    pub r_opt: f64,
    /// Minimal eigenvector the plan is built on.
    pub eigenvector: [f64; 4],
    pub degenerate: bool,
}

impl SqueezingRatePlan {
    pub fn pre_rotation(&self) -> LocalRotationPair {
        LocalRotationPair::new(self.r_opt, 0.0)
    }
}

/// Rate of `Q = -log λ_min` when `pair` is applied to the state first,
/// along the eigenvector `x`: `-2 x1^T R^T N S x2` with `N = J^T K + K J`.
pub fn squeezing_rate_along(x: &Vector4<f64>, k: &KMatrix, pair: &LocalRotationPair) -> f64 {
    let n = linalg::j().transpose() * k.matrix() + k.matrix() * linalg::j();
    let x1 = Vector2::new(x[0], x[1]);
    let x2 = Vector2::new(x[2], x[3]);
    -2.0 * (pair.mode1() * x1).dot(&(n * pair.mode2() * x2))
}

/// Picks the minimal eigenvector; on a degenerate eigenspace, the element
/// whose mode-1 weight is closest to one half.
fn balanced_min_eigenvector(gamma: &CovarianceMatrix) -> (Vector4<f64>, bool) {
    let report = measures::squeezing(gamma);
    let v = Vector4::from_column_slice(&report.eigenvector);
    if !report.degenerate {
        return (v, false);
    }
    let basis = measures::min_eigenspace(gamma, DEGENERACY_TOL);
    let k = basis.len();
    let mut g = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            g[(i, j)] = basis[i][0] * basis[j][0] + basis[i][1] * basis[j][1];
        }
    }
    let eig = SymmetricEigen::new(g);
    let (mut lo, mut hi) = (0, 0);
    for i in 0..k {
        if eig.eigenvalues[i] < eig.eigenvalues[lo] {
            lo = i;
        }
        if eig.eigenvalues[i] > eig.eigenvalues[hi] {
            hi = i;
        }
    }
    let (mu_lo, mu_hi) = (eig.eigenvalues[lo], eig.eigenvalues[hi]);
    let coeffs = if mu_hi <= 0.5 {
        eig.eigenvectors.column(hi).into_owned()
    } else if mu_lo >= 0.5 {
        eig.eigenvectors.column(lo).into_owned()
    } else {
        let sin2 = (0.5 - mu_lo) / (mu_hi - mu_lo);
        eig.eigenvectors.column(lo) * (1.0 - sin2).sqrt() + eig.eigenvectors.column(hi) * sin2.sqrt()
    };
    let x = basis
        .iter()
        .zip(coeffs.iter())
        .fold(Vector4::zeros(), |acc, (b, c)| acc + b * *c);
    (x.normalize(), true)
}

pub fn optimal_squeezing_rate(gamma: &CovarianceMatrix, k: &KMatrix) -> SqueezingRatePlan {
    let (x, degenerate) = balanced_min_eigenvector(gamma);
    let x1 = Vector2::new(x[0], x[1]);
    let x2 = Vector2::new(x[2], x[3]);
    let c_s = squeezing_capability(k);
    let (n1, n2) = (x1.norm(), x2.norm());
    let g_s = 2.0 * n1 * n2;

    let svd = k.restricted_svd();
    let sigma_x = Matrix2::new(0.0, 1.0, 1.0, 0.0);
    // The rate is 2 C_S (R x1)^T (R_K σx S_K x2); align R x1 with the second factor.
    let w = svd.left_matrix() * sigma_x * svd.right_matrix() * x2;
    let r_opt = if n1 > 1e-15 && n2 > 1e-15 && c_s > 0.0 {
        linalg::wrap_angle(w[1].atan2(w[0]) - x1[1].atan2(x1[0]))
    } else {
        0.0
    };
    SqueezingRatePlan {
        c_s,
        g_s,
        gamma_rate: c_s * g_s,
        r_opt,
        eigenvector: [x[0], x[1], x[2], x[3]],
        degenerate,
    }
}
