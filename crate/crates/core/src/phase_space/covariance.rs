use nalgebra::{Matrix2, Matrix4};
use serde::{Deserialize, Serialize};

use super::{restricted_svd, SymplecticTransform};
use crate::error::{Error, Result};
use crate::linalg::{self, rot, sigma_z};

pub const SYMMETRY_TOL: f64 = 1e-10;
pub const PURITY_TOL: f64 = 1e-9;
/// `|C|` below which a pure state is treated as a product state.
pub const PRODUCT_TOL: f64 = 1e-10;

/// Covariance (correlation) matrix of a two-mode Gaussian state, with the
/// vacuum normalized to the identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct CovarianceMatrix(Matrix4<f64>);

impl CovarianceMatrix {
    /// Validates symmetry, positive definiteness and `det >= 1`.
    pub fn new(m: Matrix4<f64>) -> Result<Self> {
        let cm = Self::positive_definite(m)?;
        let det = cm.det();
        if det < 1.0 - PURITY_TOL {
            return Err(Error::InvalidCovariance(format!(
                "det = {det} violates the uncertainty principle"
            )));
        }
        Ok(cm)
    }

    /// Validates symmetry and positive definiteness only. Used for outputs
    /// such as conditional states, which need not satisfy `det >= 1`.
    pub fn positive_definite(m: Matrix4<f64>) -> Result<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidCovariance("non-finite entry".into()));
        }
        let asym = linalg::max_abs(&(m - m.transpose()));
        if asym > SYMMETRY_TOL * linalg::max_abs(&m).max(1.0) {
            return Err(Error::InvalidCovariance(format!(
                "not symmetric (max asymmetry {asym:.3e})"
            )));
        }
        let sym = linalg::symmetrize(&m);
        if sym.cholesky().is_none() {
            return Err(Error::InvalidCovariance("not positive definite".into()));
        }
        Ok(Self(sym))
    }

    pub(crate) fn from_matrix_unchecked(m: Matrix4<f64>) -> Self {
        Self(linalg::symmetrize(&m))
    }

    pub fn vacuum() -> Self {
        Self(Matrix4::identity())
    }

    /// `1 ⊕ diag(e^{-r}, e^{r})`: vacuum in mode 1, squeezed vacuum in mode 2.
    pub fn squeezed_mode2(r: f64) -> Self {
        let b = Matrix2::new((-r).exp(), 0.0, 0.0, r.exp());
        Self(linalg::direct_sum(&Matrix2::identity(), &b))
    }

    /// `[[cosh 2t' I, sinh 2t' sigma_z], [sinh 2t' sigma_z, cosh 2t' I]]`.
    pub fn two_mode_squeezed(t_prime: f64) -> Self {
        let (c, s) = ((2.0 * t_prime).cosh(), (2.0 * t_prime).sinh());
        let i = Matrix2::identity() * c;
        let z = sigma_z() * s;
        Self(linalg::from_blocks(&i, &z, &z, &i))
    }

    /// `S γ_tms(t0/2) S^T` with `S = diag(e^{r1/2}, e^{-r1/2}, e^{r2/2}, e^{-r2/2})`.
    pub fn locally_squeezed_tms(r1: f64, r2: f64, t0: f64) -> Self {
        let s = Matrix4::from_diagonal(&nalgebra::Vector4::new(
            (r1 / 2.0).exp(),
            (-r1 / 2.0).exp(),
            (r2 / 2.0).exp(),
            (-r2 / 2.0).exp(),
        ));
        Self::two_mode_squeezed(t0 / 2.0).transformed(&s)
    }

    pub fn product(a: &Matrix2<f64>, b: &Matrix2<f64>) -> Result<Self> {
        Self::new(linalg::direct_sum(a, b))
    }

    /// The pure state `S S^T`.
    pub fn from_symplectic(s: &SymplecticTransform) -> Self {
        let m = s.matrix();
        Self::from_matrix_unchecked(m * m.transpose())
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn a(&self) -> Matrix2<f64> {
        linalg::block(&self.0, 0, 0)
    }

    pub fn b(&self) -> Matrix2<f64> {
        linalg::block(&self.0, 1, 1)
    }

    pub fn c(&self) -> Matrix2<f64> {
        linalg::block(&self.0, 0, 1)
    }

    pub fn det(&self) -> f64 {
        self.0.determinant()
    }

    pub fn is_pure(&self) -> bool {
        (self.det() - 1.0).abs() <= PURITY_TOL
    }

    pub fn ensure_pure(&self) -> Result<()> {
        if self.is_pure() {
            Ok(())
        } else {
            Err(Error::NotPure { det: self.det() })
        }
    }

    /// `S γ S^T`.
    pub fn transformed(&self, s: &Matrix4<f64>) -> Self {
        Self::from_matrix_unchecked(s * self.0 * s.transpose())
    }

    pub fn apply(&self, s: &SymplecticTransform) -> Self {
        self.transformed(s.matrix())
    }

    pub fn pure_standard_form(&self) -> Result<PureStateStandardForm> {
        pure_standard_form(self)
    }
}

impl TryFrom<Vec<f64>> for CovarianceMatrix {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        let m = linalg::from_row_major(&v).ok_or_else(|| {
            Error::InvalidInput(format!("expected 16 entries, got {}", v.len()))
        })?;
        Self::new(m)
    }
}

impl From<CovarianceMatrix> for Vec<f64> {
    fn from(c: CovarianceMatrix) -> Self {
        linalg::to_row_major(&c.0)
    }
}

/// `γ = (S1 ⊕ S2) [[cosh r I, sinh r σz], [sinh r σz, cosh r I]] (S1 ⊕ S2)^T`
/// with `S_k = O_k D_k O'_k`, `D_k = diag(e^{r_k}, e^{-r_k})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureStateStandardForm {
    pub s1: Matrix2<f64>,
    pub s2: Matrix2<f64>,
    pub r: f64,
    /// Local squeezing of `S1` and `S2`.
    pub r1: f64,
    pub r2: f64,
    /// `C` vanished; `S1`, `S2` are then fixed by the canonical choice
    /// `O'_1 = J`, `O'_2 = I`.
    pub product: bool,
}

impl PureStateStandardForm {
    pub fn reassemble(&self) -> Matrix4<f64> {
        let (c, s) = (self.r.cosh(), self.r.sinh());
        let core = linalg::from_blocks(
            &(Matrix2::identity() * c),
            &(sigma_z() * s),
            &(sigma_z() * s),
            &(Matrix2::identity() * c),
        );
        let outer = linalg::direct_sum(&self.s1, &self.s2);
        outer * core * outer.transpose()
    }
}

pub fn pure_standard_form(gamma: &CovarianceMatrix) -> Result<PureStateStandardForm> {
    gamma.ensure_pure()?;
    let (a, b, c) = (gamma.a(), gamma.b(), gamma.c());

    let (th1, a_big, a_small) = linalg::sym2_eigen(&a);
    let (th2, b_big, b_small) = linalg::sym2_eigen(&b);
    let r1 = (a_big / a_small).ln() / 4.0;
    let r2 = (b_big / b_small).ln() / 4.0;
    let d = |rk: f64| Matrix2::new(rk.exp(), 0.0, 0.0, (-rk).exp());
    let (o1, o2) = (rot(th1), rot(th2));

    let product = c.norm() <= PRODUCT_TOL;
    let (r, o1p, o2p) = if product {
        (0.0, linalg::j(), Matrix2::identity())
    } else {
        let r = (-c.determinant()).max(0.0).sqrt().asinh();
        let x = d(-r1) * o1.transpose() * c * o2 * d(-r2);
        let svd = restricted_svd(&x);
        (r, svd.left_matrix(), svd.right_matrix().transpose())
    };

    Ok(PureStateStandardForm {
        s1: o1 * d(r1) * o1p,
        s2: o2 * d(r2) * o2p,
        r,
        r1,
        r2,
        product,
    })
}
