use nalgebra::{Matrix2, Matrix4};
use serde::{Deserialize, Serialize};

use std::f64::consts::PI;

use super::LocalRotationPair;
use crate::linalg::{self, rot, wrap_angle};

/// Bilinear two-mode Hamiltonian `H = (X1, P1) K (X2, P2)^T` with
/// `K = [[a, d], [c, b]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KMatrix {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl KMatrix {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub fn from_matrix(m: &Matrix2<f64>) -> Self {
        Self::new(m[(0, 0)], m[(1, 1)], m[(1, 0)], m[(0, 1)])
    }

    pub fn matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.a, self.d, self.c, self.b)
    }

    /// `X1 X2`.
    pub fn h0() -> Self {
        Self::new(1.0, 0.0, 0.0, 0.0)
    }

    /// `X1 P2 - P1 X2`.
    pub fn beam_splitter() -> Self {
        Self::new(0.0, 0.0, -1.0, 1.0)
    }

    /// `X1 X2 - P1 P2`.
    pub fn two_mode_squeezer() -> Self {
        Self::new(1.0, -1.0, 0.0, 0.0)
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0)
    }

    pub fn det(&self) -> f64 {
        self.a * self.b - self.c * self.d
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite() && self.d.is_finite()
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self::from_matrix(&(self.matrix() * k))
    }

    pub fn restricted_svd(&self) -> RestrictedSvd {
        restricted_svd(&self.matrix())
    }

    pub fn singular_values(&self) -> RestrictedSingularValues {
        self.restricted_svd().values
    }

    /// The Hamiltonian seen after the local pair `(R, S)` is applied before
    /// and undone after the interaction: `R^T K S`.
    pub fn rotated(&self, pair: &LocalRotationPair) -> Self {
        Self::from_matrix(&(pair.mode1().transpose() * self.matrix() * pair.mode2()))
    }

    pub fn generator(&self) -> GeneratorMatrix {
        GeneratorMatrix::new(self)
    }
}

/// Singular values with the sign of the determinant carried by `s2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestrictedSingularValues {
    pub s1: f64,
    pub s2: f64,
}

impl RestrictedSingularValues {
    pub fn diag(&self) -> Matrix2<f64> {
        Matrix2::new(self.s1, 0.0, 0.0, self.s2)
    }

    /// `s1 = |s2|`: the Hamiltonian is locally a (scaled) beam splitter or
    /// two-mode squeezer, or zero.
    pub fn is_degenerate(&self, tol: f64) -> bool {
        (self.s1 - self.s2.abs()).abs() <= tol * self.s1.max(1.0)
    }
}

/// `M = Rot(left) diag(s1, s2) Rot(right)`, with `s1 >= |s2|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestrictedSvd {
    pub left: f64,
    pub values: RestrictedSingularValues,
    pub right: f64,
}

impl RestrictedSvd {
    pub fn left_matrix(&self) -> Matrix2<f64> {
        rot(self.left)
    }

    pub fn right_matrix(&self) -> Matrix2<f64> {
        rot(self.right)
    }

    pub fn reconstruct(&self) -> Matrix2<f64> {
        self.left_matrix() * self.values.diag() * self.right_matrix()
    }
}

/// Decomposes a real 2x2 matrix into rotation, signed diagonal, rotation.
///
/// The factorization splits `M` into a conformal part `Q Rot(a2)` and an
/// anti-conformal part `R Rot(a1) sigma_z`, giving `s1 = Q + R`,
/// `s2 = Q - R`. Among the equivalent factorizations the one with the left
/// rotation closest to the identity is returned; when the left rotation is
/// arbitrary it is set to the identity.
pub fn restricted_svd(m: &Matrix2<f64>) -> RestrictedSvd {
    let e = 0.5 * (m[(0, 0)] + m[(1, 1)]);
    let f = 0.5 * (m[(0, 0)] - m[(1, 1)]);
    let g = 0.5 * (m[(1, 0)] + m[(0, 1)]);
    let h = 0.5 * (m[(1, 0)] - m[(0, 1)]);
    let q = e.hypot(h);
    let r = f.hypot(g);
    let s1 = q + r;
    let s2 = q - r;
    let scale = s1.max(f64::MIN_POSITIVE);

    let (left, right) = if s1 == 0.0 {
        (0.0, 0.0)
    } else if r <= 1e-15 * scale {
        (0.0, h.atan2(e))
    } else if q <= 1e-15 * scale {
        (0.0, -g.atan2(f))
    } else {
        let a1 = g.atan2(f);
        let a2 = h.atan2(e);
        let mut phi = 0.5 * (a2 + a1);
        let mut theta = 0.5 * (a2 - a1);
        if phi > 0.5 * PI {
            phi -= PI;
            theta -= PI;
        } else if phi <= -0.5 * PI {
            phi += PI;
            theta += PI;
        }
        (phi, theta)
    };

    RestrictedSvd {
        left: wrap_angle(left),
        values: RestrictedSingularValues { s1, s2 },
        right: wrap_angle(right),
    }
}

/// Generator of the phase-space flow: `S(t) = exp(M t)` with `M^2 = alpha I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorMatrix {
    pub m: Matrix4<f64>,
    pub alpha: f64,
}

impl GeneratorMatrix {
    pub fn new(k: &KMatrix) -> Self {
        let jt = linalg::j().transpose();
        let l = jt * k.matrix();
        let lt = jt * k.matrix().transpose();
        let z = Matrix2::zeros();
        Self {
            m: linalg::from_blocks(&z, &l, &lt, &z),
            alpha: -k.det(),
        }
    }

    /// Upper-right block `L = J^T K`.
    pub fn l(&self) -> Matrix2<f64> {
        linalg::block(&self.m, 0, 1)
    }
}
