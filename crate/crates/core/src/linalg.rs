//! Small dense helpers shared across modules.

use nalgebra::{Matrix2, Matrix4, SymmetricEigen, Vector4};

use std::f64::consts::PI;

/// Single-mode symplectic form `[[0, -1], [1, 0]]`.
pub fn j() -> Matrix2<f64> {
    Matrix2::new(0.0, -1.0, 1.0, 0.0)
}

/// Two-mode symplectic form `J ⊕ J`.
pub fn j2() -> Matrix4<f64> {
    direct_sum(&j(), &j())
}

pub fn sigma_z() -> Matrix2<f64> {
    Matrix2::new(1.0, 0.0, 0.0, -1.0)
}

/// Counter-clockwise rotation by `angle`.
pub fn rot(angle: f64) -> Matrix2<f64> {
    let (s, c) = angle.sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// Angle of a 2x2 rotation matrix.
pub fn rot_angle(m: &Matrix2<f64>) -> f64 {
    m[(1, 0)].atan2(m[(0, 0)])
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

pub fn direct_sum(a: &Matrix2<f64>, b: &Matrix2<f64>) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(a);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(b);
    m
}

/// 2x2 block `(i, j)` of a 4x4 matrix.
pub fn block(m: &Matrix4<f64>, i: usize, j: usize) -> Matrix2<f64> {
    m.fixed_view::<2, 2>(2 * i, 2 * j).into_owned()
}

pub fn from_blocks(
    a: &Matrix2<f64>,
    c: &Matrix2<f64>,
    d: &Matrix2<f64>,
    b: &Matrix2<f64>,
) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(a);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(c);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(d);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(b);
    m
}

pub fn symmetrize(m: &Matrix4<f64>) -> Matrix4<f64> {
    (m + m.transpose()) * 0.5
}

/// Eigen-decomposition of a symmetric 2x2 matrix as `Rot(theta) diag(big, small) Rot(theta)^T`.
pub fn sym2_eigen(m: &Matrix2<f64>) -> (f64, f64, f64) {
    let mean = 0.5 * (m[(0, 0)] + m[(1, 1)]);
    let half_diff = 0.5 * (m[(0, 0)] - m[(1, 1)]);
    let off = 0.5 * (m[(0, 1)] + m[(1, 0)]);
    let rad = half_diff.hypot(off);
    let theta = 0.5 * off.atan2(half_diff);
    (theta, mean + rad, mean - rad)
}

/// Eigenvalues in ascending order with matching eigenvector columns.
pub fn sorted_eigen(m: &Matrix4<f64>) -> (Vector4<f64>, Matrix4<f64>) {
    let eig = SymmetricEigen::new(symmetrize(m));
    let mut idx = [0usize, 1, 2, 3];
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut values = Vector4::zeros();
    let mut vectors = Matrix4::zeros();
    for (k, &i) in idx.iter().enumerate() {
        values[k] = eig.eigenvalues[i];
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Principal square root of a symmetric positive semidefinite matrix.
pub fn sqrt_psd(m: &Matrix4<f64>) -> Matrix4<f64> {
    let (values, vectors) = sorted_eigen(m);
    let root = values.map(|v| v.max(0.0).sqrt());
    vectors * Matrix4::from_diagonal(&root) * vectors.transpose()
}

/// Largest absolute entry.
pub fn max_abs<const R: usize, const C: usize>(
    m: &nalgebra::SMatrix<f64, R, C>,
) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

pub fn to_row_major(m: &Matrix4<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(16);
    for i in 0..4 {
        for j in 0..4 {
            out.push(m[(i, j)]);
        }
    }
    out
}

pub fn from_row_major(v: &[f64]) -> Option<Matrix4<f64>> {
    (v.len() == 16).then(|| Matrix4::from_row_slice(v))
}
