#![allow(dead_code)]

use bilinear_core::linalg;
use bilinear_core::phase_space::{evolve, CovarianceMatrix, KMatrix, LocalRotationPair};
use nalgebra::{Matrix2, Matrix4};

/// `exp(A)` by scaling and squaring of a degree-24 Taylor polynomial.
pub fn expm4(a: &Matrix4<f64>) -> Matrix4<f64> {
    let norm = a.abs().row_sum().max();
    let mut s = 0;
    while norm / f64::powi(2.0, s) > 0.25 {
        s += 1;
    }
    let x = a / f64::powi(2.0, s);
    let mut term = Matrix4::identity();
    let mut sum = Matrix4::identity();
    for k in 1..=24 {
        term = term * x / k as f64;
        sum += term;
    }
    for _ in 0..s {
        sum = sum * sum;
    }
    sum
}

/// `M = [[0, J^T K], [J^T K^T, 0]]` assembled from its definition.
pub fn generator_oracle(k: &KMatrix) -> Matrix4<f64> {
    let jt = linalg::j().transpose();
    let z = Matrix2::zeros();
    linalg::from_blocks(&z, &(jt * k.matrix()), &(jt * k.matrix().transpose()), &z)
}

/// Smallest symplectic eigenvalue of the partial transpose from the
/// invariant `Δ̃ = det A + det B - 2 det C`.
pub fn negativity_oracle(g: &Matrix4<f64>) -> f64 {
    let (a, b, c) = (
        linalg::block(g, 0, 0),
        linalg::block(g, 1, 1),
        linalg::block(g, 0, 1),
    );
    let delta = a.determinant() + b.determinant() - 2.0 * c.determinant();
    let det = g.determinant();
    let nu2 = (delta - (delta * delta - 4.0 * det).max(0.0).sqrt()) / 2.0;
    1.0 / nu2.sqrt()
}

pub fn max_abs_diff(a: &Matrix4<f64>, b: &Matrix4<f64>) -> f64 {
    (a - b).abs().max()
}

pub fn frobenius(a: &Matrix4<f64>, b: &Matrix4<f64>) -> f64 {
    (a - b).norm()
}

fn log_neg_from_c(g: &Matrix4<f64>) -> f64 {
    (-linalg::block(g, 0, 1).determinant()).max(0.0).sqrt().asinh()
}

fn log_squeezing(g: &Matrix4<f64>) -> f64 {
    let (values, _) = linalg::sorted_eigen(g);
    -values[0].ln()
}

/// Central finite difference of `f(γ(t))` when `pair` is applied to `γ`
/// and then `K` acts for `±δt`.
fn fd_rate(
    gamma: &CovarianceMatrix,
    pair: &LocalRotationPair,
    plus: &Matrix4<f64>,
    minus: &Matrix4<f64>,
    dt: f64,
    f: fn(&Matrix4<f64>) -> f64,
) -> f64 {
    let o = pair.symplectic();
    let g = o.matrix() * gamma.matrix() * o.matrix().transpose();
    let gp = plus * g * plus.transpose();
    let gm = minus * g * minus.transpose();
    (f(&gp) - f(&gm)) / (2.0 * dt)
}

pub const FD_DT: f64 = 1e-6;

pub fn fd_entanglement_rate(gamma: &CovarianceMatrix, k: &KMatrix, pair: &LocalRotationPair) -> f64 {
    let (p, m) = (*evolve(k, FD_DT).matrix(), *evolve(k, -FD_DT).matrix());
    fd_rate(gamma, pair, &p, &m, FD_DT, log_neg_from_c)
}

pub fn fd_squeezing_rate(gamma: &CovarianceMatrix, k: &KMatrix, pair: &LocalRotationPair) -> f64 {
    let (p, m) = (*evolve(k, FD_DT).matrix(), *evolve(k, -FD_DT).matrix());
    fd_rate(gamma, pair, &p, &m, FD_DT, log_squeezing)
}

/// Maximum of `f` over an `n`-point grid per angle, refined by three rounds
/// of local grids around the best cell.
pub fn grid_max_2d(n: usize, f: impl Fn(f64, f64) -> f64) -> (f64, f64, f64) {
    use std::f64::consts::PI;
    let h = 2.0 * PI / n as f64;
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (-PI + i as f64 * h, -PI + j as f64 * h);
            let v = f(a, b);
            if v > best.0 {
                best = (v, a, b);
            }
        }
    }
    let mut width = h;
    for _ in 0..3 {
        let (_, a0, b0) = best;
        for i in -10..=10 {
            for j in -10..=10 {
                let (a, b) = (a0 + i as f64 * width / 10.0, b0 + j as f64 * width / 10.0);
                let v = f(a, b);
                if v > best.0 {
                    best = (v, a, b);
                }
            }
        }
        width /= 10.0;
    }
    best
}

pub fn grid_max_1d(n: usize, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let (v, a, _) = {
        use std::f64::consts::PI;
        let h = 2.0 * PI / n as f64;
        let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
        for i in 0..n {
            let a = -PI + i as f64 * h;
            let v = f(a);
            if v > best.0 {
                best = (v, a, 0.0);
            }
        }
        let mut width = h;
        for _ in 0..3 {
            let a0 = best.1;
            for i in -10..=10 {
                let a = a0 + i as f64 * width / 10.0;
                let v = f(a);
                if v > best.0 {
                    best = (v, a, 0.0);
                }
            }
            width /= 10.0;
        }
        best
    };
    (v, a)
}
