//! Seeded random generators for Hamiltonians, rotations, symplectic
//! transforms and pure states.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::phase_space::{evolve, CovarianceMatrix, KMatrix, LocalRotationPair, SymplecticTransform};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal<R: Rng>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Entries drawn from a standard normal distribution.
pub fn random_k<R: Rng>(rng: &mut R) -> KMatrix {
    KMatrix::new(normal(rng), normal(rng), normal(rng), normal(rng))
}

/// Random `K` with `s1 - |s2| >= gap`.
pub fn random_nondegenerate_k<R: Rng>(rng: &mut R, gap: f64) -> KMatrix {
    loop {
        let k = random_k(rng);
        let sv = k.singular_values();
        if sv.s1 - sv.s2.abs() >= gap {
            return k;
        }
    }
}

pub fn random_rotation<R: Rng>(rng: &mut R) -> LocalRotationPair {
    LocalRotationPair::new(rng.random_range(-PI..PI), rng.random_range(-PI..PI))
}

/// Local squeezers `diag(e^{r1}, e^{-r1}, e^{r2}, e^{-r2})`.
pub fn local_squeezer(r1: f64, r2: f64) -> SymplecticTransform {
    SymplecticTransform::from_matrix_unchecked(nalgebra::Matrix4::from_diagonal(
        &nalgebra::Vector4::new(r1.exp(), (-r1).exp(), r2.exp(), (-r2).exp()),
    ))
}

/// Product of rotations, local squeezers and bilinear flows, with squeezing
/// parameters bounded by `scale`.
pub fn random_symplectic<R: Rng>(rng: &mut R, scale: f64) -> SymplecticTransform {
    let mut s = random_rotation(rng).symplectic();
    for _ in 0..2 {
        let k = random_k(rng);
        let norm = k.matrix().norm().max(1e-12);
        let t = rng.random_range(-scale..scale) / norm;
        let r1 = rng.random_range(-scale..scale);
        let r2 = rng.random_range(-scale..scale);
        s = random_rotation(rng).symplectic() * local_squeezer(r1, r2) * evolve(&k, t) * s;
    }
    s
}

/// `S S^T` for a random symplectic `S`.
pub fn random_pure_state<R: Rng>(rng: &mut R, scale: f64) -> CovarianceMatrix {
    CovarianceMatrix::from_symplectic(&random_symplectic(rng, scale))
}

/// Random `2 n x 2 n` passive symplectic: phase shifts interleaved with
/// beam splitters on random mode pairs.
pub fn random_passive<R: Rng>(rng: &mut R, modes: usize) -> DMatrix<f64> {
    let n = 2 * modes;
    let mut o = DMatrix::<f64>::identity(n, n);
    let phase = |o: &mut DMatrix<f64>, m: usize, phi: f64| {
        let r = crate::linalg::rot(phi);
        let mut g = DMatrix::<f64>::identity(n, n);
        g.view_mut((2 * m, 2 * m), (2, 2)).copy_from(&r);
        *o = &g * &*o;
    };
    for _ in 0..(3 * modes.max(1)) {
        for m in 0..modes {
            phase(&mut o, m, rng.random_range(-PI..PI));
        }
        if modes >= 2 {
            let i = rng.random_range(0..modes);
            let mut j = rng.random_range(0..modes - 1);
            if j >= i {
                j += 1;
            }
            let t: f64 = rng.random_range(0.0..PI);
            let (c, s) = (t.cos(), t.sin());
            let mut g = DMatrix::<f64>::identity(n, n);
            for q in 0..2 {
                let (a, b) = (2 * i + q, 2 * j + q);
                g[(a, a)] = c;
                g[(b, b)] = c;
                g[(a, b)] = -s;
                g[(b, a)] = s;
            }
            o = &g * &o;
        }
    }
    o
}

/// Random 2x2 single-mode pure covariance `R diag(e^{-r}, e^r) R^T`.
pub fn random_single_mode_state<R: Rng>(rng: &mut R, scale: f64) -> Matrix2<f64> {
    let r = rng.random_range(0.0..scale);
    let rot = crate::linalg::rot(rng.random_range(-PI..PI));
    rot * Matrix2::new((-r).exp(), 0.0, 0.0, r.exp()) * rot.transpose()
}
