//! Simulating one bilinear Hamiltonian with another plus fast local rotations.
//!
//! A plan is a convex combination of locally rotated copies of the native
//! `K`. Trotterizing it gives a [`Protocol`]: interaction windows separated
//! by local rotations.

use std::f64::consts::FRAC_PI_2;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase_space::{evolve, KMatrix, LocalRotationPair, SymplecticTransform};

/// Slack in the feasibility inequalities.
pub const FEASIBILITY_SLACK: f64 = 1e-12;
const DEGENERACY_TOL: f64 = 1e-12;

/// Rotation pairs `(A_i, B_i)` of the four-term decomposition, as angles.
/// Each maps `D = diag(s1, s2)` to `A_i D B_i`: `D`, `-D`,
/// `diag(s2, s1)` and `-diag(s2, s1)`.
const DEC_ANGLES: [(f64, f64); 4] = [
    (0.0, 0.0),
    (0.0, std::f64::consts::PI),
    (-FRAC_PI_2, FRAC_PI_2),
    (-FRAC_PI_2, -FRAC_PI_2),
];

/// True iff `K` can simulate `K_target` at least as fast as real time.
pub fn can_simulate_efficiently(k: &KMatrix, k_target: &KMatrix) -> bool {
    let s = k.singular_values();
    let p = k_target.singular_values();
    s.s1 + s.s2 >= p.s1 + p.s2 - FEASIBILITY_SLACK
        && s.s1 - s.s2 >= p.s1 - p.s2 - FEASIBILITY_SLACK
}

/// Minimal interaction time with `K` needed to simulate `K_target` for `t_target`.
pub fn t_min(k: &KMatrix, k_target: &KMatrix, t_target: f64) -> Result<f64> {
    if !(t_target.is_finite() && t_target >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "target duration must be finite and non-negative, got {t_target}"
        )));
    }
    let s = k.singular_values();
    let p = k_target.singular_values();
    if t_target == 0.0 || p.s1 == 0.0 {
        return Ok(0.0);
    }
    if !s.is_degenerate(DEGENERACY_TOL) {
        let plus = (p.s1 + p.s2) / (s.s1 + s.s2);
        let minus = (p.s1 - p.s2) / (s.s1 - s.s2);
        return Ok(t_target * plus.max(minus));
    }
    if s.s1 > 0.0 && locally_proportional(&s, &p) {
        Ok(t_target * p.s1 / s.s1)
    } else {
        Err(Error::Degenerate { s1: s.s1, s2: s.s2 })
    }
}

/// A degenerate native `K` (`s1 = |s2|`) only reaches targets of the same
/// type, up to scale.
fn locally_proportional(
    s: &crate::phase_space::RestrictedSingularValues,
    p: &crate::phase_space::RestrictedSingularValues,
) -> bool {
    let tol = DEGENERACY_TOL * p.s1.max(1.0);
    (p.s1 - p.s2.abs()).abs() <= tol && (s.s2 >= 0.0) == (p.s2 >= 0.0)
}

/// Convex combination of locally rotated copies of a native Hamiltonian.
///
/// Rotations are stored already composed with the outer rotations of both
/// restricted SVDs, so `Σ p_i R_i^T K S_i = κ K_target` holds directly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationPlan {
    #[serde(rename = "native_K")]
    pub native_k: KMatrix,
    #[serde(rename = "target_K")]
    pub target_k: KMatrix,
    pub weights: Vec<f64>,
    pub rotations: Vec<LocalRotationPair>,
    /// Simulated duration.
    pub t_target: f64,
    /// Interaction time consumed.
    pub t: f64,
    /// `t_target / t`; absent when `t = 0`.
    pub kappa: Option<f64>,
    pub e: f64,
    pub f: f64,
}

impl SimulationPlan {
    /// A plan realizing `K` itself with a single unrotated term.
    pub fn identity(k: &KMatrix, t: f64) -> Self {
        Self {
            native_k: *k,
            target_k: *k,
            weights: vec![1.0],
            rotations: vec![LocalRotationPair::identity()],
            t_target: t,
            t,
            kappa: (t > 0.0).then_some(1.0),
            e: 1.0,
            f: 0.0,
        }
    }

    /// `Σ p_i R_i^T K S_i`, i.e. `κ` times the simulated Hamiltonian.
    pub fn weighted_sum(&self) -> KMatrix {
        weighted_sum(&self.native_k, &self.weights, &self.rotations)
    }
}

pub fn weighted_sum(k: &KMatrix, weights: &[f64], rotations: &[LocalRotationPair]) -> KMatrix {
    let m = weights
        .iter()
        .zip(rotations)
        .fold(Matrix2::zeros(), |acc, (w, pair)| {
            acc + k.rotated(pair).matrix() * *w
        });
    KMatrix::from_matrix(&m)
}

/// The Hamiltonian a plan simulates: `(1/κ) Σ p_i R_i^T K S_i`.
pub fn effective_k(plan: &SimulationPlan) -> KMatrix {
    match plan.kappa {
        Some(kappa) if kappa != 0.0 => plan.weighted_sum().scaled(1.0 / kappa),
        _ => KMatrix::zero(),
    }
}

/// Builds the four-term plan simulating `K_target` for `t_target`, using
/// interaction time `t` (default: the minimum).
pub fn synthesize_plan(
    k: &KMatrix,
    k_target: &KMatrix,
    t_target: f64,
    t: Option<f64>,
) -> Result<SimulationPlan> {
    let tmin = t_min(k, k_target, t_target)?;
    let t = t.unwrap_or(tmin);
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "interaction time must be finite and non-negative, got {t}"
        )));
    }
    if t < tmin * (1.0 - FEASIBILITY_SLACK) {
        return Err(Error::Infeasible { t, t_min: tmin });
    }

    let ksvd = k.restricted_svd();
    let tsvd = k_target.restricted_svd();
    let s = ksvd.values;
    let scale = if t > 0.0 { t_target / t } else { 0.0 };
    let (s1pp, s2pp) = (tsvd.values.s1 * scale, tsvd.values.s2 * scale);

    let (e, f) = if s1pp == 0.0 {
        (0.0, 0.0)
    } else if s.is_degenerate(DEGENERACY_TOL) {
        (s1pp / s.s1, 0.0)
    } else {
        let den = s.s1 * s.s1 - s.s2 * s.s2;
        (
            (s.s1 * s1pp - s.s2 * s2pp) / den,
            (s.s1 * s2pp - s.s2 * s1pp) / den,
        )
    };
    let used = e.abs() + f.abs();
    if used > 1.0 + FEASIBILITY_SLACK {
        return Err(Error::Infeasible { t, t_min: tmin });
    }

    let mut p = [e.max(0.0), (-e).max(0.0), f.max(0.0), (-f).max(0.0)];
    if used < 1.0 {
        let rem = 1.0 - used;
        p[0] += rem / 2.0;
        p[1] += rem / 2.0;
    } else {
        p.iter_mut().for_each(|w| *w /= used);
    }

    let mut weights = Vec::with_capacity(4);
    let mut rotations = Vec::with_capacity(4);
    for (w, (a, b)) in p.iter().zip(DEC_ANGLES) {
        if *w > 0.0 {
            weights.push(*w);
            rotations.push(
                LocalRotationPair::new(
                    ksvd.left - a - tsvd.left,
                    -ksvd.right + b + tsvd.right,
                )
                .wrapped(),
            );
        }
    }

    Ok(SimulationPlan {
        native_k: *k,
        target_k: *k_target,
        weights,
        rotations,
        t_target,
        t,
        kappa: (t > 0.0).then_some(t_target / t),
        e,
        f,
    })
}

/// One interaction window preceded by a local rotation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolStep {
    #[serde(flatten)]
    pub rotation: LocalRotationPair,
    pub t: f64,
}

/// `F U(t_n) R_n ... U(t_1) R_1` for a fixed native Hamiltonian `U(t) = e^{-iHt}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Protocol {
    #[serde(rename = "native_K")]
    pub native_k: KMatrix,
    pub steps: Vec<ProtocolStep>,
    #[serde(rename = "final")]
    pub final_rotation: LocalRotationPair,
}

impl Protocol {
    pub fn empty(native_k: KMatrix) -> Self {
        Self {
            native_k,
            steps: Vec::new(),
            final_rotation: LocalRotationPair::identity(),
        }
    }

    pub fn total_time(&self) -> f64 {
        self.steps.iter().map(|s| s.t).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if !self.native_k.is_finite() {
            return Err(Error::InvalidInput("native K has non-finite entries".into()));
        }
        for (i, s) in self.steps.iter().enumerate() {
            if !(s.t.is_finite() && s.t >= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "step {i} has invalid duration {}",
                    s.t
                )));
            }
        }
        Ok(())
    }

    /// The overall symplectic matrix.
    pub fn symplectic(&self) -> SymplecticTransform {
        let s = self.steps.iter().fold(SymplecticTransform::identity(), |acc, step| {
            evolve(&self.native_k, step.t) * step.rotation.symplectic() * acc
        });
        self.final_rotation.symplectic() * s
    }
}

/// Accumulates rotations and interaction windows, merging adjacent rotations.
#[derive(Debug, Clone)]
pub struct ProtocolBuilder {
    protocol: Protocol,
    pending: LocalRotationPair,
}

impl ProtocolBuilder {
    pub fn new(native_k: KMatrix) -> Self {
        Self {
            protocol: Protocol::empty(native_k),
            pending: LocalRotationPair::identity(),
        }
    }

    pub fn rotate(&mut self, pair: LocalRotationPair) -> &mut Self {
        self.pending = self.pending.then(&pair);
        self
    }

    /// Zero-length windows are dropped; their rotation carries over.
    pub fn interact(&mut self, t: f64) -> &mut Self {
        if t > 0.0 {
            self.protocol.steps.push(ProtocolStep {
                rotation: self.pending,
                t,
            });
            self.pending = LocalRotationPair::identity();
        }
        self
    }

    /// Appends another protocol over the same native Hamiltonian.
    pub fn append(&mut self, other: &Protocol) -> &mut Self {
        for step in &other.steps {
            self.rotate(step.rotation);
            self.interact(step.t);
        }
        self.rotate(other.final_rotation)
    }

    pub fn finish(mut self) -> Protocol {
        self.protocol.final_rotation = self.pending;
        self.protocol
    }
}

/// Trotterizes a plan: each slice cycles through the terms, each term being
/// a window of length `p_i t / slices` conjugated by its rotation pair.
pub fn plan_to_protocol(plan: &SimulationPlan, slices: usize) -> Result<Protocol> {
    if slices == 0 {
        return Err(Error::InvalidInput("slices must be at least 1".into()));
    }
    let mut b = ProtocolBuilder::new(plan.native_k);
    let dt = plan.t / slices as f64;
    for _ in 0..slices {
        for (w, pair) in plan.weights.iter().zip(&plan.rotations) {
            if *w > 0.0 {
                b.rotate(*pair).interact(w * dt).rotate(pair.inverse());
            }
        }
    }
    Ok(b.finish())
}
