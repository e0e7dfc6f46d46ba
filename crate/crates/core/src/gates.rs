//! Decomposing two-mode Gaussian unitaries into local rotations, beam
//! splitters and two-mode squeezers, and compiling those to a native
//! Hamiltonian.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::{Complex, Matrix2, Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, sorted_eigen};
use crate::phase_space::{evolve, KMatrix, LocalRotationPair, SymplecticTransform};
use crate::simulate::{plan_to_protocol, synthesize_plan, Protocol, ProtocolBuilder};

/// Tolerance on orthogonality for [`passive_decompose`].
pub const PASSIVE_TOL: f64 = 1e-10;
/// Squeezing parameters below this are treated as zero.
const SQUEEZE_TOL: f64 = 1e-12;
/// Rotations and durations below this are dropped from sequences.
const DROP_TOL: f64 = 1e-15;

/// Mode-2 quarter turn `X2 -> P2, P2 -> -X2` used by the barred primitives.
fn bar_rotation() -> LocalRotationPair {
    LocalRotationPair::new(0.0, -FRAC_PI_2)
}

/// One element of a gate sequence. Barred variants are conjugated by
/// [`bar_rotation`]: `S̄ = Q S Q^T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Primitive {
    Rot {
        phi1: f64,
        phi2: f64,
    },
    Bs {
        t: f64,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        barred: bool,
    },
    Tms {
        t: f64,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        barred: bool,
    },
}

impl Primitive {
    pub fn rot(pair: LocalRotationPair) -> Self {
        Primitive::Rot {
            phi1: pair.phi1,
            phi2: pair.phi2,
        }
    }

    /// Generating Hamiltonian; `None` for rotations.
    pub fn hamiltonian(&self) -> Option<KMatrix> {
        // Conjugating by Q = R^T ⊕ S^T turns K into R^T K S.
        let bar = LocalRotationPair::new(0.0, FRAC_PI_2);
        match *self {
            Primitive::Rot { .. } => None,
            Primitive::Bs { barred, .. } => {
                let k = KMatrix::beam_splitter();
                Some(if barred { k.rotated(&bar) } else { k })
            }
            Primitive::Tms { barred, .. } => {
                let k = KMatrix::two_mode_squeezer();
                Some(if barred { k.rotated(&bar) } else { k })
            }
        }
    }

    pub fn duration(&self) -> f64 {
        match *self {
            Primitive::Rot { .. } => 0.0,
            Primitive::Bs { t, .. } | Primitive::Tms { t, .. } => t,
        }
    }

    pub fn symplectic(&self) -> SymplecticTransform {
        match *self {
            Primitive::Rot { phi1, phi2 } => LocalRotationPair::new(phi1, phi2).symplectic(),
            _ => evolve(&self.hamiltonian().expect("interaction primitive"), self.duration()),
        }
    }
}

/// Primitives in application order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GateSequence {
    pub gates: Vec<Primitive>,
}

impl GateSequence {
    pub fn new() -> Self {
        Self::default()
    }

    /// Product of the primitives, later gates to the left.
    pub fn recompose(&self) -> SymplecticTransform {
        self.gates
            .iter()
            .fold(SymplecticTransform::identity(), |acc, g| g.symplectic() * acc)
    }

    pub fn count(&self, f: impl Fn(&Primitive) -> bool) -> usize {
        self.gates.iter().filter(|g| f(g)).count()
    }

    /// Appends a primitive, merging consecutive rotations and dropping
    /// trivial ones.
    pub fn push(&mut self, g: Primitive) {
        match g {
            Primitive::Rot { phi1, phi2 } => {
                let pair = LocalRotationPair::new(phi1, phi2).wrapped();
                if let Some(Primitive::Rot { phi1: a, phi2: b }) = self.gates.last().copied() {
                    self.gates.pop();
                    let merged = LocalRotationPair::new(a, b).then(&pair);
                    if !merged.is_identity(DROP_TOL) {
                        self.gates.push(Primitive::rot(merged));
                    }
                } else if !pair.is_identity(DROP_TOL) {
                    self.gates.push(Primitive::rot(pair));
                }
            }
            _ => {
                if g.duration().abs() > DROP_TOL {
                    self.gates.push(g);
                }
            }
        }
    }

    pub fn extend(&mut self, other: &GateSequence) {
        for g in &other.gates {
            self.push(*g);
        }
    }
}

/// `S = O D Õ` with `O`, `Õ` passive and
/// `D = diag(e^{α+β}, e^{-(α+β)}, e^{α-β}, e^{-(α-β)})`, `α >= β >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerDecomposition {
    pub outer: SymplecticTransform,
    pub alpha: f64,
    pub beta: f64,
    pub inner: SymplecticTransform,
}

impl EulerDecomposition {
    pub fn diagonal(&self) -> Matrix4<f64> {
        let (p, m) = (self.alpha + self.beta, self.alpha - self.beta);
        Matrix4::from_diagonal(&Vector4::new(p.exp(), (-p).exp(), m.exp(), (-m).exp()))
    }

    pub fn reconstruct(&self) -> Matrix4<f64> {
        self.outer.matrix() * self.diagonal() * self.inner.matrix()
    }
}

/// Unit vector in `span(basis)` closest to a standard basis vector,
/// preferring lower indices on ties.
fn canonical_vector(basis: &[Vector4<f64>]) -> Vector4<f64> {
    let proj = |k: usize| -> Vector4<f64> {
        let e = Vector4::ith(k, 1.0);
        basis.iter().fold(Vector4::zeros(), |acc, b| acc + b * b.dot(&e))
    };
    let norms: Vec<f64> = (0..4).map(|k| proj(k).norm()).collect();
    let best = norms.iter().cloned().fold(0.0, f64::max);
    let k = (0..4).find(|&k| norms[k] >= best - 1e-12).unwrap_or(0);
    proj(k).normalize()
}

/// Euler (Bloch-Messiah) decomposition from the eigenstructure of `S S^T`.
pub fn euler_decompose(s: &SymplecticTransform) -> EulerDecomposition {
    let m = s.matrix();
    let p = linalg::symmetrize(&(m * m.transpose()));
    let j2 = linalg::j2();
    let (values, vectors) = sorted_eigen(&p);
    let top = values[3];

    let top_space: Vec<Vector4<f64>> = (0..4)
        .filter(|&i| values[i] >= top * (1.0 - 1e-9))
        .map(|i| vectors.column(i).into_owned())
        .collect();
    let v1 = canonical_vector(&top_space);
    let u1 = j2 * v1;

    // Complement of span{v1, J v1}, spanned by {w, J w}.
    let residual = |k: usize| -> Vector4<f64> {
        let e = Vector4::ith(k, 1.0);
        e - v1 * v1.dot(&e) - u1 * u1.dot(&e)
    };
    let norms: Vec<f64> = (0..4).map(|k| residual(k).norm()).collect();
    let best = norms.iter().cloned().fold(0.0, f64::max);
    let kw = (0..4).find(|&k| norms[k] >= best - 1e-12).unwrap_or(0);
    let w = residual(kw).normalize();
    let jw = j2 * w;
    let restricted = Matrix2::new(
        w.dot(&(p * w)),
        w.dot(&(p * jw)),
        jw.dot(&(p * w)),
        jw.dot(&(p * jw)),
    );
    let (theta, big, small) = linalg::sym2_eigen(&restricted);
    let theta = if big - small <= 1e-9 * big { 0.0 } else { theta };
    let v3 = w * theta.cos() + jw * theta.sin();

    let mut o = Matrix4::zeros();
    o.set_column(0, &v1);
    o.set_column(1, &u1);
    o.set_column(2, &v3);
    o.set_column(3, &(j2 * v3));

    let lambda1 = v1.dot(&(p * v1));
    let lambda3 = v3.dot(&(p * v3)).max(1.0);
    let plus = 0.5 * lambda1.ln();
    let minus = 0.5 * lambda3.ln();
    let alpha = 0.5 * (plus + minus);
    let beta = 0.5 * (plus - minus);

    let d_inv = Matrix4::from_diagonal(&Vector4::new(
        (-plus).exp(),
        plus.exp(),
        (-minus).exp(),
        minus.exp(),
    ));
    let inner = d_inv * o.transpose() * m;
    EulerDecomposition {
        outer: SymplecticTransform::from_matrix_unchecked(o),
        alpha,
        beta,
        inner: SymplecticTransform::from_matrix_unchecked(inner),
    }
}

/// `O = rot_out · BS(t_bs) · rot_in` with `t_bs ∈ [0, π/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PassiveDecomposition {
    pub rot_out: LocalRotationPair,
    pub t_bs: f64,
    pub rot_in: LocalRotationPair,
}

impl PassiveDecomposition {
    pub fn reconstruct(&self) -> SymplecticTransform {
        self.rot_out.symplectic()
            * evolve(&KMatrix::beam_splitter(), self.t_bs)
            * self.rot_in.symplectic()
    }

    /// Application order: `rot_in`, `BS`, `rot_out`.
    pub fn to_sequence(&self) -> GateSequence {
        let mut seq = GateSequence::new();
        seq.push(Primitive::rot(self.rot_in));
        seq.push(Primitive::Bs {
            t: self.t_bs,
            barred: false,
        });
        seq.push(Primitive::rot(self.rot_out));
        seq
    }
}

pub fn passive_decompose(o: &SymplecticTransform) -> Result<PassiveDecomposition> {
    let m = o.matrix();
    let orth = linalg::max_abs(&(m * m.transpose() - Matrix4::identity()));
    if orth > PASSIVE_TOL {
        return Err(Error::NotPassive(format!("orthogonality residual {orth:.3e}")));
    }
    Ok(passive_decompose_unchecked(m))
}

/// Reads `O` as the unitary `U_jk = O[2j, 2k] + i O[2j+1, 2k]` and factors
/// `U = diag(e^{iα}) [[c, -s], [s, c]] diag(e^{iβ})`.
fn passive_decompose_unchecked(m: &Matrix4<f64>) -> PassiveDecomposition {
    let u = |j: usize, k: usize| Complex::new(m[(2 * j, 2 * k)], m[(2 * j + 1, 2 * k)]);
    let (u11, u12, u21, u22) = (u(0, 0), u(0, 1), u(1, 0), u(1, 1));
    let (c, s) = (u11.norm(), u21.norm());
    let t_bs = s.atan2(c);
    let (a1, a2, b1, b2) = if s <= 1e-12 {
        (u11.arg(), u22.arg(), 0.0, 0.0)
    } else if c <= 1e-12 {
        ((-u12).arg(), u21.arg(), 0.0, 0.0)
    } else {
        let a1 = u11.arg();
        (a1, u21.arg(), 0.0, (-u12).arg() - a1)
    };
    PassiveDecomposition {
        rot_out: LocalRotationPair::new(a1, a2).wrapped(),
        t_bs,
        rot_in: LocalRotationPair::new(b1, b2).wrapped(),
    }
}

fn bs(t: f64, barred: bool) -> Primitive {
    Primitive::Bs { t, barred }
}

fn tms(t: f64, barred: bool) -> Primitive {
    Primitive::Tms { t, barred }
}

/// Realizes `diag(e^α, e^{-α}, e^α, e^{-α})` as `BS̄(-π/4) TMS(α) BS̄(π/4)`
/// followed by `diag(e^β, e^{-β}, e^{-β}, e^β)` as
/// `BS(-π/4) TMS̄(-β) BS(π/4)` (operator order).
///
/// With the barred convention `X2 -> P2`, the middle squeezer of the second
/// block needs duration `-β`.
pub fn synthesize_single_mode_squeezers(alpha: f64, beta: f64) -> GateSequence {
    let mut seq = GateSequence::new();
    if alpha != 0.0 {
        seq.push(bs(FRAC_PI_4, true));
        seq.push(tms(alpha, false));
        seq.push(bs(-FRAC_PI_4, true));
    }
    if beta != 0.0 {
        seq.push(bs(FRAC_PI_4, false));
        seq.push(tms(-beta, true));
        seq.push(bs(-FRAC_PI_4, false));
    }
    seq
}

/// Decomposes any two-mode symplectic matrix into at most 6 rotation pairs,
/// 3 beam splitters and 2 two-mode squeezers, all with non-negative
/// durations.
pub fn decompose_gate(s: &SymplecticTransform) -> GateSequence {
    let e = euler_decompose(s);
    let (o, ot) = (*e.outer.matrix(), *e.inner.matrix());
    let mut seq = GateSequence::new();
    let append_passive = |seq: &mut GateSequence, m: &Matrix4<f64>| {
        seq.extend(&passive_decompose_unchecked(m).to_sequence());
    };

    if e.alpha < SQUEEZE_TOL {
        append_passive(&mut seq, &(o * ot));
        return seq;
    }

    let bsbar = |t: f64| *bs(t, true).symplectic().matrix();
    let bsm = |t: f64| *bs(t, false).symplectic().matrix();

    if e.beta < SQUEEZE_TOL {
        append_passive(&mut seq, &(bsbar(FRAC_PI_4) * ot));
        seq.push(tms(e.alpha, false));
        append_passive(&mut seq, &(o * bsbar(-FRAC_PI_4)));
        return seq;
    }

    // TMS̄(-β) = Q' TMS(β) Q'^T with Q' the bar rotation composed with a
    // half turn of mode 1, which flips the sign of the squeezer.
    let q = LocalRotationPair::new(PI, bar_rotation().phi2).symplectic();
    let q = *q.matrix();
    let p1 = o * bsbar(-FRAC_PI_4);
    let p2 = bsbar(FRAC_PI_4) * bsm(-FRAC_PI_4) * q;
    let p3 = q.transpose() * bsm(FRAC_PI_4) * ot;

    append_passive(&mut seq, &p3);
    seq.push(tms(e.beta, false));
    append_passive(&mut seq, &p2);
    seq.push(tms(e.alpha, false));
    append_passive(&mut seq, &p1);
    seq
}

/// Replaces every beam splitter and squeezer with a Trotterized simulation
/// by the native `K` at minimal interaction time.
pub fn compile_to_native(seq: &GateSequence, k: &KMatrix, slices: usize) -> Result<Protocol> {
    let sv = k.singular_values();
    if sv.is_degenerate(1e-12) {
        return Err(Error::Degenerate { s1: sv.s1, s2: sv.s2 });
    }
    let mut b = ProtocolBuilder::new(*k);
    for g in &seq.gates {
        match g {
            Primitive::Rot { phi1, phi2 } => {
                b.rotate(LocalRotationPair::new(*phi1, *phi2));
            }
            _ => {
                let (mut target, mut t) = (g.hamiltonian().expect("interaction"), g.duration());
                if t < 0.0 {
                    target = target.scaled(-1.0);
                    t = -t;
                }
                if t == 0.0 {
                    continue;
                }
                let plan = synthesize_plan(k, &target, t, None)?;
                b.append(&plan_to_protocol(&plan, slices)?);
            }
        }
    }
    Ok(b.finish())
}
