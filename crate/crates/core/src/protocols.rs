//! Finite-time strategies and the quantities tracked along them.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use nalgebra::{DMatrix, Matrix4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, j};
use crate::measures;
use crate::phase_space::{evolve, CovarianceMatrix, KMatrix, LocalRotationPair, SymplecticTransform};
use crate::rates;
use crate::simulate::{Protocol, ProtocolBuilder};

/// Default step of the greedy strategy.
pub const DEFAULT_DT: f64 = 1e-3;
/// Largest step accepted by the greedy strategy.
pub const MAX_GREEDY_DT: f64 = 1e-2;
/// Below this local squeezing parameter the optimal rotations form a
/// one-parameter family and the greedy strategy breaks the tie.
pub const GREEDY_TIE_L: f64 = 1e-6;
/// Tolerance on orthogonality and symplecticity of ancilla couplings.
pub const PASSIVE_TOL: f64 = 1e-10;
/// Largest condition number of a measured block.
pub const MAX_CONDITION: f64 = 1e12;

pub const CSV_HEADER: &str = "t,E0,negativity,S,Q,rate";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeReport {
    pub t: f64,
    #[serde(rename = "E0")]
    pub e0: f64,
    pub negativity: f64,
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    /// Instantaneous entanglement rate `dE0/dt`.
    pub rate: f64,
}

/// States and reports on a strictly increasing time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<CovarianceMatrix>,
    pub reports: Vec<NodeReport>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.reports.iter().map(|r| r.t).collect()
    }

    pub fn last_state(&self) -> &CovarianceMatrix {
        self.states.last().expect("trajectories have at least one node")
    }

    pub fn last_report(&self) -> &NodeReport {
        self.reports.last().expect("trajectories have at least one node")
    }

    /// Builds reports from states, taking the rate as a forward difference
    /// of `E0` (backward at the last node).
    fn from_states(times: Vec<f64>, states: Vec<CovarianceMatrix>) -> Self {
        let mut reports: Vec<NodeReport> = times
            .iter()
            .zip(&states)
            .map(|(&t, g)| node_report(t, g, f64::NAN))
            .collect();
        let n = reports.len();
        for i in 0..n {
            let (a, b) = if i + 1 < n { (i, i + 1) } else if i > 0 { (i - 1, i) } else { continue };
            reports[i].rate = (reports[b].e0 - reports[a].e0) / (reports[b].t - reports[a].t);
        }
        Self { states, reports }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.reports {
            let _ = writeln!(out, "{},{},{},{},{},{}", r.t, r.e0, r.negativity, r.s, r.q, r.rate);
        }
        out
    }
}

/// Reports for one node. `E0` is `asinh sqrt(-det C)`, the two-mode
/// squeezing parameter of a pure state.
pub fn node_report(t: f64, gamma: &CovarianceMatrix, rate: f64) -> NodeReport {
    let sq = measures::squeezing(gamma);
    NodeReport {
        t,
        e0: (-gamma.c().determinant()).max(0.0).sqrt().asinh(),
        negativity: measures::negativity(gamma),
        s: sq.s,
        q: sq.q,
        rate,
    }
}

/// Applies a protocol, recording a node at `t = 0` and after every window.
pub fn run_protocol(gamma0: &CovarianceMatrix, protocol: &Protocol) -> Result<Trajectory> {
    protocol.validate()?;
    let mut times = vec![0.0];
    let mut states = vec![*gamma0];
    let mut gamma = *gamma0;
    let mut elapsed = 0.0;
    for step in &protocol.steps {
        gamma = gamma
            .apply(&step.rotation.symplectic())
            .apply(&evolve(&protocol.native_k, step.t));
        elapsed += step.t;
        times.push(elapsed);
        states.push(gamma);
    }
    if let Some(last) = states.last_mut() {
        *last = last.apply(&protocol.final_rotation.symplectic());
    }
    Ok(Trajectory::from_states(times, states))
}

/// Rotation applied after every window of the flip strategy.
pub fn flip_rotation() -> LocalRotationPair {
    LocalRotationPair::new(FRAC_PI_2, 3.0 * FRAC_PI_2).wrapped()
}

/// Equal windows of `t / steps`, each followed by a quarter turn in mode 1
/// and three quarters in mode 2; the accumulated frame is undone at the end.
///
/// In the limit of many steps this simulates `(K + JKJ)/2`, a two-mode
/// squeezer of strength `(s1 - s2)/2` up to local rotations.
pub fn flip_strategy(k: &KMatrix, t: f64, steps: usize) -> Result<Protocol> {
    if steps == 0 {
        return Err(Error::InvalidInput("steps must be at least 1".into()));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidInput(format!("invalid duration {t}")));
    }
    let flip = flip_rotation();
    let mut b = ProtocolBuilder::new(*k);
    let dt = t / steps as f64;
    let mut frame = LocalRotationPair::identity();
    for i in 0..steps {
        if i > 0 {
            b.rotate(flip);
            frame = frame.then(&flip);
        }
        b.interact(dt);
    }
    b.rotate(frame.inverse());
    Ok(b.finish())
}

/// `(K + JKJ)/2`, the Hamiltonian simulated by the flip strategy.
pub fn flip_effective_k(k: &KMatrix) -> KMatrix {
    let m = k.matrix();
    KMatrix::from_matrix(&((m + j() * m * j()) * 0.5))
}

fn time_grid(t: f64, dt: f64) -> Result<Vec<f64>> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidInput(format!("invalid duration {t}")));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidInput(format!("invalid step {dt}")));
    }
    let n = ((t / dt) - 1e-9).ceil().max(0.0) as usize;
    let mut grid: Vec<f64> = (0..=n).map(|i| (i as f64 * dt).min(t)).collect();
    grid.dedup();
    if let Some(last) = grid.last_mut() {
        *last = t;
    }
    Ok(grid)
}

/// Time grid `0, dt, 2 dt, ...` ending exactly at `t`.
pub fn uniform_grid(t: f64, dt: f64) -> Result<Vec<f64>> {
    time_grid(t, dt)
}

fn check_grid(times: &[f64]) -> Result<()> {
    match times.first() {
        Some(&t0) if t0 == 0.0 => {}
        _ => return Err(Error::InvalidInput("time grid must start at 0".into())),
    }
    if times.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
        return Err(Error::InvalidInput("time grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Uninterrupted evolution under `K`, sampled on a grid of step `dt`.
pub fn hamiltonian_flow(
    gamma0: &CovarianceMatrix,
    k: &KMatrix,
    t: f64,
    dt: f64,
) -> Result<Trajectory> {
    hamiltonian_flow_on_grid(gamma0, k, &time_grid(t, dt)?)
}

pub fn hamiltonian_flow_on_grid(
    gamma0: &CovarianceMatrix,
    k: &KMatrix,
    times: &[f64],
) -> Result<Trajectory> {
    check_grid(times)?;
    let states = times.iter().map(|&s| gamma0.apply(&evolve(k, s))).collect();
    Ok(Trajectory::from_states(times.to_vec(), states))
}

/// The ideal limit of the flip strategy: evolution under `(K + JKJ)/2`.
pub fn tms_simulation(
    gamma0: &CovarianceMatrix,
    k: &KMatrix,
    t: f64,
    dt: f64,
) -> Result<Trajectory> {
    hamiltonian_flow(gamma0, &flip_effective_k(k), t, dt)
}

pub fn tms_simulation_on_grid(
    gamma0: &CovarianceMatrix,
    k: &KMatrix,
    times: &[f64],
) -> Result<Trajectory> {
    hamiltonian_flow_on_grid(gamma0, &flip_effective_k(k), times)
}

/// At every node applies the rotations maximizing the entanglement rate,
/// then evolves under `K` for `dt` (the last step may be shorter). The
/// recorded rate is the closed-form optimum at each node.
pub fn greedy_rate_strategy(
    gamma0: &CovarianceMatrix,
    k: &KMatrix,
    t: f64,
    dt: f64,
) -> Result<Trajectory> {
    if dt > MAX_GREEDY_DT {
        return Err(Error::InvalidInput(format!(
            "greedy step {dt} exceeds {MAX_GREEDY_DT}"
        )));
    }
    greedy_on_grid(gamma0, k, &time_grid(t, dt)?)
}

/// Greedy strategy on an explicit grid with steps of at most [`MAX_GREEDY_DT`].
pub fn greedy_on_grid(
    gamma0: &CovarianceMatrix,
    k: &KMatrix,
    times: &[f64],
) -> Result<Trajectory> {
    check_grid(times)?;
    if times.windows(2).any(|w| w[1] - w[0] > MAX_GREEDY_DT * (1.0 + 1e-12)) {
        return Err(Error::InvalidInput(format!(
            "greedy steps must not exceed {MAX_GREEDY_DT}"
        )));
    }
    gamma0.ensure_pure()?;
    let mut states = Vec::with_capacity(times.len());
    let mut reports = Vec::with_capacity(times.len());
    let mut gamma = *gamma0;
    for (i, &ti) in times.iter().enumerate() {
        let plan = rates::optimal_entanglement_rate(&gamma, k)?;
        states.push(gamma);
        reports.push(node_report(ti, &gamma, plan.gamma_rate));
        if let Some(&next) = times.get(i + 1) {
            let step = evolve(k, next - ti);
            let pair = if plan.l < GREEDY_TIE_L.max(next - ti) {
                least_squeezing_member(&gamma, &step, plan.pre_rotation)?
            } else {
                plan.pre_rotation
            };
            gamma = gamma.apply(&pair.symplectic()).apply(&step);
        }
    }
    Ok(Trajectory { states, reports })
}

/// At `l = 0` the rate depends only on `phi1 + phi2`, so every
/// `(phi1 + a, phi2 - a)` is optimal. Picks the member leaving the smallest
/// local squeezing parameter after `step`.
fn least_squeezing_member(
    gamma: &CovarianceMatrix,
    step: &SymplecticTransform,
    base: LocalRotationPair,
) -> Result<LocalRotationPair> {
    const SAMPLES: usize = 48;
    let member = |a: f64| LocalRotationPair::new(base.phi1 + a, base.phi2 - a);
    let cost = |a: f64| -> Result<f64> {
        rates::local_squeezing_param(&gamma.apply(&member(a).symplectic()).apply(step))
    };
    let width = std::f64::consts::PI / SAMPLES as f64;
    let mut best = (0.0, cost(0.0)?);
    for i in 1..SAMPLES {
        let a = i as f64 * width;
        let c = cost(a)?;
        if c < best.1 {
            best = (a, c);
        }
    }
    let (mut lo, mut hi) = (best.0 - width, best.0 + width);
    for _ in 0..60 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if cost(m1)? <= cost(m2)? {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let a = 0.5 * (lo + hi);
    let a = if cost(a)? <= best.1 { a } else { best.0 };
    Ok(member(a).wrapped())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub squeezing: f64,
    pub negativity: f64,
}

/// Upper bounds after using `K` for time `t` on a product state with
/// squeezing `e^{r1}`, `e^{r2}` in the two modes:
/// `S <= e^{(s1-s2)t + r1}` and `N <= e^{(s1-s2)t + (r1+r2)/2}`.
pub fn squeezing_and_negativity_bounds(k: &KMatrix, t: f64, r1: f64, r2: f64) -> Result<Bounds> {
    if !(r1 >= r2 && r2 >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "expected r1 >= r2 >= 0, got r1 = {r1}, r2 = {r2}"
        )));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidInput(format!("invalid duration {t}")));
    }
    let growth = rates::squeezing_capability(k) * t;
    Ok(Bounds {
        squeezing: (growth + r1).exp(),
        negativity: (growth + 0.5 * (r1 + r2)).exp(),
    })
}

/// Per-mode log-squeezing `r_k = -ln λ_min` of the reduced blocks, clamped
/// at zero and sorted so that `r1 >= r2`.
pub fn local_log_squeezing(gamma: &CovarianceMatrix) -> (f64, f64) {
    let ra = -linalg::sym2_eigen(&gamma.a()).2.ln();
    let rb = -linalg::sym2_eigen(&gamma.b()).2.ln();
    let (ra, rb) = (ra.max(0.0), rb.max(0.0));
    (ra.max(rb), ra.min(rb))
}

/// The same bounds for an arbitrary initial state, using its two smallest
/// eigenvalues: `S <= e^{C_S t} / λ1` and `N <= e^{C_S t} / sqrt(λ1 λ2)`.
pub fn bounds_for_state(k: &KMatrix, t: f64, gamma0: &CovarianceMatrix) -> Result<Bounds> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidInput(format!("invalid duration {t}")));
    }
    let (values, _) = linalg::sorted_eigen(gamma0.matrix());
    let growth = (rates::squeezing_capability(k) * t).exp();
    Ok(Bounds {
        squeezing: growth / values[0],
        negativity: growth / (values[0] * values[1]).sqrt(),
    })
}

/// System modes plus `m` ancilla modes after a passive coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedCM {
    pub matrix: DMatrix<f64>,
    pub ancillas: usize,
}

impl ExtendedCM {
    pub fn system_block(&self) -> Matrix4<f64> {
        self.matrix.fixed_view::<4, 4>(0, 0).into_owned()
    }

    pub fn ancilla_block(&self) -> DMatrix<f64> {
        let n = 2 * self.ancillas;
        self.matrix.view((4, 4), (n, n)).into_owned()
    }

    pub fn cross_block(&self) -> DMatrix<f64> {
        self.matrix.view((0, 4), (4, 2 * self.ancillas)).into_owned()
    }

    pub fn lambda_min(&self) -> f64 {
        nalgebra::SymmetricEigen::new(self.matrix.clone()).eigenvalues.min()
    }

    /// `1 / λ_min` of the full matrix.
    pub fn squeezing(&self) -> f64 {
        1.0 / self.lambda_min()
    }
}

/// `J ⊕ ... ⊕ J` on `modes` modes.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        m[(2 * k, 2 * k + 1)] = -1.0;
        m[(2 * k + 1, 2 * k)] = 1.0;
    }
    m
}

fn check_passive(o: &DMatrix<f64>) -> Result<()> {
    let n = o.nrows();
    if o.ncols() != n || n % 2 != 0 {
        return Err(Error::NotPassive(format!("shape {}x{}", o.nrows(), o.ncols())));
    }
    let orth = (o * o.transpose() - DMatrix::identity(n, n)).amax();
    if orth > PASSIVE_TOL {
        return Err(Error::NotPassive(format!("orthogonality residual {orth:.3e}")));
    }
    let j = symplectic_form(n / 2);
    let symp = (o * &j * o.transpose() - &j).amax();
    if symp > PASSIVE_TOL {
        return Err(Error::NotPassive(format!("symplectic residual {symp:.3e}")));
    }
    Ok(())
}

/// `γ' = O^T (γ ⊕ 1) O` with `m` vacuum ancillas.
pub fn extend_with_ancillas(
    gamma: &CovarianceMatrix,
    m: usize,
    o: &DMatrix<f64>,
) -> Result<ExtendedCM> {
    let n = 4 + 2 * m;
    if o.nrows() != n {
        return Err(Error::NotPassive(format!(
            "coupling must be {n}x{n} for {m} ancillas, got {}x{}",
            o.nrows(),
            o.ncols()
        )));
    }
    check_passive(o)?;
    let mut base = DMatrix::identity(n, n);
    base.view_mut((0, 0), (4, 4)).copy_from(gamma.matrix());
    let g = o.transpose() * base * o;
    Ok(ExtendedCM {
        matrix: (&g + g.transpose()) * 0.5,
        ancillas: m,
    })
}

fn inverse_checked(b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = nalgebra::SymmetricEigen::new(b.clone());
    let (lo, hi) = (eig.eigenvalues.min(), eig.eigenvalues.max());
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(condition < MAX_CONDITION) {
        return Err(Error::SingularBlock { condition });
    }
    let inv_vals = eig.eigenvalues.map(|v| 1.0 / v);
    Ok(&eig.eigenvectors * DMatrix::from_diagonal(&inv_vals) * eig.eigenvectors.transpose())
}

/// State of the system after the ancillas are measured:
/// `A' - C' B'^{-1} C'^T`.
///
/// The Schur complement is symmetric positive definite but need not satisfy
/// the uncertainty relation, so the result is validated only for those two
/// properties.
pub fn gaussian_measurement(ext: &ExtendedCM) -> Result<CovarianceMatrix> {
    let a = ext.system_block();
    if ext.ancillas == 0 {
        return CovarianceMatrix::positive_definite(a);
    }
    let c = ext.cross_block();
    let b_inv = inverse_checked(&ext.ancilla_block())?;
    let out = DMatrix::from_iterator(4, 4, a.iter().copied()) - &c * b_inv * c.transpose();
    CovarianceMatrix::positive_definite(Matrix4::from_iterator(out.iter().copied()))
}

/// Conditional state for a general-dyne measurement with seed covariance
/// `γ_m` on the ancillas: `A' - C' (B' + γ_m)^{-1} C'^T`.
pub fn general_dyne_measurement(
    ext: &ExtendedCM,
    gamma_m: &DMatrix<f64>,
) -> Result<CovarianceMatrix> {
    let n = 2 * ext.ancillas;
    if gamma_m.nrows() != n || gamma_m.ncols() != n {
        return Err(Error::InvalidInput(format!(
            "measurement covariance must be {n}x{n}"
        )));
    }
    let a = ext.system_block();
    if n == 0 {
        return CovarianceMatrix::new(a);
    }
    let c = ext.cross_block();
    let inv = inverse_checked(&(ext.ancilla_block() + gamma_m))?;
    let out = DMatrix::from_iterator(4, 4, a.iter().copied()) - &c * inv * c.transpose();
    CovarianceMatrix::positive_definite(Matrix4::from_iterator(out.iter().copied()))
}
