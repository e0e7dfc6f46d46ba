mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use approx::assert_relative_eq;
use bilinear_core::gates::*;
use bilinear_core::measures;
use bilinear_core::phase_space::*;
use bilinear_core::protocols::run_protocol;
use bilinear_core::{linalg, sampling, Error};
use common::max_abs_diff;
use nalgebra::{Matrix2, Matrix4, Vector4};
use proptest::prelude::*;

fn is_rot(g: &Primitive) -> bool {
    matches!(g, Primitive::Rot { .. })
}

fn is_bs(g: &Primitive) -> bool {
    matches!(g, Primitive::Bs { .. })
}

fn is_tms(g: &Primitive) -> bool {
    matches!(g, Primitive::Tms { .. })
}

fn orthogonality(m: &Matrix4<f64>) -> f64 {
    max_abs_diff(&(m * m.transpose()), &Matrix4::identity())
}

fn swap() -> SymplecticTransform {
    evolve(&KMatrix::beam_splitter(), FRAC_PI_2)
}

#[test]
fn random_round_trips_follow_the_template() {
    let mut rng = sampling::rng(11);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let s = sampling::random_symplectic(&mut rng, 1.0);
        let seq = decompose_gate(&s);
        worst = worst.max(max_abs_diff(seq.recompose().matrix(), s.matrix()));
        assert!(seq.count(is_rot) <= 6);
        assert!(seq.count(is_bs) <= 3);
        assert!(seq.count(is_tms) <= 2);
        for g in &seq.gates {
            assert!(g.symplectic().residual() < 1e-10);
            if is_tms(g) {
                assert!(g.duration() >= 0.0);
            }
        }
    }
    assert!(worst < 1e-9, "worst round trip {worst:.3e}");
}

#[test]
fn euler_factors_are_passive() {
    let mut rng = sampling::rng(12);
    for _ in 0..500 {
        let s = sampling::random_symplectic(&mut rng, 1.0);
        let e = euler_decompose(&s);
        assert!(e.alpha >= e.beta && e.beta >= 0.0);
        for o in [&e.outer, &e.inner] {
            assert!(orthogonality(o.matrix()) < 1e-10);
            assert!(o.residual() < 1e-10);
        }
        assert!(max_abs_diff(&e.reconstruct(), s.matrix()) < 1e-10 * s.matrix().norm().max(1.0));
    }
}

#[test]
fn euler_of_uniform_squeezer() {
    let a = 0.6f64;
    let s = SymplecticTransform::new(Matrix4::from_diagonal(&Vector4::new(
        a.exp(),
        (-a).exp(),
        a.exp(),
        (-a).exp(),
    )))
    .unwrap();
    let e = euler_decompose(&s);
    assert_relative_eq!(e.alpha, a, epsilon = 1e-12);
    assert!(e.beta.abs() < 1e-12);
    assert!(max_abs_diff(e.outer.matrix(), &Matrix4::identity()) < 1e-12);
    assert!(max_abs_diff(e.inner.matrix(), &Matrix4::identity()) < 1e-12);
}

#[test]
fn euler_of_short_native_flow() {
    for t in [1e-3, 5e-4, 2.5e-4] {
        let e = euler_decompose(&evolve(&KMatrix::h0(), t));
        let d = e.diagonal();
        let big = d[(0, 0)].max(d[(2, 2)]).max(d[(1, 1)]).max(d[(3, 3)]);
        let small = d[(0, 0)].min(d[(2, 2)]).min(d[(1, 1)]).min(d[(3, 3)]);
        assert!(((big * big - 1.0) / t - 1.0).abs() < 2.0 * t);
        assert!(((1.0 - small * small) / t - 1.0).abs() < 2.0 * t);
    }
}

#[test]
fn passive_examples() {
    let id = passive_decompose(&SymplecticTransform::identity()).unwrap();
    assert!(id.t_bs.abs() < 1e-15);
    assert!(id.rot_out.is_identity(1e-15) && id.rot_in.is_identity(1e-15));

    let bs = passive_decompose(&evolve(&KMatrix::beam_splitter(), 0.7)).unwrap();
    assert_relative_eq!(bs.t_bs, 0.7, epsilon = 1e-14);
    assert!(bs.rot_out.is_identity(1e-14) && bs.rot_in.is_identity(1e-14));

    let sw = passive_decompose(&swap()).unwrap();
    assert_relative_eq!(sw.t_bs, FRAC_PI_2, epsilon = 1e-14);
    assert!(max_abs_diff(sw.reconstruct().matrix(), swap().matrix()) < 1e-14);

    let mut rng = sampling::rng(13);
    for _ in 0..500 {
        let o = SymplecticTransform::new(Matrix4::from_iterator(
            sampling::random_passive(&mut rng, 2).iter().copied(),
        ))
        .unwrap();
        let p = passive_decompose(&o).unwrap();
        assert!((0.0..=FRAC_PI_2).contains(&p.t_bs));
        assert!(max_abs_diff(p.reconstruct().matrix(), o.matrix()) < 1e-10);
        assert!(max_abs_diff(p.to_sequence().recompose().matrix(), o.matrix()) < 1e-10);
    }
}

#[test]
fn active_transform_is_not_passive() {
    let s = evolve(&KMatrix::two_mode_squeezer(), 0.3);
    assert!(matches!(passive_decompose(&s), Err(Error::NotPassive(_))));
}

#[test]
fn single_mode_squeezer_examples() {
    let diag = |v: [f64; 4]| Matrix4::from_diagonal(&Vector4::from(v.map(f64::exp)));
    let cases = [
        (0.0, 0.0, diag([0.0; 4])),
        (0.5, 0.0, diag([0.5, -0.5, 0.5, -0.5])),
        (0.0, -0.3, diag([-0.3, 0.3, 0.3, -0.3])),
        (0.4, 0.2, diag([0.6, -0.6, 0.2, -0.2])),
    ];
    for (alpha, beta, expected) in cases {
        let seq = synthesize_single_mode_squeezers(alpha, beta);
        assert!(
            max_abs_diff(seq.recompose().matrix(), &expected) < 1e-10,
            "alpha {alpha} beta {beta}"
        );
    }
    assert!(synthesize_single_mode_squeezers(0.0, 0.0).gates.is_empty());
}

#[test]
fn passive_targets_need_no_squeezing() {
    let seq = decompose_gate(&SymplecticTransform::identity());
    assert_eq!(seq.count(is_tms) + seq.count(is_bs), 0);
    let seq = decompose_gate(&swap());
    assert_eq!(seq.count(is_tms), 0);
    assert!(max_abs_diff(seq.recompose().matrix(), swap().matrix()) < 1e-12);
}

fn invariants(g: &CovarianceMatrix) -> [f64; 3] {
    let e = measures::entanglement(g).unwrap();
    [e.r, e.negativity, measures::squeezing(g).s]
}

fn compiled_error(s: &SymplecticTransform, slices: usize) -> f64 {
    let protocol = compile_to_native(&decompose_gate(s), &KMatrix::h0(), slices).unwrap();
    let vac = CovarianceMatrix::vacuum();
    let out = run_protocol(&vac, &protocol).unwrap();
    let exact = invariants(&vac.apply(s));
    let got = invariants(out.last_state());
    (0..3)
        .map(|i| (got[i] - exact[i]).abs() / exact[i].max(1.0))
        .fold(0.0, f64::max)
}

#[test]
fn compiled_gates_reproduce_vacuum_images() {
    let mut rng = sampling::rng(14);
    for _ in 0..5 {
        let s = sampling::random_symplectic(&mut rng, 0.5);
        let coarse = compiled_error(&s, 100);
        let fine = compiled_error(&s, 400);
        assert!(fine < 1e-2, "error {fine:.3e}");
        assert!(fine <= coarse + 1e-12, "coarse {coarse:.3e} fine {fine:.3e}");
    }
}

/// Spectra of the two local blocks, which are invariant under local
/// rotations.
fn block_spectra(g: &CovarianceMatrix) -> [f64; 4] {
    let (_, a_big, a_small) = linalg::sym2_eigen(&g.a());
    let (_, b_big, b_small) = linalg::sym2_eigen(&g.b());
    [a_big, a_small, b_big, b_small]
}

/// Largest mismatch of the exchanged block spectra and the largest spurious
/// cross correlation `‖C‖` over random product inputs.
fn compiled_swap_errors(slices: usize) -> (f64, f64) {
    let protocol = compile_to_native(&decompose_gate(&swap()), &KMatrix::h0(), slices).unwrap();
    let mut rng = sampling::rng(15);
    let (mut spectra, mut cross) = (0.0f64, 0.0f64);
    for i in 0..6 {
        let a = sampling::random_single_mode_state(&mut rng, 1.0);
        let b = if i % 2 == 0 {
            Matrix2::identity()
        } else {
            sampling::random_single_mode_state(&mut rng, 1.0)
        };
        let g = CovarianceMatrix::product(&a, &b).unwrap();
        let out = run_protocol(&g, &protocol).unwrap();
        let before = block_spectra(&g);
        let after = block_spectra(out.last_state());
        for k in 0..2 {
            spectra = spectra.max((after[k] - before[k + 2]).abs());
            spectra = spectra.max((after[k + 2] - before[k]).abs());
        }
        cross = cross.max(out.last_state().c().norm());
    }
    (spectra, cross)
}

#[test]
fn compiled_swap_exchanges_mode_statistics() {
    let (s200, c200) = compiled_swap_errors(200);
    let (s400, c400) = compiled_swap_errors(400);
    assert!(s200 < 1e-3, "200 slices: spectra {s200:.3e}");
    assert!(s400 < 1e-2 && c400 < 1e-2, "400 slices: spectra {s400:.3e}, cross {c400:.3e}");
    let ratio = c200 / c400;
    assert!((1.8..2.2).contains(&ratio), "cross ratio {ratio}");
}

#[test]
fn compile_rejects_degenerate_native() {
    let seq = decompose_gate(&swap());
    assert!(matches!(
        compile_to_native(&seq, &KMatrix::beam_splitter(), 10),
        Err(Error::Degenerate { .. })
    ));
    let protocol = compile_to_native(&GateSequence::new(), &KMatrix::h0(), 10).unwrap();
    assert_eq!(protocol.total_time(), 0.0);
}

#[test]
fn single_tms_costs_twice_its_duration() {
    let mut seq = GateSequence::new();
    seq.push(Primitive::Tms { t: 0.35, barred: false });
    let protocol = compile_to_native(&seq, &KMatrix::h0(), 50).unwrap();
    assert_relative_eq!(protocol.total_time(), 0.7, epsilon = 1e-12);
}

/// Smallest distance from `diag(e^a, e^{-a}) ⊕ 1` to any `evolve(K, 1)` with
/// `K` on a grid; `evolve(K, t) = evolve(t K, 1)` makes `t` redundant.
#[test]
fn local_squeezer_is_not_a_single_flow() {
    let a = 0.5f64;
    let target = Matrix4::from_diagonal(&Vector4::new(a.exp(), (-a).exp(), 1.0, 1.0));
    let grid: Vec<f64> = (0..=24).map(|i| -3.0 + 0.25 * i as f64).collect();
    let mut best = f64::INFINITY;
    for &ka in &grid {
        for &kb in &grid {
            for &kc in &grid {
                for &kd in &grid {
                    let s = evolve(&KMatrix::new(ka, kb, kc, kd), 1.0);
                    best = best.min((s.matrix() - target).norm());
                }
            }
        }
    }
    assert!(best > 1e-6, "closest flow {best:.3e}");
    let seq = synthesize_single_mode_squeezers(a / 2.0, a / 2.0);
    let expected = Matrix4::from_diagonal(&Vector4::new(a.exp(), (-a).exp(), 1.0, 1.0));
    assert!(max_abs_diff(seq.recompose().matrix(), &expected) < 1e-10);
}

#[test]
fn sequence_json_round_trip() {
    let s = sampling::random_symplectic(&mut sampling::rng(16), 1.0);
    let seq = decompose_gate(&s);
    let json = serde_json::to_string(&seq).unwrap();
    let back: GateSequence = serde_json::from_str(&json).unwrap();
    assert_eq!(back, seq);
    let parsed: GateSequence =
        serde_json::from_str(r#"[{"kind":"rot","phi1":0.1,"phi2":0.2},{"kind":"bs","t":0.5}]"#).unwrap();
    assert_eq!(parsed.gates.len(), 2);
}

#[test]
fn rotation_merging() {
    let mut seq = GateSequence::new();
    seq.push(Primitive::rot(LocalRotationPair::new(0.3, -0.2)));
    seq.push(Primitive::rot(LocalRotationPair::new(-0.3, 0.2)));
    assert!(seq.gates.is_empty());
    seq.push(Primitive::rot(LocalRotationPair::new(PI, 0.1)));
    seq.push(Primitive::rot(LocalRotationPair::new(0.2, 0.1)));
    assert_eq!(seq.gates.len(), 1);
    let expected = LocalRotationPair::new(PI + 0.2, 0.2).symplectic();
    assert!(max_abs_diff(seq.recompose().matrix(), expected.matrix()) < 1e-14);
    seq.push(Primitive::Bs { t: 0.0, barred: true });
    assert_eq!(seq.gates.len(), 1);
}

#[test]
fn barred_primitives_use_the_quarter_turn() {
    let q = Matrix4::new(
        1.0, 0.0, 0.0, 0.0, //
        0.0, 1.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, -1.0, 0.0,
    );
    // q maps (x2, p2) to (p2, -x2).
    let v = q * Vector4::new(0.0, 0.0, 1.0, 2.0);
    assert_eq!(v, Vector4::new(0.0, 0.0, 2.0, -1.0));
    let plain = Primitive::Tms { t: 0.4, barred: false }.symplectic();
    let barred = Primitive::Tms { t: 0.4, barred: true }.symplectic();
    assert!(max_abs_diff(barred.matrix(), &(q * plain.matrix() * q.transpose())) < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn prop_round_trip(seed in any::<u64>(), scale in 0.05f64..1.5) {
        let s = sampling::random_symplectic(&mut sampling::rng(seed), scale);
        let seq = decompose_gate(&s);
        let err = max_abs_diff(seq.recompose().matrix(), s.matrix());
        prop_assert!(err < 1e-9 * s.matrix().norm().max(1.0), "error {:.3e}", err);
    }

    #[test]
    fn prop_squeezers_match_diagonal(alpha in -1.5f64..1.5, beta in -1.5f64..1.5) {
        let seq = synthesize_single_mode_squeezers(alpha, beta);
        let (p, m) = (alpha + beta, alpha - beta);
        let expected = Matrix4::from_diagonal(&Vector4::new(p.exp(), (-p).exp(), m.exp(), (-m).exp()));
        prop_assert!(max_abs_diff(seq.recompose().matrix(), &expected) < 1e-10 * expected.norm());
    }
}
