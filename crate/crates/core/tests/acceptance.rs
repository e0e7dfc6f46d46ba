//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fail.

mod common;

use std::f64::consts::{E, FRAC_PI_2};
use std::process::ExitCode;
use std::time::Instant;

use bilinear_core::gates::{compile_to_native, decompose_gate};
use bilinear_core::phase_space::*;
use bilinear_core::protocols::*;
use bilinear_core::rates::{optimal_entanglement_rate, optimal_squeezing_rate};
use bilinear_core::simulate::{effective_k, plan_to_protocol, synthesize_plan, t_min, ProtocolBuilder};
use bilinear_core::{linalg, measures, sampling};
use common::{fd_entanglement_rate, fd_squeezing_rate, frobenius, grid_max_1d, grid_max_2d, max_abs_diff};
use nalgebra::Matrix2;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn k_dist(a: &KMatrix, b: &KMatrix) -> f64 {
    (a.matrix() - b.matrix()).abs().max()
}

fn restricted_singular_values() -> Outcome {
    let cases = [
        ("H0", KMatrix::h0(), (1.0, 0.0)),
        ("H_bs", KMatrix::beam_splitter(), (1.0, 1.0)),
        ("H_tms", KMatrix::two_mode_squeezer(), (1.0, -1.0)),
    ];
    let mut pass = true;
    let mut parts = vec![];
    for (name, k, (s1, s2)) in cases {
        let sv = k.singular_values();
        pass &= sv.s1 == s1 && sv.s2 == s2;
        parts.push(format!("{name} ({}, {})", sv.s1, sv.s2));
    }
    outcome(pass, parts.join(", "))
}

fn simulation_optimality() -> Outcome {
    let h0 = KMatrix::h0();
    let mut pass = true;
    let mut parts = vec![];
    for (name, target) in [("H_bs", KMatrix::beam_splitter()), ("H_tms", KMatrix::two_mode_squeezer())] {
        let t = t_min(&h0, &target, 1.0).unwrap();
        let plan = synthesize_plan(&h0, &target, 1.0, None).unwrap();
        let d = k_dist(&effective_k(&plan), &target);
        pass &= (t - 2.0).abs() <= 1e-12 && d <= 1e-10;
        parts.push(format!("t_min(H0 -> {name}) = {t}, |K_eff - K| = {d:.1e}"));
    }
    outcome(pass, parts.join("; "))
}

fn trotter_convergence() -> Outcome {
    let target = KMatrix::two_mode_squeezer();
    let tp = 0.25;
    let plan = synthesize_plan(&KMatrix::h0(), &target, tp, None).unwrap();
    let exact = CovarianceMatrix::vacuum().apply(&evolve(&target, tp));
    let err = |slices: usize| {
        let p = plan_to_protocol(&plan, slices).unwrap();
        frobenius(CovarianceMatrix::vacuum().apply(&p.symplectic()).matrix(), exact.matrix())
    };
    let (e100, e200, e400) = (err(100), err(200), err(400));
    let (r1, r2) = (e100 / e200, e200 / e400);
    let pass = e200 < 1e-3 && (1.8..=2.2).contains(&r1) && (1.8..=2.2).contains(&r2);
    outcome(
        pass,
        format!("t' = {tp}: error {e200:.3e} at 200 slices, doubling ratios {r1:.3}, {r2:.3}"),
    )
}

fn flip_strategy_saturates() -> Outcome {
    let traj = run_protocol(
        &CovarianceMatrix::vacuum(),
        &flip_strategy(&KMatrix::h0(), 1.0, 10_000).unwrap(),
    )
    .unwrap();
    let last = traj.last_report();
    let (n, s) = (last.negativity / E - 1.0, last.s / E - 1.0);
    outcome(
        n.abs() <= 1e-3 && s.abs() <= 1e-3,
        format!("N/e - 1 = {n:.2e}, S/e - 1 = {s:.2e}"),
    )
}

fn rate_optimality() -> Outcome {
    let mut rng = sampling::rng(500);
    let cases: Vec<(CovarianceMatrix, KMatrix)> = (0..200)
        .map(|_| (sampling::random_pure_state(&mut rng, 1.0), sampling::random_k(&mut rng)))
        .collect();
    let threads = std::thread::available_parallelism().map_or(4, |n| n.get());
    let chunk = cases.len().div_ceil(threads);
    let worst = std::thread::scope(|scope| {
        let handles: Vec<_> = cases
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    let (mut we, mut ws) = (0.0f64, 0.0f64);
                    for (g, k) in part {
                        let plan = optimal_entanglement_rate(g, k).unwrap();
                        let (best, _, _) = grid_max_2d(360, |a, b| {
                            fd_entanglement_rate(g, k, &LocalRotationPair::new(a, b))
                        });
                        we = we.max((best - plan.gamma_rate).abs() / plan.gamma_rate.abs());
                        let sq = optimal_squeezing_rate(g, k);
                        let (best, _) =
                            grid_max_1d(360, |a| fd_squeezing_rate(g, k, &LocalRotationPair::new(a, 0.0)));
                        ws = ws.max((best - sq.gamma_rate).abs() / sq.gamma_rate.abs());
                    }
                    (we, ws)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap())
            .fold((0.0f64, 0.0f64), |acc, x| (acc.0.max(x.0), acc.1.max(x.1)))
    });
    outcome(
        worst.0 <= 1e-3 && worst.1 <= 1e-3,
        format!(
            "200 states: worst relative gap Gamma_E {:.2e}, Gamma_S {:.2e}",
            worst.0, worst.1
        ),
    )
}

fn vacuum_rate() -> Outcome {
    let traj = greedy_rate_strategy(&CovarianceMatrix::vacuum(), &KMatrix::h0(), 1.5, DEFAULT_DT).unwrap();
    let (dev, at) = traj
        .reports
        .iter()
        .map(|r| ((r.rate - 1.0).abs(), r.t))
        .fold((0.0f64, 0.0), |acc, x| if x.0 > acc.0 { x } else { acc });
    let e0 = traj.last_report().e0;
    outcome(
        dev <= 1e-6,
        format!(
            "dt = {DEFAULT_DT}, t = 1.5: max |rate - 1| = {dev:.3e} at t = {at:.3}; E0(1.5) = {e0:.9}"
        ),
    )
}

fn fig3_ordering() -> Outcome {
    let g = CovarianceMatrix::locally_squeezed_tms(2.0, 2.0, 1e-3);
    let h0 = KMatrix::h0();
    let greedy = greedy_rate_strategy(&g, &h0, 1.0, DEFAULT_DT).unwrap();
    let tms = tms_simulation(&g, &h0, 1.0, DEFAULT_DT).unwrap();
    let initial = greedy.reports[0].rate;
    let (eg, et) = (greedy.last_report().e0, tms.last_report().e0);
    outcome(
        et > eg && (initial - 1.0).abs() <= 1e-6,
        format!("initial greedy rate {initial:.9}; E0(1): tms-simulation {et:.4}, greedy {eg:.4}"),
    )
}

fn measurement_no_gain() -> Outcome {
    let mut rng = sampling::rng(800);
    let mut violations = 0;
    let mut margin = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let g = sampling::random_pure_state(&mut rng, 1.0);
        let m = rng.random_range(1..4);
        let o = sampling::random_passive(&mut rng, 2 + m);
        let ext = extend_with_ancillas(&g, m, &o).unwrap();
        let out = gaussian_measurement(&ext).unwrap();
        let diff = measures::squeezing(&out).s - ext.squeezing();
        margin = margin.max(diff);
        if diff > 1e-10 {
            violations += 1;
        }
    }
    outcome(
        violations == 0,
        format!("1000 measurements: {violations} violations, max S(out) - S(ext) = {margin:.2e}"),
    )
}

fn block_spectra(g: &CovarianceMatrix) -> [f64; 4] {
    let (_, a_big, a_small) = linalg::sym2_eigen(&g.a());
    let (_, b_big, b_small) = linalg::sym2_eigen(&g.b());
    [a_big, a_small, b_big, b_small]
}

fn gate_round_trip() -> Outcome {
    let mut rng = sampling::rng(900);
    let mut worst = 0.0f64;
    let mut shape_ok = true;
    for _ in 0..1000 {
        let s = sampling::random_symplectic(&mut rng, 1.0);
        let seq = decompose_gate(&s);
        worst = worst.max(max_abs_diff(seq.recompose().matrix(), s.matrix()));
        let rots = seq.count(|g| matches!(g, bilinear_core::gates::Primitive::Rot { .. }));
        let bss = seq.count(|g| matches!(g, bilinear_core::gates::Primitive::Bs { .. }));
        let tmss = seq.count(|g| matches!(g, bilinear_core::gates::Primitive::Tms { .. }));
        shape_ok &= rots <= 6 && bss <= 3 && tmss <= 2;
    }

    let swap = evolve(&KMatrix::beam_splitter(), FRAC_PI_2);
    let protocol = compile_to_native(&decompose_gate(&swap), &KMatrix::h0(), 400).unwrap();
    let mut swap_err = 0.0f64;
    for i in 0..10 {
        let a = sampling::random_single_mode_state(&mut rng, 1.0);
        let b = if i % 2 == 0 {
            Matrix2::identity()
        } else {
            sampling::random_single_mode_state(&mut rng, 1.0)
        };
        let g = CovarianceMatrix::product(&a, &b).unwrap();
        let out = run_protocol(&g, &protocol).unwrap();
        let (before, after) = (block_spectra(&g), block_spectra(out.last_state()));
        for k in 0..2 {
            swap_err = swap_err.max((after[k] - before[k + 2]).abs());
            swap_err = swap_err.max((after[k + 2] - before[k]).abs());
        }
        swap_err = swap_err.max(out.last_state().c().norm());
    }
    outcome(
        worst < 1e-9 && shape_ok && swap_err <= 1e-2,
        format!(
            "1000 round trips: max error {worst:.2e}, template shape {}; compiled swap at 400 slices: {swap_err:.2e}",
            if shape_ok { "ok" } else { "violated" }
        ),
    )
}

fn bounds_hold() -> Outcome {
    let mut rng = sampling::rng(1000);
    let r = 2.5f64;
    let squeezed = Matrix2::new((-r).exp(), 0.0, 0.0, r.exp());
    let inputs = [
        (CovarianceMatrix::vacuum(), 0.0, 0.0),
        (CovarianceMatrix::product(&squeezed, &squeezed).unwrap(), r, r),
    ];
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let k = sampling::random_k(&mut rng);
        let steps = rng.random_range(1..40);
        let mut cuts: Vec<f64> = (0..steps - 1).map(|_| rng.random_range(0.0..1.0)).collect();
        cuts.extend([0.0, 1.0]);
        cuts.sort_by(|a, b| a.total_cmp(b));
        let mut b = ProtocolBuilder::new(k);
        for w in cuts.windows(2) {
            b.rotate(sampling::random_rotation(&mut rng));
            b.interact(w[1] - w[0]);
        }
        let protocol = b.finish();
        for (g0, r1, r2) in &inputs {
            let traj = run_protocol(g0, &protocol).unwrap();
            for rep in &traj.reports {
                let bound = squeezing_and_negativity_bounds(&k, rep.t, *r1, *r2).unwrap();
                worst = worst.max(rep.negativity / bound.negativity);
                worst = worst.max(rep.s / bound.squeezing);
            }
        }
    }
    outcome(
        worst <= 1.0 + 1e-9,
        format!("100 random protocols: max observed / bound = {worst:.6}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("restricted singular values", restricted_singular_values),
        ("simulation optimality", simulation_optimality),
        ("Trotter convergence", trotter_convergence),
        ("flip strategy", flip_strategy_saturates),
        ("rate optimality", rate_optimality),
        ("vacuum greedy rate", vacuum_rate),
        ("fig3 ordering", fig3_ordering),
        ("measurement no-gain", measurement_no_gain),
        ("gate round trip", gate_round_trip),
        ("bounds", bounds_hold),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {verdict} {name}: {} ({:.2} s)",
            i + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
