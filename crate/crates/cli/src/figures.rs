//! Data behind the entanglement-growth figures: the optimal-rate strategy,
//! the two-mode-squeezer simulation and bare `H0` evolution, with the
//! negativity bound.

use std::fmt::Write;

use bilinear_core::protocols::{
    bounds_for_state, greedy_on_grid, hamiltonian_flow_on_grid, tms_simulation_on_grid,
    uniform_grid, Trajectory,
};
use bilinear_core::{CovarianceMatrix, KMatrix};

use crate::config::Figure;
use crate::error::CliError;

/// Time grid of a figure: `[0, 1.5]` in steps of `1e-3` for fig1; steps of
/// `1e-4` up to `1e-2` and `1e-3` after that, up to `1`, for fig3.
pub fn grid(which: Figure) -> Result<Vec<f64>, CliError> {
    Ok(match which {
        Figure::Fig1 => uniform_grid(1.5, 1e-3)?,
        Figure::Fig3 => (0..=100)
            .map(|i| i as f64 * 1e-4)
            .chain((11..=1000).map(|i| i as f64 * 1e-3))
            .collect(),
    })
}

pub fn initial_state(which: Figure) -> CovarianceMatrix {
    match which {
        Figure::Fig1 => CovarianceMatrix::squeezed_mode2(2.5),
        Figure::Fig3 => CovarianceMatrix::locally_squeezed_tms(2.0, 2.0, 1e-3),
    }
}

pub fn file_name(which: Figure) -> &'static str {
    match which {
        Figure::Fig1 => "fig1.csv",
        Figure::Fig3 => "fig3.csv",
    }
}

/// CSV with one row per grid node. fig1 also carries the optimal-rate
/// strategy started from the vacuum.
pub fn figure_csv(which: Figure) -> Result<String, CliError> {
    let times = grid(which)?;
    let gamma0 = initial_state(which);
    let k = KMatrix::h0();
    let vacuum = CovarianceMatrix::vacuum();
    let (greedy, tms, bare, reference) = std::thread::scope(|scope| {
        let greedy = scope.spawn(|| greedy_on_grid(&gamma0, &k, &times));
        let tms = scope.spawn(|| tms_simulation_on_grid(&gamma0, &k, &times));
        let bare = scope.spawn(|| hamiltonian_flow_on_grid(&gamma0, &k, &times));
        let reference = (which == Figure::Fig1)
            .then(|| scope.spawn(|| greedy_on_grid(&vacuum, &k, &times)));
        (
            greedy.join().expect("greedy sweep panicked"),
            tms.join().expect("tms sweep panicked"),
            bare.join().expect("bare sweep panicked"),
            reference.map(|h| h.join().expect("vacuum sweep panicked")),
        )
    });
    let (greedy, tms, bare) = (greedy?, tms?, bare?);
    let reference: Option<Trajectory> = reference.transpose()?;

    let mut out = String::from(
        "t,greedy_E0,greedy_N,greedy_rate,tms_E0,tms_N,tms_rate,h0_E0,h0_N,h0_rate",
    );
    if reference.is_some() {
        out.push_str(",vacuum_E0,vacuum_rate");
    }
    out.push_str(",bound_N,bound_E0\n");
    for (i, &t) in times.iter().enumerate() {
        let _ = write!(out, "{t}");
        for traj in [&greedy, &tms, &bare] {
            let r = &traj.reports[i];
            let _ = write!(out, ",{},{},{}", r.e0, r.negativity, r.rate);
        }
        if let Some(v) = &reference {
            let r = &v.reports[i];
            let _ = write!(out, ",{},{}", r.e0, r.rate);
        }
        let bound = bounds_for_state(&k, t, &gamma0)?;
        let _ = writeln!(out, ",{},{}", bound.negativity, bound.negativity.ln());
    }
    Ok(out)
}
