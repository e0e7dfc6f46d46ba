//! Command dispatch. Every command produces one artifact, written to
//! `--out` atomically or to stdout.

use std::io::Write;
use std::path::{Path, PathBuf};

use bilinear_core::gates::{compile_to_native, decompose_gate, GateSequence};
use bilinear_core::protocols::{
    bounds_for_state, flip_strategy, greedy_rate_strategy, hamiltonian_flow, run_protocol,
    squeezing_and_negativity_bounds, tms_simulation, Trajectory, DEFAULT_DT,
};
use bilinear_core::simulate::{can_simulate_efficiently, synthesize_plan, t_min};
use bilinear_core::{evolve, measures, rates};
use serde::Serialize;
use serde_json::json;

use crate::config::{read_json, required, CommandName, Format, RunConfig, Strategy};
use crate::error::CliError;
use crate::figures;

pub const DEFAULT_SLICES: usize = 200;

/// Runs one command and writes its artifact.
pub fn dispatch(config: &RunConfig) -> Result<(), CliError> {
    if config.command == CommandName::Figures {
        return write_figure(config);
    }
    let text = match config.command {
        CommandName::Rsv => to_json(&config.hamiltonian()?.singular_values()),
        CommandName::Simcheck => simcheck(config)?,
        CommandName::Tmin => {
            let t = t_min(&config.hamiltonian()?, &config.target()?, config.t()?)?;
            to_json(&json!({ "t_min": t }))
        }
        CommandName::Plan => to_json(&synthesize_plan(
            &config.hamiltonian()?,
            &config.target()?,
            config.positive_t()?,
            config.options.time,
        )?),
        CommandName::Evolve => evolve_command(config)?,
        CommandName::Measure => measure(config)?,
        CommandName::Rates => rates_command(config)?,
        CommandName::Run => run(config)?,
        CommandName::Bounds => bounds(config)?,
        CommandName::Decompose => decompose(config)?,
        CommandName::Compile => compile(config)?,
        CommandName::Figures => unreachable!("handled above"),
    };
    emit(config.options.out.as_deref(), &text)
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("values serialize to JSON");
    s.push('\n');
    s
}

fn simcheck(config: &RunConfig) -> Result<String, CliError> {
    let (k, target) = (config.hamiltonian()?, config.target()?);
    let t = t_min(&k, &target, 1.0).ok();
    Ok(to_json(&json!({
        "efficient": can_simulate_efficiently(&k, &target),
        "t_min": t,
    })))
}

fn evolve_command(config: &RunConfig) -> Result<String, CliError> {
    let s = evolve(&config.hamiltonian()?, config.positive_t()?);
    let mut out = json!({ "symplectic": s });
    if config.options.state.is_some() {
        out["state"] = serde_json::to_value(config.explicit_state()?.apply(&s))
            .expect("states serialize to JSON");
    }
    Ok(to_json(&out))
}

fn measure(config: &RunConfig) -> Result<String, CliError> {
    let gamma = config.explicit_state()?;
    let entanglement = measures::entanglement(&gamma).ok();
    let squeezing = measures::squeezing(&gamma);
    Ok(to_json(&json!({
        "r": entanglement.map(|e| e.r),
        "N": measures::negativity(&gamma),
        "S": squeezing.s,
        "Q": squeezing.q,
        "entanglement": entanglement,
        "squeezing": squeezing,
    })))
}

fn rates_command(config: &RunConfig) -> Result<String, CliError> {
    let (gamma, k) = (config.state()?, config.hamiltonian()?);
    Ok(to_json(&json!({
        "entanglement": rates::optimal_entanglement_rate(&gamma, &k)?,
        "squeezing": rates::optimal_squeezing_rate(&gamma, &k),
    })))
}

fn run(config: &RunConfig) -> Result<String, CliError> {
    let strategy = *required(&config.options.strategy, "strategy")?;
    let (gamma, k, t) = (config.state()?, config.hamiltonian()?, config.positive_t()?);
    let dt = config.options.dt.unwrap_or(DEFAULT_DT);
    if !(dt.is_finite() && dt > 0.0) {
        return Err(CliError::Validation(format!("--dt must be positive, got {dt}")));
    }
    let traj: Trajectory = match strategy {
        Strategy::Bare => hamiltonian_flow(&gamma, &k, t, dt)?,
        Strategy::Tms => tms_simulation(&gamma, &k, t, dt)?,
        Strategy::Greedy => greedy_rate_strategy(&gamma, &k, t, dt)?,
        Strategy::Flip => {
            let steps = config.options.steps.unwrap_or(((t / dt).round() as usize).max(1));
            run_protocol(&gamma, &flip_strategy(&k, t, steps)?)?
        }
    };
    Ok(match config.options.format.unwrap_or(Format::Csv) {
        Format::Csv => traj.to_csv(),
        Format::Json => to_json(&traj.reports),
    })
}

fn bounds(config: &RunConfig) -> Result<String, CliError> {
    let (k, t) = (config.hamiltonian()?, config.t()?);
    let b = match (config.options.r1, config.options.r2) {
        (None, None) => bounds_for_state(&k, t, &config.state()?)?,
        (r1, r2) => squeezing_and_negativity_bounds(&k, t, r1.unwrap_or(0.0), r2.unwrap_or(0.0))?,
    };
    Ok(to_json(&b))
}

fn decompose(config: &RunConfig) -> Result<String, CliError> {
    let s = if config.options.gate.is_some() {
        config.gate()?
    } else {
        evolve(&config.hamiltonian()?, config.t()?)
    };
    Ok(to_json(&decompose_gate(&s)))
}

fn compile(config: &RunConfig) -> Result<String, CliError> {
    let k = config.hamiltonian()?;
    let seq = match &config.options.gates {
        Some(path) => serde_json::from_value::<GateSequence>(read_json(path)?)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?,
        None => decompose_gate(&config.gate()?),
    };
    let slices = config.options.slices.unwrap_or(DEFAULT_SLICES);
    Ok(to_json(&compile_to_native(&seq, &k, slices)?))
}

fn write_figure(config: &RunConfig) -> Result<(), CliError> {
    let which = *required(&config.options.figure, "figure")?;
    let dir = config.options.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
    let csv = figures::figure_csv(which)?;
    let path = dir.join(figures::file_name(which));
    write_atomic(&path, csv.as_bytes())?;
    Ok(())
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Output(format!("stdout: {e}")))
        }
    }
}

/// Writes to a temporary file in the destination directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let err = |e: &dyn std::fmt::Display| CliError::Output(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut file = tempfile::NamedTempFile::new_in(dir).map_err(|e| err(&e))?;
    file.write_all(bytes).map_err(|e| err(&e))?;
    file.persist(path).map_err(|e| err(&e.error))?;
    Ok(())
}
