//! Run configuration, built from command-line flags or read from a JSON file.

use std::path::{Path, PathBuf};

use bilinear_core::{CovarianceMatrix, KMatrix, SymplecticTransform};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CommandName {
    Rsv,
    Simcheck,
    Tmin,
    Plan,
    Evolve,
    Measure,
    Rates,
    Run,
    Bounds,
    Decompose,
    Compile,
    Figures,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Uninterrupted evolution under the native Hamiltonian.
    Bare,
    /// Alternating quarter-turn rotations between equal windows.
    Flip,
    /// Rotations maximizing the entanglement rate at every step.
    Greedy,
    /// Ideal two-mode squeezer simulation at optimal efficiency.
    Tms,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig1,
    Fig3,
}

/// Options shared by all subcommands. Which ones are required depends on
/// the command.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// Native Hamiltonian: `preset:h0|hbs|htms`, `k:a,b,c,d` or a JSON file.
    #[arg(long)]
    #[serde(default)]
    pub hamiltonian: Option<String>,
    /// Target Hamiltonian, same syntax as `--hamiltonian`.
    #[arg(long)]
    #[serde(default)]
    pub target: Option<String>,
    /// Initial state: `vacuum`, `squeezed:R`, `tms:T`, `lstms:R1,R2,T0`,
    /// `fig1`, `fig3` or a JSON file with a 4x4 covariance matrix.
    #[arg(long)]
    #[serde(default)]
    pub state: Option<String>,
    #[arg(long, value_enum)]
    #[serde(default)]
    pub strategy: Option<Strategy>,
    /// Duration (simulated duration for `tmin` and `plan`).
    #[arg(long)]
    #[serde(default)]
    pub t: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    pub dt: Option<f64>,
    /// Number of windows of the flip strategy.
    #[arg(long)]
    #[serde(default)]
    pub steps: Option<usize>,
    /// Interaction time for `plan`; defaults to the minimum.
    #[arg(long)]
    #[serde(default)]
    pub time: Option<f64>,
    /// Trotter slices per simulated primitive.
    #[arg(long)]
    #[serde(default)]
    pub slices: Option<usize>,
    /// Log-squeezing of mode 1 for `bounds`.
    #[arg(long)]
    #[serde(default)]
    pub r1: Option<f64>,
    /// Log-squeezing of mode 2 for `bounds`.
    #[arg(long)]
    #[serde(default)]
    pub r2: Option<f64>,
    /// JSON file with a 4x4 symplectic matrix.
    #[arg(long)]
    #[serde(default)]
    pub gate: Option<PathBuf>,
    /// JSON file with a gate sequence.
    #[arg(long)]
    #[serde(default)]
    pub gates: Option<PathBuf>,
    #[arg(long, value_enum)]
    #[serde(default)]
    pub figure: Option<Figure>,
    /// Output file (a directory for `figures`); stdout when absent.
    #[arg(long)]
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    #[serde(default)]
    pub format: Option<Format>,
}

/// A command with its options. The JSON form is a single object holding
/// `"command"` next to the option fields.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandName,
    pub options: Options,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, String> {
        let mut value: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let command = value
            .as_object_mut()
            .ok_or("expected a JSON object")?
            .remove("command")
            .ok_or("missing field `command`")?;
        Ok(Self {
            command: serde_json::from_value(command).map_err(|e| e.to_string())?,
            options: serde_json::from_value(value).map_err(|e| e.to_string())?,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        Self::from_json(&read(path)?)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
    }

    pub fn hamiltonian(&self) -> Result<KMatrix, CliError> {
        parse_hamiltonian(required(&self.options.hamiltonian, "hamiltonian")?)
    }

    pub fn target(&self) -> Result<KMatrix, CliError> {
        parse_hamiltonian(required(&self.options.target, "target")?)
    }

    /// The initial state, vacuum when unspecified.
    pub fn state(&self) -> Result<CovarianceMatrix, CliError> {
        match &self.options.state {
            Some(s) => parse_state(s),
            None => Ok(CovarianceMatrix::vacuum()),
        }
    }

    pub fn explicit_state(&self) -> Result<CovarianceMatrix, CliError> {
        parse_state(required(&self.options.state, "state")?)
    }

    /// Required duration, finite and non-negative.
    pub fn t(&self) -> Result<f64, CliError> {
        let t = *required(&self.options.t, "t")?;
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError::Validation(format!("--t must be finite and non-negative, got {t}")));
        }
        Ok(t)
    }

    /// Required duration, strictly positive.
    pub fn positive_t(&self) -> Result<f64, CliError> {
        let t = self.t()?;
        if t == 0.0 {
            return Err(CliError::Validation("--t must be positive".into()));
        }
        Ok(t)
    }

    pub fn gate(&self) -> Result<SymplecticTransform, CliError> {
        let path = required(&self.options.gate, "gate")?;
        let v = matrix_entries(&read_json(path)?, 4)
            .ok_or_else(|| CliError::Validation(format!("{}: expected a 4x4 matrix", path.display())))?;
        Ok(SymplecticTransform::try_from(v)?)
    }
}

pub fn required<'a, T>(value: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
    value
        .as_ref()
        .ok_or_else(|| CliError::Validation(format!("missing required option --{name}")))
}

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn read_json(path: &Path) -> Result<Value, CliError> {
    serde_json::from_str(&read(path)?)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// Row-major entries of an `n x n` matrix given flat or nested.
fn matrix_entries(v: &Value, n: usize) -> Option<Vec<f64>> {
    let rows = v.as_array()?;
    let flat: Vec<&Value> = if rows.len() == n && rows.iter().all(Value::is_array) {
        rows.iter()
            .map(|r| r.as_array().filter(|r| r.len() == n))
            .collect::<Option<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect()
    } else {
        rows.iter().collect()
    };
    if flat.len() != n * n {
        return None;
    }
    flat.into_iter().map(Value::as_f64).collect()
}

fn number(s: &str, what: &str) -> Result<f64, CliError> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Validation(format!("invalid {what} `{s}`")))
}

fn numbers(s: &str, count: usize, what: &str) -> Result<Vec<f64>, CliError> {
    let v = s.split(',').map(|p| number(p, what)).collect::<Result<Vec<_>, _>>()?;
    if v.len() != count {
        return Err(CliError::Validation(format!("{what} expects {count} comma-separated values, got `{s}`")));
    }
    Ok(v)
}

fn preset_hamiltonian(name: &str) -> Option<KMatrix> {
    match name {
        "h0" => Some(KMatrix::h0()),
        "hbs" => Some(KMatrix::beam_splitter()),
        "htms" => Some(KMatrix::two_mode_squeezer()),
        _ => None,
    }
}

/// `preset:NAME`, a bare preset name, `k:a,b,c,d`, or a JSON file holding
/// either `{"a":..,"b":..,"c":..,"d":..}` or the matrix `[[a, d], [c, b]]`.
pub fn parse_hamiltonian(spec: &str) -> Result<KMatrix, CliError> {
    if let Some(name) = spec.strip_prefix("preset:") {
        return preset_hamiltonian(name)
            .ok_or_else(|| CliError::Validation(format!("unknown Hamiltonian preset `{name}`")));
    }
    if let Some(k) = preset_hamiltonian(spec) {
        return Ok(k);
    }
    if let Some(entries) = spec.strip_prefix("k:") {
        let v = numbers(entries, 4, "Hamiltonian")?;
        return Ok(KMatrix::new(v[0], v[1], v[2], v[3]));
    }
    let path = Path::new(spec);
    let value = read_json(path)?;
    let k = if let Some(m) = matrix_entries(&value, 2) {
        KMatrix::new(m[0], m[3], m[2], m[1])
    } else {
        serde_json::from_value::<KMatrix>(value)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?
    };
    if !k.is_finite() {
        return Err(CliError::Validation(format!("{}: non-finite entries", path.display())));
    }
    Ok(k)
}

/// State presets or a JSON file with a 4x4 covariance matrix.
pub fn parse_state(spec: &str) -> Result<CovarianceMatrix, CliError> {
    let spec = spec.strip_prefix("preset:").unwrap_or(spec);
    let (name, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let state = match name {
        "vacuum" => CovarianceMatrix::vacuum(),
        "fig1" => CovarianceMatrix::squeezed_mode2(2.5),
        "fig3" => CovarianceMatrix::locally_squeezed_tms(2.0, 2.0, 1e-3),
        "squeezed" => CovarianceMatrix::squeezed_mode2(number(arg, "squeezing")?),
        "tms" => CovarianceMatrix::two_mode_squeezed(number(arg, "two-mode squeezing time")?),
        "lstms" => {
            let v = numbers(arg, 3, "lstms")?;
            CovarianceMatrix::locally_squeezed_tms(v[0], v[1], v[2])
        }
        _ => {
            let path = Path::new(spec);
            let v = matrix_entries(&read_json(path)?, 4).ok_or_else(|| {
                CliError::Validation(format!("{}: expected a 4x4 matrix", path.display()))
            })?;
            return Ok(CovarianceMatrix::try_from(v)?);
        }
    };
    Ok(state)
}
