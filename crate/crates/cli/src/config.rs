use std::collections::BTreeMap;
use std::fmt;

use qig::metrics::{registered_functions, OperatorMonotoneFunction};
use serde::Serialize;

use crate::CliError;

/// Experiment selected on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Agreement of the three BKM expressions on random inputs.
    BkmEquivalence,
    /// Duality residuals and affine-relation fits over a function family.
    DualityScan,
    /// Monotonicity sweeps over random and structured channels.
    Monotonicity,
    /// Christoffel symbols and curvature of the ±1 connections.
    Flatness,
    /// Free-energy potentials and their Legendre transform.
    Legendre,
    /// Every experiment above, one after the other.
    All,
}

impl Command {
    pub const EXPERIMENTS: [Command; 5] = [
        Command::BkmEquivalence,
        Command::DualityScan,
        Command::Monotonicity,
        Command::Flatness,
        Command::Legendre,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Command::BkmEquivalence => "bkm-equivalence",
            Command::DualityScan => "duality-scan",
            Command::Monotonicity => "monotonicity",
            Command::Flatness => "flatness",
            Command::Legendre => "legendre",
            Command::All => "all",
        }
    }

    fn default_samples(self) -> usize {
        match self {
            Command::BkmEquivalence => 100,
            Command::Flatness => 10,
            Command::Legendre => 50,
            _ => 20,
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Default bounds, keyed by the names accepted by `--tolerance key=value`.
pub fn default_tolerances(dim: usize) -> BTreeMap<String, f64> {
    let hessian = if dim <= 2 { 1e-5 } else { 1e-4 };
    [
        ("bkm_relative", 1e-8),
        ("duality_pass", 1e-6),
        ("duality_reject", 1e-2),
        ("affine_constancy", 1e-8),
        ("affine_off_diagonal", 1e-8),
        ("constancy_reject", 1e-2),
        ("transport", 1e-8),
        ("christoffel", 1e-8),
        ("christoffel_witness", 1e-3),
        ("curvature_own", 1e-6),
        ("curvature_foreign", 1e-4),
        ("legendre", 1e-8),
        ("gradient", 1e-6),
        ("hessian", hessian),
        ("eta_round_trip", 1e-9),
        ("biorthogonality", 1e-5),
        ("entropy", 1e-8),
        ("monotone_violation", 1e-9),
        ("planted_violation", 1e-3),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_owned(), v))
    .collect()
}

/// Parses `key=value`.
pub fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("`{v}` is not a number"))?;
    if !(v.is_finite() && v > 0.0) {
        return Err(format!("tolerance `{k}` must be positive and finite"));
    }
    Ok((k.trim().to_owned(), v))
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub dim: usize,
    /// `None` selects the per-command default.
    pub samples: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Empty selects the per-command default family.
    pub functions: Vec<String>,
    pub tolerance_overrides: BTreeMap<String, f64>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            dim: 2,
            samples: None,
            trials: 200,
            seed: 0,
            functions: Vec::new(),
            tolerance_overrides: BTreeMap::new(),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.dim < 2 {
            return Err(CliError::Usage(format!("--dim must be at least 2, got {}", self.dim)));
        }
        if self.samples == Some(0) {
            return Err(CliError::Usage("--samples must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(CliError::Usage("--trials must be at least 1".into()));
        }
        let known = default_tolerances(self.dim);
        if let Some(k) = self.tolerance_overrides.keys().find(|k| !known.contains_key(*k)) {
            return Err(CliError::Usage(format!(
                "unknown tolerance `{k}`; known keys: {}",
                known.keys().cloned().collect::<Vec<_>>().join(", ")
            )));
        }
        for name in &self.functions {
            OperatorMonotoneFunction::by_name(name).map_err(|e| CliError::Usage(e.to_string()))?;
        }
        Ok(())
    }

    pub fn samples_for(&self, command: Command) -> usize {
        self.samples.unwrap_or_else(|| command.default_samples())
    }

    pub fn tolerances(&self) -> BTreeMap<String, f64> {
        let mut t = default_tolerances(self.dim);
        t.extend(self.tolerance_overrides.clone());
        t
    }

    /// The selected functions, or the default family of `command`.
    pub fn functions_for(&self, command: Command) -> Vec<OperatorMonotoneFunction> {
        if !self.functions.is_empty() {
            return self
                .functions
                .iter()
                .filter_map(|n| OperatorMonotoneFunction::by_name(n).ok())
                .collect();
        }
        match command {
            Command::DualityScan => ["bkm", "2*bkm", "sld", "rld", "wy"]
                .iter()
                .filter_map(|n| OperatorMonotoneFunction::by_name(n).ok())
                .collect(),
            _ => registered_functions(),
        }
    }

    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            dim: self.dim,
            samples: self.samples,
            trials: self.trials,
            seed: self.seed,
            functions: self.functions.clone(),
        }
    }
}

/// The part of the configuration recorded in a report. Output paths are left
/// out so that reruns written to different files compare equal.
#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub dim: usize,
    pub samples: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    pub functions: Vec<String>,
}
