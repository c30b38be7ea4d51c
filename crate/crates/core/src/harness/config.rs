//! TOML experiment configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::hambuild::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Spectrum,
    Evolve,
    Adiabatic,
    ValidatePt,
    Leakage,
    Netlist,
    DemoToy,
    LogicCheck,
}

/// One experiment. Paths are resolved against the config file's directory.
///
/// ```toml
/// kind = "spectrum"
/// m = 2
/// source = "wires 3; CNOT 2 1"
/// out = "runs/cnot"
///
/// [params]
/// delta = 1.0
/// g = 0.01
/// ```
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Circuit file; `source` gives the text inline instead.
    #[serde(default)]
    pub circuit: Option<PathBuf>,
    #[serde(default)]
    pub source: Option<String>,
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    /// Also write the operators in MatrixMarket format.
    #[serde(default)]
    pub dump_ops: bool,
    #[serde(default)]
    pub params: ConfigParams,
}

fn default_m() -> usize {
    2
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigParams {
    pub delta: f64,
    pub g: f64,
    /// No-loop penalty `E`.
    pub e_noloop: f64,
    /// Used by adiabatic netlists.
    pub lambda: f64,
    pub lambda_grid: Vec<f64>,
    pub g_list: Vec<f64>,
    /// Region length for CNOTs without an explicit `L=`, and for leakage scans.
    pub length: usize,
    /// Frozen control spin of the leakage scan.
    pub control: u8,
    /// Input bits, wire 0 first; zeros when absent.
    pub input: Option<Vec<u8>>,
    pub input_strength: f64,
    /// Evolution horizon; `0` picks `5 m / g`.
    pub t_max: f64,
    pub t_steps: usize,
    /// Eigenpairs to report; defaults to one past the correct-string band.
    pub eigenpairs: Option<usize>,
    /// Random circuits for logic checks.
    pub circuits: usize,
    pub max_gates: usize,
    pub toffoli: bool,
}

impl Default for ConfigParams {
    fn default() -> Self {
        let p = ModelParams::default();
        Self {
            delta: p.delta,
            g: p.g,
            e_noloop: p.e_noloop,
            lambda: p.lambda,
            lambda_grid: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            g_list: vec![0.02, 0.01, 0.005],
            length: 1,
            control: 0,
            input: None,
            input_strength: p.input_strength,
            t_max: 0.0,
            t_steps: 200,
            eigenpairs: None,
            circuits: 20,
            max_gates: 10,
            toffoli: false,
        }
    }
}

impl ExperimentConfig {
    /// A config of the given kind with every other field at its default.
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            kind,
            circuit: None,
            source: None,
            m: default_m(),
            seed: 0,
            out: default_out(),
            dump_ops: false,
            params: ConfigParams::default(),
        }
    }

    pub fn model_params(&self) -> ModelParams {
        ModelParams {
            delta: self.params.delta,
            g: self.params.g,
            e_noloop: self.params.e_noloop,
            lambda: self.params.lambda,
            input_strength: self.params.input_strength,
        }
    }

    /// Checks ranges and referenced files; returns non-fatal warnings.
    pub fn validate(&self) -> Result<Vec<String>, HarnessError> {
        let mut warnings = Vec::new();
        if let Some(w) = self.model_params().validate().map_err(HarnessError::Config)? {
            warnings.push(w);
        }
        for &g in &self.params.g_list {
            if !(g >= 0.0) {
                return Err(HarnessError::Config(format!("g_list entry {g} is negative")));
            }
            if g > self.params.delta {
                warnings.push(format!("g = {g} exceeds delta; slope fits are unreliable"));
            }
        }
        if self.params.lambda_grid.iter().any(|l| !(0.0..=1.0).contains(l)) {
            return Err(HarnessError::Config("lambda_grid entries must lie in [0, 1]".into()));
        }
        if let Some(path) = &self.circuit {
            if !path.is_file() {
                return Err(HarnessError::Config(format!("circuit file {} does not exist", path.display())));
            }
        }
        if self.circuit.is_some() && self.source.is_some() {
            return Err(HarnessError::Config("give either `circuit` or `source`, not both".into()));
        }
        if let Some(bits) = &self.params.input {
            if bits.iter().any(|&b| b > 1) {
                return Err(HarnessError::Config("input bits must be 0 or 1".into()));
            }
        }
        Ok(warnings)
    }

    /// Circuit text, if any.
    pub fn circuit_text(&self) -> Result<Option<String>, HarnessError> {
        match (&self.circuit, &self.source) {
            (Some(p), _) => std::fs::read_to_string(p)
                .map(Some)
                .map_err(|source| HarnessError::Io { context: format!("reading {}", p.display()), source }),
            (None, Some(s)) => Ok(Some(s.clone())),
            (None, None) => Ok(None),
        }
    }
}

/// Parses a config file and resolves its relative paths.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, HarnessError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| HarnessError::Io { context: format!("reading {}", path.display()), source })?;
    let mut cfg: ExperimentConfig = toml::from_str(&text).map_err(|e| HarnessError::Config(e.to_string()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    if let Some(c) = &cfg.circuit {
        if c.is_relative() {
            cfg.circuit = Some(base.join(c));
        }
    }
    if cfg.out.is_relative() {
        cfg.out = base.join(&cfg.out);
    }
    Ok(cfg)
}
