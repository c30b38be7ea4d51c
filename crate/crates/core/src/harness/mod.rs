//! Reference circuit simulation, logic comparison, random circuits and
//! experiment orchestration.

mod config;
mod experiment;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::circuit::{layout, CircuitError, CircuitIR, GateOp, LayoutOptions, NamedGate};
use crate::effective::{EffectiveError, IsometryW};
use crate::gates::{self, Mat2};
use crate::solve::{EvolutionTrace, SolveError};
use crate::sparse::C64;
use crate::stringspace::{z_final, CorrectBasis};

pub use config::{load_config, ConfigParams, ExperimentConfig, ExperimentKind};
pub use experiment::{run_experiment, Check, Report};

/// Largest register the dense oracle accepts.
pub const MAX_ORACLE_WIRES: usize = 20;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("oracle supports at most {MAX_ORACLE_WIRES} wires, circuit has {0}")]
    TooManyWires(usize),
    #[error("the final string never carries amplitude above 1e-12")]
    EmptyConditioning,
    #[error("input has {got} bits for {expected} wires")]
    InputLength { expected: usize, got: usize },
    #[error("config: {0}")]
    Config(String),
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Effective(#[from] EffectiveError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

impl From<Box<SolveError>> for HarnessError {
    fn from(e: Box<SolveError>) -> Self {
        HarnessError::Solve(*e)
    }
}

/// Dense state over the circuit's wires; wire 0 is the most significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleState {
    pub wires: usize,
    pub amps: Vec<C64>,
}

impl OracleState {
    pub fn basis(wires: usize, input: &[u8]) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << wires];
        amps[crate::effective::input_word(input) as usize] = C64::new(1.0, 0.0);
        Self { wires, amps }
    }

    pub fn norm(&self) -> f64 {
        crate::sparse::norm(&self.amps)
    }

    fn mask(&self, w: usize) -> usize {
        1 << (self.wires - 1 - w)
    }

    fn apply_single(&mut self, u: &Mat2, w: usize) {
        let mask = self.mask(w);
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | mask]);
                self.amps[i] = u[0][0] * a0 + u[0][1] * a1;
                self.amps[i | mask] = u[1][0] * a0 + u[1][1] * a1;
            }
        }
    }

    fn apply_controlled(&mut self, u: &Mat2, controls: &[usize], target: usize) {
        let cmask: usize = controls.iter().map(|&c| self.mask(c)).sum();
        let mask = self.mask(target);
        for i in 0..self.amps.len() {
            if i & mask == 0 && i & cmask == cmask {
                let (a0, a1) = (self.amps[i], self.amps[i | mask]);
                self.amps[i] = u[0][0] * a0 + u[0][1] * a1;
                self.amps[i | mask] = u[1][0] * a0 + u[1][1] * a1;
            }
        }
    }
}

/// Applies the gates in column order to the basis state `input`.
pub fn oracle_simulate(circuit: &CircuitIR, input: &[u8]) -> Result<OracleState, HarnessError> {
    let n = circuit.wire_count;
    if n > MAX_ORACLE_WIRES {
        return Err(HarnessError::TooManyWires(n));
    }
    if input.len() != n {
        return Err(HarnessError::InputLength { expected: n, got: input.len() });
    }
    let mut state = OracleState::basis(n, input);
    let mut order: Vec<&crate::circuit::Gate> = circuit.gates.iter().collect();
    order.sort_by_key(|g| g.column);
    for g in order {
        match &g.op {
            GateOp::Named { wire, .. } | GateOp::Unitary { wire, .. } => {
                state.apply_single(&g.op.single_matrix().unwrap(), *wire)
            }
            GateOp::Cnot { control, target, .. } => state.apply_controlled(&gates::PAULI_X, &[*control], *target),
            GateOp::Toffoli { control_a, target, control_b, .. } => {
                state.apply_controlled(&gates::PAULI_X, &[*control_a, *control_b], *target)
            }
        }
    }
    Ok(state)
}

/// Where the simulated output comes from.
pub enum LogicSource<'a> {
    /// `V(z_final) |input>`.
    Isometry(&'a IsometryW),
    /// The spin state on the final string at the sample where it is most
    /// likely, from a trace in the correct-string basis.
    Trace { trace: &'a EvolutionTrace, basis: &'a CorrectBasis },
}

#[derive(Debug, Clone, Serialize)]
pub struct FidelityReport {
    /// `|<oracle|extracted>|^2` with the extracted state normalised.
    pub fidelity: f64,
    /// Probability of the final string at the chosen sample (1 for the isometry).
    pub weight: f64,
    pub time: Option<f64>,
}

pub fn compare_logic(source: &LogicSource, circuit: &CircuitIR, input: &[u8]) -> Result<FidelityReport, HarnessError> {
    let oracle = oracle_simulate(circuit, input)?;
    let spins = crate::effective::input_word(input) as usize;
    let (out, weight, time): (Vec<C64>, f64, Option<f64>) = match source {
        LogicSource::Isometry(w) => {
            if w.basis.wires != circuit.wire_count {
                return Err(HarnessError::InputLength { expected: w.basis.wires, got: circuit.wire_count });
            }
            (w.final_unitary().column(spins).iter().cloned().collect(), 1.0, None)
        }
        LogicSource::Trace { trace, basis } => {
            if basis.wires != circuit.wire_count {
                return Err(HarnessError::InputLength { expected: basis.wires, got: circuit.wire_count });
            }
            let node = basis.graph.index_of(z_final(basis.graph.m())).unwrap();
            let idx: Vec<usize> = (0..basis.spin_dim() as u32).map(|s| basis.index(node, s)).collect();
            let probs = trace.probability_on(&idx);
            let (k, &p) = probs
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .ok_or(HarnessError::EmptyConditioning)?;
            if p < 1e-12 {
                return Err(HarnessError::EmptyConditioning);
            }
            (idx.iter().map(|&i| trace.states[k][i]).collect(), p, Some(trace.times[k]))
        }
    };
    let n = crate::sparse::norm(&out);
    let overlap = crate::sparse::dot(&oracle.amps, &out).norm_sqr() / (n * n);
    Ok(FidelityReport { fidelity: overlap, weight, time })
}

/// Random circuit of at most `max_gates` gates from {H, T, X, CNOT}
/// (plus Toffoli when `toffoli` is set) that lays out on an `m` grid.
/// Candidate gates that would not fit are redrawn a bounded number of times.
pub fn random_circuit(m: usize, max_gates: usize, seed: u64, toffoli: bool) -> CircuitIR {
    let wires = 2 * m - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = CircuitIR::new(wires);
    let mut misses = 0;
    while c.gates.len() < max_gates && misses < 50 {
        let kinds = if toffoli { 5 } else { 4 };
        let op = match rng.gen_range(0..kinds) {
            0 => GateOp::Named { gate: NamedGate::H, wire: rng.gen_range(0..wires) },
            1 => GateOp::Named { gate: NamedGate::T, wire: rng.gen_range(0..wires) },
            2 => GateOp::Named { gate: NamedGate::X, wire: rng.gen_range(0..wires) },
            3 if wires >= 2 => {
                let t = rng.gen_range(0..wires - 1);
                GateOp::Cnot { control: t + 1, target: t, length: None }
            }
            _ if wires >= 3 => {
                let t = rng.gen_range(1..wires - 1);
                GateOp::Toffoli { control_a: t - 1, target: t, control_b: t + 1, length: None }
            }
            _ => continue,
        };
        let mut trial = c.clone();
        trial.push(op).expect("generated gates are valid");
        if layout(&trial, m, LayoutOptions::default()).is_ok() {
            c = trial;
        } else {
            misses += 1;
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;
    use crate::effective::build_isometry;

    #[test]
    fn oracle_basics() {
        let c = parse_circuit("wires 3;").unwrap();
        assert_eq!(oracle_simulate(&c, &[0, 1, 0]).unwrap(), OracleState::basis(3, &[0, 1, 0]));
        let c = parse_circuit("wires 1; H 0").unwrap();
        let s = oracle_simulate(&c, &[0]).unwrap();
        assert!((s.amps[0].re - s.amps[1].re).abs() < 1e-15 && (s.norm() - 1.0).abs() < 1e-12);
        let c = parse_circuit("wires 2; CNOT 1 0").unwrap();
        assert_eq!(oracle_simulate(&c, &[0, 1]).unwrap(), OracleState::basis(2, &[1, 1]));
        assert_eq!(oracle_simulate(&c, &[1, 0]).unwrap(), OracleState::basis(2, &[1, 0]));
        let c = parse_circuit("wires 21;").unwrap();
        assert!(matches!(oracle_simulate(&c, &[0; 21]), Err(HarnessError::TooManyWires(21))));
    }

    #[test]
    fn random_circuits_fit_and_repeat() {
        for seed in 0..5 {
            let c = random_circuit(3, 10, seed, false);
            assert!(c.gates.len() <= 10 && !c.gates.is_empty());
            assert!(layout(&c, 3, LayoutOptions::default()).is_ok());
            assert_eq!(c, random_circuit(3, 10, seed, false));
        }
    }

    #[test]
    fn isometry_logic_identity() {
        let c = parse_circuit("wires 3;").unwrap();
        let (grid, a) = layout(&c, 2, LayoutOptions::default()).unwrap();
        let w = build_isometry(&grid, &a).unwrap();
        let r = compare_logic(&LogicSource::Isometry(&w), &c, &[1, 0, 1]).unwrap();
        assert!((r.fidelity - 1.0).abs() < 1e-14);
    }

    #[test]
    fn empty_conditioning() {
        let c = parse_circuit("wires 3;").unwrap();
        let (grid, _) = layout(&c, 2, LayoutOptions::default()).unwrap();
        let basis = crate::stringspace::correct_string_basis(&grid).unwrap();
        let mut psi = vec![C64::new(0.0, 0.0); basis.len()];
        psi[0] = C64::new(1.0, 0.0);
        let trace = EvolutionTrace { times: vec![0.0], states: vec![psi], steps: 0 };
        let err = compare_logic(&LogicSource::Trace { trace: &trace, basis: &basis }, &c, &[0, 0, 0]).unwrap_err();
        assert!(matches!(err, HarnessError::EmptyConditioning));
    }
}
