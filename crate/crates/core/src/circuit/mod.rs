//! One-dimensional nearest-neighbour circuits: IR, text format, grid layout
//! and the dual-rail coupling netlist.

mod layout;
pub mod netlist;
mod parse;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::gates::{self, Mat2};
use crate::grid::GridError;

pub use layout::{layout, GateAssignment, LayoutOptions, Placement};
pub use netlist::{emit_netlist, DualRailNetlist, NetlistMode, Qubit, Term, TermKind, Tier};
pub use parse::parse_circuit;

/// Tolerance on `U U^dagger = I` for explicit matrices.
pub const UNITARY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("gate operands {0:?} are not nearest neighbours")]
    NonAdjacentOperands(Vec<usize>),
    #[error("matrix is not unitary (error {0:e})")]
    NonUnitaryMatrix(f64),
    #[error("wire {wire} out of range for {count} wires")]
    WireOutOfRange { wire: usize, count: usize },
    #[error("circuit has {wires} wires but an m={m} grid carries {expected}")]
    WireCountMismatch { wires: usize, m: usize, expected: usize },
    #[error("gate {0} does not fit in the grid")]
    DepthExceedsGrid(usize),
    #[error("gate {0} cannot be placed without colliding with another region")]
    RegionCollision(usize),
    #[error("gate {0}: control must sit on the line above the target")]
    ControlPlacement(usize),
    #[error("unsupported gate for netlist emission: {0}")]
    UnsupportedGate(String),
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NamedGate {
    H,
    X,
    S,
    T,
    I,
}

impl NamedGate {
    pub fn matrix(self) -> Mat2 {
        match self {
            NamedGate::H => gates::HADAMARD,
            NamedGate::X => gates::PAULI_X,
            NamedGate::S => gates::PHASE_S,
            NamedGate::T => gates::phase_t(),
            NamedGate::I => gates::IDENTITY,
        }
    }

    fn name(self) -> &'static str {
        match self {
            NamedGate::H => "H",
            NamedGate::X => "X",
            NamedGate::S => "S",
            NamedGate::T => "T",
            NamedGate::I => "I",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum GateOp {
    Named { gate: NamedGate, wire: usize },
    Unitary { matrix: Mat2, wire: usize },
    /// `length` is `None` when the source left it unspecified.
    Cnot { control: usize, target: usize, length: Option<usize> },
    Toffoli { control_a: usize, target: usize, control_b: usize, length: Option<usize> },
}

impl GateOp {
    pub fn wires(&self) -> Vec<usize> {
        match *self {
            GateOp::Named { wire, .. } | GateOp::Unitary { wire, .. } => vec![wire],
            GateOp::Cnot { control, target, .. } => vec![control, target],
            GateOp::Toffoli { control_a, target, control_b, .. } => vec![control_a, target, control_b],
        }
    }

    /// The 2x2 matrix of a single-qubit gate.
    pub fn single_matrix(&self) -> Option<Mat2> {
        match self {
            GateOp::Named { gate, .. } => Some(gate.matrix()),
            GateOp::Unitary { matrix, .. } => Some(*matrix),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gate {
    pub op: GateOp,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircuitIR {
    pub wire_count: usize,
    pub gates: Vec<Gate>,
}

impl CircuitIR {
    pub fn new(wire_count: usize) -> Self {
        Self { wire_count, gates: Vec::new() }
    }

    /// Appends a gate at the earliest column after every gate on its wires.
    pub fn push(&mut self, op: GateOp) -> Result<(), CircuitError> {
        validate_op(&op, self.wire_count)?;
        let wires = op.wires();
        let column = self
            .gates
            .iter()
            .filter(|g| g.op.wires().iter().any(|w| wires.contains(w)))
            .map(|g| g.column + 1)
            .max()
            .unwrap_or(0);
        self.gates.push(Gate { op, column });
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.gates.iter().map(|g| g.column + 1).max().unwrap_or(0)
    }
}

pub(crate) fn validate_op(op: &GateOp, wire_count: usize) -> Result<(), CircuitError> {
    for w in op.wires() {
        if w >= wire_count {
            return Err(CircuitError::WireOutOfRange { wire: w, count: wire_count });
        }
    }
    match op {
        GateOp::Unitary { matrix, .. } => {
            let err = gates::unitarity_error(matrix);
            if err > UNITARY_TOL {
                return Err(CircuitError::NonUnitaryMatrix(err));
            }
        }
        GateOp::Cnot { control, target, .. } => {
            if control.abs_diff(*target) != 1 {
                return Err(CircuitError::NonAdjacentOperands(op.wires()));
            }
        }
        GateOp::Toffoli { control_a, target, control_b, .. } => {
            if control_a.abs_diff(*target) != 1 || control_b.abs_diff(*target) != 1 || control_a == control_b {
                return Err(CircuitError::NonAdjacentOperands(op.wires()));
            }
        }
        GateOp::Named { .. } => {}
    }
    Ok(())
}

fn fmt_complex(z: crate::sparse::C64) -> String {
    if z.im == 0.0 && !z.im.is_sign_negative() {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

impl fmt::Display for CircuitIR {
    /// Canonical text form accepted by [`parse_circuit`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "wires {};", self.wire_count)?;
        for g in &self.gates {
            match &g.op {
                GateOp::Named { gate, wire } => writeln!(f, "{} {}", gate.name(), wire)?,
                GateOp::Unitary { matrix, wire } => writeln!(
                    f,
                    "U {} [{} {}; {} {}]",
                    wire,
                    fmt_complex(matrix[0][0]),
                    fmt_complex(matrix[0][1]),
                    fmt_complex(matrix[1][0]),
                    fmt_complex(matrix[1][1])
                )?,
                GateOp::Cnot { control, target, length } => {
                    write!(f, "CNOT {control} {target}")?;
                    if let Some(l) = length {
                        write!(f, " L={l}")?;
                    }
                    writeln!(f)?;
                }
                GateOp::Toffoli { control_a, target, control_b, length } => {
                    write!(f, "TOFFOLI {control_a} {target} {control_b}")?;
                    if let Some(l) = length {
                        write!(f, " L={l}")?;
                    }
                    writeln!(f)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_schedules_asap() {
        let mut c = CircuitIR::new(3);
        c.push(GateOp::Named { gate: NamedGate::H, wire: 0 }).unwrap();
        c.push(GateOp::Named { gate: NamedGate::T, wire: 2 }).unwrap();
        c.push(GateOp::Cnot { control: 1, target: 0, length: None }).unwrap();
        c.push(GateOp::Named { gate: NamedGate::X, wire: 2 }).unwrap();
        let cols: Vec<_> = c.gates.iter().map(|g| g.column).collect();
        assert_eq!(cols, vec![0, 0, 1, 1]);
        assert_eq!(c.depth(), 2);
    }

    #[test]
    fn rejects_non_adjacent() {
        let mut c = CircuitIR::new(3);
        let err = c.push(GateOp::Cnot { control: 0, target: 2, length: None }).unwrap_err();
        assert_eq!(err, CircuitError::NonAdjacentOperands(vec![0, 2]));
    }
}
