//! Dual-rail qubit netlist: every particle site carries two qubits (rails),
//! one per spin value, and the model becomes a list of one- and two-qubit
//! Pauli couplings.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use super::{CircuitError, GateAssignment};
use crate::gates;
use crate::grid::{Cell, EdgeClass, GridSpec, RegionKind};
use crate::hambuild::terms::{self, Element, ElementKind, ModelParams};
use crate::sparse::{SparseOp, TripletBuilder, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Qubit {
    pub site: usize,
    pub rail: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Tier {
    Strong,
    Weak,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum TermKind {
    Identity,
    Z,
    ZZ,
    /// `X_a X_b + Y_a Y_b`.
    XXpYY,
    /// `X_a Y_b - Y_a X_b` for qubits `[a, b]`; carries imaginary gate entries.
    XYmYX,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Term {
    pub kind: TermKind,
    pub qubits: Vec<Qubit>,
    pub strength: f64,
    pub tier: Tier,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NetlistMode {
    Hamiltonian,
    /// Adds plaquette wiggle terms, the left-string preference, no-loop
    /// penalties and, when given, wrong-input penalties.
    Adiabatic { lambda: f64, input: Option<Vec<u8>> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualRailNetlist {
    pub terms: Vec<Term>,
}

/// Model elements present in a given mode, with their couplings folded in.
pub fn mode_elements(grid: &GridSpec, mode: &NetlistMode, params: &ModelParams) -> Vec<Element> {
    let mut els = terms::string_elements(grid, params.delta);
    match mode {
        NetlistMode::Hamiltonian => els.extend(terms::hop_elements(grid, params.g)),
        NetlistMode::Adiabatic { lambda, input } => {
            els.extend(terms::hop_elements(grid, params.g * lambda));
            els.extend(terms::adiabatic_diag_elements(grid, params.g, *lambda));
            els.extend(terms::no_loop_elements(grid, params.e_noloop));
            if let Some(bits) = input {
                els.extend(terms::input_elements(bits, params.input_strength));
            }
        }
    }
    els
}

/// Emits the netlist for the whole grid.
pub fn emit_netlist(
    grid: &GridSpec,
    assignment: &GateAssignment,
    mode: &NetlistMode,
    params: &ModelParams,
) -> Result<DualRailNetlist, CircuitError> {
    if !(params.delta > 0.0 && params.g > 0.0 && params.e_noloop > 0.0) {
        return Err(CircuitError::UnsupportedGate("couplings must be positive".into()));
    }
    expand_elements(grid, assignment, &mode_elements(grid, mode, params))
}

/// Pauli expansion of an explicit element list. Identical couplings are merged.
pub fn expand_elements(
    grid: &GridSpec,
    assignment: &GateAssignment,
    elements: &[Element],
) -> Result<DualRailNetlist, CircuitError> {
    for u in assignment.plaquette_gates.iter().chain(assignment.region_gates.iter().flatten()) {
        let err = gates::unitarity_error(u);
        if err > super::UNITARY_TOL {
            return Err(CircuitError::UnsupportedGate(format!("non-unitary gate (error {err:e})")));
        }
    }
    let mut acc: BTreeMap<(Tier, TermKind, Vec<Qubit>), f64> = BTreeMap::new();
    for el in elements {
        let tier = tier_of(&el.kind);
        match el.kind {
            ElementKind::Hop(p) => {
                for hop in grid.hops(p) {
                    let u = assignment.hop_matrix(grid, p, hop.channel);
                    for s in 0..2u8 {
                        for s2 in 0..2u8 {
                            let c = -el.coeff * u[s2 as usize][s as usize];
                            let pair = vec![Qubit { site: hop.from, rail: s }, Qubit { site: hop.to, rail: s2 }];
                            if c.re != 0.0 {
                                *acc.entry((tier, TermKind::XXpYY, pair.clone())).or_default() += c.re / 2.0;
                            }
                            if c.im != 0.0 {
                                *acc.entry((tier, TermKind::XYmYX, pair)).or_default() += c.im / 2.0;
                            }
                        }
                    }
                }
            }
            _ => {
                let poly = diagonal_poly(grid, el)?;
                for (qubits, v) in poly.0 {
                    let kind = match qubits.len() {
                        0 => TermKind::Identity,
                        1 => TermKind::Z,
                        2 => TermKind::ZZ,
                        _ => {
                            return Err(CircuitError::UnsupportedGate(
                                "three-body control term (Toffoli) has no two-qubit form".into(),
                            ))
                        }
                    };
                    *acc.entry((tier, kind, qubits)).or_default() += v;
                }
            }
        }
    }
    let terms = acc
        .into_iter()
        .filter(|(_, v)| *v != 0.0)
        .map(|((tier, kind, qubits), strength)| Term { kind, qubits, strength, tier })
        .collect();
    Ok(DualRailNetlist { terms })
}

fn tier_of(kind: &ElementKind) -> Tier {
    match kind {
        ElementKind::Hop(_) | ElementKind::PlaquetteDiag(_) | ElementKind::Init(_) => Tier::Weak,
        _ => Tier::Strong,
    }
}

/// Polynomial in commuting `Z` operators: sorted qubit set -> coefficient.
#[derive(Debug, Clone, Default)]
struct ZPoly(BTreeMap<Vec<Qubit>, f64>);

impl ZPoly {
    fn constant(c: f64) -> Self {
        let mut p = ZPoly::default();
        p.add_term(Vec::new(), c);
        p
    }

    fn add_term(&mut self, qubits: Vec<Qubit>, c: f64) {
        *self.0.entry(qubits).or_default() += c;
    }

    fn plus(mut self, other: &ZPoly, s: f64) -> Self {
        for (q, v) in &other.0 {
            self.add_term(q.clone(), s * v);
        }
        self
    }

    fn times(&self, other: &ZPoly) -> Self {
        let mut out = ZPoly::default();
        for (qa, va) in &self.0 {
            for (qb, vb) in &other.0 {
                // Z^2 = I: keep the symmetric difference.
                let mut q: Vec<Qubit> = qa.iter().filter(|x| !qb.contains(x)).copied().collect();
                q.extend(qb.iter().filter(|x| !qa.contains(x)));
                q.sort_unstable();
                out.add_term(q, va * vb);
            }
        }
        out
    }

    fn scale(mut self, s: f64) -> Self {
        self.0.values_mut().for_each(|v| *v *= s);
        self
    }
}

fn z(site: usize, rail: u8) -> ZPoly {
    let mut p = ZPoly::default();
    p.add_term(vec![Qubit { site, rail }], 1.0);
    p
}

/// `n_s` on one site: `(I - Z_s) / 2`.
fn n_rail(site: usize, s: u8) -> ZPoly {
    ZPoly::constant(0.5).plus(&z(site, s), -0.5)
}

fn n_site(site: usize) -> ZPoly {
    n_rail(site, 0).plus(&n_rail(site, 1), 1.0)
}

fn n_cell(grid: &GridSpec, cell: Cell) -> ZPoly {
    if grid.is_dummy_cell(cell) {
        return ZPoly::constant(1.0);
    }
    grid.cell_sites(cell).iter().fold(ZPoly::default(), |acc, &id| acc.plus(&n_site(id), 1.0))
}

fn n_cell_spin(grid: &GridSpec, cell: Cell, s: u8) -> ZPoly {
    grid.cell_sites(cell).iter().fold(ZPoly::default(), |acc, &id| acc.plus(&n_rail(id, s), 1.0))
}

/// `I - 2 A`.
fn one_minus_2(a: &ZPoly) -> ZPoly {
    ZPoly::constant(1.0).plus(a, -2.0)
}

fn diagonal_poly(grid: &GridSpec, el: &Element) -> Result<ZPoly, CircuitError> {
    let raw = match &el.kind {
        ElementKind::Edge(e) => {
            let edge = &grid.edges()[*e];
            match edge.class {
                EdgeClass::Plain | EdgeClass::Spectator => {
                    let a = one_minus_2(&n_cell(grid, edge.a));
                    let b = one_minus_2(&n_cell(grid, edge.b));
                    ZPoly::constant(1.0).plus(&a.times(&b), -1.0)
                }
                EdgeClass::Control => {
                    let region = edge.region.unwrap();
                    let (p0, p1) = match grid.regions()[region].kind {
                        RegionKind::Cnot => (n_cell_spin(grid, edge.a, 0), n_cell_spin(grid, edge.a, 1)),
                        RegionKind::Toffoli => {
                            let others = terms::other_control_cells(grid, region, edge.a, edge.b)
                                .iter()
                                .fold(ZPoly::default(), |acc, &c| acc.plus(&n_cell_spin(grid, c, 1), 1.0));
                            let p1 = n_cell_spin(grid, edge.a, 1).times(&others);
                            (n_cell(grid, edge.a).plus(&p1, -1.0), p1)
                        }
                    };
                    let b0 = one_minus_2(&n_site(grid.site_id(edge.b, Some(0)).unwrap()));
                    let b1 = one_minus_2(&n_site(grid.site_id(edge.b, Some(1)).unwrap()));
                    ZPoly::constant(2.0).plus(&one_minus_2(&p0).times(&b0), -1.0).plus(&one_minus_2(&p1).times(&b1), -1.0)
                }
            }
        }
        ElementKind::Boundary(c) | ElementKind::Corner(c) | ElementKind::Init(c) => n_cell(grid, *c),
        ElementKind::PlaquetteDiag(p) => {
            let pl = &grid.plaquettes()[*p];
            n_cell(grid, pl.top).times(&n_cell(grid, pl.bottom))
        }
        ElementKind::Input { line, wrong } => n_rail(grid.line(*line).sites[0], *wrong),
        ElementKind::NoLoop(a, b) => n_cell(grid, *a).times(&n_cell(grid, *b)),
        ElementKind::Hop(_) => unreachable!("hops are not diagonal"),
    };
    let mut poly = raw.scale(el.coeff);
    poly.0.retain(|_, v| v.abs() > 1e-15);
    Ok(poly)
}

#[derive(Debug, Clone, Copy)]
enum Pauli {
    X,
    Y,
    Z,
}

/// Applies a Pauli string to basis state `state` (qubit `k` is bit `n-1-k`).
fn apply_paulis(ops: &[(usize, Pauli)], n: usize, state: usize) -> (usize, C64) {
    let mut out = state;
    let mut phase = C64::new(1.0, 0.0);
    for &(k, p) in ops {
        let bit = n - 1 - k;
        let b = (out >> bit) & 1;
        let sign = if b == 0 { 1.0 } else { -1.0 };
        match p {
            Pauli::X => out ^= 1 << bit,
            Pauli::Y => {
                out ^= 1 << bit;
                phase *= C64::new(0.0, sign);
            }
            Pauli::Z => phase *= sign,
        }
    }
    (out, phase)
}

impl DualRailNetlist {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.terms).expect("netlist serializes")
    }

    /// One coupling per row: `kind,qubit_a,qubit_b,strength,tier`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["kind", "qubit_a", "qubit_b", "strength", "tier"])?;
        let fmt = |q: Option<&Qubit>| q.map(|q| format!("{}:{}", q.site, q.rail)).unwrap_or_default();
        for t in &self.terms {
            wtr.write_record([
                format!("{:?}", t.kind),
                fmt(t.qubits.first()),
                fmt(t.qubits.get(1)),
                format!("{:e}", t.strength),
                format!("{:?}", t.tier),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Distinct partners of `q` through terms of the given kinds.
    pub fn partners(&self, q: Qubit, kinds: &[TermKind]) -> Vec<Qubit> {
        let mut out: Vec<Qubit> = self
            .terms
            .iter()
            .filter(|t| kinds.contains(&t.kind) && t.qubits.len() == 2 && t.qubits.contains(&q))
            .map(|t| if t.qubits[0] == q { t.qubits[1] } else { t.qubits[0] })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn qubits(&self) -> Vec<Qubit> {
        let mut out: Vec<Qubit> = self.terms.iter().flat_map(|t| t.qubits.iter().copied()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// The summed operator on `qubits` (first listed qubit is the most
    /// significant bit). `None` if a term acts outside the list.
    pub fn operator_on(&self, qubits: &[Qubit]) -> Option<SparseOp> {
        let n = qubits.len();
        let pos = |q: &Qubit| qubits.iter().position(|x| x == q);
        let mut b = TripletBuilder::new(1 << n);
        for t in &self.terms {
            let idx: Vec<usize> = t.qubits.iter().map(pos).collect::<Option<_>>()?;
            let strings: Vec<(Vec<(usize, Pauli)>, f64)> = match t.kind {
                TermKind::Identity => vec![(vec![], 1.0)],
                TermKind::Z => vec![(vec![(idx[0], Pauli::Z)], 1.0)],
                TermKind::ZZ => vec![(vec![(idx[0], Pauli::Z), (idx[1], Pauli::Z)], 1.0)],
                TermKind::XXpYY => vec![
                    (vec![(idx[0], Pauli::X), (idx[1], Pauli::X)], 1.0),
                    (vec![(idx[0], Pauli::Y), (idx[1], Pauli::Y)], 1.0),
                ],
                TermKind::XYmYX => vec![
                    (vec![(idx[0], Pauli::X), (idx[1], Pauli::Y)], 1.0),
                    (vec![(idx[0], Pauli::Y), (idx[1], Pauli::X)], -1.0),
                ],
            };
            for state in 0..(1usize << n) {
                for (ops, sgn) in &strings {
                    let (to, ph) = apply_paulis(ops, n, state);
                    b.add(to, state, ph * (t.strength * sgn));
                }
            }
        }
        Some(b.build())
    }
}
