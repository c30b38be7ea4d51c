//! Sparse Hamiltonians of the string model, in the particle picture and in
//! the dual-rail qubit picture.

mod dualrail;
mod sector;
pub mod terms;
mod toy;

use rayon::prelude::*;
use thiserror::Error;

use crate::circuit::{CircuitError, GateAssignment};
use crate::grid::GridSpec;
use crate::sparse::{SparseOp, TripletBuilder, C64};

pub use dualrail::{build_dualrail_subgraph, DualRailSubgraph, MAX_SUBGRAPH_SITES};
pub use sector::{extended_sector, ExplicitBasis, OccupationBasis, SectorBasis};
pub use terms::{Element, ElementKind, ModelParams};
pub use toy::build_blocking_toy;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HamError {
    #[error("subgraph of {0} sites exceeds the {MAX_SUBGRAPH_SITES}-site limit")]
    SubgraphTooLarge(usize),
    #[error("site {0} is not a movable site of the grid")]
    BadSite(usize),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Sums `elements` over any occupation basis. Rows are built in parallel and
/// assembled in row order.
pub fn assemble<B: OccupationBasis>(
    grid: &GridSpec,
    assignment: &GateAssignment,
    basis: &B,
    elements: &[Element],
) -> SparseOp {
    let (diag, hops): (Vec<&Element>, Vec<&Element>) = elements.iter().partition(|e| e.is_diagonal());
    let rows: Vec<Vec<(usize, C64)>> = (0..basis.dim())
        .into_par_iter()
        .map(|col| {
            let occ = basis.occupation(col);
            let mut out = Vec::new();
            let d: f64 = diag.iter().map(|e| terms::diag_value(grid, e, &occ)).sum();
            out.push((col, C64::new(d, 0.0)));
            for e in &hops {
                for (next, amp) in terms::hop_apply(grid, assignment, e, &occ) {
                    if let Some(row) = basis.index_of(&next) {
                        out.push((row, amp));
                    }
                }
            }
            out
        })
        .collect();
    let mut b = TripletBuilder::new(basis.dim());
    for (col, entries) in rows.into_iter().enumerate() {
        for (row, v) in entries {
            b.add(row, col, v);
        }
    }
    b.build()
}

/// Edge terms plus boundary and corner penalties; diagonal.
pub fn build_h_string<B: OccupationBasis>(grid: &GridSpec, basis: &B, delta: f64) -> SparseOp {
    let a = GateAssignment::identity(grid);
    assemble(grid, &a, basis, &terms::string_elements(grid, delta))
}

/// Plaquette hops with unit strength.
pub fn build_v_hop<B: OccupationBasis>(grid: &GridSpec, assignment: &GateAssignment, basis: &B) -> SparseOp {
    assemble(grid, assignment, basis, &terms::hop_elements(grid, 1.0))
}

/// `H_string + g V_hop`.
pub fn build_full<B: OccupationBasis>(
    grid: &GridSpec,
    assignment: &GateAssignment,
    basis: &B,
    params: &ModelParams,
) -> SparseOp {
    let mut els = terms::string_elements(grid, params.delta);
    els.extend(terms::hop_elements(grid, params.g));
    assemble(grid, assignment, basis, &els)
}

/// `E` times the number of horizontally adjacent same-line occupied pairs.
pub fn build_h_no_loop<B: OccupationBasis>(grid: &GridSpec, basis: &B, e: f64) -> SparseOp {
    let a = GateAssignment::identity(grid);
    assemble(grid, &a, basis, &terms::no_loop_elements(grid, e))
}

/// `H_string + H_input + g [sum_p (n[top] n[bottom] + lambda V_p) + sqrt(1 - lambda^2) H_init]`.
pub fn build_adiabatic<B: OccupationBasis>(
    grid: &GridSpec,
    assignment: &GateAssignment,
    basis: &B,
    params: &ModelParams,
    input: &[u8],
) -> SparseOp {
    let mut els = terms::string_elements(grid, params.delta);
    els.extend(terms::input_elements(input, params.input_strength));
    els.extend(terms::adiabatic_diag_elements(grid, params.g, params.lambda));
    els.extend(terms::hop_elements(grid, params.g * params.lambda));
    assemble(grid, assignment, basis, &els)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates;
    use crate::grid::GateRegion;
    use crate::stringspace::{correct_string_basis, z_init};

    #[test]
    fn m1_connected_energy() {
        let grid = GridSpec::new(1, vec![]).unwrap();
        let basis = SectorBasis::new(&grid);
        let h = build_h_string(&grid, &basis, 1.0);
        assert_eq!(h.diagonal(), vec![3.0; 4]);
    }

    #[test]
    fn m2_string_spectrum() {
        // A wrong branch costs the full edge penalty, so the region keeps gap 1.
        for regions in [vec![], vec![GateRegion::cnot((1, 1), 1)]] {
            let gap = 1.0;
            let grid = GridSpec::new(2, regions).unwrap();
            let basis = SectorBasis::new(&grid);
            let h = build_h_string(&grid, &basis, 1.0);
            assert!(h.is_diagonal());
            let d = h.diagonal();
            let ground = d.iter().filter(|&&x| (x - 5.0).abs() < 1e-12).count();
            assert_eq!(ground, 48);
            let min = d.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!((min - 5.0).abs() < 1e-12);
            let next = d.iter().cloned().filter(|&x| x > 5.0 + 1e-9).fold(f64::INFINITY, f64::min);
            assert!((next - 5.0 - gap).abs() < 1e-12, "{next}");
            let cb = correct_string_basis(&grid).unwrap();
            for k in 0..cb.len() {
                let (node, spins) = cb.label(k);
                let idx = basis.correct_index(&grid, cb.graph.nodes()[node], spins);
                assert!((d[idx] - 5.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn v_hop_m1() {
        let grid = GridSpec::new(1, vec![]).unwrap();
        let basis = SectorBasis::new(&grid);
        let v = build_v_hop(&grid, &GateAssignment::identity(&grid), &basis);
        assert_eq!(v.nnz(), 4);
        assert!(v.iter().all(|(r, c, x)| r != c && x == C64::new(-1.0, 0.0)));
        let a = GateAssignment::identity(&grid).with_gate(0, gates::HADAMARD);
        let v = build_v_hop(&grid, &a, &basis);
        assert_eq!(v.nnz(), 8);
        assert!(v.hermiticity_error() < 1e-15);
    }

    #[test]
    fn cnot_hop_flips_on_branch_one() {
        let grid = GridSpec::new(2, vec![GateRegion::cnot((1, 1), 1)]).unwrap();
        let basis = SectorBasis::new(&grid);
        let v = build_v_hop(&grid, &GateAssignment::identity(&grid), &basis);
        // Target on wire 1 starting at (0,0) with spin 0; others at the left.
        let from = basis.correct_index(&grid, z_init(2), 0b000);
        let mut into = Vec::new();
        for (r, c, x) in v.iter() {
            if c == from {
                let next = basis.occupation(r);
                for k in 0..2u8 {
                    let id = grid.site_id((1, 1), Some(k)).unwrap();
                    if next[id].is_some() {
                        into.push((k, next[id].unwrap(), x));
                    }
                }
            }
        }
        into.sort_by_key(|t| (t.0, t.1));
        assert_eq!(into.len(), 2);
        assert_eq!((into[0].0, into[0].1), (0, 0));
        assert_eq!((into[1].0, into[1].1), (1, 1));
    }

    #[test]
    fn adiabatic_left_string_is_unique_minimum() {
        let grid = GridSpec::new(2, vec![]).unwrap();
        let basis = SectorBasis::new(&grid);
        let p = ModelParams::default().with_lambda(0.0);
        let h = build_adiabatic(&grid, &GateAssignment::identity(&grid), &basis, &p, &[0, 0, 0]);
        assert!(h.is_diagonal());
        let d = h.diagonal();
        let k = d.iter().enumerate().fold(0, |best, (k, &x)| if x < d[best] { k } else { best });
        assert_eq!(k, basis.correct_index(&grid, z_init(2), 0));
        let second = d.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &x)| x).fold(f64::INFINITY, f64::min);
        assert!(second > d[k] + 1e-6);
    }

    #[test]
    fn hermitian_operators() {
        let grid = GridSpec::new(2, vec![GateRegion::cnot((1, 1), 1)]).unwrap();
        let basis = SectorBasis::new(&grid);
        let a = GateAssignment::identity(&grid);
        let p = ModelParams::default().with_lambda(0.3);
        assert!(build_full(&grid, &a, &basis, &p).hermiticity_error() < 1e-12);
        assert!(build_adiabatic(&grid, &a, &basis, &p, &[1, 0, 1]).hermiticity_error() < 1e-12);
    }
}
