//! Dual-rail operators on small subsets of sites, with the encoding map from
//! particle states into qubit states.

use super::{assemble, ExplicitBasis, HamError, OccupationBasis};
use crate::circuit::netlist::{expand_elements, mode_elements, NetlistMode, Qubit};
use crate::circuit::{DualRailNetlist, GateAssignment};
use crate::grid::GridSpec;
use crate::hambuild::terms::{Element, ModelParams};
use crate::sparse::SparseOp;

/// Two qubits per site: at most 12 qubits.
pub const MAX_SUBGRAPH_SITES: usize = 6;

#[derive(Debug, Clone)]
pub struct DualRailSubgraph {
    pub sites: Vec<usize>,
    /// Qubits in operator order: `(site, rail 0), (site, rail 1)` per site.
    pub qubits: Vec<Qubit>,
    /// Elements whose support lies inside the subgraph.
    pub elements: Vec<Element>,
    pub netlist: DualRailNetlist,
    /// Sum of the netlist terms on `2^(2n)` qubit states.
    pub qubit_op: SparseOp,
    /// The same elements in the particle picture on `3^n` local states.
    pub particle_op: SparseOp,
    /// `encoding[k]` is the qubit basis state of particle state `k`.
    pub encoding: Vec<usize>,
}

impl DualRailSubgraph {
    /// `J^dagger Q J`: the qubit operator restricted to encoded states.
    pub fn compressed(&self) -> SparseOp {
        self.qubit_op.submatrix(&self.encoding)
    }
}

/// Builds both pictures of the model restricted to `sites` (movable site ids).
/// Elements reading any other movable site are dropped; dummies count as
/// permanently occupied.
pub fn build_dualrail_subgraph(
    grid: &GridSpec,
    assignment: &GateAssignment,
    sites: &[usize],
    mode: &NetlistMode,
    params: &ModelParams,
) -> Result<DualRailSubgraph, HamError> {
    if sites.len() > MAX_SUBGRAPH_SITES {
        return Err(HamError::SubgraphTooLarge(sites.len()));
    }
    for (k, &s) in sites.iter().enumerate() {
        if s >= grid.sites().len() || sites[..k].contains(&s) || grid.is_dummy_cell(grid.site(s).cell()) {
            return Err(HamError::BadSite(s));
        }
    }
    let inside = |id: usize| sites.contains(&id) || grid.is_dummy_cell(grid.site(id).cell());
    let elements: Vec<Element> = mode_elements(grid, mode, params)
        .into_iter()
        .filter(|e| e.support(grid).into_iter().all(inside))
        .collect();
    let netlist = expand_elements(grid, assignment, &elements)?;
    let qubits: Vec<Qubit> = sites.iter().flat_map(|&site| [0u8, 1].map(|rail| Qubit { site, rail })).collect();
    let qubit_op = netlist.operator_on(&qubits).expect("terms stay inside the subgraph");

    let n = sites.len();
    let mut states = Vec::new();
    let mut encoding = Vec::new();
    let dummies: Vec<usize> =
        (0..grid.sites().len()).filter(|&id| grid.is_dummy_cell(grid.site(id).cell())).collect();
    for code in 0..3usize.pow(n as u32) {
        let mut occ = vec![None; grid.sites().len()];
        for &d in &dummies {
            occ[d] = Some(0);
        }
        let mut q = 0usize;
        let mut c = code;
        // Local state per site, first site most significant: 0 empty, 1 spin 0, 2 spin 1.
        let mut local = vec![0; n];
        for k in (0..n).rev() {
            local[k] = c % 3;
            c /= 3;
        }
        for (k, &l) in local.iter().enumerate() {
            let bits = match l {
                0 => 0b00,
                1 => 0b10,
                _ => 0b01,
            };
            q = (q << 2) | bits;
            if l > 0 {
                occ[sites[k]] = Some((l - 1) as u8);
            }
        }
        states.push(occ);
        encoding.push(q);
    }
    let basis = ExplicitBasis::new(states);
    let particle_op = assemble(grid, assignment, &basis, &elements);
    debug_assert_eq!(basis.dim(), encoding.len());
    Ok(DualRailSubgraph { sites: sites.to_vec(), qubits, elements, netlist, qubit_op, particle_op, encoding })
}
