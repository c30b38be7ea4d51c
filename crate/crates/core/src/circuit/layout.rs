//! Placement of circuit gates onto grid plaquettes and gate regions.
//!
//! Wire `w` lives on the line `d = w - (m - 1)`. Gates are placed in program
//! order: each wire keeps a cursor into the plaquettes of its line, and a gate
//! takes the first free plaquette (or run of plaquettes, for a region) at or
//! after the cursors of every wire it touches.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{CircuitError, CircuitIR, GateOp};
use crate::gates::{self, Mat2};
use crate::grid::{Cell, GateRegion, GridError, GridSpec, HopChannel, RegionKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayoutOptions {
    /// Region length used for CNOT/Toffoli gates written without `L=k`.
    pub default_length: usize,
}

impl Default for LayoutOptions {
    fn default() -> Self {
        Self { default_length: 1 }
    }
}

/// Where a circuit gate ended up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Placement {
    Plaquette(usize),
    Region(usize),
}

/// Unitaries attached to plaquettes and region branches.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateAssignment {
    /// Indexed by plaquette id; identity where no gate was placed.
    pub plaquette_gates: Vec<Mat2>,
    /// `[branch 0, branch 1]` gate per region.
    pub region_gates: Vec<[Mat2; 2]>,
    /// One entry per circuit gate, in program order.
    pub placements: Vec<Placement>,
}

impl GateAssignment {
    /// Identity on every plaquette and `[I, X]` on every region.
    pub fn identity(grid: &GridSpec) -> Self {
        Self {
            plaquette_gates: vec![gates::IDENTITY; grid.plaquettes().len()],
            region_gates: vec![[gates::IDENTITY, gates::PAULI_X]; grid.regions().len()],
            placements: Vec::new(),
        }
    }

    pub fn with_gate(mut self, plaquette: usize, u: Mat2) -> Self {
        self.plaquette_gates[plaquette] = u;
        self
    }

    /// Spin matrix applied by a forward hop of plaquette `p` through `channel`.
    pub fn hop_matrix(&self, grid: &GridSpec, p: usize, channel: HopChannel) -> Mat2 {
        match channel {
            HopChannel::Gate => self.plaquette_gates[p],
            HopChannel::Branch(k) => {
                let r = grid.plaquettes()[p].region.expect("branch hop outside a region");
                self.region_gates[r][k as usize]
            }
            HopChannel::Identity => gates::IDENTITY,
        }
    }
}

/// Plaquette bases along line `d`, ordered by increasing `i`.
fn line_bases(m: usize, d: i64) -> Vec<Cell> {
    (0..m).filter_map(|i| {
        let j = i as i64 - d;
        (j >= 0 && (j as usize) < m).then_some((i, j as usize))
    })
    .collect()
}

fn index_on_line(base: Cell) -> usize {
    base.0.min(base.1)
}

struct Cursor {
    m: usize,
    next: Vec<usize>,
    taken: BTreeSet<Cell>,
    regions: Vec<GateRegion>,
}

impl Cursor {
    fn line_of(&self, wire: usize) -> i64 {
        wire as i64 - (self.m as i64 - 1)
    }

    fn free(&self, base: Cell) -> bool {
        !self.taken.contains(&base)
    }

    fn place_single(&mut self, wire: usize) -> Option<Cell> {
        let bases = line_bases(self.m, self.line_of(wire));
        let k = (self.next[wire]..bases.len()).find(|&k| self.free(bases[k]))?;
        self.taken.insert(bases[k]);
        self.next[wire] = k + 1;
        Some(bases[k])
    }

    /// Tries every entry plaquette on the target line; returns the region
    /// index or the reason nothing fit.
    fn place_region(
        &mut self,
        gate: usize,
        kind: RegionKind,
        target: usize,
        length: usize,
    ) -> Result<usize, CircuitError> {
        let d = self.line_of(target);
        let bases = line_bases(self.m, d);
        let mut collided = false;
        for k in self.next[target]..bases.len() {
            let (bi, bj) = bases[k];
            let center = (bi + 1, bj + 1);
            if center.0 + length > self.m || center.1 + length > self.m {
                continue;
            }
            let region = match kind {
                RegionKind::Cnot => GateRegion::cnot(center, length),
                RegionKind::Toffoli => GateRegion::toffoli(center, length),
            };
            let (i, j) = center;
            // First plaquette each control wire uses inside the region.
            let above_first = (i, j - 1);
            let below_first = (i - 1, j);
            if index_on_line(above_first) < self.next[target + 1] {
                continue;
            }
            if kind == RegionKind::Toffoli && index_on_line(below_first) < self.next[target - 1] {
                continue;
            }
            let footprint = region_bases(&region);
            if footprint.iter().any(|b| !self.free(*b)) {
                collided = true;
                continue;
            }
            let mut trial = self.regions.clone();
            trial.push(region.clone());
            match GridSpec::new(self.m, trial) {
                Ok(_) => {}
                Err(GridError::OverlappingRegions(..)) => {
                    collided = true;
                    continue;
                }
                Err(e) => return Err(e.into()),
            }
            self.taken.extend(footprint.iter().copied());
            self.next[target] = k + length + 1;
            self.next[target + 1] = index_on_line(above_first) + length;
            if kind == RegionKind::Toffoli {
                self.next[target - 1] = index_on_line(below_first) + length;
            }
            self.regions.push(region);
            return Ok(self.regions.len() - 1);
        }
        Err(if collided { CircuitError::RegionCollision(gate) } else { CircuitError::DepthExceedsGrid(gate) })
    }
}

fn region_bases(region: &GateRegion) -> Vec<Cell> {
    let (i, j) = region.center;
    let len = region.length;
    let mut out: Vec<Cell> = (0..=len).map(|l| (i - 1 + l, j - 1 + l)).collect();
    for l in 0..len {
        out.push((i + l, j + l - 1));
        out.push((i + l - 1, j + l));
    }
    out
}

/// Lays a circuit with `2m - 1` wires onto an `m` grid.
pub fn layout(
    circuit: &CircuitIR,
    m: usize,
    options: LayoutOptions,
) -> Result<(GridSpec, GateAssignment), CircuitError> {
    if m == 0 || m > crate::grid::MAX_M {
        return Err(GridError::InvalidSize(m).into());
    }
    let expected = 2 * m - 1;
    if circuit.wire_count != expected {
        return Err(CircuitError::WireCountMismatch { wires: circuit.wire_count, m, expected });
    }
    let mut cursor = Cursor { m, next: vec![0; expected], taken: BTreeSet::new(), regions: Vec::new() };
    let mut singles: Vec<(Cell, Mat2)> = Vec::new();
    let mut region_gates = Vec::new();
    let mut placed = Vec::new();
    for (g, gate) in circuit.gates.iter().enumerate() {
        match &gate.op {
            GateOp::Named { wire, .. } | GateOp::Unitary { wire, .. } => {
                let base = cursor.place_single(*wire).ok_or(CircuitError::DepthExceedsGrid(g))?;
                singles.push((base, gate.op.single_matrix().unwrap()));
                placed.push(Some(base));
            }
            GateOp::Cnot { control, target, length } => {
                if *control != target + 1 {
                    return Err(CircuitError::ControlPlacement(g));
                }
                let len = length.unwrap_or(options.default_length);
                let r = cursor.place_region(g, RegionKind::Cnot, *target, len)?;
                region_gates.push([gates::IDENTITY, gates::PAULI_X]);
                placed.push(None);
                debug_assert_eq!(r + 1, region_gates.len());
            }
            GateOp::Toffoli { control_a, target, control_b, length } => {
                let controls = BTreeSet::from([*control_a, *control_b]);
                if *target == 0 || controls != BTreeSet::from([target - 1, target + 1]) {
                    return Err(CircuitError::ControlPlacement(g));
                }
                let len = length.unwrap_or(options.default_length);
                cursor.place_region(g, RegionKind::Toffoli, *target, len)?;
                region_gates.push([gates::IDENTITY, gates::PAULI_X]);
                placed.push(None);
            }
        }
    }
    let grid = GridSpec::new(m, cursor.regions)?;
    let mut assignment = GateAssignment::identity(&grid);
    assignment.region_gates = region_gates;
    for (base, u) in singles {
        let p = grid.plaquette_at(base).expect("placed inside grid");
        assignment.plaquette_gates[p] = u;
    }
    let mut next_region = 0;
    assignment.placements = placed
        .into_iter()
        .map(|b| match b {
            Some(base) => Placement::Plaquette(grid.plaquette_at(base).unwrap()),
            None => {
                next_region += 1;
                Placement::Region(next_region - 1)
            }
        })
        .collect();
    Ok((grid, assignment))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;
    use crate::grid::PlaquetteRole;

    #[test]
    fn identity_circuit_all_identity() {
        let c = parse_circuit("wires 3").unwrap();
        let (grid, a) = layout(&c, 2, LayoutOptions::default()).unwrap();
        assert_eq!(a.plaquette_gates.len(), 4);
        assert!(a.plaquette_gates.iter().all(|u| *u == gates::IDENTITY));
        assert!(grid.regions().is_empty());
    }

    #[test]
    fn hadamard_on_middle_wire() {
        let c = parse_circuit("wires 3; H 1").unwrap();
        let (grid, a) = layout(&c, 2, LayoutOptions::default()).unwrap();
        let hs: Vec<_> = (0..4).filter(|&p| a.plaquette_gates[p] == gates::HADAMARD).collect();
        assert_eq!(hs.len(), 1);
        assert_eq!(grid.plaquettes()[hs[0]].line, 0);
        assert_eq!(grid.plaquettes()[hs[0]].base, (0, 0));
    }

    #[test]
    fn cnot_region_center() {
        let c = parse_circuit("wires 3; CNOT 2 1").unwrap();
        let (grid, a) = layout(&c, 2, LayoutOptions::default()).unwrap();
        assert_eq!(grid.regions().len(), 1);
        assert_eq!(grid.regions()[0].center, (1, 1));
        assert_eq!(a.region_gates[0], [gates::IDENTITY, gates::PAULI_X]);
        assert_eq!(a.placements, vec![Placement::Region(0)]);
    }

    #[test]
    fn cnot_wrong_orientation() {
        let c = parse_circuit("wires 3; CNOT 1 2").unwrap();
        assert_eq!(layout(&c, 2, LayoutOptions::default()).unwrap_err(), CircuitError::ControlPlacement(0));
    }

    #[test]
    fn cnot_on_short_line_does_not_fit() {
        // The target line d = -1 has only one plaquette, whose far cell sits on
        // the grid edge.
        let c = parse_circuit("wires 3; CNOT 1 0").unwrap();
        assert_eq!(layout(&c, 2, LayoutOptions::default()).unwrap_err(), CircuitError::DepthExceedsGrid(0));
    }

    #[test]
    fn too_deep_for_line() {
        let c = parse_circuit("wires 3; H 0; H 0").unwrap();
        assert_eq!(layout(&c, 2, LayoutOptions::default()).unwrap_err(), CircuitError::DepthExceedsGrid(1));
    }

    #[test]
    fn wire_count_checked() {
        let c = parse_circuit("wires 2; H 0").unwrap();
        assert!(matches!(layout(&c, 2, LayoutOptions::default()), Err(CircuitError::WireCountMismatch { .. })));
    }

    #[test]
    fn gates_after_region_follow_it() {
        let c = parse_circuit("wires 5; CNOT 3 2; T 2; X 3").unwrap();
        let (grid, a) = layout(&c, 3, LayoutOptions::default()).unwrap();
        assert_eq!(grid.regions()[0].center, (1, 1));
        let Placement::Plaquette(p) = a.placements[1] else { panic!() };
        assert_eq!(grid.plaquettes()[p].role, PlaquetteRole::Free);
        assert_eq!(grid.plaquettes()[p].base, (2, 2));
        let Placement::Plaquette(p) = a.placements[2] else { panic!() };
        assert_eq!(grid.plaquettes()[p].base, (2, 1));
    }

    #[test]
    fn long_cnot_from_options() {
        let c = parse_circuit("wires 5; CNOT 3 2").unwrap();
        let (grid, _) = layout(&c, 3, LayoutOptions { default_length: 2 }).unwrap();
        assert_eq!(grid.regions()[0].length, 2);
        let c = parse_circuit("wires 5; CNOT 3 2 L=1").unwrap();
        let (grid, _) = layout(&c, 3, LayoutOptions { default_length: 2 }).unwrap();
        assert_eq!(grid.regions()[0].length, 1);
    }

    #[test]
    fn toffoli_layout() {
        let c = parse_circuit("wires 5; TOFFOLI 1 2 3").unwrap();
        let (grid, _) = layout(&c, 3, LayoutOptions::default()).unwrap();
        assert_eq!(grid.regions()[0].kind, RegionKind::Toffoli);
        assert_eq!(grid.regions()[0].center, (1, 1));
    }
}
