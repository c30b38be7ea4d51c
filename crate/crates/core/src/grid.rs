//! Rotated square lattice: sites, horizontal lines, edges, plaquettes and
//! gate regions with doubled (off-plane) sites.
//!
//! Cells are labelled `(i, j)` with `0 <= i, j <= m`. The horizontal line of
//! a cell is `d = i - j`; lines run from `d = -m` (top dummy at `(0, m)`) to
//! `d = +m` (bottom dummy at `(m, 0)`), and positions along a line increase
//! with `i`. A plaquette with base `(i, j)` moves the particle on line `d`
//! from `(i, j)` to `(i + 1, j + 1)` and is gated by its `top` cell
//! `(i + 1, j)` on line `d + 1` and its `bottom` cell `(i, j + 1)` on line
//! `d - 1`.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

pub type Cell = (usize, usize);

/// Largest grid for which the full enumeration machinery is supported.
pub const MAX_M: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("grid size m={0} outside supported range 1..={MAX_M}")]
    InvalidSize(usize),
    #[error("gate regions {0} and {1} overlap")]
    OverlappingRegions(usize, usize),
    #[error("gate region {0} does not fit inside the grid")]
    RegionOutOfBounds(usize),
    #[error("gate region {0}: control lines must be the lines adjacent to the target as required by its kind")]
    ControlPlacementInvalid(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Site {
    pub i: usize,
    pub j: usize,
    /// `Some(k)` only on the doubled sites of a gate region.
    pub branch: Option<u8>,
}

impl Site {
    pub fn cell(&self) -> Cell {
        (self.i, self.j)
    }

    pub fn line(&self) -> i64 {
        self.i as i64 - self.j as i64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RegionKind {
    Cnot,
    Toffoli,
}

/// A controlled-gate region: `length` consecutive doubled cells along the
/// target line, starting at `center`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GateRegion {
    pub kind: RegionKind,
    pub center: Cell,
    pub length: usize,
    pub control_lines: Vec<i64>,
}

impl GateRegion {
    /// CNOT with its control on the line above the target (`d + 1`).
    pub fn cnot(center: Cell, length: usize) -> Self {
        let d = center.0 as i64 - center.1 as i64;
        Self { kind: RegionKind::Cnot, center, length, control_lines: vec![d + 1] }
    }

    /// Toffoli with controls on both neighbouring lines.
    pub fn toffoli(center: Cell, length: usize) -> Self {
        let d = center.0 as i64 - center.1 as i64;
        Self { kind: RegionKind::Toffoli, center, length, control_lines: vec![d - 1, d + 1] }
    }

    pub fn target_line(&self) -> i64 {
        self.center.0 as i64 - self.center.1 as i64
    }

    pub fn doubled_cells(&self) -> Vec<Cell> {
        (0..self.length).map(|l| (self.center.0 + l, self.center.1 + l)).collect()
    }

    /// Plaquette bases belonging to the region, with their roles.
    fn plaquette_roles(&self) -> Vec<(Cell, PlaquetteRole)> {
        let (i, j) = self.center;
        let len = self.length;
        let mut out = Vec::new();
        out.push(((i - 1, j - 1), PlaquetteRole::Entry));
        for l in 1..len {
            out.push(((i - 1 + l, j - 1 + l), PlaquetteRole::Interior(l - 1)));
        }
        out.push(((i - 1 + len, j - 1 + len), PlaquetteRole::Exit));
        let below_role = match self.kind {
            RegionKind::Cnot => PlaquetteRole::SpectatorSide,
            RegionKind::Toffoli => PlaquetteRole::ControlSide,
        };
        for l in 0..len {
            out.push(((i + l, j + l - 1), PlaquetteRole::ControlSide));
            out.push(((i + l - 1, j + l), below_role));
        }
        out
    }

    fn legal_controls(&self) -> bool {
        let d = self.target_line();
        let mut want = match self.kind {
            RegionKind::Cnot => vec![d + 1],
            RegionKind::Toffoli => vec![d - 1, d + 1],
        };
        let mut have = self.control_lines.clone();
        want.sort_unstable();
        have.sort_unstable();
        want == have
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PlaquetteRole {
    Free,
    /// Hop from the plane onto the first doubled cell.
    Entry,
    /// Hop from doubled cell `l` to doubled cell `l + 1`, same branch.
    Interior(usize),
    /// Hop off the last doubled cell back onto the plane.
    Exit,
    /// Hop on a control line; its gate must be diagonal while the target
    /// sits in the region.
    ControlSide,
    /// Hop on the non-control neighbouring line of a CNOT.
    SpectatorSide,
}

#[derive(Debug, Clone, Serialize)]
pub struct Plaquette {
    pub base: Cell,
    pub top: Cell,
    pub far: Cell,
    pub bottom: Cell,
    pub line: i64,
    pub region: Option<usize>,
    pub role: PlaquetteRole,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EdgeClass {
    Plain,
    /// Joins a control-line cell to a doubled cell (edges a, b).
    Control,
    /// Joins a doubled cell to a non-control neighbour (edges c, d).
    Spectator,
}

/// An edge between cells on adjacent lines. For region edges `b` is the
/// doubled cell.
#[derive(Debug, Clone, Serialize)]
pub struct Edge {
    pub a: Cell,
    pub b: Cell,
    pub class: EdgeClass,
    pub region: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Line {
    pub d: i64,
    /// Site ids ordered by increasing `i`, branch 0 before 1.
    pub sites: Vec<usize>,
}

/// What moves a particle across one hop of a plaquette.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HopChannel {
    /// The plaquette's own single-qubit gate.
    Gate,
    /// The region gate for branch `k`.
    Branch(u8),
    /// Spin-preserving hop.
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hop {
    pub from: usize,
    pub to: usize,
    pub channel: HopChannel,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridSpec {
    m: usize,
    regions: Vec<GateRegion>,
    sites: Vec<Site>,
    lines: Vec<Line>,
    edges: Vec<Edge>,
    plaquettes: Vec<Plaquette>,
    boundary: Vec<Cell>,
    corners: Vec<Cell>,
    #[serde(skip)]
    cell_sites: HashMap<Cell, Vec<usize>>,
    #[serde(skip)]
    doubled: HashMap<Cell, (usize, usize)>,
    #[serde(skip)]
    site_line: Vec<usize>,
    #[serde(skip)]
    site_pos: Vec<usize>,
    #[serde(skip)]
    warnings: Vec<String>,
}

impl GridSpec {
    pub fn new(m: usize, regions: Vec<GateRegion>) -> Result<Self, GridError> {
        if m == 0 || m > MAX_M {
            return Err(GridError::InvalidSize(m));
        }
        let mut footprints: Vec<BTreeSet<Cell>> = Vec::new();
        let mut corner_cells: Vec<BTreeSet<Cell>> = Vec::new();
        for (r, region) in regions.iter().enumerate() {
            let (i, j) = region.center;
            if region.length == 0 || i == 0 || j == 0 || i + region.length > m || j + region.length > m {
                return Err(GridError::RegionOutOfBounds(r));
            }
            if !region.legal_controls() {
                return Err(GridError::ControlPlacementInvalid(r));
            }
            let bases: BTreeSet<Cell> = region.plaquette_roles().into_iter().map(|(b, _)| b).collect();
            let corners: BTreeSet<Cell> = bases
                .iter()
                .flat_map(|&(a, b)| [(a, b), (a + 1, b), (a + 1, b + 1), (a, b + 1)])
                .collect();
            footprints.push(bases);
            corner_cells.push(corners);
        }
        let mut warnings = Vec::new();
        for a in 0..regions.len() {
            for b in (a + 1)..regions.len() {
                let shares_plaquette = !footprints[a].is_disjoint(&footprints[b]);
                let doubled_touch = regions[a].doubled_cells().iter().any(|c| corner_cells[b].contains(c))
                    || regions[b].doubled_cells().iter().any(|c| corner_cells[a].contains(c));
                if shares_plaquette || doubled_touch {
                    return Err(GridError::OverlappingRegions(a, b));
                }
                if !corner_cells[a].is_disjoint(&corner_cells[b]) {
                    warnings.push(format!("gate regions {a} and {b} are adjacent"));
                }
            }
        }

        let mut doubled_region = HashMap::new();
        for (r, region) in regions.iter().enumerate() {
            for (l, c) in region.doubled_cells().into_iter().enumerate() {
                doubled_region.insert(c, (r, l));
            }
        }

        let mut sites = Vec::new();
        let mut cell_sites: HashMap<Cell, Vec<usize>> = HashMap::new();
        for i in 0..=m {
            for j in 0..=m {
                let ids = cell_sites.entry((i, j)).or_default();
                if doubled_region.contains_key(&(i, j)) {
                    for k in 0..2 {
                        ids.push(sites.len());
                        sites.push(Site { i, j, branch: Some(k) });
                    }
                } else {
                    ids.push(sites.len());
                    sites.push(Site { i, j, branch: None });
                }
            }
        }

        let mut lines: Vec<Line> = (0..=2 * m).map(|l| Line { d: l as i64 - m as i64, sites: Vec::new() }).collect();
        let mut site_line = vec![0; sites.len()];
        let mut site_pos = vec![0; sites.len()];
        for (id, s) in sites.iter().enumerate() {
            let l = (s.line() + m as i64) as usize;
            site_line[id] = l;
            site_pos[id] = lines[l].sites.len();
            lines[l].sites.push(id);
        }

        let mut edges = Vec::new();
        for i in 0..=m {
            for j in 0..=m {
                for other in [(i + 1, j), (i, j + 1)] {
                    if other.0 > m || other.1 > m {
                        continue;
                    }
                    edges.push(classify((i, j), other, &regions, &doubled_region));
                }
            }
        }

        let mut region_role: HashMap<Cell, (usize, PlaquetteRole)> = HashMap::new();
        for (r, region) in regions.iter().enumerate() {
            for (base, role) in region.plaquette_roles() {
                region_role.insert(base, (r, role));
            }
        }
        let mut plaquettes = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                let (region, role) = match region_role.get(&(i, j)) {
                    Some(&(r, role)) => (Some(r), role),
                    None => (None, PlaquetteRole::Free),
                };
                plaquettes.push(Plaquette {
                    base: (i, j),
                    top: (i + 1, j),
                    far: (i + 1, j + 1),
                    bottom: (i, j + 1),
                    line: i as i64 - j as i64,
                    region,
                    role,
                });
            }
        }

        let boundary = (0..=m)
            .flat_map(|i| (0..=m).map(move |j| (i, j)))
            .filter(|&(i, j)| i == 0 || j == 0 || i == m || j == m)
            .collect();
        // The dummy corners terminate the string rather than carrying it
        // through, so they take no corner compensation.
        let corners = vec![(0, 0), (m, m)];

        Ok(Self {
            m,
            regions,
            sites,
            lines,
            edges,
            plaquettes,
            boundary,
            corners,
            cell_sites,
            doubled: doubled_region,
            site_line,
            site_pos,
            warnings,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn regions(&self) -> &[GateRegion] {
        &self.regions
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn site(&self, id: usize) -> Site {
        self.sites[id]
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    /// Line by index `l = d + m`.
    pub fn line(&self, l: usize) -> &Line {
        &self.lines[l]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn plaquettes(&self) -> &[Plaquette] {
        &self.plaquettes
    }

    pub fn plaquette_at(&self, base: Cell) -> Option<usize> {
        let (i, j) = base;
        (i < self.m && j < self.m).then_some(i * self.m + j)
    }

    pub fn boundary(&self) -> &[Cell] {
        &self.boundary
    }

    pub fn corners(&self) -> &[Cell] {
        &self.corners
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Site ids living on a cell (two for doubled cells).
    pub fn cell_sites(&self, cell: Cell) -> &[usize] {
        self.cell_sites.get(&cell).map(Vec::as_slice).unwrap_or(&[])
    }

    /// The plain site at a cell, or `None` if the cell is doubled/absent.
    pub fn plain_site(&self, cell: Cell) -> Option<usize> {
        match self.cell_sites(cell) {
            [id] => Some(*id),
            _ => None,
        }
    }

    /// Region and position index of a doubled cell.
    pub fn doubled_at(&self, cell: Cell) -> Option<(usize, usize)> {
        self.doubled.get(&cell).copied()
    }

    pub fn site_line(&self, id: usize) -> usize {
        self.site_line[id]
    }

    pub fn site_pos(&self, id: usize) -> usize {
        self.site_pos[id]
    }

    pub fn is_dummy_cell(&self, cell: Cell) -> bool {
        cell == (0, self.m) || cell == (self.m, 0)
    }

    pub fn is_dummy_line(&self, l: usize) -> bool {
        l == 0 || l == 2 * self.m
    }

    /// Number of movable particles (and of circuit wires).
    pub fn movable_count(&self) -> usize {
        2 * self.m - 1
    }

    /// Site id at `cell` with branch `k` (branch ignored for plain cells).
    pub fn site_id(&self, cell: Cell, branch: Option<u8>) -> Option<usize> {
        let ids = self.cell_sites(cell);
        match (ids.len(), branch) {
            (1, _) => Some(ids[0]),
            (2, Some(k)) => Some(ids[k as usize]),
            _ => None,
        }
    }

    /// The individual hops carried by plaquette `p`.
    pub fn hops(&self, p: usize) -> Vec<Hop> {
        let pl = &self.plaquettes[p];
        let single = |from: Cell, to: Cell| Hop {
            from: self.plain_site(from).expect("plain cell"),
            to: self.plain_site(to).expect("plain cell"),
            channel: HopChannel::Gate,
        };
        match pl.role {
            PlaquetteRole::Free | PlaquetteRole::ControlSide | PlaquetteRole::SpectatorSide => {
                vec![single(pl.base, pl.far)]
            }
            PlaquetteRole::Entry => {
                let from = self.plain_site(pl.base).expect("plain entry");
                (0..2u8)
                    .map(|k| Hop {
                        from,
                        to: self.site_id(pl.far, Some(k)).unwrap(),
                        channel: HopChannel::Branch(k),
                    })
                    .collect()
            }
            PlaquetteRole::Interior(_) => (0..2u8)
                .map(|k| Hop {
                    from: self.site_id(pl.base, Some(k)).unwrap(),
                    to: self.site_id(pl.far, Some(k)).unwrap(),
                    channel: HopChannel::Identity,
                })
                .collect(),
            PlaquetteRole::Exit => {
                let to = self.plain_site(pl.far).expect("plain exit");
                (0..2u8)
                    .map(|k| Hop { from: self.site_id(pl.base, Some(k)).unwrap(), to, channel: HopChannel::Identity })
                    .collect()
            }
        }
    }

    /// Cells on the control lines of `region` adjacent to its doubled cell `l`.
    pub fn control_neighbours(&self, region: usize, l: usize) -> Vec<Cell> {
        let r = &self.regions[region];
        let (i, j) = (r.center.0 + l, r.center.1 + l);
        let mut out = Vec::new();
        for &cd in &r.control_lines {
            if cd == r.target_line() + 1 {
                out.push((i, j - 1));
                out.push((i + 1, j));
            } else {
                out.push((i - 1, j));
                out.push((i, j + 1));
            }
        }
        out
    }

    /// Cells on line `d` adjacent to `cell` (which must lie on `d - 1` or `d + 1`).
    pub fn neighbours_on_line(&self, cell: Cell, d: i64) -> Vec<Cell> {
        let (i, j) = cell;
        let here = i as i64 - j as i64;
        let cand: Vec<(i64, i64)> = if d == here + 1 {
            vec![(i as i64 + 1, j as i64), (i as i64, j as i64 - 1)]
        } else if d == here - 1 {
            vec![(i as i64 - 1, j as i64), (i as i64, j as i64 + 1)]
        } else {
            vec![]
        };
        cand.into_iter()
            .filter(|&(a, b)| a >= 0 && b >= 0 && a <= self.m as i64 && b <= self.m as i64)
            .map(|(a, b)| (a as usize, b as usize))
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("grid serializes")
    }
}

fn classify(
    a: Cell,
    b: Cell,
    regions: &[GateRegion],
    doubled: &HashMap<Cell, (usize, usize)>,
) -> Edge {
    let (da, db) = (doubled.get(&a), doubled.get(&b));
    let (other, dcell, r) = match (da, db) {
        (None, None) => return Edge { a, b, class: EdgeClass::Plain, region: None },
        (Some(&(r, _)), None) => (b, a, r),
        (None, Some(&(r, _))) => (a, b, r),
        // Rejected at construction: doubled cells never touch.
        (Some(_), Some(_)) => unreachable!("adjacent doubled cells"),
    };
    let line = other.0 as i64 - other.1 as i64;
    let class = if regions[r].control_lines.contains(&line) { EdgeClass::Control } else { EdgeClass::Spectator };
    Edge { a: other, b: dcell, class, region: Some(r) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grids_count() {
        let g = GridSpec::new(1, vec![]).unwrap();
        assert_eq!(g.sites().len(), 4);
        assert_eq!(g.lines().iter().map(|l| l.sites.len()).collect::<Vec<_>>(), vec![1, 2, 1]);
        assert_eq!(g.edges().len(), 4);
        assert_eq!(g.plaquettes().len(), 1);

        let g = GridSpec::new(2, vec![]).unwrap();
        assert_eq!(g.sites().len(), 9);
        assert_eq!(g.lines().iter().map(|l| l.sites.len()).collect::<Vec<_>>(), vec![1, 2, 3, 2, 1]);
        assert_eq!(g.edges().len(), 12);
        assert_eq!(g.plaquettes().len(), 4);
        assert!(g.edges().iter().all(|e| e.class == EdgeClass::Plain));
    }

    #[test]
    fn cnot_region_doubles_center() {
        let g = GridSpec::new(2, vec![GateRegion::cnot((1, 1), 1)]).unwrap();
        assert_eq!(g.sites().len(), 10);
        assert_eq!(g.cell_sites((1, 1)).len(), 2);
        assert_eq!(g.lines().len(), 5);
        assert_eq!(g.line(2).sites.len(), 4);
    }

    #[test]
    fn cnot_edge_classes() {
        let g = GridSpec::new(2, vec![GateRegion::cnot((1, 1), 1)]).unwrap();
        let mut control: Vec<Cell> =
            g.edges().iter().filter(|e| e.class == EdgeClass::Control).map(|e| e.a).collect();
        let mut spectator: Vec<Cell> =
            g.edges().iter().filter(|e| e.class == EdgeClass::Spectator).map(|e| e.a).collect();
        control.sort();
        spectator.sort();
        assert_eq!(control, vec![(1, 0), (2, 1)]);
        assert_eq!(spectator, vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn toffoli_edges_all_control() {
        let g = GridSpec::new(2, vec![GateRegion::toffoli((1, 1), 1)]).unwrap();
        let n = g.edges().iter().filter(|e| e.class == EdgeClass::Control).count();
        assert_eq!(n, 4);
        assert!(g.edges().iter().all(|e| e.class != EdgeClass::Spectator));
    }

    #[test]
    fn region_errors() {
        assert_eq!(GridSpec::new(2, vec![GateRegion::cnot((0, 1), 1)]).unwrap_err(), GridError::RegionOutOfBounds(0));
        assert_eq!(GridSpec::new(2, vec![GateRegion::cnot((1, 1), 2)]).unwrap_err(), GridError::RegionOutOfBounds(0));
        let mut bad = GateRegion::cnot((1, 1), 1);
        bad.control_lines = vec![-1];
        assert_eq!(GridSpec::new(2, vec![bad]).unwrap_err(), GridError::ControlPlacementInvalid(0));
        let overlapping = vec![GateRegion::cnot((1, 1), 1), GateRegion::cnot((2, 1), 1)];
        assert_eq!(GridSpec::new(3, overlapping).unwrap_err(), GridError::OverlappingRegions(0, 1));
        assert_eq!(GridSpec::new(0, vec![]).unwrap_err(), GridError::InvalidSize(0));
    }

    #[test]
    fn long_region_fits_m3() {
        let g = GridSpec::new(3, vec![GateRegion::cnot((1, 1), 2)]).unwrap();
        assert_eq!(g.sites().len(), 16 + 2);
        let roles: Vec<_> = g.plaquettes().iter().filter(|p| p.region.is_some()).map(|p| p.role).collect();
        assert_eq!(roles.len(), 7);
        assert!(roles.contains(&PlaquetteRole::Interior(0)));
    }

    #[test]
    fn line_lengths_sum() {
        for m in 1..=MAX_M {
            let g = GridSpec::new(m, vec![]).unwrap();
            let total: usize = g.lines().iter().map(|l| l.sites.len()).sum();
            assert_eq!(total, (m + 1) * (m + 1));
            for l in g.lines() {
                assert_eq!(l.sites.len() as i64, m as i64 + 1 - l.d.abs());
            }
            assert_eq!(g.edges().len(), 2 * m * (m + 1));
            assert_eq!(g.plaquettes().len(), m * m);
        }
    }

    #[test]
    fn site_degrees() {
        let m = 4;
        let g = GridSpec::new(m, vec![]).unwrap();
        for i in 0..=m {
            for j in 0..=m {
                let deg = g.edges().iter().filter(|e| e.a == (i, j) || e.b == (i, j)).count();
                let on_i = i == 0 || i == m;
                let on_j = j == 0 || j == m;
                let expect = match (on_i, on_j) {
                    (true, true) => 2,
                    (true, false) | (false, true) => 3,
                    _ => 4,
                };
                assert_eq!(deg, expect, "cell ({i},{j})");
            }
        }
    }

    #[test]
    fn json_has_sites_and_edges() {
        let g = GridSpec::new(2, vec![GateRegion::cnot((1, 1), 1)]).unwrap();
        let v = g.to_json();
        assert_eq!(v["sites"].as_array().unwrap().len(), 10);
        assert_eq!(v["edges"].as_array().unwrap().len(), 12);
        assert_eq!(v["regions"][0]["kind"], "Cnot");
    }
}
