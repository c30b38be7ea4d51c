//! Local energy terms shared by every representation of the model.
//!
//! Each [`Element`] is one summand of the full Hamiltonian: an edge, a
//! boundary/corner penalty, a plaquette hop and so on. The particle picture
//! evaluates elements on an explicit occupation pattern ([`Occupation`]);
//! the dual-rail netlist expands the same elements into Pauli terms.

use crate::circuit::GateAssignment;
use crate::grid::{Cell, EdgeClass, GridSpec, RegionKind};
use crate::sparse::C64;

/// Per-site occupation: `None` is empty, `Some(s)` holds a particle with spin
/// `s`. Dummy sites are always `Some(0)`.
pub type Occupation = [Option<u8>];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// String penalty scale.
    pub delta: f64,
    /// Hopping scale.
    pub g: f64,
    /// No-loop penalty.
    pub e_noloop: f64,
    /// Adiabatic knob in `[0, 1]`.
    pub lambda: f64,
    /// Strength of the wrong-input penalty.
    pub input_strength: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self { delta: 1.0, g: 0.01, e_noloop: 10.0, lambda: 1.0, input_strength: 1.0 }
    }
}

impl ModelParams {
    pub fn with_g(mut self, g: f64) -> Self {
        self.g = g;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    /// Range errors, and a warning string when the perturbative regime is doubtful.
    pub fn validate(&self) -> Result<Option<String>, String> {
        if !(self.delta > 0.0) {
            return Err(format!("delta must be positive, got {}", self.delta));
        }
        if !(self.g > 0.0) {
            return Err(format!("g must be positive, got {}", self.g));
        }
        if !(self.e_noloop >= 0.0) {
            return Err(format!("E must be non-negative, got {}", self.e_noloop));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(format!("lambda must lie in [0, 1], got {}", self.lambda));
        }
        if self.g / self.delta > 0.1 {
            return Ok(Some(format!("g/delta = {} exceeds 0.1; perturbative estimates are unreliable", self.g / self.delta)));
        }
        Ok(None)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ElementKind {
    /// Ising-like edge term, `-(1 - 2n)(1 - 2n') + 1` or its region variant.
    Edge(usize),
    Boundary(Cell),
    Corner(Cell),
    /// `n[top] n[bottom]` of a plaquette.
    PlaquetteDiag(usize),
    /// One of the two occupation terms favouring the left string.
    Init(Cell),
    /// Penalty for spin `wrong` at the leftmost site of movable line `line`.
    Input { line: usize, wrong: u8 },
    /// `n[a] n[b]` for horizontally adjacent cells on one line.
    NoLoop(Cell, Cell),
    /// Forward/backward hop over a plaquette, amplitude `-<s'|U|s>`.
    Hop(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub kind: ElementKind,
    pub coeff: f64,
}

impl Element {
    pub fn new(kind: ElementKind, coeff: f64) -> Self {
        Self { kind, coeff }
    }

    pub fn is_diagonal(&self) -> bool {
        !matches!(self.kind, ElementKind::Hop(_))
    }

    /// Site ids the element acts on or reads.
    pub fn support(&self, grid: &GridSpec) -> Vec<usize> {
        let cells: Vec<Cell> = match &self.kind {
            ElementKind::Edge(e) => {
                let edge = &grid.edges()[*e];
                let mut c = vec![edge.a, edge.b];
                if edge.class == EdgeClass::Control {
                    c.extend(other_control_cells(grid, edge.region.unwrap(), edge.a, edge.b));
                }
                c
            }
            ElementKind::Boundary(c) | ElementKind::Corner(c) | ElementKind::Init(c) => vec![*c],
            ElementKind::PlaquetteDiag(p) => {
                let pl = &grid.plaquettes()[*p];
                vec![pl.top, pl.bottom]
            }
            ElementKind::Input { line, .. } => vec![grid.site(grid.line(*line).sites[0]).cell()],
            ElementKind::NoLoop(a, b) => vec![*a, *b],
            ElementKind::Hop(p) => {
                let mut ids: Vec<usize> = grid.hops(*p).iter().flat_map(|h| [h.from, h.to]).collect();
                ids.sort_unstable();
                ids.dedup();
                return ids;
            }
        };
        let mut ids: Vec<usize> = cells.iter().flat_map(|c| grid.cell_sites(*c).iter().copied()).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }
}

/// For a Toffoli control edge `(control, doubled)`, the cells of the other
/// control line adjacent to the doubled cell.
pub(crate) fn other_control_cells(grid: &GridSpec, region: usize, control: Cell, doubled: Cell) -> Vec<Cell> {
    let r = &grid.regions()[region];
    if r.kind != RegionKind::Toffoli {
        return Vec::new();
    }
    let own = control.0 as i64 - control.1 as i64;
    let other = r.control_lines.iter().copied().find(|&l| l != own).expect("two control lines");
    grid.neighbours_on_line(doubled, other)
}

/// Total occupation of a cell.
pub fn n_cell(grid: &GridSpec, occ: &Occupation, cell: Cell) -> f64 {
    grid.cell_sites(cell).iter().filter(|&&id| occ[id].is_some()).count() as f64
}

/// Occupation of a cell with spin `s`.
pub fn n_cell_spin(grid: &GridSpec, occ: &Occupation, cell: Cell, s: u8) -> f64 {
    grid.cell_sites(cell).iter().filter(|&&id| occ[id] == Some(s)).count() as f64
}

fn n_site(occ: &Occupation, id: usize) -> f64 {
    occ[id].is_some() as u8 as f64
}

/// Diagonal value of a non-hop element on an occupation pattern.
pub fn diag_value(grid: &GridSpec, el: &Element, occ: &Occupation) -> f64 {
    let raw = match &el.kind {
        ElementKind::Edge(e) => {
            let edge = &grid.edges()[*e];
            match edge.class {
                EdgeClass::Plain | EdgeClass::Spectator => {
                    let (na, nb) = (n_cell(grid, occ, edge.a), n_cell(grid, occ, edge.b));
                    -(1.0 - 2.0 * na) * (1.0 - 2.0 * nb) + 1.0
                }
                EdgeClass::Control => {
                    let region = edge.region.unwrap();
                    let [b0, b1] = [0u8, 1].map(|k| grid.site_id(edge.b, Some(k)).unwrap());
                    let (p0, p1) = control_projectors(grid, occ, region, edge.a, edge.b);
                    -(1.0 - 2.0 * p0) * (1.0 - 2.0 * n_site(occ, b0)) - (1.0 - 2.0 * p1) * (1.0 - 2.0 * n_site(occ, b1))
                        + 2.0
                }
            }
        }
        ElementKind::Boundary(c) | ElementKind::Corner(c) | ElementKind::Init(c) => n_cell(grid, occ, *c),
        ElementKind::PlaquetteDiag(p) => {
            let pl = &grid.plaquettes()[*p];
            n_cell(grid, occ, pl.top) * n_cell(grid, occ, pl.bottom)
        }
        ElementKind::Input { line, wrong } => {
            let id = grid.line(*line).sites[0];
            (occ[id] == Some(*wrong)) as u8 as f64
        }
        ElementKind::NoLoop(a, b) => n_cell(grid, occ, *a) * n_cell(grid, occ, *b),
        ElementKind::Hop(_) => 0.0,
    };
    el.coeff * raw
}

/// Branch-selecting projectors `(P0, P1)` read off the control particle(s).
fn control_projectors(grid: &GridSpec, occ: &Occupation, region: usize, control: Cell, doubled: Cell) -> (f64, f64) {
    match grid.regions()[region].kind {
        RegionKind::Cnot => (n_cell_spin(grid, occ, control, 0), n_cell_spin(grid, occ, control, 1)),
        RegionKind::Toffoli => {
            let others: f64 =
                other_control_cells(grid, region, control, doubled).iter().map(|&c| n_cell_spin(grid, occ, c, 1)).sum();
            let p1 = n_cell_spin(grid, occ, control, 1) * others;
            (n_cell(grid, occ, control) - p1, p1)
        }
    }
}

/// Applies a hop element to `occ`; returns `(new pattern, amplitude)` pairs.
/// A hop needs its destination site empty (hard-core modes).
pub fn hop_apply(
    grid: &GridSpec,
    assignment: &GateAssignment,
    el: &Element,
    occ: &Occupation,
) -> Vec<(Vec<Option<u8>>, C64)> {
    let ElementKind::Hop(p) = el.kind else { return Vec::new() };
    let mut out = Vec::new();
    for hop in grid.hops(p) {
        let u = assignment.hop_matrix(grid, p, hop.channel);
        match (occ[hop.from], occ[hop.to]) {
            (Some(s), None) => {
                for s2 in 0..2u8 {
                    let amp = -el.coeff * u[s2 as usize][s as usize];
                    if amp.norm() != 0.0 {
                        let mut next = occ.to_vec();
                        next[hop.from] = None;
                        next[hop.to] = Some(s2);
                        out.push((next, amp));
                    }
                }
            }
            (None, Some(s2)) => {
                for s in 0..2u8 {
                    let amp = -el.coeff * u[s2 as usize][s as usize].conj();
                    if amp.norm() != 0.0 {
                        let mut next = occ.to_vec();
                        next[hop.to] = None;
                        next[hop.from] = Some(s);
                        out.push((next, amp));
                    }
                }
            }
            _ => {}
        }
    }
    out
}

/// Edge terms plus boundary and corner penalties.
pub fn string_elements(grid: &GridSpec, delta: f64) -> Vec<Element> {
    let mut out: Vec<Element> =
        (0..grid.edges().len()).map(|e| Element::new(ElementKind::Edge(e), delta / 4.0)).collect();
    out.extend(grid.boundary().iter().map(|&c| Element::new(ElementKind::Boundary(c), delta / 2.0)));
    out.extend(grid.corners().iter().map(|&c| Element::new(ElementKind::Corner(c), delta / 2.0)));
    out
}

pub fn hop_elements(grid: &GridSpec, scale: f64) -> Vec<Element> {
    (0..grid.plaquettes().len()).map(|p| Element::new(ElementKind::Hop(p), scale)).collect()
}

/// Plaquette wiggle terms (`g`) and the left-string preference (`g sqrt(1 - lambda^2)`).
pub fn adiabatic_diag_elements(grid: &GridSpec, g: f64, lambda: f64) -> Vec<Element> {
    let m = grid.m();
    let mut out: Vec<Element> =
        (0..grid.plaquettes().len()).map(|p| Element::new(ElementKind::PlaquetteDiag(p), g)).collect();
    let init = g * (1.0 - lambda * lambda).max(0.0).sqrt();
    out.push(Element::new(ElementKind::Init((m, 1)), init));
    out.push(Element::new(ElementKind::Init((1, m)), init));
    out
}

/// Wrong-input penalties for movable lines `1..2m`; `input[w]` is the bit of wire `w`.
pub fn input_elements(input: &[u8], strength: f64) -> Vec<Element> {
    input
        .iter()
        .enumerate()
        .map(|(w, &b)| Element::new(ElementKind::Input { line: w + 1, wrong: 1 - b }, strength))
        .collect()
}

/// `n[i,j] n[i+1,j+1]` for every same-line neighbouring pair.
pub fn no_loop_elements(grid: &GridSpec, e: f64) -> Vec<Element> {
    grid.plaquettes().iter().map(|pl| Element::new(ElementKind::NoLoop(pl.base, pl.far), e)).collect()
}
