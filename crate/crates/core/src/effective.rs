//! First-order effective dynamics on the correct-string space, the isometry
//! that rotates gate content away, and numerical checks of perturbation
//! theory against the full model.

use std::collections::{BTreeMap, HashMap, VecDeque};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::circuit::GateAssignment;
use crate::grid::{GateRegion, GridError, GridSpec};
use crate::hambuild::{build_h_string, build_v_hop, HamError, ModelParams, OccupationBasis, SectorBasis};
use crate::solve::{self, SolveError, SolverOptions, DENSE_LIMIT};
use crate::sparse::{SparseOp, TripletBuilder, C64};
use crate::stringspace::{
    at_leftmost, bit, correct_sites, correct_string_basis, init_penalty, spin_of, wiggle_count, word_to_string,
    z_final, z_init, CorrectBasis, StringEdge, StringError, StringGraph,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EffectiveError {
    #[error("two paths to string {string} give unitaries differing by {error:e}")]
    PathInconsistency { string: String, error: f64 },
    #[error("operator and isometry live on different bases")]
    BasisMismatch,
    #[error("at g = {g} the low band is separated by only {separation} from the next level")]
    BandMisalignment { g: f64, separation: f64 },
    #[error("block diagonalisation at g = {g} did not converge (last change {residual:e})")]
    NonConvergence { g: f64, residual: f64 },
    #[error("lambda values must be ascending and lie in [0, 1]")]
    BadLambda,
    #[error("input has {got} bits, grid has {expected} wires")]
    InputLength { expected: usize, got: usize },
    #[error("a length-{0} region needs at least one plaquette")]
    BadLength(usize),
    #[error(transparent)]
    String(#[from] StringError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Ham(#[from] HamError),
    #[error(transparent)]
    Solve(#[from] Box<SolveError>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum EffectiveMode {
    /// `g P V_hop P`.
    Hamiltonian,
    /// Hops scaled by `lambda`, plus wiggle, kink and input diagonals.
    Adiabatic { lambda: f64, input: Vec<u8>, input_strength: f64 },
}

/// An operator on the correct-string space, with the plaquette behind every
/// off-diagonal entry.
#[derive(Debug, Clone)]
pub struct EffectiveOp {
    pub basis: CorrectBasis,
    pub op: SparseOp,
    pub provenance: BTreeMap<(usize, usize), usize>,
}

/// Spin word of an input bit string (wire 0 most significant).
pub fn input_word(input: &[u8]) -> u32 {
    input.iter().fold(0, |acc, &b| (acc << 1) | b as u32)
}

/// Nonzero entries `(spins after, spins before, U element)` of a forward hop
/// along `edge`, kept only where both ends are correct strings that differ
/// on the hopping line alone.
fn edge_entries(grid: &GridSpec, assignment: &GateAssignment, basis: &CorrectBasis, edge: &StringEdge) -> Vec<(u32, u32, C64)> {
    let wires = basis.wires;
    let w = edge.line - 1;
    let (z, z2) = (basis.graph.nodes()[edge.from], basis.graph.nodes()[edge.to]);
    let hops = grid.hops(edge.plaquette);
    let mask = 1u32 << (wires - 1 - w);
    let mut out = Vec::new();
    for s in 0..basis.spin_dim() as u32 {
        let from = correct_sites(grid, z, s);
        for b in 0..2u8 {
            let s2 = if b == 1 { s | mask } else { s & !mask };
            let to = correct_sites(grid, z2, s2);
            if (0..from.len()).any(|k| k != edge.line && from[k] != to[k]) {
                continue;
            }
            if let Some(h) = hops.iter().find(|h| h.from == from[edge.line] && h.to == to[edge.line]) {
                let u = assignment.hop_matrix(grid, edge.plaquette, h.channel)[b as usize][spin_of(s, wires, w) as usize];
                if u.norm() != 0.0 {
                    out.push((s2, s, u));
                }
            }
        }
    }
    out
}

/// Diagonal of the adiabatic effective operator at string `z`, spins `s`.
fn adiabatic_diagonal(m: usize, wires: usize, z: u32, s: u32, g: f64, lambda: f64, input: &[u8], strength: f64) -> f64 {
    let kink = (1.0 - lambda * lambda).max(0.0).sqrt();
    let wrong: usize =
        (1..2 * m).filter(|&l| at_leftmost(z, m, l) && spin_of(s, wires, l - 1) != input[l - 1]).count();
    g * (wiggle_count(z, m) as f64 + kink * init_penalty(z, m) as f64) + strength * wrong as f64
}

/// `g P V_hop P` (or its adiabatic form) on the correct-string basis,
/// with energies measured from the connected-string level.
pub fn build_effective(
    grid: &GridSpec,
    assignment: &GateAssignment,
    g: f64,
    mode: &EffectiveMode,
) -> Result<EffectiveOp, EffectiveError> {
    let basis = correct_string_basis(grid)?;
    let m = grid.m();
    let hop = match mode {
        EffectiveMode::Hamiltonian => g,
        EffectiveMode::Adiabatic { lambda, input, .. } => {
            if !(0.0..=1.0).contains(lambda) {
                return Err(EffectiveError::BadLambda);
            }
            if input.len() != basis.wires {
                return Err(EffectiveError::InputLength { expected: basis.wires, got: input.len() });
            }
            g * lambda
        }
    };
    let mut b = TripletBuilder::new(basis.len());
    let mut provenance = BTreeMap::new();
    for edge in basis.graph.edges() {
        for (s2, s, u) in edge_entries(grid, assignment, &basis, edge) {
            let (r, c) = (basis.index(edge.to, s2), basis.index(edge.from, s));
            let amp = -hop * u;
            if amp.norm() == 0.0 {
                continue;
            }
            b.add(r, c, amp);
            b.add(c, r, amp.conj());
            provenance.insert((r, c), edge.plaquette);
            provenance.insert((c, r), edge.plaquette);
        }
    }
    if let EffectiveMode::Adiabatic { lambda, input, input_strength } = mode {
        for (node, &z) in basis.graph.nodes().iter().enumerate() {
            for s in 0..basis.spin_dim() as u32 {
                let d = adiabatic_diagonal(m, basis.wires, z, s, g, *lambda, input, *input_strength);
                b.add_real(basis.index(node, s), basis.index(node, s), d);
            }
        }
    }
    Ok(EffectiveOp { basis, op: b.build(), provenance })
}

/// Sector indices of the correct strings, in correct-basis order.
pub fn correct_indices(grid: &GridSpec, sector: &SectorBasis, basis: &CorrectBasis) -> Vec<usize> {
    (0..basis.len())
        .map(|k| {
            let (node, s) = basis.label(k);
            sector.correct_index(grid, basis.graph.nodes()[node], s)
        })
        .collect()
}

/// `-g A ⊗ I`, with `A` the string adjacency matrix.
pub fn string_hop_reference(basis: &CorrectBasis, g: f64) -> SparseOp {
    let sd = basis.spin_dim();
    let mut b = TripletBuilder::new(basis.len());
    for e in basis.graph.edges() {
        for s in 0..sd as u32 {
            b.add_real(basis.index(e.to, s), basis.index(e.from, s), -g);
            b.add_real(basis.index(e.from, s), basis.index(e.to, s), -g);
        }
    }
    b.build()
}

/// `W = Σ_z |z><z| ⊗ V(z)`, with `V(z)` the gate sequence accumulated along
/// any hop path from the initial string.
#[derive(Debug, Clone)]
pub struct IsometryW {
    pub basis: CorrectBasis,
    pub blocks: Vec<DMatrix<C64>>,
}

impl IsometryW {
    /// `V(z)` for string node `node`.
    pub fn unitary(&self, node: usize) -> &DMatrix<C64> {
        &self.blocks[node]
    }

    /// The full circuit: `V(z_final)`.
    pub fn final_unitary(&self) -> &DMatrix<C64> {
        let k = self.basis.graph.index_of(z_final(self.basis.graph.m())).unwrap();
        &self.blocks[k]
    }

    pub fn to_sparse(&self) -> SparseOp {
        let sd = self.basis.spin_dim();
        let mut b = TripletBuilder::new(self.basis.len());
        for (node, v) in self.blocks.iter().enumerate() {
            for r in 0..sd {
                for c in 0..sd {
                    if v[(r, c)].norm() != 0.0 {
                        b.add(self.basis.index(node, r as u32), self.basis.index(node, c as u32), v[(r, c)]);
                    }
                }
            }
        }
        b.build()
    }

    /// `max |W^dagger W - I|`, block by block.
    pub fn isometry_error(&self) -> f64 {
        let sd = self.basis.spin_dim();
        let id = DMatrix::<C64>::identity(sd, sd);
        self.blocks.iter().map(|v| (v.adjoint() * v - &id).iter().map(|x| x.norm()).fold(0.0, f64::max)).fold(0.0, f64::max)
    }

    /// `W (psi ⊗ |spins>)` for a string-only amplitude vector `psi`.
    pub fn apply_to_string_state(&self, psi: &[C64], spins: u32) -> Vec<C64> {
        let sd = self.basis.spin_dim();
        let mut out = vec![C64::new(0.0, 0.0); self.basis.len()];
        for (node, v) in self.blocks.iter().enumerate() {
            for r in 0..sd {
                out[self.basis.index(node, r as u32)] = psi[node] * v[(r, spins as usize)];
            }
        }
        out
    }
}

/// Breadth-first composition of hop unitaries from the initial string. Every
/// edge not on the search tree is checked against the tree's result.
pub fn build_isometry(grid: &GridSpec, assignment: &GateAssignment) -> Result<IsometryW, EffectiveError> {
    let basis = correct_string_basis(grid)?;
    let sd = basis.spin_dim();
    let graph = &basis.graph;
    let mut transfer: HashMap<(usize, usize), DMatrix<C64>> = HashMap::new();
    for e in graph.edges() {
        let mut gm = DMatrix::zeros(sd, sd);
        for (s2, s, u) in edge_entries(grid, assignment, &basis, e) {
            gm[(s2 as usize, s as usize)] = u;
        }
        transfer.insert((e.from, e.to), gm.adjoint());
        transfer.insert((e.to, e.from), gm);
    }
    // `transfer[(a, b)]` maps spins at b to spins at a.
    let start = graph.index_of(z_init(grid.m())).unwrap();
    let mut blocks: Vec<Option<DMatrix<C64>>> = vec![None; graph.len()];
    blocks[start] = Some(DMatrix::identity(sd, sd));
    let mut queue = VecDeque::from([start]);
    while let Some(a) = queue.pop_front() {
        let va = blocks[a].clone().unwrap();
        for b in graph.neighbours(a) {
            let cand = &transfer[&(b, a)] * &va;
            match &blocks[b] {
                None => {
                    blocks[b] = Some(cand);
                    queue.push_back(b);
                }
                Some(vb) => {
                    let error = (vb - &cand).iter().map(|x| x.norm()).fold(0.0, f64::max);
                    if error > 1e-12 {
                        return Err(EffectiveError::PathInconsistency {
                            string: word_to_string(graph.nodes()[b], grid.m()),
                            error,
                        });
                    }
                }
            }
        }
    }
    let blocks = blocks.into_iter().map(|b| b.expect("string graph is connected")).collect();
    Ok(IsometryW { basis, blocks })
}

/// `W^dagger H W`, computed block by block.
pub fn rotate_effective(eff: &EffectiveOp, w: &IsometryW) -> Result<SparseOp, EffectiveError> {
    if eff.basis.wires != w.basis.wires || eff.basis.graph.nodes() != w.basis.graph.nodes() {
        return Err(EffectiveError::BasisMismatch);
    }
    let sd = eff.basis.spin_dim();
    let mut blocks: BTreeMap<(usize, usize), DMatrix<C64>> = BTreeMap::new();
    for (r, c, v) in eff.op.iter() {
        blocks.entry((r / sd, c / sd)).or_insert_with(|| DMatrix::zeros(sd, sd))[(r % sd, c % sd)] += v;
    }
    let cutoff = 1e-15 * eff.op.max_abs().max(1.0);
    let rotated: Vec<((usize, usize), DMatrix<C64>)> =
        blocks.into_par_iter().map(|((a, c), h)| ((a, c), w.blocks[a].adjoint() * h * &w.blocks[c])).collect();
    let mut b = TripletBuilder::new(eff.basis.len());
    for ((a, c), blk) in rotated {
        for r in 0..sd {
            for k in 0..sd {
                if blk[(r, k)].norm() > cutoff {
                    b.add(a * sd + r, c * sd + k, blk[(r, k)]);
                }
            }
        }
    }
    Ok(b.build())
}

/// `-(g/2) Σ_i [(Z_i Z_{i+1} - I) - λ (X_i X_{i+1} + Y_i Y_{i+1})]` plus
/// `g sqrt(1-λ²) [(I - Z_1)/2 + (I + Z_{2m})/2]` on the weight-`m` words,
/// in string-graph order. Qubit `k` is bit `k` of the word.
pub fn xxz_chain(m: usize, g: f64, lambda: f64) -> SparseOp {
    let graph = StringGraph::new(m).expect("supported grid size");
    let kink = (1.0 - lambda * lambda).max(0.0).sqrt();
    let mut b = TripletBuilder::new(graph.len());
    for (k, &z) in graph.nodes().iter().enumerate() {
        b.add_real(k, k, g * (wiggle_count(z, m) as f64 + kink * init_penalty(z, m) as f64));
        for i in 0..2 * m - 1 {
            if bit(z, i) != bit(z, i + 1) {
                let swapped = z ^ (0b11 << i);
                b.add_real(graph.index_of(swapped).unwrap(), k, g * lambda);
            }
        }
    }
    b.build()
}

/// `(-1)^{Σ_k k z_k}`: conjugating the chain by these signs flips every hop.
pub fn gauge_signs(m: usize) -> Vec<f64> {
    let graph = StringGraph::new(m).expect("supported grid size");
    graph
        .nodes()
        .iter()
        .map(|&z| if (0..2 * m).map(|k| k * bit(z, k) as usize).sum::<usize>() % 2 == 0 { 1.0 } else { -1.0 })
        .collect()
}

/// Penalty of spin word `spins` for each string: lines whose particle is
/// still at its leftmost site but carries a spin different from `input`.
pub fn input_penalty(m: usize, spins: u32, input: &[u8], strength: f64) -> Vec<f64> {
    let graph = StringGraph::new(m).expect("supported grid size");
    let wires = 2 * m - 1;
    graph
        .nodes()
        .iter()
        .map(|&z| {
            let n = (1..2 * m).filter(|&l| at_leftmost(z, m, l) && spin_of(spins, wires, l - 1) != input[l - 1]).count();
            strength * n as f64
        })
        .collect()
}

/// The chain in the effective operator's sign convention, for the spin
/// sector equal to the input (where the input penalty vanishes).
pub fn chain_reference(m: usize, g: f64, lambda: f64, input: &[u8], strength: f64) -> SparseOp {
    let signs = gauge_signs(m);
    let chain = xxz_chain(m, g, lambda);
    let pen = input_penalty(m, input_word(input), input, strength);
    let mut b = TripletBuilder::new(chain.dim());
    for (r, c, v) in chain.iter() {
        b.add(r, c, v * signs[r] * signs[c]);
    }
    for (k, p) in pen.into_iter().enumerate() {
        b.add_real(k, k, p);
    }
    b.build()
}

/// The block of `op` with spin label `spins` on both sides.
pub fn spin_block(op: &SparseOp, basis: &CorrectBasis, spins: u32) -> SparseOp {
    let idx: Vec<usize> = (0..basis.graph.len()).map(|n| basis.index(n, spins)).collect();
    op.submatrix(&idx)
}

/// Largest entry of `op` connecting different spin labels.
pub fn off_spin_block(op: &SparseOp, basis: &CorrectBasis) -> f64 {
    op.iter().filter(|&(r, c, _)| basis.label(r).1 != basis.label(c).1).map(|(_, _, v)| v.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChainMatch {
    /// Largest coupling between different spin labels after rotation.
    pub off_block: f64,
    /// Largest entrywise difference between a spin block and the gauged
    /// chain plus that spin word's input penalty.
    pub block: f64,
}

/// Rotates the adiabatic operator by W and compares every spin block with
/// the chain.
pub fn chain_equivalence(
    grid: &GridSpec,
    assignment: &GateAssignment,
    g: f64,
    lambda: f64,
    input: &[u8],
    strength: f64,
) -> Result<ChainMatch, EffectiveError> {
    let mode = EffectiveMode::Adiabatic { lambda, input: input.to_vec(), input_strength: strength };
    let eff = build_effective(grid, assignment, g, &mode)?;
    let w = build_isometry(grid, assignment)?;
    let rotated = rotate_effective(&eff, &w)?;
    let m = grid.m();
    let signs = gauge_signs(m);
    let chain = xxz_chain(m, g, lambda);
    let mut gauged = TripletBuilder::new(chain.dim());
    for (r, c, v) in chain.iter() {
        gauged.add(r, c, v * signs[r] * signs[c]);
    }
    let gauged = gauged.build();
    let block = (0..eff.basis.spin_dim() as u32)
        .into_par_iter()
        .map(|s| {
            let pen = SparseOp::from_diagonal(&input_penalty(m, s, input, strength));
            spin_block(&rotated, &eff.basis, s).max_diff(&gauged.add(&pen))
        })
        .reduce(|| 0.0, f64::max);
    Ok(ChainMatch { off_block: off_spin_block(&rotated, &eff.basis), block })
}

/// Least-squares slope of `log y` against `log x`; needs two usable points.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[derive(Debug, Clone, Serialize)]
pub struct PerturbationRow {
    pub g: f64,
    /// `max |E_full - E_eff|` over the low band.
    pub deviation: f64,
    /// `10 (2m+1) g² / Δ`.
    pub bound: f64,
    /// Distance from the top of the low band to the next level.
    pub separation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PerturbationReport {
    pub rows: Vec<PerturbationRow>,
    pub band: usize,
    pub slope: Option<f64>,
    /// False when some `g` fell outside the perturbative regime.
    pub reliable: bool,
    pub warnings: Vec<String>,
}

/// Compares the low band of `H_string + g V_hop` with the first-order
/// effective spectrum shifted by `(2m+1)Δ`, for every `g`.
pub fn validate_perturbation(
    grid: &GridSpec,
    assignment: &GateAssignment,
    g_list: &[f64],
    delta: f64,
) -> Result<PerturbationReport, EffectiveError> {
    let m = grid.m();
    let sector = SectorBasis::new(grid);
    let h_string = build_h_string(grid, &sector, delta);
    let v_hop = build_v_hop(grid, assignment, &sector);
    let band = correct_string_basis(grid)?.len();
    let e0 = (2 * m + 1) as f64 * delta;
    let mut warnings = Vec::new();
    for &g in g_list {
        let p = ModelParams { delta, g, ..ModelParams::default() };
        match p.validate() {
            Ok(Some(w)) => warnings.push(w),
            Err(e) => warnings.push(e),
            Ok(None) => {}
        }
    }
    let rows: Result<Vec<PerturbationRow>, EffectiveError> = g_list
        .par_iter()
        .map(|&g| {
            let full = h_string.add_scaled(&v_hop, g);
            let full_vals = if full.dim() <= DENSE_LIMIT {
                solve::eigenvalues(&full)
            } else {
                let opts = SolverOptions { vectors: false, ..SolverOptions::default() };
                solve::lowest_eigenpairs(&full, band + 1, &opts).map_err(Box::new)?.eigenvalues
            };
            let separation = full_vals.get(band).map_or(f64::INFINITY, |x| x - full_vals[band - 1]);
            if separation < delta / 4.0 {
                return Err(EffectiveError::BandMisalignment { g, separation });
            }
            let eff = build_effective(grid, assignment, g, &EffectiveMode::Hamiltonian)?;
            let eff_vals = solve::eigenvalues(&eff.op);
            let deviation =
                (0..band).map(|k| (full_vals[k] - (eff_vals[k] + e0)).abs()).fold(0.0, f64::max);
            Ok(PerturbationRow { g, deviation, bound: 10.0 * (2 * m + 1) as f64 * g * g / delta, separation })
        })
        .collect();
    let rows = rows?;
    let slope = loglog_slope(&rows.iter().map(|r| (r.g, r.deviation)).collect::<Vec<_>>());
    Ok(PerturbationReport { reliable: warnings.is_empty(), rows, band, slope, warnings })
}

#[derive(Debug, Clone, Serialize)]
pub struct LeakageRow {
    pub g: f64,
    /// `|<z_final, t=1| H_eff |z_init, t=0>|` after the Hermitian rotation.
    pub element: f64,
    /// The same entry of the non-Hermitian (Bloch) form.
    pub bloch_element: f64,
    pub iterations: usize,
    /// Largest entry of the Riccati residual.
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LeakageReport {
    pub length: usize,
    pub m: usize,
    /// Frozen control spin.
    pub control: u8,
    pub rows: Vec<LeakageRow>,
    pub slope: Option<f64>,
}

/// Block-diagonalises `H_string + g V_hop` between the correct strings and
/// the rest, for a CNOT region of `length` doubled sites on the smallest grid
/// that holds it. All spins other than the target are frozen (the control to
/// `control`, the rest to 0). Reports the effective coupling from
/// `(z_init, target 0)` to `(z_final, target 1)` and its log-log slope in g.
pub fn cnot_leakage_scan(length: usize, g_list: &[f64], delta: f64, control: u8) -> Result<LeakageReport, EffectiveError> {
    if length == 0 {
        return Err(EffectiveError::BadLength(length));
    }
    let m = length + 1;
    let grid = GridSpec::new(m, vec![GateRegion::cnot((1, 1), length)])?;
    let assignment = GateAssignment::identity(&grid);
    let sector = SectorBasis::new(&grid);
    let wires = sector.wires();
    let (target, ctrl) = (m - 1, m);
    let keep = |s: u32| (0..wires).all(|w| w == target || spin_of(s, wires, w) == if w == ctrl { control } else { 0 });
    let idx: Vec<usize> = (0..sector.dim()).filter(|&k| keep((k % sector.spin_dim()) as u32)).collect();
    let pos: HashMap<usize, usize> = idx.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let hs = build_h_string(&grid, &sector, delta).submatrix(&idx);
    let v = build_v_hop(&grid, &assignment, &sector).submatrix(&idx);

    let cb = correct_string_basis(&grid)?;
    let mut p_set: Vec<usize> = Vec::new();
    let mut label: HashMap<(u32, u32), usize> = HashMap::new();
    for k in 0..cb.len() {
        let (node, s) = cb.label(k);
        if keep(s) {
            let z = cb.graph.nodes()[node];
            label.insert((z, s), p_set.len());
            p_set.push(pos[&sector.correct_index(&grid, z, s)]);
        }
    }
    let in_p: Vec<bool> = {
        let mut f = vec![false; idx.len()];
        p_set.iter().for_each(|&k| f[k] = true);
        f
    };
    let q_set: Vec<usize> = (0..idx.len()).filter(|&k| !in_p[k]).collect();
    let e0 = (2 * m + 1) as f64 * delta;
    let diag = hs.diagonal();
    let dq: Vec<f64> = q_set.iter().map(|&k| diag[k] - e0).collect();
    debug_assert!(p_set.iter().all(|&k| (diag[k] - e0).abs() < 1e-12));
    debug_assert!(dq.iter().all(|&d| d > 0.0));

    let block = |rows: &[usize], cols: &[usize]| DMatrix::from_fn(rows.len(), cols.len(), |r, c| v.get(rows[r], cols[c]));
    let v_pp = block(&p_set, &p_set);
    let v_pq = block(&p_set, &q_set);
    let v_qp = block(&q_set, &p_set);
    let v_qq = block(&q_set, &q_set);
    let min_iter = max_distance(&v, &p_set) + 2;

    let spin = |t: u8| {
        let mut s = 0u32;
        for w in 0..wires {
            let b = if w == target { t } else if w == ctrl { control } else { 0 };
            s = (s << 1) | b as u32;
        }
        s
    };
    let from = label[&(z_init(m), spin(0))];
    let to = label[&(z_final(m), spin(1))];

    let rows: Result<Vec<LeakageRow>, EffectiveError> = g_list
        .par_iter()
        .map(|&g| {
            let (x, iterations, residual) = riccati(&v_pp, &v_pq, &v_qp, &v_qq, &dq, g, min_iter)?;
            let c = C64::new(g, 0.0);
            let bloch = (&v_pp + &v_pq * &x) * c;
            let a = x.adjoint() * &x;
            let hermitian = binomial_series(&a, 0.5) * &bloch * binomial_series(&a, -0.5);
            Ok(LeakageRow { g, element: hermitian[(to, from)].norm(), bloch_element: bloch[(to, from)].norm(), iterations, residual })
        })
        .collect();
    let rows = rows?;
    let slope = loglog_slope(&rows.iter().map(|r| (r.g, r.element)).collect::<Vec<_>>());
    Ok(LeakageReport { length, m, control, rows, slope })
}

/// Largest hop distance from any `sources` state to any state of `op`'s graph.
fn max_distance(op: &SparseOp, sources: &[usize]) -> usize {
    let mut best = 0;
    for &s in sources {
        let mut dist = vec![usize::MAX; op.dim()];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(a) = queue.pop_front() {
            for (b, _) in op.row(a) {
                if dist[b] == usize::MAX {
                    dist[b] = dist[a] + 1;
                    queue.push_back(b);
                }
            }
        }
        best = best.max(dist.into_iter().filter(|&d| d != usize::MAX).max().unwrap_or(0));
    }
    best
}

/// Solves `D X = -g V_QP - g V_QQ X + g X V_PP + g X V_PQ X` by fixed-point
/// iteration, entry by entry to relative precision. The graph distance
/// bounds how many sweeps it takes before every entry is populated.
fn riccati(
    v_pp: &DMatrix<C64>,
    v_pq: &DMatrix<C64>,
    v_qp: &DMatrix<C64>,
    v_qq: &DMatrix<C64>,
    dq: &[f64],
    g: f64,
    min_iter: usize,
) -> Result<(DMatrix<C64>, usize, f64), EffectiveError> {
    let c = C64::new(g, 0.0);
    let (nq, np) = (v_qp.nrows(), v_qp.ncols());
    let mut x = DMatrix::<C64>::zeros(nq, np);
    let max_iter = min_iter + 400;
    let mut change = f64::INFINITY;
    for it in 1..=max_iter {
        let rhs = (-v_qp - v_qq * &x + &x * v_pp + &x * v_pq * &x) * c;
        let next = DMatrix::from_fn(nq, np, |r, k| rhs[(r, k)] / dq[r]);
        let mut converged = true;
        change = 0.0;
        for (a, b) in next.iter().zip(x.iter()) {
            let d = (a - b).norm();
            let rel = if a.norm() > 0.0 { d / a.norm() } else if d == 0.0 { 0.0 } else { f64::INFINITY };
            change = change.max(rel);
            if rel > 1e-13 {
                converged = false;
            }
        }
        x = next;
        if converged && it >= min_iter {
            let res = (v_qp * c + DMatrix::from_fn(nq, np, |r, k| x[(r, k)] * dq[r]) + v_qq * &x * c
                - &x * v_pp * c
                - &x * v_pq * &x * c)
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            return Ok((x, it, res));
        }
    }
    Err(EffectiveError::NonConvergence { g, residual: change })
}

/// `Σ_k C(a, k) A^k` for small `A`: `(I + A)^a`.
fn binomial_series(a: &DMatrix<C64>, power: f64) -> DMatrix<C64> {
    let n = a.nrows();
    let mut out = DMatrix::<C64>::identity(n, n);
    let mut term = DMatrix::<C64>::identity(n, n);
    let mut coeff = 1.0;
    for k in 0..40 {
        coeff *= (power - k as f64) / (k + 1) as f64;
        term = &term * a;
        if term.iter().all(|z| z.norm() == 0.0) {
            break;
        }
        out += &term * C64::new(coeff, 0.0);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{layout, parse_circuit, LayoutOptions};
    use crate::gates;
    use crate::hambuild::build_adiabatic;

    fn compiled(src: &str, m: usize) -> (GridSpec, GateAssignment) {
        layout(&parse_circuit(src).unwrap(), m, LayoutOptions::default()).unwrap()
    }

    #[test]
    fn identity_circuit_is_adjacency() {
        let grid = GridSpec::new(2, vec![]).unwrap();
        let a = GateAssignment::identity(&grid);
        let eff = build_effective(&grid, &a, 0.01, &EffectiveMode::Hamiltonian).unwrap();
        assert!(eff.op.max_diff(&string_hop_reference(&eff.basis, 0.01)) < 1e-15);
        assert!(eff.provenance.len() == eff.op.nnz());
    }

    #[test]
    fn matches_projected_hop_operator() {
        for (src, m) in [("wires 3; CNOT 2 1", 2), ("wires 5; H 0; CNOT 3 2; T 2; X 3; H 4", 3)] {
            let (grid, a) = compiled(src, m);
            let sector = SectorBasis::new(&grid);
            let eff = build_effective(&grid, &a, 1.0, &EffectiveMode::Hamiltonian).unwrap();
            let idx = correct_indices(&grid, &sector, &eff.basis);
            let projected = build_v_hop(&grid, &a, &sector).submatrix(&idx);
            assert!(eff.op.max_diff(&projected) < 1e-14, "{src}");
        }
    }

    #[test]
    fn adiabatic_matches_projected_model() {
        let (grid, a) = compiled("wires 3; CNOT 2 1", 2);
        let sector = SectorBasis::new(&grid);
        let input = vec![1, 0, 1];
        let p = ModelParams::default().with_g(0.05).with_lambda(0.6);
        let mode = EffectiveMode::Adiabatic { lambda: 0.6, input: input.clone(), input_strength: p.input_strength };
        let eff = build_effective(&grid, &a, p.g, &mode).unwrap();
        let idx = correct_indices(&grid, &sector, &eff.basis);
        let full = build_adiabatic(&grid, &a, &sector, &p, &input).submatrix(&idx);
        let shifted = full.add_scaled(&SparseOp::identity(idx.len()), -5.0);
        assert!(eff.op.max_diff(&shifted) < 1e-13);
    }

    #[test]
    fn adiabatic_diagonal_is_wiggle_count() {
        let grid = GridSpec::new(3, vec![]).unwrap();
        let a = GateAssignment::identity(&grid);
        let g = 0.02;
        let input = vec![0, 1, 1, 0, 1];
        let mode = EffectiveMode::Adiabatic { lambda: 0.3, input: input.clone(), input_strength: 1.0 };
        let eff = build_effective(&grid, &a, g, &mode).unwrap();
        let kink = (1.0f64 - 0.09).sqrt();
        for k in 0..eff.basis.len() {
            let (node, s) = eff.basis.label(k);
            let z = eff.basis.graph.nodes()[node];
            let pen = input_penalty(3, s, &input, 1.0)[node];
            let walls = (eff.op.get(k, k).re - pen) / g - kink * init_penalty(z, 3) as f64;
            assert!((walls - wiggle_count(z, 3) as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn control_zero_blocks_branch_one() {
        let grid = GridSpec::new(2, vec![GateRegion::cnot((1, 1), 1)]).unwrap();
        let a = GateAssignment::identity(&grid);
        let eff = build_effective(&grid, &a, 1.0, &EffectiveMode::Hamiltonian).unwrap();
        // Target spin is never flipped when the control (wire 2) is 0.
        for (r, c, _) in eff.op.iter() {
            let (sr, sc) = (eff.basis.label(r).1, eff.basis.label(c).1);
            if sc & 1 == 0 {
                assert_eq!(sr, sc);
            }
        }
    }

    #[test]
    fn isometry_of_identity_and_hadamard() {
        let grid = GridSpec::new(2, vec![]).unwrap();
        let w = build_isometry(&grid, &GateAssignment::identity(&grid)).unwrap();
        assert!(w.blocks.iter().all(|b| *b == DMatrix::identity(8, 8)));
        let (grid, a) = compiled("wires 3; H 0", 2);
        let w = build_isometry(&grid, &a).unwrap();
        let h = w.final_unitary();
        // H on wire 0 (most significant spin bit).
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((h[(0, 0)].re - s).abs() < 1e-15 && (h[(4, 0)].re - s).abs() < 1e-15 && (h[(4, 4)].re + s).abs() < 1e-15);
        assert!(w.isometry_error() < 1e-14);
    }

    #[test]
    fn cnot_isometry_flips_target() {
        let (grid, a) = compiled("wires 3; CNOT 2 1", 2);
        let w = build_isometry(&grid, &a).unwrap();
        let u = w.final_unitary();
        for s in 0..8usize {
            let out = if s & 1 == 1 { s ^ 0b010 } else { s };
            assert!((u[(out, s)].re - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn inconsistent_assignment_detected() {
        // A gate on a control-side plaquette that flips the control breaks
        // path independence.
        let grid = GridSpec::new(2, vec![GateRegion::cnot((1, 1), 1)]).unwrap();
        let p = grid.plaquettes().iter().position(|pl| pl.role == crate::grid::PlaquetteRole::ControlSide).unwrap();
        let a = GateAssignment::identity(&grid).with_gate(p, gates::HADAMARD);
        match build_isometry(&grid, &a) {
            Err(EffectiveError::PathInconsistency { .. }) => {}
            Ok(w) => assert!(w.isometry_error() > 1e-6),
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn rotation_removes_gates() {
        let (grid, a) = compiled("wires 5; H 0; CNOT 3 2; T 2; X 3; H 4", 3);
        let eff = build_effective(&grid, &a, 0.01, &EffectiveMode::Hamiltonian).unwrap();
        let w = build_isometry(&grid, &a).unwrap();
        let rot = rotate_effective(&eff, &w).unwrap();
        assert!(rot.max_diff(&string_hop_reference(&eff.basis, 0.01)) < 1e-14);
        let other = build_isometry(&GridSpec::new(2, vec![]).unwrap(), &GateAssignment::identity(&GridSpec::new(2, vec![]).unwrap())).unwrap();
        assert_eq!(rotate_effective(&eff, &other).unwrap_err(), EffectiveError::BasisMismatch);
    }

    #[test]
    fn gauge_maps_chain_to_effective_signs() {
        let m = 3;
        let signs = gauge_signs(m);
        let chain = xxz_chain(m, 1.0, 1.0);
        for (r, c, v) in chain.iter() {
            if r != c {
                assert_eq!(v.re * signs[r] * signs[c], -1.0);
            }
        }
    }

    #[test]
    fn slope_fit() {
        let pts: Vec<(f64, f64)> = [0.01, 0.02, 0.04].iter().map(|&x| (x, 3.0 * x * x)).collect();
        assert!((loglog_slope(&pts).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(loglog_slope(&pts[..1]), None);
    }

    #[test]
    fn perturbation_at_zero_coupling() {
        let grid = GridSpec::new(2, vec![]).unwrap();
        let r = validate_perturbation(&grid, &GateAssignment::identity(&grid), &[0.0], 1.0).unwrap();
        assert!(r.rows[0].deviation < 1e-12);
        assert_eq!(r.band, 48);
    }

    #[test]
    fn binomial_square_root() {
        let a = DMatrix::from_row_slice(2, 2, &[C64::new(0.01, 0.0), C64::new(0.002, 0.0), C64::new(0.002, 0.0), C64::new(0.03, 0.0)]);
        let s = binomial_series(&a, 0.5);
        let id = DMatrix::<C64>::identity(2, 2);
        assert!((&s * &s - (id + a)).iter().all(|z| z.norm() < 1e-15));
    }
}
