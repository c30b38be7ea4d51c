//! Explicit many-body bases in the particle picture.

use std::collections::HashMap;

use crate::grid::GridSpec;
use crate::stringspace::{correct_sites, Word};

/// A basis whose states are occupation patterns over the grid's sites.
pub trait OccupationBasis: Sync {
    fn dim(&self) -> usize;
    fn occupation(&self, idx: usize) -> Vec<Option<u8>>;
    fn index_of(&self, occ: &[Option<u8>]) -> Option<usize>;
}

/// One particle on every line. States are a position per movable line
/// (mixed radix, line 1 most significant) times a spin word (wire 0 most
/// significant).
#[derive(Debug, Clone)]
pub struct SectorBasis {
    n_sites: usize,
    /// Site ids of movable lines `1..2m`, in line order.
    lines: Vec<Vec<usize>>,
    dummies: [usize; 2],
    /// `site id -> (movable line index, position)`.
    locate: Vec<Option<(usize, usize)>>,
    position_dim: usize,
}

impl SectorBasis {
    pub fn new(grid: &GridSpec) -> Self {
        let m = grid.m();
        let lines: Vec<Vec<usize>> = (1..2 * m).map(|l| grid.line(l).sites.clone()).collect();
        let mut locate = vec![None; grid.sites().len()];
        for (w, sites) in lines.iter().enumerate() {
            for (p, &id) in sites.iter().enumerate() {
                locate[id] = Some((w, p));
            }
        }
        let position_dim = lines.iter().map(Vec::len).product();
        Self {
            n_sites: grid.sites().len(),
            lines,
            dummies: [grid.line(0).sites[0], grid.line(2 * m).sites[0]],
            locate,
            position_dim,
        }
    }

    pub fn wires(&self) -> usize {
        self.lines.len()
    }

    pub fn spin_dim(&self) -> usize {
        1 << self.wires()
    }

    pub fn position_dim(&self) -> usize {
        self.position_dim
    }

    /// Number of sites on each movable line.
    pub fn line_sizes(&self) -> Vec<usize> {
        self.lines.iter().map(Vec::len).collect()
    }

    pub fn encode(&self, positions: &[usize], spins: u32) -> usize {
        let mut p = 0;
        for (w, &pos) in positions.iter().enumerate() {
            p = p * self.lines[w].len() + pos;
        }
        p * self.spin_dim() + spins as usize
    }

    pub fn decode(&self, idx: usize) -> (Vec<usize>, u32) {
        let spins = (idx % self.spin_dim()) as u32;
        let mut p = idx / self.spin_dim();
        let mut positions = vec![0; self.wires()];
        for w in (0..self.wires()).rev() {
            positions[w] = p % self.lines[w].len();
            p /= self.lines[w].len();
        }
        (positions, spins)
    }

    /// Site id occupied on each movable line.
    pub fn sites_of(&self, idx: usize) -> (Vec<usize>, u32) {
        let (pos, spins) = self.decode(idx);
        (pos.iter().enumerate().map(|(w, &p)| self.lines[w][p]).collect(), spins)
    }

    /// Index of the correct string `(z, spins)`.
    pub fn correct_index(&self, grid: &GridSpec, z: Word, spins: u32) -> usize {
        let sites = correct_sites(grid, z, spins);
        let positions: Vec<usize> = sites[1..sites.len() - 1].iter().map(|&id| self.locate[id].unwrap().1).collect();
        self.encode(&positions, spins)
    }
}

impl OccupationBasis for SectorBasis {
    fn dim(&self) -> usize {
        self.position_dim * self.spin_dim()
    }

    fn occupation(&self, idx: usize) -> Vec<Option<u8>> {
        let (sites, spins) = self.sites_of(idx);
        let wires = self.wires();
        let mut occ = vec![None; self.n_sites];
        for d in self.dummies {
            occ[d] = Some(0);
        }
        for (w, id) in sites.into_iter().enumerate() {
            occ[id] = Some(((spins >> (wires - 1 - w)) & 1) as u8);
        }
        occ
    }

    fn index_of(&self, occ: &[Option<u8>]) -> Option<usize> {
        let wires = self.wires();
        let mut positions = vec![usize::MAX; wires];
        let mut spins = 0u32;
        for (id, o) in occ.iter().enumerate() {
            let Some(s) = o else { continue };
            let Some((w, p)) = self.locate[id] else { continue };
            if positions[w] != usize::MAX {
                return None;
            }
            positions[w] = p;
            spins |= (*s as u32) << (wires - 1 - w);
        }
        if positions.contains(&usize::MAX) {
            return None;
        }
        Some(self.encode(&positions, spins))
    }
}

/// An explicitly listed set of occupation patterns.
#[derive(Debug, Clone)]
pub struct ExplicitBasis {
    states: Vec<Vec<Option<u8>>>,
    index: HashMap<Vec<Option<u8>>, usize>,
}

impl ExplicitBasis {
    pub fn new(states: Vec<Vec<Option<u8>>>) -> Self {
        let index = states.iter().enumerate().map(|(k, s)| (s.clone(), k)).collect();
        Self { states, index }
    }

    pub fn states(&self) -> &[Vec<Option<u8>>] {
        &self.states
    }
}

impl OccupationBasis for ExplicitBasis {
    fn dim(&self) -> usize {
        self.states.len()
    }

    fn occupation(&self, idx: usize) -> Vec<Option<u8>> {
        self.states[idx].clone()
    }

    fn index_of(&self, occ: &[Option<u8>]) -> Option<usize> {
        self.index.get(occ).copied()
    }
}

/// One particle on every movable line except `line`, which holds one or two.
/// Every particle carries a spin.
pub fn extended_sector(grid: &GridSpec, line: usize) -> ExplicitBasis {
    let m = grid.m();
    assert!(line >= 1 && line < 2 * m, "designated line must be movable");
    let mut choices: Vec<Vec<Vec<usize>>> = Vec::new();
    for l in 1..2 * m {
        let sites = &grid.line(l).sites;
        let mut opts: Vec<Vec<usize>> = sites.iter().map(|&s| vec![s]).collect();
        if l == line {
            for a in 0..sites.len() {
                for b in a + 1..sites.len() {
                    opts.push(vec![sites[a], sites[b]]);
                }
            }
        }
        choices.push(opts);
    }
    let mut states = Vec::new();
    let mut stack: Vec<Vec<usize>> = vec![vec![]];
    for opts in &choices {
        let mut next = Vec::new();
        for partial in &stack {
            for o in opts {
                let mut p = partial.clone();
                p.extend(o);
                next.push(p);
            }
        }
        stack = next;
    }
    let dummies = [grid.line(0).sites[0], grid.line(2 * m).sites[0]];
    for occupied in stack {
        let n = occupied.len();
        for spins in 0..1u32 << n {
            let mut occ = vec![None; grid.sites().len()];
            for d in dummies {
                occ[d] = Some(0);
            }
            for (k, &id) in occupied.iter().enumerate() {
                occ[id] = Some(((spins >> k) & 1) as u8);
            }
            states.push(occ);
        }
    }
    ExplicitBasis::new(states)
}
