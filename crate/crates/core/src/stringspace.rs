//! Connected strings as `2m`-bit words and the graph of single hops between
//! them.
//!
//! Bit `l` of a word describes the step from line `l` to line `l + 1`: `0`
//! decrements `j`, `1` increments `i`. The occupied cell on line `l` is
//! therefore `(ones(z[..l]), m - zeros(z[..l]))`. Words are stored in a `u32`
//! with bit `l` at position `l`.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::grid::{Cell, GridSpec, RegionKind, MAX_M};
use crate::sparse::{SparseOp, TripletBuilder};

pub type Word = u32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StringError {
    #[error("malformed string word: {0}")]
    MalformedWord(String),
    #[error("grid size m={0} exceeds the enumeration cap {MAX_M}")]
    TooLarge(usize),
}

pub fn bit(z: Word, l: usize) -> u32 {
    (z >> l) & 1
}

/// `0^m 1^m`: every particle at the left end of its line.
pub fn z_init(m: usize) -> Word {
    ((1u32 << m) - 1) << m
}

/// `1^m 0^m`.
pub fn z_final(m: usize) -> Word {
    (1u32 << m) - 1
}

pub fn word_to_string(z: Word, m: usize) -> String {
    (0..2 * m).map(|l| if bit(z, l) == 1 { '1' } else { '0' }).collect()
}

pub fn parse_word(s: &str, m: usize) -> Result<Word, StringError> {
    if s.len() != 2 * m {
        return Err(StringError::MalformedWord(format!("'{s}' has length {}, expected {}", s.len(), 2 * m)));
    }
    let mut z = 0;
    for (l, ch) in s.chars().enumerate() {
        match ch {
            '0' => {}
            '1' => z |= 1 << l,
            _ => return Err(StringError::MalformedWord(format!("'{s}' contains '{ch}'"))),
        }
    }
    check_word(z, m)?;
    Ok(z)
}

fn check_word(z: Word, m: usize) -> Result<(), StringError> {
    if m > MAX_M || (z >> (2 * m)) != 0 || z.count_ones() as usize != m {
        return Err(StringError::MalformedWord(format!("{z:#b} is not a weight-{m} word of length {}", 2 * m)));
    }
    Ok(())
}

/// Lexicographic sort key (bit 0 is the first character).
fn lex_key(z: Word, m: usize) -> Word {
    z.reverse_bits() >> (32 - 2 * m)
}

/// Number of domain walls in `z`.
pub fn wiggle_count(z: Word, m: usize) -> usize {
    (0..2 * m - 1).filter(|&l| bit(z, l) != bit(z, l + 1)).count()
}

/// `[z_0 = 1] + [z_{2m-1} = 0]`: occupation of `(1, m)` and `(m, 1)`.
pub fn init_penalty(z: Word, m: usize) -> usize {
    (bit(z, 0) == 1) as usize + (bit(z, 2 * m - 1) == 0) as usize
}

/// Occupied cell on every line `0..=2m` (dummies included).
pub fn string_cells(z: Word, m: usize) -> Vec<Cell> {
    let mut out = Vec::with_capacity(2 * m + 1);
    let (mut i, mut j) = (0, m);
    out.push((i, j));
    for l in 0..2 * m {
        if bit(z, l) == 1 {
            i += 1;
        } else {
            j -= 1;
        }
        out.push((i, j));
    }
    out
}

/// Validated form of [`string_cells`].
pub fn string_to_sites(grid: &GridSpec, z: Word) -> Result<Vec<Cell>, StringError> {
    check_word(z, grid.m())?;
    Ok(string_cells(z, grid.m()))
}

/// Whether the particle on line `l` sits at the leftmost site of its line.
pub fn at_leftmost(z: Word, m: usize, l: usize) -> bool {
    let zeros = (0..l).filter(|&k| bit(z, k) == 0).count();
    zeros == l.min(m)
}

/// A single hop between neighbouring strings; `from -> to` moves line `line`
/// forward across plaquette `plaquette`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StringEdge {
    pub from: usize,
    pub to: usize,
    pub line: usize,
    pub plaquette: usize,
}

#[derive(Debug, Clone)]
pub struct StringGraph {
    m: usize,
    nodes: Vec<Word>,
    edges: Vec<StringEdge>,
    index: HashMap<Word, usize>,
    incident: Vec<Vec<usize>>,
}

/// All weight-`m` words in lexicographic order, with their hop graph.
pub fn enumerate_strings(grid: &GridSpec) -> Result<StringGraph, StringError> {
    StringGraph::new(grid.m())
}

impl StringGraph {
    pub fn new(m: usize) -> Result<Self, StringError> {
        if m == 0 || m > MAX_M {
            return Err(StringError::TooLarge(m));
        }
        let mut nodes: Vec<Word> = (0..1u32 << (2 * m)).filter(|z| z.count_ones() as usize == m).collect();
        nodes.sort_by_key(|&z| lex_key(z, m));
        let index: HashMap<Word, usize> = nodes.iter().enumerate().map(|(k, &z)| (z, k)).collect();
        let mut edges = Vec::new();
        let mut incident = vec![Vec::new(); nodes.len()];
        for (k, &z) in nodes.iter().enumerate() {
            let cells = string_cells(z, m);
            for l in 1..2 * m {
                if bit(z, l - 1) == 0 && bit(z, l) == 1 {
                    let to = z ^ (1 << (l - 1)) ^ (1 << l);
                    let (i, j) = cells[l];
                    let e = StringEdge { from: k, to: index[&to], line: l, plaquette: i * m + j };
                    incident[k].push(edges.len());
                    incident[e.to].push(edges.len());
                    edges.push(e);
                }
            }
        }
        Ok(Self { m, nodes, edges, index, incident })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn nodes(&self) -> &[Word] {
        &self.nodes
    }

    pub fn edges(&self) -> &[StringEdge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index_of(&self, z: Word) -> Option<usize> {
        self.index.get(&z).copied()
    }

    /// Edges touching node `k`.
    pub fn incident(&self, k: usize) -> impl Iterator<Item = &StringEdge> + '_ {
        self.incident[k].iter().map(move |&e| &self.edges[e])
    }

    pub fn neighbours(&self, k: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.incident(k).map(|e| if e.from == k { e.to } else { e.from }).collect();
        out.sort_unstable();
        out
    }

    /// 0/1 adjacency matrix.
    pub fn adjacency(&self) -> SparseOp {
        let mut b = TripletBuilder::new(self.len());
        for e in &self.edges {
            b.add_real(e.from, e.to, 1.0);
            b.add_real(e.to, e.from, 1.0);
        }
        b.build()
    }

    /// `word: neighbour neighbour ...`, one node per line in node order.
    pub fn to_adjacency_text(&self) -> String {
        let mut s = String::new();
        for k in 0..self.len() {
            let nbrs: Vec<String> = self.neighbours(k).iter().map(|&n| word_to_string(self.nodes[n], self.m)).collect();
            writeln!(s, "{}: {}", word_to_string(self.nodes[k], self.m), nbrs.join(" ")).unwrap();
        }
        s
    }
}

/// Spin of wire `w` in a big-endian spin word over `wires` wires.
pub fn spin_of(spins: u32, wires: usize, w: usize) -> u8 {
    ((spins >> (wires - 1 - w)) & 1) as u8
}

/// The branch a correct string takes at the doubled cells of `region`.
pub fn correct_branch(grid: &GridSpec, region: usize, spins: u32) -> u8 {
    let wires = grid.movable_count();
    let m = grid.m() as i64;
    let r = &grid.regions()[region];
    let wire_of = |d: i64| (d + m - 1) as usize;
    match r.kind {
        RegionKind::Cnot => spin_of(spins, wires, wire_of(r.control_lines[0])),
        RegionKind::Toffoli => r.control_lines.iter().map(|&d| spin_of(spins, wires, wire_of(d))).min().unwrap(),
    }
}

/// Site id on every line `0..=2m` for the correct string `(z, spins)`.
pub fn correct_sites(grid: &GridSpec, z: Word, spins: u32) -> Vec<usize> {
    string_cells(z, grid.m())
        .into_iter()
        .map(|c| match grid.doubled_at(c) {
            Some((r, _)) => grid.site_id(c, Some(correct_branch(grid, r, spins))).unwrap(),
            None => grid.plain_site(c).unwrap(),
        })
        .collect()
}

/// Labels `(string node, spin word)` of the correct-string space.
#[derive(Debug, Clone)]
pub struct CorrectBasis {
    pub wires: usize,
    pub graph: StringGraph,
}

impl CorrectBasis {
    pub fn spin_dim(&self) -> usize {
        1 << self.wires
    }

    pub fn len(&self) -> usize {
        self.graph.len() * self.spin_dim()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, node: usize, spins: u32) -> usize {
        node * self.spin_dim() + spins as usize
    }

    pub fn label(&self, idx: usize) -> (usize, u32) {
        (idx / self.spin_dim(), (idx % self.spin_dim()) as u32)
    }
}

/// Ordered by string word, then spin word (wire 0 most significant).
pub fn correct_string_basis(grid: &GridSpec) -> Result<CorrectBasis, StringError> {
    Ok(CorrectBasis { wires: grid.movable_count(), graph: enumerate_strings(grid)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GateRegion;

    #[test]
    fn small_graphs() {
        let g = StringGraph::new(1).unwrap();
        assert_eq!(g.nodes().iter().map(|&z| word_to_string(z, 1)).collect::<Vec<_>>(), vec!["01", "10"]);
        assert_eq!(g.edges().len(), 1);
        assert_eq!(StringGraph::new(5).unwrap().len(), 252);
        assert!(StringGraph::new(9).is_err());
    }

    #[test]
    fn m1_sites() {
        let grid = GridSpec::new(1, vec![]).unwrap();
        assert_eq!(string_to_sites(&grid, parse_word("01", 1).unwrap()).unwrap()[1], (0, 0));
        assert_eq!(string_to_sites(&grid, parse_word("10", 1).unwrap()).unwrap()[1], (1, 1));
        assert!(parse_word("11", 1).is_err());
        assert!(parse_word("0101", 1).is_err());
        assert!(string_to_sites(&grid, 0b11).is_err());
    }

    #[test]
    fn init_and_final_strings() {
        for m in 1..=5 {
            let grid = GridSpec::new(m, vec![]).unwrap();
            let left = string_cells(z_init(m), m);
            let right = string_cells(z_final(m), m);
            for l in 0..=2 * m {
                let line = grid.line(l);
                assert_eq!(grid.plain_site(left[l]).unwrap(), line.sites[0]);
                assert_eq!(grid.plain_site(right[l]).unwrap(), *line.sites.last().unwrap());
                assert!(at_leftmost(z_init(m), m, l));
            }
            assert_eq!(word_to_string(z_init(m), m), "0".repeat(m) + &"1".repeat(m));
        }
    }

    #[test]
    fn wiggles() {
        assert_eq!(wiggle_count(z_init(3), 3), 1);
        assert_eq!(wiggle_count(parse_word("0101", 2).unwrap(), 2), 3);
        assert_eq!(wiggle_count(parse_word("0110", 2).unwrap(), 2), 2);
    }

    #[test]
    fn adjacency_text_format() {
        let g = StringGraph::new(1).unwrap();
        assert_eq!(g.to_adjacency_text(), "01: 10\n10: 01\n");
    }

    #[test]
    fn correct_branch_follows_control() {
        let grid = GridSpec::new(2, vec![GateRegion::cnot((1, 1), 1)]).unwrap();
        // Target wire 1, control wire 2 (least significant bit).
        assert_eq!(correct_branch(&grid, 0, 0b000), 0);
        assert_eq!(correct_branch(&grid, 0, 0b001), 1);
        assert_eq!(correct_branch(&grid, 0, 0b110), 0);
        let z = parse_word("0101", 2).unwrap();
        assert_eq!(string_cells(z, 2)[2], (1, 1));
        let sites = correct_sites(&grid, z, 0b001);
        assert_eq!(grid.site(sites[2]).branch, Some(1));
    }

    #[test]
    fn basis_sizes() {
        for (m, want) in [(1, 4), (2, 48), (3, 640)] {
            let grid = GridSpec::new(m, vec![]).unwrap();
            assert_eq!(correct_string_basis(&grid).unwrap().len(), want);
        }
    }
}
