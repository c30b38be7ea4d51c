//! Compressed sparse row storage for complex operators.

use std::collections::BTreeMap;
use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

const PARALLEL_ROWS: usize = 4096;

pub type C64 = Complex64;

/// Accumulates `(row, col, value)` triplets; duplicates are summed.
#[derive(Debug, Clone)]
pub struct TripletBuilder {
    dim: usize,
    rows: Vec<BTreeMap<usize, C64>>,
}

impl TripletBuilder {
    pub fn new(dim: usize) -> Self {
        Self { dim, rows: vec![BTreeMap::new(); dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn add(&mut self, row: usize, col: usize, value: C64) {
        debug_assert!(row < self.dim && col < self.dim);
        *self.rows[row].entry(col).or_insert(C64::new(0.0, 0.0)) += value;
    }

    pub fn add_real(&mut self, row: usize, col: usize, value: f64) {
        self.add(row, col, C64::new(value, 0.0));
    }

    pub fn build(self) -> SparseOp {
        let mut row_ptr = Vec::with_capacity(self.dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in self.rows {
            for (c, v) in row {
                if v.norm() != 0.0 {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        SparseOp { dim: self.dim, row_ptr, cols, vals }
    }
}

/// Square sparse complex matrix in CSR form.
///
/// Rows are stored with ascending column indices, so every matrix-vector
/// product sums each row in a fixed order independent of threading.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOp {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl SparseOp {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, row_ptr: vec![0; dim + 1], cols: Vec::new(), vals: Vec::new() }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diagonal(&vec![1.0; dim])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut b = TripletBuilder::new(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            b.add_real(i, i, d);
        }
        b.build()
    }

    pub fn from_dense(m: &DMatrix<C64>, cutoff: f64) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        let mut b = TripletBuilder::new(m.nrows());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if m[(r, c)].norm() > cutoff {
                    b.add(r, c, m[(r, c)]);
                }
            }
        }
        b.build()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[span.clone()].binary_search(&c) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i).re).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        self.iter().all(|(r, c, _)| r == c)
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.dim];
        self.matvec_into(x, &mut y);
        y
    }

    /// Rows run in parallel for large operators; each row is still summed
    /// sequentially, so results do not depend on the thread count.
    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) {
        assert_eq!(x.len(), self.dim);
        let row = |(r, out): (usize, &mut C64)| {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *out = acc;
        };
        if self.dim >= PARALLEL_ROWS {
            y.par_iter_mut().enumerate().for_each(row);
        } else {
            y.iter_mut().enumerate().for_each(row);
        }
    }

    pub fn expectation(&self, x: &[C64]) -> f64 {
        let y = self.matvec(x);
        x.iter().zip(&y).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// `max |A - A^dagger|` over all entries.
    pub fn hermiticity_error(&self) -> f64 {
        let mut err: f64 = 0.0;
        for (r, c, v) in self.iter() {
            err = err.max((v - self.get(c, r).conj()).norm());
        }
        err
    }

    /// Largest absolute row sum; an upper bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        (0..self.dim).map(|r| self.row(r).map(|(_, v)| v.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= s);
        out
    }

    pub fn add(&self, other: &SparseOp) -> Self {
        self.add_scaled(other, 1.0)
    }

    pub fn add_scaled(&self, other: &SparseOp, s: f64) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut b = TripletBuilder::new(self.dim);
        for (r, c, v) in self.iter() {
            b.add(r, c, v);
        }
        for (r, c, v) in other.iter() {
            b.add(r, c, v * s);
        }
        b.build()
    }

    pub fn adjoint(&self) -> Self {
        let mut b = TripletBuilder::new(self.dim);
        for (r, c, v) in self.iter() {
            b.add(c, r, v.conj());
        }
        b.build()
    }

    /// Principal submatrix on `indices` (in the given order).
    pub fn submatrix(&self, indices: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.dim];
        for (k, &i) in indices.iter().enumerate() {
            pos[i] = k;
        }
        let mut b = TripletBuilder::new(indices.len());
        for (k, &i) in indices.iter().enumerate() {
            for (c, v) in self.row(i) {
                if pos[c] != usize::MAX {
                    b.add(k, pos[c], v);
                }
            }
        }
        b.build()
    }

    /// Relabels basis state `i` as `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        let mut b = TripletBuilder::new(self.dim);
        for (r, c, v) in self.iter() {
            b.add(perm[r], perm[c], v);
        }
        b.build()
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.iter() {
            m[(r, c)] = v;
        }
        m
    }

    /// Maximum entrywise difference.
    pub fn max_diff(&self, other: &SparseOp) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.add_scaled(other, -1.0).max_abs()
    }

    /// MatrixMarket coordinate format, complex general.
    pub fn write_matrix_market<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate complex general")?;
        writeln!(w, "{} {} {}", self.dim, self.dim, self.nnz())?;
        for (r, c, v) in self.iter() {
            writeln!(w, "{} {} {:e} {:e}", r + 1, c + 1, v.re, v.im)?;
        }
        Ok(())
    }
}

pub fn norm(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
