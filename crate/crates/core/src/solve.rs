//! Lowest eigenpairs, Krylov time evolution and adiabatic sweeps.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::circuit::GateAssignment;
use crate::effective::{self, EffectiveError, EffectiveMode};
use crate::grid::GridSpec;
use crate::hambuild::ModelParams;
use crate::sparse::{dot, norm, SparseOp, C64};

/// Operators up to this dimension are diagonalised densely.
pub const DENSE_LIMIT: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("eigensolver stopped with residual {residual:e} after {iterations} restarts")]
    NoConvergence { residual: f64, iterations: usize },
    #[error("time step underflow at t = {time}")]
    StepUnderflow { time: f64 },
    #[error("requested {k} eigenpairs of a {dim}-dimensional operator")]
    TooManyPairs { k: usize, dim: usize },
    #[error("vector of length {got} for an operator of dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("time grid must be ascending and start at t >= 0")]
    BadTimeGrid,
    #[error(transparent)]
    Effective(#[from] Box<EffectiveError>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    Diagonal,
    Dense,
    Lanczos,
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Seed of the Lanczos start vectors.
    pub seed: u64,
    /// Subtracted from every reported eigenvalue.
    pub offset: f64,
    /// Eigenvalues closer than this are one degenerate level.
    pub cluster_tol: f64,
    pub vectors: bool,
    pub max_restarts: usize,
    /// Relative residual accepted by the iterative solver.
    pub tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { seed: 0, offset: 0.0, cluster_tol: 1e-8, vectors: true, max_restarts: 400, tol: 1e-11 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cluster {
    pub value: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralResult {
    /// Ascending, with `offset` subtracted.
    pub eigenvalues: Vec<f64>,
    pub offset: f64,
    pub clusters: Vec<Cluster>,
    pub residuals: Vec<f64>,
    /// Distance from the lowest level to the next one, if both were found.
    pub gap: Option<f64>,
    pub method: Method,
    #[serde(skip)]
    pub vectors: Vec<Vec<C64>>,
}

impl SpectralResult {
    fn new(mut pairs: Vec<(f64, Option<Vec<C64>>)>, residuals: Vec<f64>, method: Method, opts: &SolverOptions) -> Self {
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let eigenvalues: Vec<f64> = pairs.iter().map(|p| p.0 - opts.offset).collect();
        let clusters = cluster(&eigenvalues, opts.cluster_tol);
        let gap = (clusters.len() >= 2).then(|| clusters[1].value - clusters[0].value);
        let vectors = pairs.into_iter().filter_map(|p| p.1).collect();
        Self { eigenvalues, offset: opts.offset, clusters, residuals, gap, method, vectors }
    }

    pub fn ground_degeneracy(&self) -> usize {
        self.clusters.first().map_or(0, |c| c.count)
    }

    /// `E[n] - E[n-1]`: the gap above a band of `n` states.
    pub fn band_gap(&self, n: usize) -> Option<f64> {
        (n >= 1 && n < self.eigenvalues.len()).then(|| self.eigenvalues[n] - self.eigenvalues[n - 1])
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }
}

/// Groups sorted values into levels; a level starts where the step from the
/// previous value exceeds `tol`.
pub fn cluster(sorted: &[f64], tol: f64) -> Vec<Cluster> {
    let mut out: Vec<(f64, f64, usize)> = Vec::new();
    for &x in sorted {
        match out.last_mut() {
            Some((_, last, n)) if x - *last <= tol => {
                *last = x;
                *n += 1;
            }
            _ => out.push((x, x, 1)),
        }
    }
    out.into_iter().map(|(first, _, count)| Cluster { value: first, count }).collect()
}

/// Eigen-decomposition of a Hermitian matrix; eigenvalues ascending, vectors
/// as matching columns.
pub fn dense_eigh(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = m.nrows();
    let real = m.iter().all(|z| z.im == 0.0);
    let (vals, vecs): (Vec<f64>, DMatrix<C64>) = if real {
        let r = m.map(|z| z.re);
        let e = r.symmetric_eigen();
        (e.eigenvalues.iter().cloned().collect(), e.eigenvectors.map(|x| C64::new(x, 0.0)))
    } else {
        let e = m.clone().symmetric_eigen();
        (e.eigenvalues.iter().cloned().collect(), e.eigenvectors)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let sorted_vals = order.iter().map(|&k| vals[k]).collect();
    let sorted_vecs = DMatrix::from_fn(n, n, |r, c| vecs[(r, order[c])]);
    (sorted_vals, sorted_vecs)
}

/// All eigenvalues of a Hermitian operator, ascending.
pub fn eigenvalues(op: &SparseOp) -> Vec<f64> {
    if op.is_diagonal() {
        let mut d = op.diagonal();
        d.sort_by(f64::total_cmp);
        return d;
    }
    dense_eigh(&op.to_dense()).0
}

/// The `k` lowest eigenpairs. Diagonal operators are sorted directly, small
/// ones diagonalised densely, larger ones by restarted Lanczos with locking.
pub fn lowest_eigenpairs(op: &SparseOp, k: usize, opts: &SolverOptions) -> Result<SpectralResult, SolveError> {
    let dim = op.dim();
    if k > dim {
        return Err(SolveError::TooManyPairs { k, dim });
    }
    if op.is_diagonal() {
        let d = op.diagonal();
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
        let pairs = order[..k]
            .iter()
            .map(|&i| {
                let v = opts.vectors.then(|| {
                    let mut v = vec![C64::new(0.0, 0.0); dim];
                    v[i] = C64::new(1.0, 0.0);
                    v
                });
                (d[i], v)
            })
            .collect();
        return Ok(SpectralResult::new(pairs, vec![0.0; k], Method::Diagonal, opts));
    }
    if dim <= DENSE_LIMIT {
        let (vals, vecs) = dense_eigh(&op.to_dense());
        let mut pairs = Vec::with_capacity(k);
        let mut residuals = Vec::with_capacity(k);
        for c in 0..k {
            let v: Vec<C64> = vecs.column(c).iter().cloned().collect();
            residuals.push(residual(op, vals[c], &v));
            pairs.push((vals[c], opts.vectors.then_some(v)));
        }
        return Ok(SpectralResult::new(pairs, residuals, Method::Dense, opts));
    }
    let (vals, vecs) = lanczos(op, k, opts)?;
    let residuals = vals.iter().zip(&vecs).map(|(&l, v)| residual(op, l, v)).collect();
    let pairs = vals.into_iter().zip(vecs).map(|(l, v)| (l, opts.vectors.then_some(v))).collect();
    Ok(SpectralResult::new(pairs, residuals, Method::Lanczos, opts))
}

fn residual(op: &SparseOp, lambda: f64, v: &[C64]) -> f64 {
    let av = op.matvec(v);
    av.iter().zip(v).map(|(a, x)| (a - x * lambda).norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(y: &mut [C64], a: C64, x: &[C64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += a * xi);
}

fn orthogonalise(w: &mut [C64], against: &[Vec<C64>]) {
    // Two passes keep the basis orthonormal to working precision.
    for _ in 0..2 {
        for v in against {
            let c = dot(v, w);
            axpy(w, -c, v);
        }
    }
}

fn random_unit(dim: usize, rng: &mut ChaCha8Rng, locked: &[Vec<C64>]) -> Vec<C64> {
    loop {
        let mut v: Vec<C64> = (0..dim).map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
        orthogonalise(&mut v, locked);
        let n = norm(&v);
        if n > 1e-8 {
            v.iter_mut().for_each(|x| *x /= n);
            return v;
        }
    }
}

/// Lowest eigenpair of `op` restricted to the complement of `locked`, by
/// explicitly restarted Lanczos with full reorthogonalisation.
fn lowest_in_complement(
    op: &SparseOp,
    locked: &[Vec<C64>],
    rng: &mut ChaCha8Rng,
    opts: &SolverOptions,
    restarts: &mut usize,
) -> Result<(f64, Vec<C64>), SolveError> {
    let dim = op.dim();
    let scale = op.norm_bound().max(1e-300);
    let tol = opts.tol * scale;
    let ncv = (dim - locked.len()).min(60);
    let mut start = random_unit(dim, rng, locked);
    let mut last = f64::INFINITY;
    loop {
        if *restarts > opts.max_restarts {
            return Err(SolveError::NoConvergence { residual: last, iterations: *restarts });
        }
        *restarts += 1;
        let mut basis: Vec<Vec<C64>> = vec![start];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut exhausted = false;
        for j in 0..ncv {
            let mut w = op.matvec(&basis[j]);
            alpha.push(dot(&basis[j], &w).re);
            orthogonalise(&mut w, locked);
            orthogonalise(&mut w, &basis);
            let b = norm(&w);
            if b < 1e-12 * scale {
                exhausted = true;
                beta.push(0.0);
                break;
            }
            beta.push(b);
            if j + 1 == ncv {
                break;
            }
            w.iter_mut().for_each(|x| *x /= b);
            basis.push(w);
        }
        let n = alpha.len();
        let t = tridiagonal(&alpha, &beta[..n - 1]);
        let e = t.symmetric_eigen();
        let c = (0..n).min_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b])).unwrap();
        let mut y = vec![C64::new(0.0, 0.0); dim];
        for (j, v) in basis.iter().enumerate() {
            axpy(&mut y, C64::new(e.eigenvectors[(j, c)], 0.0), v);
        }
        orthogonalise(&mut y, locked);
        let ny = norm(&y);
        y.iter_mut().for_each(|x| *x /= ny);
        last = if exhausted { 0.0 } else { (beta[n - 1] * e.eigenvectors[(n - 1, c)]).abs() };
        if last <= tol {
            return Ok((e.eigenvalues[c], y));
        }
        start = y;
    }
}

fn tridiagonal(alpha: &[f64], beta: &[f64]) -> DMatrix<f64> {
    let n = alpha.len();
    DMatrix::from_fn(n, n, |r, c| {
        if r == c {
            alpha[r]
        } else if r + 1 == c {
            beta[r]
        } else if c + 1 == r {
            beta[c]
        } else {
            0.0
        }
    })
}

/// Lanczos with locking: eigenpairs are found one at a time, each in the
/// complement of those already locked, which resolves degenerate levels.
/// The search stops once a further pair would not fall below the `k`-th.
fn lanczos(op: &SparseOp, k: usize, opts: &SolverOptions) -> Result<(Vec<f64>, Vec<Vec<C64>>), SolveError> {
    let dim = op.dim();
    let scale = op.norm_bound().max(1e-300);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut locked: Vec<Vec<C64>> = Vec::new();
    let mut vals: Vec<f64> = Vec::new();
    let mut restarts = 0;
    while locked.len() < dim {
        let (theta, y) = lowest_in_complement(op, &locked, &mut rng, opts, &mut restarts)?;
        if locked.len() >= k {
            let mut sorted = vals.clone();
            sorted.sort_by(f64::total_cmp);
            if theta >= sorted[k - 1] - 1e-10 * scale {
                break;
            }
        }
        vals.push(theta);
        locked.push(y);
    }
    // Final Rayleigh-Ritz on the locked space.
    let n = locked.len();
    let applied: Vec<Vec<C64>> = locked.par_iter().map(|v| op.matvec(v)).collect();
    let h = DMatrix::from_fn(n, n, |r, c| dot(&locked[r], &applied[c]));
    let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
    let (vals, vecs) = dense_eigh(&h);
    let out: Vec<Vec<C64>> = (0..k)
        .map(|c| {
            let mut y = vec![C64::new(0.0, 0.0); dim];
            for (j, v) in locked.iter().enumerate() {
                axpy(&mut y, vecs[(j, c)], v);
            }
            y
        })
        .collect();
    Ok((vals.into_iter().take(k).collect(), out))
}

#[derive(Debug, Clone)]
pub struct EvolveOptions {
    /// Largest Krylov space per step.
    pub krylov_dim: usize,
    /// Accepted error estimate per step.
    pub step_tol: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { krylov_dim: 30, step_tol: 1e-13 }
    }
}

/// States sampled on a time grid under `exp(-i H t)`.
#[derive(Debug, Clone)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    pub states: Vec<Vec<C64>>,
    /// Accepted Krylov steps.
    pub steps: usize,
}

impl EvolutionTrace {
    pub fn norms(&self) -> Vec<f64> {
        self.states.iter().map(|s| norm(s)).collect()
    }

    pub fn energies(&self, op: &SparseOp) -> Vec<f64> {
        self.states.iter().map(|s| op.expectation(s)).collect()
    }

    /// Total probability on the basis states `indices` at each sample.
    pub fn probability_on(&self, indices: &[usize]) -> Vec<f64> {
        self.states.iter().map(|s| indices.iter().map(|&i| s[i].norm_sqr()).sum()).collect()
    }
}

/// Propagates `psi0` under `op` and samples it at every time in `t_grid`.
pub fn evolve(op: &SparseOp, psi0: &[C64], t_grid: &[f64]) -> Result<EvolutionTrace, SolveError> {
    evolve_with(op, psi0, t_grid, &EvolveOptions::default())
}

pub fn evolve_with(
    op: &SparseOp,
    psi0: &[C64],
    t_grid: &[f64],
    opts: &EvolveOptions,
) -> Result<EvolutionTrace, SolveError> {
    if psi0.len() != op.dim() {
        return Err(SolveError::DimensionMismatch { expected: op.dim(), got: psi0.len() });
    }
    if t_grid.first().is_some_and(|&t| t < 0.0) || t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(SolveError::BadTimeGrid);
    }
    let scale = op.norm_bound().max(1e-300);
    let mut psi = psi0.to_vec();
    let mut t = 0.0;
    let mut dt = 1.0 / scale;
    let mut states = Vec::with_capacity(t_grid.len());
    let mut steps = 0;
    for &target in t_grid {
        while target - t > 1e-15 * target.max(1.0) {
            let h = dt.min(target - t);
            match krylov_step(op, &psi, h, opts) {
                Some(next) if (norm(&next) - norm(&psi)).abs() <= opts.step_tol => {
                    psi = next;
                    t += h;
                    steps += 1;
                    if h == dt {
                        dt *= 1.5;
                    }
                }
                _ => {
                    dt = h / 2.0;
                    if dt < 1e-12 * t.max(1.0 / scale) {
                        return Err(SolveError::StepUnderflow { time: t });
                    }
                }
            }
        }
        t = target;
        states.push(psi.clone());
    }
    Ok(EvolutionTrace { times: t_grid.to_vec(), states, steps })
}

/// One step `exp(-i H dt) psi` in a Lanczos space; `None` when the error
/// estimate exceeds the tolerance.
fn krylov_step(op: &SparseOp, psi: &[C64], dt: f64, opts: &EvolveOptions) -> Option<Vec<C64>> {
    let beta0 = norm(psi);
    if beta0 == 0.0 {
        return Some(psi.to_vec());
    }
    let scale = op.norm_bound().max(1e-300);
    let mut basis: Vec<Vec<C64>> = vec![psi.iter().map(|x| x / beta0).collect()];
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    let mut exact = false;
    for j in 0..opts.krylov_dim.min(op.dim()) {
        let mut w = op.matvec(&basis[j]);
        alpha.push(dot(&basis[j], &w).re);
        orthogonalise(&mut w, &basis);
        let b = norm(&w);
        if b < 1e-13 * scale {
            exact = true;
            break;
        }
        beta.push(b);
        if j + 1 == opts.krylov_dim.min(op.dim()) {
            break;
        }
        w.iter_mut().for_each(|x| *x /= b);
        basis.push(w);
    }
    let n = alpha.len();
    if n == op.dim() {
        exact = true;
    }
    let e = tridiagonal(&alpha, &beta[..n - 1]).symmetric_eigen();
    let coeff: Vec<C64> = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    let phase = C64::new(0.0, -e.eigenvalues[c] * dt).exp();
                    phase * e.eigenvectors[(r, c)] * e.eigenvectors[(0, c)]
                })
                .sum()
        })
        .collect();
    if !exact {
        let err = beta0 * beta[n - 1] * coeff[n - 1].norm();
        if err > opts.step_tol {
            return None;
        }
    }
    let mut out = vec![C64::new(0.0, 0.0); psi.len()];
    for (c, v) in coeff.iter().zip(&basis) {
        axpy(&mut out, c * beta0, v);
    }
    Some(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct ArrivalSummary {
    pub series: Vec<f64>,
    pub max_probability: f64,
    pub time_of_max: f64,
    /// First sampled time at which the probability reaches the threshold.
    pub first_crossing: Option<f64>,
    pub threshold: f64,
}

impl ArrivalSummary {
    pub fn reached(&self) -> bool {
        self.first_crossing.is_some()
    }
}

/// Arrival probability on `target` states along a trace.
pub fn arrival_statistics(trace: &EvolutionTrace, target: &[usize], threshold: f64) -> ArrivalSummary {
    let series = trace.probability_on(target);
    let (kmax, max) = series.iter().enumerate().fold((0, f64::NEG_INFINITY), |b, (k, &p)| if p > b.1 { (k, p) } else { b });
    let first_crossing = series.iter().position(|&p| p >= threshold).map(|k| trace.times[k]);
    ArrivalSummary {
        max_probability: max.max(0.0),
        time_of_max: trace.times.get(kmax).copied().unwrap_or(0.0),
        first_crossing,
        threshold,
        series,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub lambda: f64,
    pub e0: f64,
    pub e1: f64,
    pub gap: f64,
    /// `|<reference|ground>|^2` against the chain ground state mapped through W.
    pub overlap: f64,
}

/// Gap and ground-state overlap of the adiabatic effective operator along
/// `lambdas`; points run in parallel.
pub fn adiabatic_sweep(
    grid: &GridSpec,
    assignment: &GateAssignment,
    params: &ModelParams,
    lambdas: &[f64],
    input: &[u8],
) -> Result<Vec<SweepPoint>, SolveError> {
    if lambdas.iter().any(|l| !(0.0..=1.0).contains(l)) || lambdas.windows(2).any(|w| w[1] < w[0]) {
        return Err(SolveError::Effective(Box::new(EffectiveError::BadLambda)));
    }
    let w = effective::build_isometry(grid, assignment).map_err(Box::new)?;
    lambdas
        .par_iter()
        .map(|&lambda| {
            let mode = EffectiveMode::Adiabatic { lambda, input: input.to_vec(), input_strength: params.input_strength };
            let eff = effective::build_effective(grid, assignment, params.g, &mode).map_err(Box::new)?;
            let opts = SolverOptions { cluster_tol: 1e-9 * params.g, ..SolverOptions::default() };
            let k = 2.min(eff.op.dim());
            let spec = lowest_eigenpairs(&eff.op, k, &opts)?;
            let reference = effective::chain_reference(grid.m(), params.g, lambda, input, params.input_strength);
            let (_, rvecs) = dense_eigh(&reference.to_dense());
            let chain_ground: Vec<C64> = rvecs.column(0).iter().cloned().collect();
            let spins = effective::input_word(input);
            let mapped = w.apply_to_string_state(&chain_ground, spins);
            let overlap = dot(&mapped, &spec.vectors[0]).norm_sqr();
            let (e0, e1) = (spec.eigenvalues[0], spec.eigenvalues.get(1).copied().unwrap_or(f64::NAN));
            Ok(SweepPoint { lambda, e0, e1, gap: e1 - e0, overlap })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hambuild::build_blocking_toy;

    #[test]
    fn clustering() {
        let c = cluster(&[0.0, 1e-10, 1.0, 1.0, 2.5], 1e-8);
        assert_eq!(c, vec![Cluster { value: 0.0, count: 2 }, Cluster { value: 1.0, count: 2 }, Cluster { value: 2.5, count: 1 }]);
    }

    #[test]
    fn lanczos_matches_dense_with_degeneracy() {
        // Two independent rings of 70 sites: levels e_a + e_b with
        // e_k = -2 cos(2 pi k / 70), so the first excited level is 4-fold.
        let n = 70;
        let ring = |k: usize| -2.0 * (2.0 * std::f64::consts::PI * k as f64 / n as f64).cos();
        let mut b = crate::sparse::TripletBuilder::new(n * n);
        for a in 0..n {
            for c in 0..n {
                let i = a * n + c;
                b.add_real(i, ((a + 1) % n) * n + c, -1.0);
                b.add_real(((a + 1) % n) * n + c, i, -1.0);
                b.add_real(i, a * n + (c + 1) % n, -1.0);
                b.add_real(a * n + (c + 1) % n, i, -1.0);
            }
        }
        let op = b.build();
        let r = lowest_eigenpairs(&op, 5, &SolverOptions::default()).unwrap();
        assert_eq!(r.method, Method::Lanczos);
        let mut exact: Vec<f64> = (0..n * n).map(|i| ring(i / n) + ring(i % n)).collect();
        exact.sort_by(f64::total_cmp);
        for k in 0..5 {
            assert!((r.eigenvalues[k] - exact[k]).abs() < 1e-9, "{k}: {} vs {}", r.eigenvalues[k], exact[k]);
        }
        assert_eq!(r.clusters[1].count, 4);
        assert!(r.max_residual() < 1e-8);
    }

    #[test]
    fn dense_toy_spectrum() {
        let op = build_blocking_toy(1.0, 0.1);
        let r = lowest_eigenpairs(&op, 8, &SolverOptions::default()).unwrap();
        assert_eq!(r.method, Method::Dense);
        assert!(r.max_residual() < 1e-12);
    }

    #[test]
    fn single_bond_arrival() {
        let g = 0.3;
        let mut b = crate::sparse::TripletBuilder::new(2);
        b.add_real(0, 1, -g);
        b.add_real(1, 0, -g);
        let op = b.build();
        let times: Vec<f64> = (0..=40).map(|k| k as f64 * 0.25).collect();
        let psi0 = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let trace = evolve(&op, &psi0, &times).unwrap();
        let arr = arrival_statistics(&trace, &[1], 0.5);
        for (t, p) in times.iter().zip(&arr.series) {
            assert!((p - (g * t).sin().powi(2)).abs() < 1e-10);
        }
        assert!(arr.reached());
    }

    #[test]
    fn bad_time_grid() {
        let op = SparseOp::identity(2);
        let psi0 = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        assert_eq!(evolve(&op, &psi0, &[1.0, 0.5]).unwrap_err(), SolveError::BadTimeGrid);
    }
}
