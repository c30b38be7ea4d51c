//! Single-qubit gate matrices.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use crate::sparse::C64;

/// Row-major 2x2 complex matrix, `m[row][col] = <row|U|col>`.
pub type Mat2 = [[C64; 2]; 2];

const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub const IDENTITY: Mat2 = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
pub const PAULI_X: Mat2 = [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]];
pub const HADAMARD: Mat2 =
    [[c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)], [c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)]];
pub const PHASE_S: Mat2 = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]];

pub fn phase_t() -> Mat2 {
    [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), C64::from_polar(1.0, FRAC_PI_4)]]
}

pub fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[c(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for col in 0..2 {
            out[r][col] = a[r][0] * b[0][col] + a[r][1] * b[1][col];
        }
    }
    out
}

pub fn dagger(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

/// `max |U U^dagger - I|`.
pub fn unitarity_error(u: &Mat2) -> f64 {
    let p = mul(u, &dagger(u));
    let mut err: f64 = 0.0;
    for r in 0..2 {
        for col in 0..2 {
            let want = if r == col { 1.0 } else { 0.0 };
            err = err.max((p[r][col] - want).norm());
        }
    }
    err
}

pub fn is_diagonal(u: &Mat2) -> bool {
    u[0][1].norm() == 0.0 && u[1][0].norm() == 0.0
}

pub fn max_diff(a: &Mat2, b: &Mat2) -> f64 {
    let mut err: f64 = 0.0;
    for r in 0..2 {
        for col in 0..2 {
            err = err.max((a[r][col] - b[r][col]).norm());
        }
    }
    err
}
