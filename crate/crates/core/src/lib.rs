//! Simulator for the space-time circuit-to-Hamiltonian construction: circuits
//! compiled onto a rotated grid of hopping spin-1/2 particles.

pub mod circuit;
pub mod gates;
pub mod grid;
pub mod hambuild;
pub mod sparse;
pub mod stringspace;
pub mod effective;
pub mod solve;
pub mod harness;
