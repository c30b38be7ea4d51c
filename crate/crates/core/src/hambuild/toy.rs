//! Three-qubit blocking model: a particle on qubit 1 blocks the hop 2 -> 3.

use crate::sparse::{SparseOp, TripletBuilder};

/// `Delta |11><11|_{13} - g (s3+ s2- + h.c.)` on 3 qubits, qubit 1 the most
/// significant bit.
pub fn build_blocking_toy(delta: f64, g: f64) -> SparseOp {
    let mut b = TripletBuilder::new(8);
    for state in 0..8usize {
        let (q1, q2, q3) = ((state >> 2) & 1, (state >> 1) & 1, state & 1);
        if q1 == 1 && q3 == 1 {
            b.add_real(state, state, delta);
        }
        if q2 == 1 && q3 == 0 {
            let to = state ^ 0b011;
            b.add_real(to, state, -g);
            b.add_real(state, to, -g);
        }
    }
    b.build()
}
