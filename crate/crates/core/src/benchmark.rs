//! The 8-qubit model with a 17-fold degenerate ground state, and the final
//! ground-state probabilities reported for it under a linear anneal of
//! duration `T = 30`.
//!
//! Qubits 1-4 (indices 0-3) form a ring with bias +1; each carries one
//! outer qubit (indices 4-7) with bias -1. Every coupling is +1. The graph
//! is a subgraph of a single K_{4,4} cell.

use crate::ising::IsingModel;

/// Core ring edges followed by core-to-outer edges (0-based).
pub const BENCHMARK_EDGES: [(usize, usize); 8] =
    [(0, 1), (1, 2), (2, 3), (0, 3), (0, 4), (1, 5), (2, 6), (3, 7)];

pub const BENCHMARK_FINAL_TIME: f64 = 30.0;

/// `(basis index, probability)` of the 17 ground states at `t = T`.
pub const TABLE_PROBABILITIES: [(usize, f64); 17] = [
    (0, 0.0582245),
    (1, 0.0598409),
    (2, 0.0598409),
    (3, 0.0620211),
    (4, 0.0598409),
    (5, 0.0627384),
    (6, 0.0620211),
    (7, 0.0651488),
    (8, 0.0598409),
    (9, 0.0620211),
    (10, 0.0627384),
    (11, 0.0651488),
    (12, 0.0620211),
    (13, 0.0651488),
    (14, 0.0651488),
    (15, 0.0677486),
    (255, 4.79745e-4),
];

pub fn benchmark_model() -> IsingModel {
    let alpha = vec![1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0];
    IsingModel::new(alpha, BENCHMARK_EDGES.iter().map(|&(i, j)| (i, j, 1.0)), 0.0)
        .expect("static model is valid")
}

/// Physical placement of the model on one Chimera cell (qubits 0-3 on one
/// side, 4-7 on the other). Ring neighbours sit on opposite sides.
pub const BENCHMARK_PLACEMENT: [usize; 8] = [0, 4, 1, 5, 6, 2, 7, 3];
