//! Fixtures shared by the benchmarks.

use gqca_core::{CellConfig, PulseSequence};

/// Twelve transport steps: the CU moves left by 12 cells.
pub fn transport() -> PulseSequence {
    "B0 A0 B0 A0 B0 A0 B0 A0 B0 A0 B0 A0".parse().expect("valid sequence")
}

/// `n_qubits` zero qubits at pitch 8 with the CU to their right.
pub fn row_of_qubits(n_qubits: usize) -> CellConfig {
    let mut s = String::from("d");
    for _ in 0..n_qubits {
        s.push_str("uudddddd");
    }
    s.push_str("uudduu");
    s.push_str(&"d".repeat(40));
    s.parse().expect("valid config")
}
