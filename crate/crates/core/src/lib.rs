//! Simulation of quantum computation on a one-dimensional array of two
//! alternating cell types driven only by global, field-conditioned pulses.

pub mod classical;
pub mod codec;
pub mod decay;
pub mod error;
pub mod gate;
pub mod lattice;
pub mod library;
pub mod linalg;
pub mod parallel;
pub mod pulses;
pub mod readout;
pub mod rules;
pub mod spectra;
pub mod state;
pub mod synth;

pub use classical::BitArray;
pub use decay::{decay_channel, decay_channel_seeded, seeded_rng, SimRng};
pub use error::{Error, Result};
pub use gate::Gate1;
pub use lattice::{field_of, rank, unrank, Basis, CellConfig, CellLevel, CellType, FieldValue, Mode};
pub use linalg::CMatrix;
pub use num_complex::Complex64;
pub use rules::{
    apply_rule, apply_sequence, build_global_operator, classical_apply, classical_apply_sequence,
    PulseSequence, UpdateRule,
};
pub use state::{new_basis_state, QuantumState, Register, SparseState};
pub use codec::{decode, encode, extract_logical_action, Layout, LogicalAction, LogicalWord};
pub use library::{apply_gate, gate_program, verify_entry, Composer, EntryReport, Library, LibraryEntry};
pub use parallel::{
    compile_predicate, run_parallel_quantum, run_parallel_step, scaling_report, EnablePredicate, ParallelLayout,
    PulseBudget, ScalingReport,
};
pub use readout::{fluorescence_readout, fluorescence_readout_seeded, Readout};
pub use synth::{synthesize, GateKind, GateSpec, Orientation, SynthesisOutcome, SynthesisProblem, Synthesized};
pub use spectra::{multiplet_interval, overlap_margin, threshold_scan, Cutoff, InteractionModel, MultipletInterval};
