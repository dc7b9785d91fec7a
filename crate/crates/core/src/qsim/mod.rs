//! Dense statevector simulator with the small gate set Grover search needs.
//!
//! Amplitudes live in a flat array indexed by basis state, qubit 0 being the
//! least-significant bit. A register's value is the integer formed by its
//! qubits, its first qubit being bit 0.

mod circuit;
mod noise;
mod sampling;
mod state;

pub use circuit::{Circuit, Gate, GateKind, PhasePredicate, Register};
pub use noise::{NoiseModel, Pauli};
pub use sampling::{run_circuit, sample_shots, shot_rng, HistogramMetadata, SolutionHistogram};
pub use state::Statevector;

/// Largest circuit the simulator accepts unless overridden (2^26 amplitudes,
/// 1 GiB).
pub const DEFAULT_MAX_QUBITS: usize = 26;

/// Hard ceiling regardless of overrides; indices are `u64` and masks shift.
pub const ABSOLUTE_MAX_QUBITS: usize = 40;
