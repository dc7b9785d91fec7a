//! Identify the Boolean transition logic of a regulatory network variable
//! from sparse (state, next value) samples.
//!
//! The candidate rules are minterms over the network's `K` variables, encoded
//! in `2K` parameter bits ([`encoding`]). Samples ([`netmodel`]) turn the
//! choice of rule into a satisfiability problem that is solved both
//! exhaustively ([`satcore`]) and by Grover search ([`grover`]) on a dense
//! statevector simulator ([`qsim`]). [`report`] ranks measured bitstrings and
//! grades them against the exhaustive solver.

pub mod encoding;
pub mod error;
pub mod grover;
pub mod netmodel;
pub mod qsim;
pub mod report;
pub mod satcore;

pub use encoding::{BooleanExpression, MintermParams, ParamBitstring, BIT_CONVENTION};
pub use error::{Error, Result};
pub use grover::{run_grover, GroverPlan, GroverRun, Iterations, OracleKind};
pub use netmodel::{ConstraintSet, NetworkState, ProteinNetwork, SampleConstraint, SamplingMode};
pub use qsim::{NoiseModel, SolutionHistogram};
pub use report::RunReport;
