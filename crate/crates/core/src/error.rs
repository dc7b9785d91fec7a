use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} variables, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("invalid constraint set: {0}")]
    InvalidConstraints(String),

    /// Malformed constraint file. `record` is the zero-based sample index when
    /// the problem is local to one sample.
    #[error("{}", format_parse(.path, *.line, *.column, *.record, .message))]
    Parse { path: Option<PathBuf>, line: Option<usize>, column: Option<usize>, record: Option<usize>, message: String },

    #[error("invalid bitstring {input:?}: {reason}")]
    InvalidBitstring { input: String, reason: String },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("no solutions (t = 0): Grover iteration count is undefined")]
    NoSolutions,

    #[error("trivial instance: every one of the {space} candidates is a solution (t = {t})")]
    TrivialInstance { t: u64, space: u64 },

    #[error("unsatisfiable constraint set: no minterm reproduces every sample")]
    Unsatisfiable,

    #[error("qubit {qubit} out of range for a {width}-qubit circuit")]
    QubitIndex { qubit: usize, width: usize },

    #[error("gate uses qubit {0} more than once")]
    OverlappingQubits(usize),

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("invalid noise model: {0}")]
    InvalidNoise(String),

    #[error("invalid plan: {0}")]
    InvalidPlan(String),

    #[error("thread pool: {0}")]
    ThreadPool(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

fn format_parse(
    path: &Option<PathBuf>,
    line: Option<usize>,
    column: Option<usize>,
    record: Option<usize>,
    message: &str,
) -> String {
    let mut out = String::new();
    if let Some(p) = path {
        out.push_str(&p.display().to_string());
        out.push(':');
    }
    if let Some(l) = line {
        out.push_str(&format!("{l}:"));
        if let Some(c) = column {
            out.push_str(&format!("{c}:"));
        }
    }
    if !out.is_empty() {
        out.push(' ');
    }
    if let Some(r) = record {
        out.push_str(&format!("sample #{r}: "));
    }
    out.push_str(message);
    out
}
