//! Grover search over the minterm parameter space.
//!
//! The parameter register holds `2K` qubits whose value is the candidate
//! index of [`crate::encoding`]: qubit `2K-1-2i` carries `include_i` and qubit
//! `2K-2-2i` carries `negate_i`. Measuring the register therefore yields the
//! candidate's printed bitstring directly.

mod handcrafted;
mod predicate;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::encoding::BIT_CONVENTION;
use crate::error::{Error, Result};
use crate::netmodel::ConstraintSet;
use crate::qsim::{self, Circuit, GateKind, NoiseModel, Register, SolutionHistogram};
use crate::satcore;

pub use handcrafted::{build_handcrafted_oracle, handcrafted_width};
pub use predicate::{build_predicate_oracle, solution_predicate};

pub const PARAMS_REGISTER: &str = "params";

/// Qubit carrying `include_i` inside the parameter register.
pub fn include_qubit(params: &Register, k: usize, var: usize) -> usize {
    params.qubit(2 * (k - 1 - var) + 1)
}

/// Qubit carrying `negate_i` inside the parameter register.
pub fn negate_qubit(params: &Register, k: usize, var: usize) -> usize {
    params.qubit(2 * (k - 1 - var))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleKind {
    /// Gate-by-gate oracle with ancilla registers.
    Handcrafted,
    /// A single diagonal gate on the parameter register.
    Predicate,
}

impl fmt::Display for OracleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OracleKind::Handcrafted => "handcrafted",
            OracleKind::Predicate => "predicate",
        })
    }
}

impl FromStr for OracleKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "handcrafted" => Ok(Self::Handcrafted),
            "predicate" => Ok(Self::Predicate),
            other => Err(format!("unknown oracle kind {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Iterations {
    /// `optimal_iterations` of the classically counted solutions.
    Auto,
    Fixed(usize),
}

/// `m = floor(pi / (4 asin(sqrt(t / 2^n))))`, at least 1.
pub fn optimal_iterations(t: u64, n: usize) -> Result<usize> {
    if n >= 64 {
        return Err(Error::Capacity(format!("{n} search qubits")));
    }
    let space = 1u64 << n;
    if t == 0 {
        return Err(Error::NoSolutions);
    }
    if t >= space {
        return Err(Error::TrivialInstance { t, space });
    }
    let theta = (t as f64 / space as f64).sqrt().asin();
    let m = (std::f64::consts::PI / (4.0 * theta)).floor() as usize;
    Ok(m.max(1))
}

/// Probability of measuring a solution after `m` rounds.
pub fn success_probability(t: u64, n: usize, m: usize) -> f64 {
    let theta = (t as f64 / (1u64 << n) as f64).sqrt().asin();
    ((2 * m + 1) as f64 * theta).sin().powi(2)
}

/// Inversion about the mean on the parameter register:
/// `H X MCZ X H` on every parameter qubit.
pub fn build_diffuser(params: &Register) -> Result<Circuit> {
    if params.offset() != 0 {
        return Err(Error::InvalidPlan("the parameter register must start at qubit 0".into()));
    }
    let mut c = Circuit::new();
    c.add_register(params.name(), params.width())?;
    let qubits: Vec<usize> = params.qubits().collect();
    for &q in &qubits {
        c.h(q)?;
    }
    for &q in &qubits {
        c.x(q)?;
    }
    c.mcz(qubits.clone())?;
    for &q in &qubits {
        c.x(q)?;
    }
    for &q in &qubits {
        c.h(q)?;
    }
    Ok(c)
}

/// A complete search circuit: `H` on the parameters, then `m` rounds of
/// oracle and diffuser.
#[derive(Debug, Clone)]
pub struct SearchCircuit {
    pub circuit: Circuit,
    pub params: Register,
}

impl SearchCircuit {
    pub fn build(oracle: &Circuit, iterations: usize) -> Result<Self> {
        let params = oracle
            .register(PARAMS_REGISTER)
            .cloned()
            .ok_or_else(|| Error::InvalidPlan("oracle has no parameter register".into()))?;
        let mut circuit = Circuit::with_registers_of(oracle);
        let diffuser = build_diffuser(&params)?;
        for q in params.qubits() {
            circuit.h(q)?;
        }
        for _ in 0..iterations {
            circuit.append(oracle)?;
            circuit.append(&diffuser)?;
        }
        Ok(Self { circuit, params })
    }
}

pub fn build_oracle(c: &ConstraintSet, kind: OracleKind, max_qubits: usize) -> Result<Circuit> {
    match kind {
        OracleKind::Predicate => {
            if 2 * c.k() > max_qubits {
                return Err(Error::Capacity(format!(
                    "{} parameter qubits exceed the {max_qubits}-qubit limit",
                    2 * c.k()
                )));
            }
            build_predicate_oracle(c)
        }
        OracleKind::Handcrafted => build_handcrafted_oracle(c, max_qubits),
    }
}

#[derive(Debug, Clone)]
pub struct GroverPlan {
    pub constraints: ConstraintSet,
    pub oracle: OracleKind,
    pub iterations: Iterations,
    pub shots: u64,
    pub seed: u64,
    pub noise: NoiseModel,
    pub max_qubits: usize,
    /// Size of a dedicated rayon pool; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl GroverPlan {
    pub fn new(constraints: ConstraintSet) -> Self {
        Self {
            constraints,
            oracle: OracleKind::Predicate,
            iterations: Iterations::Auto,
            shots: 10_000,
            seed: 0,
            noise: NoiseModel::noiseless(),
            max_qubits: qsim::DEFAULT_MAX_QUBITS,
            workers: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::InvalidPlan("shots must be at least 1".into()));
        }
        if self.iterations == Iterations::Fixed(0) {
            return Err(Error::InvalidPlan("iterations must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidPlan("workers must be at least 1".into()));
        }
        self.noise.validate()
    }
}

#[derive(Debug, Clone)]
pub struct GroverRun {
    pub histogram: SolutionHistogram,
    /// Classically counted solutions `t`.
    pub solutions: u64,
    pub iterations: usize,
    pub oracle: OracleKind,
    pub circuit_width: usize,
    /// Logical gate counts of the whole search circuit.
    pub gate_counts: BTreeMap<String, usize>,
}

pub fn run_grover(plan: &GroverPlan) -> Result<GroverRun> {
    plan.validate()?;
    match plan.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::ThreadPool(e.to_string()))?
            .install(|| run_grover_in_pool(plan)),
        None => run_grover_in_pool(plan),
    }
}

fn run_grover_in_pool(plan: &GroverPlan) -> Result<GroverRun> {
    let c = &plan.constraints;
    let n = 2 * c.k();
    let t = satcore::count_solutions(c)?;
    if t == 0 {
        return Err(Error::Unsatisfiable);
    }
    let m = match plan.iterations {
        Iterations::Fixed(m) => m,
        Iterations::Auto => optimal_iterations(t, n)?,
    };
    let oracle = build_oracle(c, plan.oracle, plan.max_qubits)?;
    let search = SearchCircuit::build(&oracle, m)?;
    let mut histogram = qsim::sample_shots(&search.circuit, &search.params, plan.shots, plan.seed, &plan.noise)?;
    histogram.metadata.convention = Some(BIT_CONVENTION.to_string());
    histogram.metadata.oracle = Some(plan.oracle.to_string());
    histogram.metadata.iterations = Some(m);
    histogram.metadata.solutions = Some(t);
    let gate_counts =
        search.circuit.gate_counts().into_iter().map(|(k, v): (GateKind, usize)| (k.to_string(), v)).collect();
    Ok(GroverRun {
        histogram,
        solutions: t,
        iterations: m,
        oracle: plan.oracle,
        circuit_width: search.circuit.width(),
        gate_counts,
    })
}
