//! Exhaustive B-SAT over the `4^K` minterm candidates.
//!
//! This is the classical ground truth: it counts solutions for the iteration
//! formula and grades every quantum measurement.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::encoding::{MintermParams, ParamBitstring};
use crate::error::{Error, Result};
use crate::netmodel::ConstraintSet;

/// Default largest `K` that [`enumerate_solutions`] will scan.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 16;

/// Ranges shorter than this are scanned on the calling thread.
const PARALLEL_CHUNK: u64 = 1 << 14;

/// Constraint samples packed as `(input mask, output)` pairs for the
/// allocation-free candidate check.
#[derive(Debug, Clone)]
pub struct CompiledConstraints {
    k: usize,
    samples: Vec<(u32, bool)>,
}

impl CompiledConstraints {
    pub fn new(c: &ConstraintSet) -> Self {
        Self { k: c.k(), samples: c.samples().iter().map(|s| (s.input.mask(), s.output)).collect() }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn accepts(&self, p: &MintermParams) -> bool {
        self.samples.iter().all(|&(input, output)| p.evaluate_mask(input) == output)
    }

    #[inline]
    pub fn accepts_index(&self, idx: u64) -> bool {
        self.accepts(&MintermParams::from_index_unchecked(self.k, idx))
    }
}

pub fn verify_params(p: &MintermParams, c: &ConstraintSet) -> Result<bool> {
    if p.k() != c.k() {
        return Err(Error::Dimension { expected: c.k(), found: p.k() });
    }
    Ok(CompiledConstraints::new(c).accepts(p))
}

pub fn enumerate_solutions(c: &ConstraintSet) -> Result<Vec<ParamBitstring>> {
    enumerate_solutions_with_limit(c, DEFAULT_ENUMERATION_LIMIT)
}

/// All satisfying bitstrings in ascending numeric order. The candidate range
/// is split across rayon workers and the per-chunk results concatenated in
/// range order, so the output does not depend on the worker count.
pub fn enumerate_solutions_with_limit(c: &ConstraintSet, max_k: usize) -> Result<Vec<ParamBitstring>> {
    let k = c.k();
    check_guard(k, max_k)?;
    let compiled = CompiledConstraints::new(c);
    let space = 1u64 << (2 * k);
    let chunks = space.div_ceil(PARALLEL_CHUNK);
    let parts: Vec<Vec<u64>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * PARALLEL_CHUNK;
            let end = (start + PARALLEL_CHUNK).min(space);
            (start..end).filter(|&idx| compiled.accepts_index(idx)).collect()
        })
        .collect();
    Ok(parts
        .into_iter()
        .flatten()
        .map(|idx| ParamBitstring::from_index(k, idx).expect("index within 2K bits"))
        .collect())
}

pub fn count_solutions(c: &ConstraintSet) -> Result<u64> {
    count_solutions_with_limit(c, DEFAULT_ENUMERATION_LIMIT)
}

pub fn count_solutions_with_limit(c: &ConstraintSet, max_k: usize) -> Result<u64> {
    let k = c.k();
    check_guard(k, max_k)?;
    let compiled = CompiledConstraints::new(c);
    let space = 1u64 << (2 * k);
    let chunks = space.div_ceil(PARALLEL_CHUNK);
    Ok((0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * PARALLEL_CHUNK;
            let end = (start + PARALLEL_CHUNK).min(space);
            (start..end).filter(|&idx| compiled.accepts_index(idx)).count() as u64
        })
        .sum())
}

fn check_guard(k: usize, max_k: usize) -> Result<()> {
    if k > max_k {
        return Err(Error::Capacity(format!(
            "exhaustive enumeration of 4^{k} candidates exceeds the K <= {max_k} guard; \
             raise it with --max-enum-k if you really mean it"
        )));
    }
    if 2 * k >= 64 {
        return Err(Error::Capacity(format!("K = {k} does not fit a 64-bit candidate index")));
    }
    Ok(())
}

/// One Boolean expression and how many of the given bitstrings encode it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpressionClass {
    pub canonical: MintermParams,
    pub class_size: u64,
}

impl ExpressionClass {
    pub fn bitstring(&self) -> ParamBitstring {
        ParamBitstring::from_params(&self.canonical)
    }
}

/// Groups bitstrings by canonical expression. Order: larger groups first,
/// ties by ascending canonical bitstring.
pub fn distinct_expressions(solutions: &[ParamBitstring]) -> Vec<ExpressionClass> {
    let mut groups: BTreeMap<ParamBitstring, u64> = BTreeMap::new();
    for b in solutions {
        let canon = ParamBitstring::from_params(&b.decode().canonicalize());
        *groups.entry(canon).or_default() += 1;
    }
    let mut out: Vec<ExpressionClass> =
        groups.into_iter().map(|(b, n)| ExpressionClass { canonical: b.decode(), class_size: n }).collect();
    // stable sort keeps the ascending-bitstring order among equal sizes
    out.sort_by_key(|e| std::cmp::Reverse(e.class_size));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::{NetworkState, ProteinNetwork, SampleConstraint, SamplingMode};

    fn one_var(samples: &[(bool, bool)]) -> ConstraintSet {
        ConstraintSet::new(
            vec!["s1".into()],
            "s1".into(),
            samples
                .iter()
                .map(|&(i, o)| SampleConstraint { input: NetworkState::from_bits(&[i]), output: o })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn generating_rule_verifies() {
        let net = ProteinNetwork::cortex();
        let c = net.sample_constraints("Fgf8", 10, 4, SamplingMode::RandomStates).unwrap();
        assert!(verify_params(net.rule("Fgf8").unwrap(), &c).unwrap());
    }

    #[test]
    fn two_variable_worked_example_verifies() {
        let c = ConstraintSet::new(
            vec!["s1".into(), "s2".into()],
            "s1".into(),
            vec![SampleConstraint { input: NetworkState::from_bits(&[true, false]), output: true }],
        )
        .unwrap();
        let p = MintermParams::new(2, 0b11, 0b10).unwrap();
        assert!(verify_params(&p, &c).unwrap());
        assert_eq!(p.format(c.variables()).unwrap(), "s1 ∧ ¬s2");
    }

    #[test]
    fn constant_true_fails_a_zero_output() {
        let c = one_var(&[(false, false)]);
        assert!(!verify_params(&MintermParams::constant_true(1).unwrap(), &c).unwrap());
    }

    #[test]
    fn verify_rejects_dimension_mismatch() {
        let c = one_var(&[(true, true)]);
        let p = MintermParams::constant_true(2).unwrap();
        assert!(matches!(verify_params(&p, &c), Err(Error::Dimension { .. })));
    }

    #[test]
    fn single_constraint_k1_hand_enumeration() {
        // candidates 00 TRUE, 01 TRUE (don't care), 10 s1, 11 ¬s1
        let sols = enumerate_solutions(&one_var(&[(true, true)])).unwrap();
        let text: Vec<String> = sols.iter().map(|b| b.to_string()).collect();
        assert_eq!(text, ["00", "01", "10"]);
        assert_eq!(distinct_expressions(&sols).len(), 2);
    }

    #[test]
    fn empty_set_admits_everything() {
        let c = ProteinNetwork::cortex()
            .sample_constraints("Fgf8", 1, 0, SamplingMode::RandomStates)
            .unwrap()
            .with_samples(vec![])
            .unwrap();
        assert_eq!(count_solutions(&c).unwrap(), 1024);
        let k1 = one_var(&[]);
        let sols = enumerate_solutions(&k1).unwrap();
        assert_eq!(sols.len(), 4);
        let exprs = distinct_expressions(&sols);
        assert_eq!(exprs.len(), 3);
        assert_eq!(exprs[0].class_size, 2);
        assert!(exprs[0].canonical.to_expression().is_constant_true());
    }

    #[test]
    fn full_table_fgf8_collapses_to_one_expression() {
        let net = ProteinNetwork::cortex();
        let c = net.sample_constraints("Fgf8", 0, 0, SamplingMode::FullTable).unwrap();
        let sols = enumerate_solutions(&c).unwrap();
        assert_eq!(sols.len(), 4);
        assert_eq!(count_solutions(&c).unwrap(), 4);
        let exprs = distinct_expressions(&sols);
        assert_eq!(exprs.len(), 1);
        assert_eq!(exprs[0].class_size, 4);
        assert_eq!(exprs[0].canonical.format(c.variables()).unwrap(), "Fgf8 ∧ ¬Emx2 ∧ Sp8");
    }

    #[test]
    fn guard_reports_override() {
        let names: Vec<String> = (0..17).map(|i| format!("v{i}")).collect();
        let c = ConstraintSet::new(names.clone(), "v0".into(), vec![]).unwrap();
        let err = enumerate_solutions(&c).unwrap_err();
        assert!(matches!(err, Error::Capacity(_)));
        assert!(err.to_string().contains("--max-enum-k"));
    }

    #[test]
    fn ascending_order() {
        let net = ProteinNetwork::cortex();
        let c = net.sample_constraints("Emx2", 5, 9, SamplingMode::RandomStates).unwrap();
        let sols = enumerate_solutions(&c).unwrap();
        assert!(sols.windows(2).all(|w| w[0] < w[1]));
    }
}
