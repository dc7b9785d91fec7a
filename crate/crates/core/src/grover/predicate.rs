use super::PARAMS_REGISTER;
use crate::error::Result;
use crate::netmodel::ConstraintSet;
use crate::qsim::{Circuit, PhasePredicate};
use crate::satcore::CompiledConstraints;

/// Phase table over candidate indices: marked iff the decoded minterm
/// reproduces every sample.
pub fn solution_predicate(c: &ConstraintSet) -> PhasePredicate {
    let compiled = CompiledConstraints::new(c);
    PhasePredicate::tabulate(format!("verify[{}; J={}]", c.target(), c.len()), 2 * c.k(), |idx| {
        compiled.accepts_index(idx)
    })
}

/// Ancilla-free oracle: one diagonal gate on the `2K` parameter qubits.
pub fn build_predicate_oracle(c: &ConstraintSet) -> Result<Circuit> {
    let mut circuit = Circuit::new();
    let params = circuit.add_register(PARAMS_REGISTER, 2 * c.k())?;
    circuit.diagonal(params.qubits().collect(), solution_predicate(c))?;
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::{NetworkState, ProteinNetwork, SampleConstraint, SamplingMode};
    use crate::qsim::run_circuit;
    use crate::satcore::enumerate_solutions;

    /// Phases the oracle leaves on each parameter basis state.
    fn phases(c: &ConstraintSet) -> Vec<f64> {
        let oracle = build_predicate_oracle(c).unwrap();
        (0..1u64 << (2 * c.k())).map(|b| run_circuit(&oracle, b).unwrap().amplitude(b).re).collect()
    }

    #[test]
    fn empty_set_flips_everything() {
        let c = ConstraintSet::new(vec!["a".into(), "b".into()], "a".into(), vec![]).unwrap();
        assert!(phases(&c).iter().all(|&p| p == -1.0));
    }

    #[test]
    fn k1_single_constraint_flips_three() {
        let c = ConstraintSet::new(
            vec!["s1".into()],
            "s1".into(),
            vec![SampleConstraint { input: NetworkState::from_bits(&[true]), output: true }],
        )
        .unwrap();
        assert_eq!(phases(&c), vec![-1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn full_table_flips_the_fgf8_class() {
        let net = ProteinNetwork::cortex();
        let c = net.sample_constraints("Fgf8", 0, 0, SamplingMode::FullTable).unwrap();
        let marked: Vec<u64> = phases(&c).iter().enumerate().filter(|(_, &p)| p < 0.0).map(|(i, _)| i as u64).collect();
        let expected: Vec<u64> = enumerate_solutions(&c).unwrap().iter().map(|b| b.index()).collect();
        assert_eq!(marked, expected);
        assert_eq!(marked.len(), 4);
    }
}
