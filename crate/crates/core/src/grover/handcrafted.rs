//! Gate-by-gate oracle with ancilla registers.
//!
//! Registers, bottom to top: `params` (2K, interleaved include/negate pairs),
//! `t` (K scratch qubits), `flags` (one per sample), `phase` (1).
//!
//! For sample `j` with input `s` and output `y`, the compute block is
//!
//! 1. for each variable `i`: `X(negate_i)` if `s_i = 0`, then
//!    `CCX(include_i, negate_i -> t_i)`, then undo the `X`;
//! 2. `X` on every `t_i`, `MCX(t -> flag_j)`, `X` on every `t_i` again;
//! 3. `X(flag_j)` if `y = 0`;
//! 4. repeat step 1, which returns `t` to `|0...0>`.
//!
//! Why `flag_j` ends up 1 exactly when the candidate reproduces sample `j`:
//!
//! * The literal of an included variable is `s_i XOR negate_i`, and clause `i`
//!   is violated when the variable is included and its literal is 0. For
//!   `s_i = 1` that is `include_i AND negate_i`; for `s_i = 0` it is
//!   `include_i AND NOT negate_i`. Step 1 writes exactly this into `t_i`
//!   (which starts at 0), the conditional `X` supplying the negation.
//! * The minterm evaluates to 1 iff no clause is violated, i.e. iff every
//!   `t_i` is 0. Step 2 is an MCX with all-negative controls on `t`, so
//!   `flag_j` (starting at 0) becomes the minterm value.
//! * The sample is reproduced iff minterm value = `y`. For `y = 1` that is the
//!   flag itself; for `y = 0` step 3 inverts it.
//! * Step 1 is a product of self-inverse gates whose controls (`params`) are
//!   never modified, so applying it again XORs the same values into `t` and
//!   clears it. Parameters are restored by the paired `X`s.
//!
//! After every sample is computed, `X(phase) MCZ(flags, phase) X(phase)`
//! flips the sign iff all flags are 1 (the phase qubit sits at 0, so the
//! conjugation makes it a satisfied control; with no samples this is a global
//! -1, matching the predicate oracle). Finally all compute blocks are undone in
//! reverse order, returning `flags` and `t` to 0. Since every gate involved is
//! a permutation or a diagonal, the net action on `|b>|0...0>` is
//! `(-1)^{verify(b)} |b>|0...0>`.

use super::{include_qubit, negate_qubit, PARAMS_REGISTER};
use crate::error::{Error, Result};
use crate::netmodel::ConstraintSet;
use crate::qsim::{Circuit, Gate};

/// Total qubits the handcrafted oracle needs: `2K + K + J + 1`.
pub fn handcrafted_width(c: &ConstraintSet) -> usize {
    3 * c.k() + c.len() + 1
}

pub fn build_handcrafted_oracle(c: &ConstraintSet, max_qubits: usize) -> Result<Circuit> {
    let k = c.k();
    let width = handcrafted_width(c);
    if width > max_qubits {
        return Err(Error::Capacity(format!(
            "handcrafted oracle needs {width} qubits (3K + J + 1 with K = {k}, J = {}), \
             above the {max_qubits}-qubit limit; use the predicate oracle instead",
            c.len()
        )));
    }
    let mut circuit = Circuit::new();
    let params = circuit.add_register(PARAMS_REGISTER, 2 * k)?;
    let scratch = circuit.add_register("t", k)?;
    let flags = circuit.add_register("flags", c.len())?;
    let phase = circuit.add_register("phase", 1)?;

    let mut compute: Vec<Gate> = Vec::new();
    for (j, sample) in c.samples().iter().enumerate() {
        let violations: Vec<Gate> = (0..k)
            .flat_map(|i| {
                let inc = include_qubit(&params, k, i);
                let neg = negate_qubit(&params, k, i);
                let t = scratch.qubit(i);
                if sample.input.get(i) {
                    vec![Gate::ccx(inc, neg, t)]
                } else {
                    vec![Gate::x(neg), Gate::ccx(inc, neg, t), Gate::x(neg)]
                }
            })
            .collect();
        compute.extend(violations.iter().cloned());
        compute.extend(scratch.qubits().map(Gate::x));
        compute.push(Gate::mcx(scratch.qubits().collect(), flags.qubit(j)));
        compute.extend(scratch.qubits().map(Gate::x));
        if !sample.output {
            compute.push(Gate::x(flags.qubit(j)));
        }
        compute.extend(violations);
    }

    for g in &compute {
        circuit.push(g.clone())?;
    }
    let p = phase.qubit(0);
    circuit.x(p)?;
    circuit.mcz(flags.qubits().chain([p]).collect())?;
    circuit.x(p)?;
    circuit.push_inverse_of(&compute)?;
    Ok(circuit)
}
