use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A named, contiguous block of qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    name: String,
    width: usize,
    offset: usize,
}

impl Register {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    /// Global index of the register's `i`-th qubit.
    pub fn qubit(&self, i: usize) -> usize {
        assert!(i < self.width, "qubit {i} outside register {} of width {}", self.name, self.width);
        self.offset + i
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.offset..self.offset + self.width
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    X,
    H,
    Z,
    CX,
    CCX,
    MCX,
    MCZ,
    DiagonalPredicate,
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GateKind::X => "x",
            GateKind::H => "h",
            GateKind::Z => "z",
            GateKind::CX => "cx",
            GateKind::CCX => "ccx",
            GateKind::MCX => "mcx",
            GateKind::MCZ => "mcz",
            GateKind::DiagonalPredicate => "diagonal",
        })
    }
}

/// Phase table for a diagonal gate: entry `v` is `true` when the basis state
/// whose target qubits spell `v` (first target = bit 0) gets phase -1.
#[derive(Clone)]
pub struct PhasePredicate {
    label: String,
    marked: Arc<[bool]>,
}

impl PhasePredicate {
    pub fn tabulate(label: impl Into<String>, arity: usize, f: impl Fn(u64) -> bool) -> Self {
        let marked: Arc<[bool]> = (0..1u64 << arity).map(f).collect();
        Self { label: label.into(), marked }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn arity(&self) -> usize {
        self.marked.len().trailing_zeros() as usize
    }

    #[inline]
    pub fn is_marked(&self, value: u64) -> bool {
        self.marked[value as usize]
    }

    pub fn marked_count(&self) -> usize {
        self.marked.iter().filter(|&&m| m).count()
    }
}

impl fmt::Debug for PhasePredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PhasePredicate")
            .field("label", &self.label)
            .field("arity", &self.arity())
            .field("marked", &self.marked_count())
            .finish()
    }
}

#[derive(Debug, Clone)]
pub struct Gate {
    kind: GateKind,
    controls: Vec<usize>,
    targets: Vec<usize>,
    predicate: Option<PhasePredicate>,
}

impl Gate {
    pub fn x(q: usize) -> Self {
        Self::simple(GateKind::X, vec![], vec![q])
    }

    pub fn h(q: usize) -> Self {
        Self::simple(GateKind::H, vec![], vec![q])
    }

    pub fn z(q: usize) -> Self {
        Self::simple(GateKind::Z, vec![], vec![q])
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Self::simple(GateKind::CX, vec![control], vec![target])
    }

    pub fn ccx(c0: usize, c1: usize, target: usize) -> Self {
        Self::simple(GateKind::CCX, vec![c0, c1], vec![target])
    }

    /// X on `target` when every control is 1. Zero controls is a plain X.
    pub fn mcx(controls: Vec<usize>, target: usize) -> Self {
        Self::simple(GateKind::MCX, controls, vec![target])
    }

    /// Phase -1 on basis states where every listed qubit is 1.
    pub fn mcz(qubits: Vec<usize>) -> Self {
        Self::simple(GateKind::MCZ, vec![], qubits)
    }

    pub fn diagonal(targets: Vec<usize>, predicate: PhasePredicate) -> Self {
        Self { kind: GateKind::DiagonalPredicate, controls: vec![], targets, predicate: Some(predicate) }
    }

    fn simple(kind: GateKind, controls: Vec<usize>, targets: Vec<usize>) -> Self {
        Self { kind, controls, targets, predicate: None }
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn controls(&self) -> &[usize] {
        &self.controls
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn predicate(&self) -> Option<&PhasePredicate> {
        self.predicate.as_ref()
    }

    /// Controls followed by targets; the qubits that receive gate noise.
    pub fn touched(&self) -> impl Iterator<Item = usize> + '_ {
        self.controls.iter().chain(&self.targets).copied()
    }

    pub fn touched_count(&self) -> usize {
        self.controls.len() + self.targets.len()
    }

    pub fn validate(&self, width: usize) -> Result<()> {
        let mut used = 0u64;
        for q in self.touched() {
            if q >= width {
                return Err(Error::QubitIndex { qubit: q, width });
            }
            if used >> q & 1 == 1 {
                return Err(Error::OverlappingQubits(q));
            }
            used |= 1 << q;
        }
        let (c, t) = (self.controls.len(), self.targets.len());
        let ok = match self.kind {
            GateKind::X | GateKind::H | GateKind::Z => c == 0 && t == 1,
            GateKind::CX => c == 1 && t == 1,
            GateKind::CCX => c == 2 && t == 1,
            GateKind::MCX => t == 1,
            GateKind::MCZ => c == 0 && t >= 1,
            GateKind::DiagonalPredicate => c == 0 && t >= 1,
        };
        if !ok {
            return Err(Error::InvalidGate(format!("{} with {c} controls and {t} targets", self.kind)));
        }
        if self.kind == GateKind::DiagonalPredicate {
            match &self.predicate {
                Some(p) if p.arity() == t => {}
                Some(p) => {
                    return Err(Error::InvalidGate(format!(
                        "predicate {:?} has arity {} but the gate has {t} targets",
                        p.label(),
                        p.arity()
                    )))
                }
                None => return Err(Error::InvalidGate("diagonal gate without predicate".into())),
            }
        }
        Ok(())
    }
}

/// Ordered gate list over a fixed set of registers. Gates are validated on
/// insertion, so a built circuit is always runnable.
#[derive(Debug, Clone, Default)]
pub struct Circuit {
    width: usize,
    registers: Vec<Register>,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a register directly above the existing ones.
    pub fn add_register(&mut self, name: impl Into<String>, width: usize) -> Result<Register> {
        let name = name.into();
        if self.registers.iter().any(|r| r.name == name) {
            return Err(Error::InvalidGate(format!("duplicate register name {name:?}")));
        }
        let reg = Register { name, width, offset: self.width };
        self.width += width;
        self.registers.push(reg.clone());
        Ok(reg)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn register(&self, name: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.name == name)
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.width)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn x(&mut self, q: usize) -> Result<()> {
        self.push(Gate::x(q))
    }

    pub fn h(&mut self, q: usize) -> Result<()> {
        self.push(Gate::h(q))
    }

    pub fn z(&mut self, q: usize) -> Result<()> {
        self.push(Gate::z(q))
    }

    pub fn cx(&mut self, control: usize, target: usize) -> Result<()> {
        self.push(Gate::cx(control, target))
    }

    pub fn ccx(&mut self, c0: usize, c1: usize, target: usize) -> Result<()> {
        self.push(Gate::ccx(c0, c1, target))
    }

    pub fn mcx(&mut self, controls: Vec<usize>, target: usize) -> Result<()> {
        self.push(Gate::mcx(controls, target))
    }

    pub fn mcz(&mut self, qubits: Vec<usize>) -> Result<()> {
        self.push(Gate::mcz(qubits))
    }

    pub fn diagonal(&mut self, targets: Vec<usize>, predicate: PhasePredicate) -> Result<()> {
        self.push(Gate::diagonal(targets, predicate))
    }

    /// Appends `gates` in reverse order. Every gate in the set is its own
    /// inverse, so this undoes a previously appended sequence.
    pub fn push_inverse_of(&mut self, gates: &[Gate]) -> Result<()> {
        for g in gates.iter().rev() {
            self.push(g.clone())?;
        }
        Ok(())
    }

    /// An empty circuit with the same registers.
    pub fn with_registers_of(other: &Circuit) -> Self {
        Self { width: other.width, registers: other.registers.clone(), gates: vec![] }
    }

    /// Appends the gates of `fragment`, whose registers must be a prefix of
    /// this circuit's registers.
    pub fn append(&mut self, fragment: &Circuit) -> Result<()> {
        if fragment.registers.len() > self.registers.len()
            || fragment.registers.iter().zip(&self.registers).any(|(a, b)| a != b)
        {
            return Err(Error::InvalidGate("fragment registers do not match the circuit".into()));
        }
        self.gates.extend_from_slice(&fragment.gates);
        Ok(())
    }

    /// Logical gate counts by kind.
    pub fn gate_counts(&self) -> BTreeMap<GateKind, usize> {
        let mut counts = BTreeMap::new();
        for g in &self.gates {
            *counts.entry(g.kind).or_default() += 1;
        }
        counts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registers_are_contiguous() {
        let mut c = Circuit::new();
        let a = c.add_register("a", 3).unwrap();
        let b = c.add_register("b", 2).unwrap();
        assert_eq!((a.offset(), b.offset(), c.width()), (0, 3, 5));
        assert_eq!(b.qubits().collect::<Vec<_>>(), vec![3, 4]);
        assert!(c.add_register("a", 1).is_err());
    }

    #[test]
    fn invalid_gates_are_rejected() {
        let mut c = Circuit::new();
        c.add_register("q", 3).unwrap();
        assert!(matches!(c.x(3), Err(Error::QubitIndex { qubit: 3, width: 3 })));
        assert!(matches!(c.cx(1, 1), Err(Error::OverlappingQubits(1))));
        assert!(matches!(c.mcx(vec![0, 1], 1), Err(Error::OverlappingQubits(1))));
        assert!(c.mcz(vec![]).is_err());
        let p = PhasePredicate::tabulate("p", 2, |v| v == 3);
        assert!(c.diagonal(vec![0], p.clone()).is_err());
        assert!(c.diagonal(vec![0, 2], p).is_ok());
        assert!(c.ccx(0, 1, 2).is_ok());
        assert_eq!(c.len(), 2);
    }
}
