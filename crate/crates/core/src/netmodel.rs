//! Boolean regulatory networks, synchronous state transitions and constraint
//! datasets sampled from them.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::encoding::{MintermParams, MAX_VARIABLES};
use crate::error::{Error, Result};

/// Values of all `K` network variables at one time step. Bit `i` of the mask
/// is variable `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NetworkState {
    len: usize,
    bits: u32,
}

impl NetworkState {
    pub fn from_bits(bits: &[bool]) -> Self {
        assert!(bits.len() <= MAX_VARIABLES, "state wider than {MAX_VARIABLES} variables");
        let mask = bits.iter().enumerate().fold(0u32, |m, (i, &b)| m | (b as u32) << i);
        Self { len: bits.len(), bits: mask }
    }

    pub fn from_mask(len: usize, mask: u32) -> Result<Self> {
        if len > MAX_VARIABLES || (len < 32 && mask >> len != 0) {
            return Err(Error::Dimension { expected: len, found: 32 - mask.leading_zeros() as usize });
        }
        Ok(Self { len, bits: mask })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn mask(&self) -> u32 {
        self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        i < self.len && self.bits >> i & 1 == 1
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProteinNetwork {
    variables: Vec<String>,
    rules: Vec<MintermParams>,
}

impl ProteinNetwork {
    pub fn new(variables: Vec<String>, rules: Vec<MintermParams>) -> Result<Self> {
        let k = variables.len();
        if k == 0 {
            return Err(Error::InvalidNetwork("a network needs at least one variable".into()));
        }
        if rules.len() != k {
            return Err(Error::InvalidNetwork(format!("{k} variables but {} transition rules", rules.len())));
        }
        check_names(&variables).map_err(Error::InvalidNetwork)?;
        for (name, rule) in variables.iter().zip(&rules) {
            if rule.k() != k {
                return Err(Error::InvalidNetwork(format!(
                    "rule for {name} is defined over {} variables, network has {k}",
                    rule.k()
                )));
            }
        }
        Ok(Self { variables, rules })
    }

    /// Five-protein cortical patterning network (Fgf8, Emx2, Pax6, Sp8,
    /// COUP-TFI).
    pub fn cortex() -> Self {
        const FGF8: usize = 0;
        const EMX2: usize = 1;
        const PAX6: usize = 2;
        const SP8: usize = 3;
        const COUP: usize = 4;
        let rule = |lits: &[(usize, bool)]| MintermParams::from_literals(5, lits).expect("static rule");
        let rules = vec![
            rule(&[(FGF8, false), (EMX2, true), (SP8, false)]),
            rule(&[(FGF8, true), (PAX6, true), (COUP, false), (SP8, true)]),
            rule(&[(EMX2, true), (COUP, true), (SP8, false)]),
            rule(&[(FGF8, false), (EMX2, true)]),
            rule(&[(FGF8, true), (SP8, true)]),
        ];
        let names = ["Fgf8", "Emx2", "Pax6", "Sp8", "COUP-TFI"].map(String::from).to_vec();
        Self::new(names, rules).expect("static network")
    }

    pub fn k(&self) -> usize {
        self.variables.len()
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn rules(&self) -> &[MintermParams] {
        &self.rules
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    pub fn rule(&self, name: &str) -> Option<&MintermParams> {
        self.index_of(name).map(|i| &self.rules[i])
    }

    /// Synchronous update: every variable reads the same current state.
    pub fn step(&self, state: &NetworkState) -> Result<NetworkState> {
        if state.len() != self.k() {
            return Err(Error::Dimension { expected: self.k(), found: state.len() });
        }
        Ok(self.step_mask(state.mask()))
    }

    fn step_mask(&self, mask: u32) -> NetworkState {
        let bits = self.rules.iter().enumerate().fold(0u32, |acc, (i, r)| acc | (r.evaluate_mask(mask) as u32) << i);
        NetworkState { len: self.k(), bits }
    }

    pub fn sample_constraints(
        &self,
        target: &str,
        count: usize,
        seed: u64,
        mode: SamplingMode,
    ) -> Result<ConstraintSet> {
        let t = self
            .index_of(target)
            .ok_or_else(|| Error::InvalidConstraints(format!("unknown target variable {target:?}")))?;
        let k = self.k();
        let space = 1u64 << k;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sample = |mask: u32| SampleConstraint {
            input: NetworkState { len: k, bits: mask },
            output: self.rules[t].evaluate_mask(mask),
        };
        let samples: Vec<SampleConstraint> = match mode {
            SamplingMode::FullTable => (0..space as u32).map(sample).collect(),
            SamplingMode::RandomStates => {
                if count == 0 || count as u64 > space {
                    return Err(Error::Capacity(format!(
                        "cannot draw {count} distinct states from a {k}-variable network ({space} states)"
                    )));
                }
                index::sample(&mut rng, space as usize, count).into_iter().map(|s| sample(s as u32)).collect()
            }
            SamplingMode::Trajectory => {
                if count == 0 {
                    return Err(Error::Capacity("trajectory needs at least one transition".into()));
                }
                let mut state = rng.gen_range(0..space) as u32;
                let mut out = Vec::with_capacity(count);
                for _ in 0..count {
                    out.push(sample(state));
                    state = self.step_mask(state).mask();
                }
                out
            }
        };
        ConstraintSet::new(self.variables.clone(), target.to_string(), samples)
    }
}

fn check_names(names: &[String]) -> std::result::Result<(), String> {
    let mut seen = HashSet::new();
    for n in names {
        if n.is_empty() {
            return Err("variable names must be non-empty".into());
        }
        if !seen.insert(n.as_str()) {
            return Err(format!("duplicate variable name {n:?}"));
        }
    }
    if names.len() > MAX_VARIABLES {
        return Err(format!("at most {MAX_VARIABLES} variables are supported"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SamplingMode {
    RandomStates,
    Trajectory,
    FullTable,
}

impl FromStr for SamplingMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "random-states" => Ok(Self::RandomStates),
            "trajectory" => Ok(Self::Trajectory),
            "full-table" => Ok(Self::FullTable),
            other => Err(format!("unknown sampling mode {other:?}")),
        }
    }
}

impl fmt::Display for SamplingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::RandomStates => "random-states",
            Self::Trajectory => "trajectory",
            Self::FullTable => "full-table",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SampleConstraint {
    pub input: NetworkState,
    pub output: bool,
}

/// One B-SAT instance: the samples that the target's rule must reproduce.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSet {
    variables: Vec<String>,
    target: String,
    samples: Vec<SampleConstraint>,
}

impl ConstraintSet {
    /// Validates and deduplicates. First occurrence order is kept.
    pub fn new(variables: Vec<String>, target: String, samples: Vec<SampleConstraint>) -> Result<Self> {
        if variables.is_empty() {
            return Err(Error::InvalidConstraints("no variables".into()));
        }
        check_names(&variables).map_err(Error::InvalidConstraints)?;
        if !variables.contains(&target) {
            return Err(Error::InvalidConstraints(format!("target {target:?} is not one of the variables")));
        }
        let k = variables.len();
        let mut seen: BTreeMap<u32, (usize, bool)> = BTreeMap::new();
        let mut kept = Vec::with_capacity(samples.len());
        for (i, s) in samples.into_iter().enumerate() {
            if s.input.len() != k {
                return Err(Error::Parse {
                    path: None,
                    line: None,
                    column: None,
                    record: Some(i),
                    message: format!("input has {} values, expected {k}", s.input.len()),
                });
            }
            match seen.get(&s.input.mask()) {
                Some(&(_, out)) if out == s.output => continue,
                Some(&(first, _)) => {
                    return Err(Error::Parse {
                        path: None,
                        line: None,
                        column: None,
                        record: Some(i),
                        message: format!(
                            "contradicts sample #{first}: same input {:?} with a different output",
                            s.input.to_bits()
                        ),
                    })
                }
                None => {
                    seen.insert(s.input.mask(), (i, s.output));
                    kept.push(s);
                }
            }
        }
        Ok(Self { variables, target, samples: kept })
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn k(&self) -> usize {
        self.variables.len()
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn samples(&self) -> &[SampleConstraint] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn with_samples(&self, samples: Vec<SampleConstraint>) -> Result<Self> {
        Self::new(self.variables.clone(), self.target.clone(), samples)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: ConstraintFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: None,
            line: Some(e.line()),
            column: Some(e.column()),
            record: None,
            message: e.to_string(),
        })?;
        raw.into_constraint_set()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text).map_err(|e| match e {
            Error::Parse { line, column, record, message, .. } => {
                Error::Parse { path: Some(path.to_path_buf()), line, column, record, message }
            }
            other => other,
        })
    }

    pub fn to_json_string(&self) -> String {
        let file = ConstraintFile {
            variables: self.variables.clone(),
            target: self.target.clone(),
            samples: self
                .samples
                .iter()
                .map(|s| SampleRecord { input: s.input.to_bits(), output: s.output as u8 })
                .collect(),
        };
        let mut text = serde_json::to_string_pretty(&file).expect("plain data serializes");
        text.push('\n');
        text
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstraintFile {
    variables: Vec<String>,
    target: String,
    samples: Vec<SampleRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleRecord {
    input: Vec<u8>,
    output: u8,
}

impl ConstraintFile {
    fn into_constraint_set(self) -> Result<ConstraintSet> {
        let k = self.variables.len();
        let record_err =
            |i: usize, message: String| Error::Parse { path: None, line: None, column: None, record: Some(i), message };
        if k > MAX_VARIABLES {
            return Err(Error::Capacity(format!("at most {MAX_VARIABLES} variables are supported")));
        }
        let mut samples = Vec::with_capacity(self.samples.len());
        for (i, rec) in self.samples.into_iter().enumerate() {
            if rec.input.len() != k {
                return Err(record_err(i, format!("input has {} values, expected {k}", rec.input.len())));
            }
            if let Some(v) = rec.input.iter().find(|&&v| v > 1) {
                return Err(record_err(i, format!("input value {v} is not 0 or 1")));
            }
            if rec.output > 1 {
                return Err(record_err(i, format!("output value {} is not 0 or 1", rec.output)));
            }
            let bits: Vec<bool> = rec.input.iter().map(|&v| v == 1).collect();
            samples.push(SampleConstraint { input: NetworkState::from_bits(&bits), output: rec.output == 1 });
        }
        ConstraintSet::new(self.variables, self.target, samples)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(bits: [u8; 5]) -> NetworkState {
        NetworkState::from_bits(&bits.map(|b| b == 1))
    }

    #[test]
    fn cortex_rules_render_as_published() {
        let net = ProteinNetwork::cortex();
        let names = net.variables().to_vec();
        let render = |n: &str| net.rule(n).unwrap().format(&names).unwrap();
        assert_eq!(render("Fgf8"), "Fgf8 ∧ ¬Emx2 ∧ Sp8");
        assert_eq!(render("Emx2"), "¬Fgf8 ∧ ¬Pax6 ∧ ¬Sp8 ∧ COUP-TFI");
        assert_eq!(render("Pax6"), "¬Emx2 ∧ Sp8 ∧ ¬COUP-TFI");
        assert_eq!(render("Sp8"), "Fgf8 ∧ ¬Emx2");
        assert_eq!(render("COUP-TFI"), "¬Fgf8 ∧ ¬Sp8");
    }

    #[test]
    fn step_examples() {
        let net = ProteinNetwork::cortex();
        assert!(net.step(&state([1, 0, 1, 1, 0])).unwrap().get(0));
        assert_eq!(net.step(&state([0, 0, 0, 0, 0])).unwrap(), state([0, 0, 0, 0, 1]));
        assert_eq!(net.step(&state([1, 1, 1, 1, 1])).unwrap(), state([0, 0, 0, 0, 0]));
    }

    #[test]
    fn step_rejects_wrong_length() {
        let net = ProteinNetwork::cortex();
        let s = NetworkState::from_bits(&[true, false]);
        assert!(matches!(net.step(&s), Err(Error::Dimension { expected: 5, found: 2 })));
    }

    #[test]
    fn network_validation() {
        let r = MintermParams::constant_true(2).unwrap();
        assert!(ProteinNetwork::new(vec![], vec![]).is_err());
        assert!(ProteinNetwork::new(vec!["a".into(), "a".into()], vec![r, r]).is_err());
        assert!(ProteinNetwork::new(vec!["a".into(), "".into()], vec![r, r]).is_err());
        assert!(ProteinNetwork::new(vec!["a".into(), "b".into()], vec![r]).is_err());
        let r3 = MintermParams::constant_true(3).unwrap();
        assert!(ProteinNetwork::new(vec!["a".into(), "b".into()], vec![r, r3]).is_err());
    }

    #[test]
    fn full_table_covers_every_input() {
        let net = ProteinNetwork::cortex();
        let c = net.sample_constraints("Fgf8", 0, 0, SamplingMode::FullTable).unwrap();
        assert_eq!(c.len(), 32);
        let distinct: HashSet<u32> = c.samples().iter().map(|s| s.input.mask()).collect();
        assert_eq!(distinct.len(), 32);
    }

    #[test]
    fn random_states_are_distinct_and_consistent() {
        let net = ProteinNetwork::cortex();
        let rule = *net.rule("Fgf8").unwrap();
        for seed in 0..20 {
            let c = net.sample_constraints("Fgf8", 8, seed, SamplingMode::RandomStates).unwrap();
            assert_eq!(c.len(), 8);
            let distinct: HashSet<u32> = c.samples().iter().map(|s| s.input.mask()).collect();
            assert_eq!(distinct.len(), 8);
            for s in c.samples() {
                assert_eq!(rule.evaluate(&s.input).unwrap(), s.output);
            }
        }
        let a = net.sample_constraints("Fgf8", 8, 3, SamplingMode::RandomStates).unwrap();
        let b = net.sample_constraints("Fgf8", 8, 3, SamplingMode::RandomStates).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn random_states_capacity() {
        let net = ProteinNetwork::cortex();
        assert!(matches!(net.sample_constraints("Fgf8", 40, 0, SamplingMode::RandomStates), Err(Error::Capacity(_))));
        assert!(net.sample_constraints("Fgf8", 32, 0, SamplingMode::RandomStates).is_ok());
        assert!(net.sample_constraints("Nope", 3, 0, SamplingMode::RandomStates).is_err());
    }

    #[test]
    fn trajectory_follows_dynamics_and_keeps_fixed_points() {
        let net = ProteinNetwork::cortex();
        let c = net.sample_constraints("COUP-TFI", 12, 5, SamplingMode::Trajectory).unwrap();
        // consecutive inputs are linked by the update rule until a repeat is deduplicated
        let inputs: Vec<NetworkState> = c.samples().iter().map(|s| s.input).collect();
        for w in inputs.windows(2) {
            assert_eq!(net.step(&w[0]).unwrap(), w[1]);
        }
        for s in c.samples() {
            assert_eq!(net.step(&s.input).unwrap().get(4), s.output);
        }
    }

    #[test]
    fn duplicates_are_dropped_and_contradictions_rejected() {
        let names: Vec<String> = vec!["a".into(), "b".into()];
        let s = |a: bool, b: bool, out: bool| SampleConstraint { input: NetworkState::from_bits(&[a, b]), output: out };
        let c =
            ConstraintSet::new(names.clone(), "a".into(), vec![s(true, false, true), s(true, false, true)]).unwrap();
        assert_eq!(c.len(), 1);
        let err = ConstraintSet::new(names.clone(), "a".into(), vec![s(true, false, true), s(true, false, false)])
            .unwrap_err();
        assert!(err.to_string().contains("sample #1"), "{err}");
        assert!(ConstraintSet::new(names, "c".into(), vec![]).is_err());
    }

    #[test]
    fn json_round_trip_and_diagnostics() {
        let net = ProteinNetwork::cortex();
        let c = net.sample_constraints("Sp8", 6, 11, SamplingMode::RandomStates).unwrap();
        let back = ConstraintSet::from_json_str(&c.to_json_string()).unwrap();
        assert_eq!(back, c);

        let bad_value =
            r#"{"variables":["a","b"],"target":"a","samples":[{"input":[0,1],"output":1},{"input":[2,0],"output":0}]}"#;
        let err = ConstraintSet::from_json_str(bad_value).unwrap_err();
        assert!(err.to_string().contains("sample #1"), "{err}");

        let bad_len = r#"{"variables":["a","b"],"target":"a","samples":[{"input":[0],"output":1}]}"#;
        assert!(ConstraintSet::from_json_str(bad_len).unwrap_err().to_string().contains("sample #0"));

        let syntax = "{\n  \"variables\": [\"a\"],\n  \"target\": \"a\",\n  \"samples\": [ oops ]\n}";
        let err = ConstraintSet::from_json_str(syntax).unwrap_err();
        assert!(err.to_string().starts_with("4:"), "{err}");
    }
}
