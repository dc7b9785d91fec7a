//! Shot sampling, noiseless and with per-shot Pauli trajectories.
//!
//! Every shot draws from its own ChaCha stream, selected by the shot index
//! under the run seed, so a histogram does not depend on how shots are spread
//! over workers. Blocks of shots are counted independently and merged by
//! integer addition.
//!
//! A noisy shot first samples where its gate errors fall (geometric gaps over
//! the flattened gate/qubit touch sequence). Shots without errors share the
//! noiseless output distribution. Shots with errors resume from the nearest
//! cached noiseless prefix state instead of replaying the whole circuit.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::circuit::{Circuit, Register};
use super::noise::{NoiseModel, Pauli};
use super::state::Statevector;
use crate::error::{Error, Result};

const SHOT_BLOCK: u64 = 256;

/// Memory allowed for cached prefix states of one noisy run.
const SNAPSHOT_BUDGET_BYTES: usize = 64 << 20;

pub fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}

/// Runs `circuit` from the basis state `initial`.
pub fn run_circuit(circuit: &Circuit, initial: u64) -> Result<Statevector> {
    let mut sv = Statevector::basis(circuit.width(), initial)?;
    for g in circuit.gates() {
        sv.apply_unchecked(g);
    }
    Ok(sv)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramMetadata {
    pub register: String,
    pub seed: u64,
    pub noise: NoiseModel,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convention: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solutions: Option<u64>,
}

/// Measured register value -> count. Serialized with the values written as
/// fixed-width binary, most significant (highest) qubit first.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionHistogram {
    pub width: usize,
    pub shots: u64,
    pub counts: BTreeMap<u64, u64>,
    pub metadata: HistogramMetadata,
}

impl SolutionHistogram {
    pub fn label(&self, value: u64) -> String {
        format!("{value:0width$b}", width = self.width)
    }

    pub fn probability(&self, value: u64) -> f64 {
        self.counts.get(&value).copied().unwrap_or(0) as f64 / self.shots as f64
    }

    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.counts.keys().copied()
    }

    /// Fraction of shots whose value satisfies `pred`.
    pub fn mass_where(&self, pred: impl Fn(u64) -> bool) -> f64 {
        let hits: u64 = self.counts.iter().filter(|(&v, _)| pred(v)).map(|(_, &c)| c).sum();
        hits as f64 / self.shots as f64
    }

    pub fn to_json_pretty(&self) -> String {
        let mut text = serde_json::to_string_pretty(&HistogramFile::from(self)).expect("plain data");
        text.push('\n');
        text
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: HistogramFile = serde_json::from_str(text)?;
        let mut counts = BTreeMap::new();
        for (label, count) in file.counts {
            if label.len() != file.width {
                return Err(Error::InvalidBitstring { input: label, reason: format!("expected {} bits", file.width) });
            }
            let value = u64::from_str_radix(&label, 2)
                .map_err(|e| Error::InvalidBitstring { input: label.clone(), reason: e.to_string() })?;
            counts.insert(value, count);
        }
        let total: u64 = counts.values().sum();
        if total != file.shots {
            return Err(Error::InvalidPlan(format!("counts sum to {total}, shots is {}", file.shots)));
        }
        Ok(Self { width: file.width, shots: file.shots, counts, metadata: file.metadata })
    }
}

#[derive(Serialize, Deserialize)]
struct HistogramFile {
    width: usize,
    shots: u64,
    metadata: HistogramMetadata,
    counts: BTreeMap<String, u64>,
}

impl From<&SolutionHistogram> for HistogramFile {
    fn from(h: &SolutionHistogram) -> Self {
        Self {
            width: h.width,
            shots: h.shots,
            metadata: h.metadata.clone(),
            counts: h.counts.iter().map(|(&v, &c)| (h.label(v), c)).collect(),
        }
    }
}

/// Samples `shots` measurements of `measured` after running `circuit` from
/// `|0...0>`. Work is spread over the current rayon pool.
pub fn sample_shots(
    circuit: &Circuit,
    measured: &Register,
    shots: u64,
    seed: u64,
    noise: &NoiseModel,
) -> Result<SolutionHistogram> {
    if shots == 0 {
        return Err(Error::InvalidPlan("shots must be at least 1".into()));
    }
    noise.validate()?;
    if circuit.register(measured.name()) != Some(measured) {
        return Err(Error::InvalidPlan(format!("register {:?} is not part of the circuit", measured.name())));
    }
    let engine = ShotEngine::prepare(circuit, measured, noise)?;
    let blocks = shots.div_ceil(SHOT_BLOCK);
    let counts = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let start = b * SHOT_BLOCK;
            let end = (start + SHOT_BLOCK).min(shots);
            engine.run_block(seed, start..end)
        })
        .reduce(BTreeMap::new, merge_counts);
    Ok(SolutionHistogram {
        width: measured.width(),
        shots,
        counts,
        metadata: HistogramMetadata {
            register: measured.name().to_string(),
            seed,
            noise: *noise,
            convention: None,
            oracle: None,
            iterations: None,
            solutions: None,
        },
    })
}

fn merge_counts(mut a: BTreeMap<u64, u64>, b: BTreeMap<u64, u64>) -> BTreeMap<u64, u64> {
    for (v, c) in b {
        *a.entry(v).or_default() += c;
    }
    a
}

struct ShotEngine<'a> {
    circuit: &'a Circuit,
    offset: usize,
    width: usize,
    noise: NoiseModel,
    /// Cumulative noiseless distribution of the measured register.
    final_cdf: Vec<f64>,
    /// `touch_start[g]` is the flattened index of gate `g`'s first touched
    /// qubit; the last entry is the total.
    touch_start: Vec<u64>,
    /// `(gates applied, state)` in increasing order; always starts at 0.
    snapshots: Vec<(usize, Statevector)>,
}

impl<'a> ShotEngine<'a> {
    fn prepare(circuit: &'a Circuit, measured: &Register, noise: &NoiseModel) -> Result<Self> {
        let mut touch_start = Vec::with_capacity(circuit.len() + 1);
        let mut acc = 0u64;
        for g in circuit.gates() {
            touch_start.push(acc);
            acc += g.touched_count() as u64;
        }
        touch_start.push(acc);

        let mut sv = Statevector::new(circuit.width())?;
        let mut snapshots = vec![];
        let stride = if noise.has_gate_noise() {
            let state_bytes = sv.dim() * std::mem::size_of::<num_complex::Complex64>();
            let affordable = (SNAPSHOT_BUDGET_BYTES / state_bytes).max(1);
            snapshots.push((0, sv.clone()));
            Some(circuit.len().div_ceil(affordable).max(1))
        } else {
            None
        };
        for (i, g) in circuit.gates().iter().enumerate() {
            sv.apply_unchecked(g);
            if let Some(stride) = stride {
                let applied = i + 1;
                if applied % stride == 0 && applied < circuit.len() {
                    snapshots.push((applied, sv.clone()));
                }
            }
        }
        let final_cdf = cumulative(&sv.register_probabilities(measured.offset(), measured.width()));
        Ok(Self {
            circuit,
            offset: measured.offset(),
            width: measured.width(),
            noise: *noise,
            final_cdf,
            touch_start,
            snapshots,
        })
    }

    fn run_block(&self, seed: u64, shots: std::ops::Range<u64>) -> BTreeMap<u64, u64> {
        let mut counts = BTreeMap::new();
        let mut scratch: Option<Statevector> = None;
        let mut events = Vec::new();
        for shot in shots {
            let mut rng = shot_rng(seed, shot);
            events.clear();
            if self.noise.has_gate_noise() {
                self.sample_errors(&mut rng, &mut events);
            }
            let mut value = if events.is_empty() {
                draw(&self.final_cdf, &mut rng)
            } else {
                let sv = scratch.get_or_insert_with(|| self.snapshots[0].1.clone());
                self.replay_with_errors(sv, &events);
                draw(&cumulative(&sv.register_probabilities(self.offset, self.width)), &mut rng)
            };
            if self.noise.readout > 0.0 {
                for bit in 0..self.width {
                    if rng.gen::<f64>() < self.noise.readout {
                        value ^= 1 << bit;
                    }
                }
            }
            *counts.entry(value).or_default() += 1;
        }
        counts
    }

    /// Flattened touch positions that suffer an error, with the Pauli drawn.
    fn sample_errors(&self, rng: &mut ChaCha8Rng, events: &mut Vec<(u64, Pauli)>) {
        let total = *self.touch_start.last().expect("non-empty");
        let p = self.noise.depolarizing;
        let log_keep = (1.0 - p).ln();
        let mut pos = 0u64;
        loop {
            let gap = if p >= 1.0 {
                0
            } else {
                // U in (0, 1]; floor(ln U / ln(1-p)) ~ Geometric(p) failures
                let u = 1.0 - rng.gen::<f64>();
                let g = (u.ln() / log_keep).floor();
                if g >= (total - pos) as f64 {
                    break;
                }
                g as u64
            };
            pos += gap;
            if pos >= total {
                break;
            }
            events.push((pos, Pauli::from_index(rng.gen_range(0..3))));
            pos += 1;
        }
    }

    fn replay_with_errors(&self, sv: &mut Statevector, events: &[(u64, Pauli)]) {
        let first_gate = self.gate_of(events[0].0);
        let (start, snap) =
            self.snapshots.iter().rev().find(|(applied, _)| *applied <= first_gate).expect("snapshot at 0");
        sv.copy_from(snap);
        let mut pending = events.iter().peekable();
        for g in *start..self.circuit.len() {
            let gate = &self.circuit.gates()[g];
            sv.apply_unchecked(gate);
            let end = self.touch_start[g + 1];
            while let Some(&&(pos, pauli)) = pending.peek() {
                if pos >= end {
                    break;
                }
                let qubit = gate.touched().nth((pos - self.touch_start[g]) as usize).expect("in range");
                sv.apply_pauli(qubit, pauli);
                pending.next();
            }
        }
    }

    fn gate_of(&self, pos: u64) -> usize {
        self.touch_start.partition_point(|&s| s <= pos) - 1
    }
}

fn cumulative(p: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    p.iter()
        .map(|&x| {
            acc += x;
            acc
        })
        .collect()
}

fn draw(cdf: &[f64], rng: &mut ChaCha8Rng) -> u64 {
    let total = *cdf.last().expect("non-empty distribution");
    let x = rng.gen::<f64>() * total;
    let i = cdf.partition_point(|&c| c <= x);
    if i < cdf.len() {
        return i as u64;
    }
    // x landed on the rounding edge; take the last value with mass
    let last = cdf.iter().rposition(|&c| c < total).map_or(0, |j| j + 1);
    last as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_qubit(gates: impl FnOnce(&mut Circuit, &Register)) -> (Circuit, Register) {
        let mut c = Circuit::new();
        let r = c.add_register("q", 1).unwrap();
        gates(&mut c, &r);
        (c, r)
    }

    #[test]
    fn empty_circuit_keeps_initial_state() {
        let mut c = Circuit::new();
        c.add_register("q", 3).unwrap();
        let sv = run_circuit(&c, 0b101).unwrap();
        assert_eq!(sv.amplitude(0b101).re, 1.0);
    }

    #[test]
    fn x_everywhere_and_uniform_h() {
        let mut c = Circuit::new();
        let r = c.add_register("q", 4).unwrap();
        for q in r.qubits() {
            c.x(q).unwrap();
        }
        let sv = run_circuit(&c, 0).unwrap();
        assert!((sv.amplitude(0b1111).re - 1.0).abs() < 1e-15);

        let mut c = Circuit::new();
        let r = c.add_register("q", 4).unwrap();
        for q in r.qubits() {
            c.h(q).unwrap();
        }
        let sv = run_circuit(&c, 0).unwrap();
        for i in 0..16 {
            assert!((sv.amplitude(i).re - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn fair_coin_within_three_sigma() {
        let (c, r) = one_qubit(|c, r| c.h(r.qubit(0)).unwrap());
        let h = sample_shots(&c, &r, 10_000, 17, &NoiseModel::noiseless()).unwrap();
        let zeros = h.counts[&0] as f64;
        assert_eq!(h.counts.values().sum::<u64>(), 10_000);
        // sigma = sqrt(10000 * 0.25) = 50
        assert!((zeros - 5000.0).abs() < 150.0, "zeros = {zeros}");
    }

    #[test]
    fn certain_readout_flip() {
        let (c, r) = one_qubit(|_, _| {});
        let h = sample_shots(&c, &r, 500, 3, &NoiseModel::new(0.0, 1.0).unwrap()).unwrap();
        assert_eq!(h.counts.get(&1), Some(&500));
        assert_eq!(h.counts.len(), 1);
    }

    #[test]
    fn zero_shots_rejected() {
        let (c, r) = one_qubit(|_, _| {});
        assert!(sample_shots(&c, &r, 0, 0, &NoiseModel::noiseless()).is_err());
    }

    #[test]
    fn certain_depolarizing_randomizes_a_qubit() {
        // X then p = 1: X, Y or Z after the gate; X and Y flip back to 0
        let (c, r) = one_qubit(|c, r| c.x(r.qubit(0)).unwrap());
        let h = sample_shots(&c, &r, 3000, 5, &NoiseModel::new(1.0, 0.0).unwrap()).unwrap();
        let zeros = h.counts.get(&0).copied().unwrap_or(0) as f64 / 3000.0;
        assert!((zeros - 2.0 / 3.0).abs() < 0.04, "zeros fraction {zeros}");
    }

    #[test]
    fn histogram_json_round_trip() {
        let mut c = Circuit::new();
        let r = c.add_register("q", 3).unwrap();
        for q in r.qubits() {
            c.h(q).unwrap();
        }
        let h = sample_shots(&c, &r, 200, 1, &NoiseModel::new(0.01, 0.02).unwrap()).unwrap();
        let back = SolutionHistogram::from_json_str(&h.to_json_pretty()).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn noisy_runs_are_worker_count_independent() {
        let mut c = Circuit::new();
        let r = c.add_register("q", 4).unwrap();
        for q in r.qubits() {
            c.h(q).unwrap();
        }
        c.mcz(r.qubits().collect()).unwrap();
        for q in r.qubits() {
            c.h(q).unwrap();
        }
        let noise = NoiseModel::new(0.05, 0.01).unwrap();
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| sample_shots(&c, &r, 2000, 99, &noise).unwrap())
        };
        assert_eq!(run(1), run(4));
    }
}
