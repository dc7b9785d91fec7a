//! Statevector storage and gate kernels.
//!
//! X gates are never applied to memory. The state keeps a Pauli-X frame mask
//! and the logical amplitude of basis state `i` is `amps[i ^ frame]`; an X on
//! qubit `q` just toggles bit `q` of the frame. Other kernels read the frame:
//! controlled gates match their control pattern against it, single-qubit
//! unitaries on a framed qubit are applied as `X U X`.

use num_complex::Complex64;
use rayon::prelude::*;

use super::circuit::{Gate, GateKind, PhasePredicate};
use super::noise::Pauli;
use super::ABSOLUTE_MAX_QUBITS;
use crate::error::{Error, Result};

/// Loops over at least this many elements go to rayon.
const PAR_MIN_ELEMENTS: usize = 1 << 14;
const PAR_BLOCK: usize = 1 << 12;

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n: usize,
    amps: Vec<Complex64>,
    frame: u64,
}

impl Statevector {
    /// `|0...0>` on `n` qubits.
    pub fn new(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: u64) -> Result<Self> {
        if n > ABSOLUTE_MAX_QUBITS {
            return Err(Error::Capacity(format!("{n} qubits exceeds the {ABSOLUTE_MAX_QUBITS}-qubit ceiling")));
        }
        if index >> n != 0 {
            return Err(Error::QubitIndex { qubit: 64 - index.leading_zeros() as usize - 1, width: n });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index as usize] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps, frame: 0 })
    }

    /// Normalizes the given amplitudes.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if !len.is_power_of_two() {
            return Err(Error::InvalidGate(format!("{len} amplitudes is not a power of two")));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidGate("zero vector".into()));
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(Self { n: len.trailing_zeros() as usize, amps, frame: 0 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitude(&self, index: u64) -> Complex64 {
        self.amps[(index ^ self.frame) as usize]
    }

    /// Logical-order copy of all amplitudes.
    pub fn amplitudes(&self) -> Vec<Complex64> {
        (0..self.amps.len() as u64).map(|i| self.amplitude(i)).collect()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.amps.len() as u64).map(|i| self.amplitude(i).norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        if self.amps.len() >= PAR_MIN_ELEMENTS {
            self.amps.par_chunks(PAR_BLOCK).map(|c| c.iter().map(|a| a.norm_sqr()).sum::<f64>()).sum()
        } else {
            self.amps.iter().map(|a| a.norm_sqr()).sum()
        }
    }

    /// Probability distribution of the `width`-qubit register starting at
    /// `offset`, indexed by register value.
    pub fn register_probabilities(&self, offset: usize, width: usize) -> Vec<f64> {
        assert!(offset + width <= self.n, "register outside the state");
        let mask = (1u64 << width) - 1;
        let mut out = vec![0.0; 1 << width];
        let frame = self.frame;
        if self.amps.len() >= PAR_MIN_ELEMENTS && width < self.n {
            let partials: Vec<Vec<f64>> = self
                .amps
                .par_chunks(PAR_BLOCK.max(1 << width))
                .enumerate()
                .map(|(ci, chunk)| {
                    let base = (ci * PAR_BLOCK.max(1 << width)) as u64;
                    let mut local = vec![0.0; 1 << width];
                    for (j, a) in chunk.iter().enumerate() {
                        let logical = (base + j as u64) ^ frame;
                        local[(logical >> offset & mask) as usize] += a.norm_sqr();
                    }
                    local
                })
                .collect();
            // summed in chunk order so the result is independent of scheduling
            for local in partials {
                for (o, v) in out.iter_mut().zip(local) {
                    *o += v;
                }
            }
        } else {
            for (i, a) in self.amps.iter().enumerate() {
                let logical = i as u64 ^ frame;
                out[(logical >> offset & mask) as usize] += a.norm_sqr();
            }
        }
        out
    }

    /// Overwrites `self` with `other` without reallocating when sizes match.
    pub fn copy_from(&mut self, other: &Statevector) {
        self.n = other.n;
        self.frame = other.frame;
        self.amps.clear();
        self.amps.extend_from_slice(&other.amps);
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n)?;
        self.apply_unchecked(gate);
        Ok(())
    }

    /// Applies a gate already validated against this width.
    pub(crate) fn apply_unchecked(&mut self, gate: &Gate) {
        #[cfg(debug_assertions)]
        let before = (self.n <= 16).then(|| self.norm_sqr());

        let targets = gate.targets();
        match gate.kind() {
            GateKind::X => self.frame ^= 1 << targets[0],
            GateKind::H => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                self.apply_real_single(targets[0], [[s, s], [s, -s]]);
            }
            GateKind::Z => self.phase_flip_all_ones(targets),
            GateKind::CX | GateKind::CCX | GateKind::MCX => self.controlled_x(gate.controls(), targets[0]),
            GateKind::MCZ => self.phase_flip_all_ones(targets),
            GateKind::DiagonalPredicate => self.diagonal_predicate(targets, gate.predicate().expect("validated")),
        }

        #[cfg(debug_assertions)]
        if let Some(before) = before {
            let after = self.norm_sqr();
            debug_assert!((after - before).abs() < 1e-10, "norm drift {before} -> {after} after {:?}", gate.kind());
        }
    }

    /// Applies a Pauli error up to global phase (`Y = iXZ`).
    pub fn apply_pauli(&mut self, q: usize, pauli: Pauli) {
        match pauli {
            Pauli::X => self.frame ^= 1 << q,
            Pauli::Z => self.phase_flip_all_ones(&[q]),
            Pauli::Y => {
                self.phase_flip_all_ones(&[q]);
                self.frame ^= 1 << q;
            }
        }
    }

    fn apply_real_single(&mut self, q: usize, m: [[f64; 2]; 2]) {
        // With the frame bit set the stored pair is swapped: apply X m X.
        let m = if self.frame >> q & 1 == 1 { [[m[1][1], m[1][0]], [m[0][1], m[0][0]]] } else { m };
        let half = 1usize << q;
        let kernel = |lo: &mut [Complex64], hi: &mut [Complex64]| {
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x * m[0][0] + y * m[0][1];
                *b = x * m[1][0] + y * m[1][1];
            }
        };
        if self.amps.len() < PAR_MIN_ELEMENTS {
            for block in self.amps.chunks_mut(2 * half) {
                let (lo, hi) = block.split_at_mut(half);
                kernel(lo, hi);
            }
        } else if half >= PAR_BLOCK {
            for block in self.amps.chunks_mut(2 * half) {
                let (lo, hi) = block.split_at_mut(half);
                lo.par_chunks_mut(PAR_BLOCK).zip(hi.par_chunks_mut(PAR_BLOCK)).for_each(|(l, h)| kernel(l, h));
            }
        } else {
            // pairs are close together: hand whole blocks to workers
            self.amps.par_chunks_mut(PAR_BLOCK).for_each(|chunk| {
                for block in chunk.chunks_mut(2 * half) {
                    let (lo, hi) = block.split_at_mut(half);
                    kernel(lo, hi);
                }
            });
        }
    }

    /// Swaps amplitude pairs differing in `target` whose controls are all 1.
    fn controlled_x(&mut self, controls: &[usize], target: usize) {
        if controls.is_empty() {
            self.frame ^= 1 << target;
            return;
        }
        let control_mask = controls.iter().fold(0u64, |m, &c| m | 1 << c);
        // physical bit = logical bit ^ frame bit, logical controls must be 1
        let pattern = !self.frame & control_mask;
        let mut fixed: Vec<usize> = controls.to_vec();
        fixed.push(target);
        fixed.sort_unstable();
        let tbit = 1u64 << target;
        let count = 1u64 << (self.n - fixed.len());
        let ptr = SharedMut(self.amps.as_mut_ptr());
        for_each_index(count, |k| {
            let lo = deposit(k, &fixed) | pattern;
            // SAFETY: `deposit` is injective and leaves `target` clear, so
            // distinct k touch disjoint pairs (lo, lo | tbit), both < 2^n.
            unsafe { std::ptr::swap(ptr.at(lo), ptr.at(lo | tbit)) };
        });
    }

    /// Phase -1 on basis states whose listed qubits are all 1.
    fn phase_flip_all_ones(&mut self, qubits: &[usize]) {
        let mask = qubits.iter().fold(0u64, |m, &q| m | 1 << q);
        let pattern = !self.frame & mask;
        let mut fixed = qubits.to_vec();
        fixed.sort_unstable();
        let count = 1u64 << (self.n - fixed.len());
        let ptr = SharedMut(self.amps.as_mut_ptr());
        for_each_index(count, |k| {
            let i = deposit(k, &fixed) | pattern;
            // SAFETY: injective map into 0..2^n; each index written once.
            unsafe {
                let a = ptr.at(i);
                *a = -*a;
            }
        });
    }

    fn diagonal_predicate(&mut self, targets: &[usize], predicate: &PhasePredicate) {
        let frame = self.frame;
        let contiguous = targets.windows(2).all(|w| w[1] == w[0] + 1);
        let offset = targets[0];
        let mask = (1u64 << targets.len()) - 1;
        let local = |logical: u64| -> u64 {
            if contiguous {
                logical >> offset & mask
            } else {
                targets.iter().enumerate().fold(0, |v, (j, &q)| v | (logical >> q & 1) << j)
            }
        };
        let kernel = |base: u64, chunk: &mut [Complex64]| {
            for (j, a) in chunk.iter_mut().enumerate() {
                if predicate.is_marked(local((base + j as u64) ^ frame)) {
                    *a = -*a;
                }
            }
        };
        if self.amps.len() >= PAR_MIN_ELEMENTS {
            self.amps
                .par_chunks_mut(PAR_BLOCK)
                .enumerate()
                .for_each(|(ci, chunk)| kernel((ci * PAR_BLOCK) as u64, chunk));
        } else {
            kernel(0, &mut self.amps);
        }
    }
}

/// Spreads the bits of `k` over the positions not listed in `fixed` (sorted
/// ascending), leaving the fixed positions zero.
#[inline]
fn deposit(mut k: u64, fixed: &[usize]) -> u64 {
    for &p in fixed {
        let low = k & ((1u64 << p) - 1);
        k = (k >> p) << (p + 1) | low;
    }
    k
}

fn for_each_index(count: u64, f: impl Fn(u64) + Sync) {
    if count as usize >= PAR_MIN_ELEMENTS {
        (0..count as usize).into_par_iter().with_min_len(PAR_BLOCK).for_each(|i| f(i as u64));
    } else {
        (0..count).for_each(f);
    }
}

#[derive(Clone, Copy)]
struct SharedMut(*mut Complex64);

// SAFETY: only used by kernels whose index maps are injective, so no two
// threads ever touch the same element.
unsafe impl Send for SharedMut {}
unsafe impl Sync for SharedMut {}

impl SharedMut {
    #[inline]
    unsafe fn at(self, i: u64) -> *mut Complex64 {
        self.0.add(i as usize)
    }
}
