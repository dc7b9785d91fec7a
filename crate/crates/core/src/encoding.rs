//! Minterm parameter space.
//!
//! A candidate transition rule over `K` variables is a conjunction in which
//! every variable is either absent, present, or present negated. It is carried
//! by two `K`-bit masks: `include` (bit `i` set when variable `i` takes part)
//! and `negate` (bit `i` set when that literal is complemented).
//!
//! Printed form: a `2K`-character string of `(include_i, negate_i)` pairs,
//! variable 0 leftmost. Read as a binary number (leftmost character is the
//! most significant bit) it gives the candidate's *index* in `0..4^K`, which
//! is also the basis-state value of the parameter register in the simulator.
//! [`ParamBitstring::from_index`] and [`ParamBitstring::index`] are the only
//! index/string conversions in the crate.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::netmodel::NetworkState;

/// Recorded in every report so bitstrings can be audited.
pub const BIT_CONVENTION: &str = "pairs:include,negate;msb=var0";

/// Upper bound on `K`; `2K` parameter bits must fit a `u64` index.
pub const MAX_VARIABLES: usize = 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MintermParams {
    k: usize,
    include: u32,
    negate: u32,
}

impl MintermParams {
    pub fn new(k: usize, include: u32, negate: u32) -> Result<Self> {
        check_k(k)?;
        let mask = low_mask(k);
        if include & !mask != 0 || negate & !mask != 0 {
            return Err(Error::Dimension { expected: k, found: 32 - (include | negate).leading_zeros() as usize });
        }
        Ok(Self { k, include, negate })
    }

    /// The empty conjunction, which is constant TRUE.
    pub fn constant_true(k: usize) -> Result<Self> {
        Self::new(k, 0, 0)
    }

    /// Builds a canonical minterm from `(variable index, negated)` literals.
    pub fn from_literals(k: usize, literals: &[(usize, bool)]) -> Result<Self> {
        check_k(k)?;
        let mut include = 0u32;
        let mut negate = 0u32;
        for &(var, negated) in literals {
            if var >= k {
                return Err(Error::Dimension { expected: k, found: var + 1 });
            }
            if include & (1 << var) != 0 {
                return Err(Error::InvalidNetwork(format!("variable {var} appears more than once in a minterm")));
            }
            include |= 1 << var;
            if negated {
                negate |= 1 << var;
            }
        }
        Ok(Self { k, include, negate })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn include(&self) -> u32 {
        self.include
    }

    pub fn negate(&self) -> u32 {
        self.negate
    }

    pub fn is_included(&self, var: usize) -> bool {
        self.include >> var & 1 == 1
    }

    pub fn is_negated(&self, var: usize) -> bool {
        self.negate >> var & 1 == 1
    }

    pub fn included_count(&self) -> usize {
        self.include.count_ones() as usize
    }

    pub fn evaluate(&self, state: &NetworkState) -> Result<bool> {
        if state.len() != self.k {
            return Err(Error::Dimension { expected: self.k, found: state.len() });
        }
        Ok(self.evaluate_mask(state.mask()))
    }

    /// Evaluation on a raw state mask (bit `i` = variable `i`). No dimension
    /// check; this is the inner loop of the exhaustive solver.
    #[inline]
    pub fn evaluate_mask(&self, state: u32) -> bool {
        // An included variable violates its literal when s_i == negate_i.
        self.include & !(state ^ self.negate) == 0
    }

    pub fn canonicalize(&self) -> Self {
        Self { negate: self.negate & self.include, ..*self }
    }

    pub fn is_canonical(&self) -> bool {
        self.negate & !self.include == 0
    }

    /// Same Boolean expression, regardless of don't-care negate bits.
    pub fn same_expression(&self, other: &Self) -> bool {
        self.k == other.k && self.canonicalize() == other.canonicalize()
    }

    /// Every bitstring sharing this expression, ascending.
    pub fn equivalence_class(&self) -> Vec<ParamBitstring> {
        let canon = self.canonicalize();
        let free: Vec<usize> = (0..self.k).filter(|&i| !canon.is_included(i)).collect();
        let mut out: Vec<ParamBitstring> = (0u64..1 << free.len())
            .map(|combo| {
                let mut negate = canon.negate;
                for (bit, &var) in free.iter().enumerate() {
                    if combo >> bit & 1 == 1 {
                        negate |= 1 << var;
                    }
                }
                ParamBitstring::from_params(&Self { negate, ..canon })
            })
            .collect();
        out.sort();
        out
    }

    pub fn equivalence_class_size(&self) -> u64 {
        1u64 << (self.k - self.included_count())
    }

    pub fn to_expression(&self) -> BooleanExpression {
        BooleanExpression {
            literals: (0..self.k)
                .filter(|&i| self.is_included(i))
                .map(|i| Literal { variable: i, negated: self.is_negated(i) })
                .collect(),
        }
    }

    /// Renders `A ∧ ¬B ∧ C` in variable order; the empty minterm is `TRUE`.
    pub fn format(&self, variables: &[String]) -> Result<String> {
        if variables.len() != self.k {
            return Err(Error::Dimension { expected: self.k, found: variables.len() });
        }
        Ok(self.to_expression().render(variables))
    }

    /// Candidate index: the printed bitstring read as a binary number.
    pub fn index(&self) -> u64 {
        let mut idx = 0u64;
        for i in 0..self.k {
            idx = (idx << 2) | ((self.include >> i & 1) as u64) << 1 | (self.negate >> i & 1) as u64;
        }
        idx
    }

    /// Inverse of [`MintermParams::index`]. Bits above `2K` are ignored.
    #[inline]
    pub fn from_index_unchecked(k: usize, idx: u64) -> Self {
        let mut include = 0u32;
        let mut negate = 0u32;
        for i in 0..k {
            let shift = 2 * (k - 1 - i);
            include |= ((idx >> (shift + 1)) & 1) as u32 * (1 << i);
            negate |= ((idx >> shift) & 1) as u32 * (1 << i);
        }
        Self { k, include, negate }
    }
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 || k > MAX_VARIABLES {
        return Err(Error::Capacity(format!("minterms need 1..={MAX_VARIABLES} variables, got {k}")));
    }
    Ok(())
}

fn low_mask(k: usize) -> u32 {
    if k >= 32 {
        u32::MAX
    } else {
        (1u32 << k) - 1
    }
}

/// A `2K`-bit parameter string in the pair-wise print convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamBitstring {
    // field order matters for the derived Ord: ascending numeric within a width
    k: usize,
    index: u64,
}

impl ParamBitstring {
    pub fn from_index(k: usize, index: u64) -> Result<Self> {
        check_k(k)?;
        if 2 * k < 64 && index >> (2 * k) != 0 {
            return Err(Error::InvalidBitstring {
                input: format!("{index:b}"),
                reason: format!("index does not fit in {} bits", 2 * k),
            });
        }
        Ok(Self { k, index })
    }

    pub fn from_params(p: &MintermParams) -> Self {
        Self { k: p.k, index: p.index() }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        2 * self.k
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn decode(&self) -> MintermParams {
        MintermParams::from_index_unchecked(self.k, self.index)
    }
}

pub fn encode(p: &MintermParams) -> ParamBitstring {
    ParamBitstring::from_params(p)
}

pub fn decode(b: &ParamBitstring) -> MintermParams {
    b.decode()
}

impl fmt::Display for ParamBitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.index, width = 2 * self.k)
    }
}

impl FromStr for ParamBitstring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: String| Error::InvalidBitstring { input: s.to_string(), reason };
        if s.is_empty() || !s.len().is_multiple_of(2) {
            return Err(bad(format!("length {} is not a positive even number", s.len())));
        }
        let k = s.len() / 2;
        if k > MAX_VARIABLES {
            return Err(bad(format!("more than {MAX_VARIABLES} variables")));
        }
        let mut index = 0u64;
        for (pos, ch) in s.chars().enumerate() {
            let bit = match ch {
                '0' => 0,
                '1' => 1,
                other => return Err(bad(format!("character {other:?} at position {pos}"))),
            };
            index = index << 1 | bit;
        }
        Ok(Self { k, index })
    }
}

impl Serialize for ParamBitstring {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ParamBitstring {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub variable: usize,
    pub negated: bool,
}

/// Conjunction of literals in variable order. No literals means TRUE.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BooleanExpression {
    literals: Vec<Literal>,
}

impl BooleanExpression {
    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn is_constant_true(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn variables(&self) -> BTreeSet<usize> {
        self.literals.iter().map(|l| l.variable).collect()
    }

    pub fn render(&self, variables: &[String]) -> String {
        if self.literals.is_empty() {
            return "TRUE".to_string();
        }
        self.literals
            .iter()
            .map(|l| {
                let name = variables.get(l.variable).map(String::as_str).unwrap_or("?");
                if l.negated {
                    format!("¬{name}")
                } else {
                    name.to_string()
                }
            })
            .collect::<Vec<_>>()
            .join(" ∧ ")
    }
}
