use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stochastic Pauli noise applied per logical gate per touched qubit, plus
/// independent readout bit flips.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Total probability of an X, Y or Z error (each `p/3`) after a gate, on
    /// each qubit the gate touches.
    pub depolarizing: f64,
    /// Probability that a measured bit is reported flipped.
    pub readout: f64,
}

impl NoiseModel {
    pub fn new(depolarizing: f64, readout: f64) -> Result<Self> {
        let noise = Self { depolarizing, readout };
        noise.validate()?;
        Ok(noise)
    }

    pub fn noiseless() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("depolarizing", self.depolarizing), ("readout", self.readout)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidNoise(format!("{name} probability {v} is outside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn has_gate_noise(&self) -> bool {
        self.depolarizing > 0.0
    }

    pub fn is_noiseless(&self) -> bool {
        self.depolarizing == 0.0 && self.readout == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_index(i: u32) -> Self {
        match i % 3 {
            0 => Pauli::X,
            1 => Pauli::Y,
            _ => Pauli::Z,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probabilities_must_be_in_unit_interval() {
        assert!(NoiseModel::new(0.0, 1.0).is_ok());
        assert!(NoiseModel::new(-0.1, 0.0).is_err());
        assert!(NoiseModel::new(0.0, 1.5).is_err());
        assert!(NoiseModel::new(f64::NAN, 0.0).is_err());
    }
}
