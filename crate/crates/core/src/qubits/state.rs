use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest array simulated in the full `2^n` basis.
pub const FULL_HILBERT_CAP: usize = 12;

/// Tolerance on the squared norm of a state.
pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// States with exactly one excited qubit; index `q` is qubit `q` excited.
    #[default]
    SingleExcitation,
    /// Computational basis; bit `q` of the index is the state of qubit `q`.
    FullHilbert,
}

impl Basis {
    pub fn dimension(self, qubits: usize) -> Result<usize> {
        match self {
            Basis::SingleExcitation => Ok(qubits),
            Basis::FullHilbert if qubits > FULL_HILBERT_CAP => Err(Error::DimensionOverflow {
                qubits,
                cap: FULL_HILBERT_CAP,
            }),
            Basis::FullHilbert => Ok(1 << qubits),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PureState {
    pub basis: Basis,
    pub qubits: usize,
    pub amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Validates dimension and normalization.
    pub fn new(basis: Basis, qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = basis.dimension(qubits)?;
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                left: amplitudes.len(),
                right: dim,
            });
        }
        let state = Self {
            basis,
            qubits,
            amplitudes,
        };
        let drift = (state.norm_sqr() - 1.0).abs();
        if !(drift <= NORM_TOLERANCE) {
            return Err(Error::invalid(
                "amplitudes",
                format!("squared norm differs from 1 by {drift:.3e}"),
            ));
        }
        Ok(state)
    }

    /// Qubit `q` excited, all others in the ground state.
    pub fn excited(basis: Basis, qubits: usize, q: usize) -> Result<Self> {
        if q >= qubits {
            return Err(Error::invalid(
                "initial_qubit",
                format!("qubit {q} outside an array of {qubits}"),
            ));
        }
        let dim = basis.dimension(qubits)?;
        let index = match basis {
            Basis::SingleExcitation => q,
            Basis::FullHilbert => 1 << q,
        };
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self::new(basis, qubits, amplitudes)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Probability that each qubit is excited.
    pub fn excitation_probabilities(&self) -> Vec<f64> {
        match self.basis {
            Basis::SingleExcitation => self.amplitudes.iter().map(|z| z.norm_sqr()).collect(),
            Basis::FullHilbert => {
                let mut p = vec![0.0; self.qubits];
                for (s, z) in self.amplitudes.iter().enumerate() {
                    let w = z.norm_sqr();
                    for (q, pq) in p.iter_mut().enumerate() {
                        if s >> q & 1 == 1 {
                            *pq += w;
                        }
                    }
                }
                p
            }
        }
    }

    /// Expected number of excitations.
    pub fn excitation_number(&self) -> f64 {
        match self.basis {
            Basis::SingleExcitation => self.norm_sqr(),
            Basis::FullHilbert => self
                .amplitudes
                .iter()
                .enumerate()
                .map(|(s, z)| z.norm_sqr() * s.count_ones() as f64)
                .sum(),
        }
    }
}

/// Per-qubit excitation probabilities of `state`.
pub fn excitation_probabilities(state: &PureState) -> Vec<f64> {
    state.excitation_probabilities()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_state_readout() {
        let s = PureState::excited(Basis::SingleExcitation, 4, 0).unwrap();
        assert_eq!(s.excitation_probabilities(), vec![1.0, 0.0, 0.0, 0.0]);
        let f = PureState::excited(Basis::FullHilbert, 4, 0).unwrap();
        assert_eq!(f.excitation_probabilities(), vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(f.excitation_number(), 1.0);
    }

    #[test]
    fn superposition_readout() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = Complex64::new(0.0, 0.0);
        let s = PureState::new(
            Basis::SingleExcitation,
            4,
            vec![z, Complex64::new(h, 0.0), Complex64::new(0.0, h), z],
        )
        .unwrap();
        let p = s.excitation_probabilities();
        assert!((p[1] - 0.5).abs() < 1e-15 && (p[2] - 0.5).abs() < 1e-15);
        assert_eq!(p[0] + p[3], 0.0);
    }

    #[test]
    fn rejects_bad_states() {
        let z = Complex64::new(0.0, 0.0);
        assert!(PureState::new(Basis::SingleExcitation, 2, vec![z, z]).is_err());
        assert!(PureState::new(Basis::SingleExcitation, 3, vec![Complex64::new(1.0, 0.0)]).is_err());
        assert!(matches!(
            PureState::excited(Basis::FullHilbert, 13, 0),
            Err(Error::DimensionOverflow { .. })
        ));
        assert!(PureState::excited(Basis::SingleExcitation, 3, 3).is_err());
    }
}
