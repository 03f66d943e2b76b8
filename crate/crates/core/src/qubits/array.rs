use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

fn unit_spacing() -> f64 {
    1.0
}

fn default_exponent() -> f64 {
    3.0
}

/// Rectangular grid of qubits, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitArray {
    pub rows: usize,
    pub cols: usize,
    /// Resonance frequency of each qubit, Hz, row-major.
    #[serde(rename = "f_q_hz")]
    pub f_q: Vec<f64>,
    /// Pitch between adjacent qubits. The unit is arbitrary; only ratios enter.
    #[serde(default = "unit_spacing")]
    pub spacing: f64,
    /// Nearest-neighbour coupling, Hz.
    #[serde(rename = "g0_hz", default)]
    pub g0: f64,
    #[serde(default = "default_exponent")]
    pub decay_exponent: f64,
}

impl QubitArray {
    pub fn new(rows: usize, cols: usize, f_q: Vec<f64>, g0: f64) -> Self {
        Self {
            rows,
            cols,
            f_q,
            spacing: 1.0,
            g0,
            decay_exponent: 3.0,
        }
    }

    /// All qubits at the same frequency.
    pub fn uniform(rows: usize, cols: usize, f_q: f64, g0: f64) -> Self {
        Self::new(rows, cols, vec![f_q; rows * cols], g0)
    }

    /// Qubit `k` (zero-based, row-major) at `(k + 1) f_base`.
    pub fn ladder(rows: usize, cols: usize, f_base: f64, g0: f64) -> Self {
        let f_q = (1..=rows * cols).map(|k| k as f64 * f_base).collect();
        Self::new(rows, cols, f_q, g0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows * self.cols < 2 {
            return Err(Error::invalid("rows", "the array needs at least two qubits"));
        }
        if self.f_q.len() != self.rows * self.cols {
            return Err(Error::DimensionMismatch {
                left: self.f_q.len(),
                right: self.rows * self.cols,
            });
        }
        for &f in &self.f_q {
            ensure_finite("f_q_hz", f)?;
            if f <= 0.0 {
                return Err(Error::invalid("f_q_hz", "qubit frequencies must be positive"));
            }
        }
        ensure_finite("g0_hz", self.g0)?;
        if self.g0 < 0.0 {
            return Err(Error::invalid("g0_hz", "must be non-negative"));
        }
        ensure_finite("spacing", self.spacing)?;
        if self.spacing <= 0.0 {
            return Err(Error::invalid("spacing", "must be positive"));
        }
        ensure_finite("decay_exponent", self.decay_exponent)?;
        if self.decay_exponent < 3.0 {
            return Err(Error::invalid("decay_exponent", "must be at least 3"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    pub fn position(&self, q: usize) -> (usize, usize) {
        (q / self.cols, q % self.cols)
    }

    /// Angular frequency of qubit `q`, rad/s.
    pub fn omega(&self, q: usize) -> f64 {
        2.0 * std::f64::consts::PI * self.f_q[q]
    }

    pub fn are_adjacent(&self, a: usize, b: usize) -> bool {
        let (ra, ca) = self.position(a);
        let (rb, cb) = self.position(b);
        ra.abs_diff(rb) + ca.abs_diff(cb) == 1
    }

    /// Euclidean distance in multiples of the pitch.
    pub fn distance_ratio(&self, a: usize, b: usize) -> f64 {
        let (ra, ca) = self.position(a);
        let (rb, cb) = self.position(b);
        let dr = ra.abs_diff(rb) as f64;
        let dc = ca.abs_diff(cb) as f64;
        dr.hypot(dc)
    }
}

/// Power-law coupling `g0 r^-n` at distance ratio `r`.
pub fn coupling_decay(g0: f64, distance_ratio: f64, exponent: f64) -> Result<f64> {
    ensure_finite("distance_ratio", distance_ratio)?;
    if distance_ratio < 1.0 {
        return Err(Error::invalid("distance_ratio", "must be at least 1"));
    }
    if exponent < 3.0 {
        return Err(Error::invalid("decay_exponent", "must be at least 3"));
    }
    Ok(g0 * distance_ratio.powf(-exponent))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decay_law() {
        assert_eq!(coupling_decay(5e6, 1.0, 3.0).unwrap(), 5e6);
        assert_eq!(coupling_decay(8e6, 2.0, 3.0).unwrap(), 1e6);
        assert!((coupling_decay(81.0, 3.0, 4.0).unwrap() - 1.0).abs() < 1e-14);
        assert!(coupling_decay(1.0, 0.5, 3.0).is_err());
        assert!(coupling_decay(1.0, 2.0, 2.0).is_err());
    }

    #[test]
    fn validation() {
        assert!(QubitArray::uniform(1, 2, 5e9, 1e6).validate().is_ok());
        assert!(QubitArray::uniform(1, 1, 5e9, 1e6).validate().is_err());
        assert!(QubitArray::uniform(2, 2, -1.0, 1e6).validate().is_err());
        assert!(QubitArray::uniform(2, 2, 5e9, -1.0).validate().is_err());
        let mut a = QubitArray::uniform(2, 2, 5e9, 1e6);
        a.decay_exponent = 2.5;
        assert!(a.validate().is_err());
        a = QubitArray::new(2, 2, vec![1e9; 3], 0.0);
        assert!(matches!(a.validate(), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn ladder_and_geometry() {
        let a = QubitArray::ladder(2, 4, 1.5e9, 0.0);
        assert_eq!(a.f_q[7], 12e9);
        assert_eq!(a.position(5), (1, 1));
        assert!(a.are_adjacent(1, 5));
        assert!(!a.are_adjacent(0, 5));
        assert_eq!(a.distance_ratio(0, 5), 2f64.sqrt());
    }
}
