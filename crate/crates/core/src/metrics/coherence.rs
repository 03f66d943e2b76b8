use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

fn positive(field: &'static str, value: f64) -> Result<()> {
    ensure_finite(field, value)?;
    if value <= 0.0 {
        return Err(Error::invalid(field, "must be positive"));
    }
    Ok(())
}

fn non_negative(field: &'static str, value: f64) -> Result<()> {
    ensure_finite(field, value)?;
    if value < 0.0 {
        return Err(Error::invalid(field, "must be non-negative"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoherenceModel {
    #[serde(rename = "t2_s")]
    pub t2: f64,
    /// Frequency separation between coupled channels, Hz.
    #[serde(rename = "delta_f_hz")]
    pub delta_f: f64,
    /// Decoherence rate, rad/s.
    #[serde(rename = "gamma_dec_rad_s")]
    pub gamma_dec: f64,
}

impl CoherenceModel {
    pub fn validate(&self) -> Result<()> {
        positive("t2_s", self.t2)?;
        non_negative("delta_f_hz", self.delta_f)?;
        positive("gamma_dec_rad_s", self.gamma_dec)
    }
}

/// `T2' = T2 (1 + 2 pi df / gamma)`.
pub fn coherence_improvement(model: &CoherenceModel) -> Result<f64> {
    model.validate()?;
    Ok(model.t2 * (1.0 + 2.0 * PI * model.delta_f / model.gamma_dec))
}

/// Unmodified noise spectral density `S0(omega)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SpectralDensity {
    Constant {
        value: f64,
    },
    /// `(omega, S0)` samples, ascending in omega; linear in between and
    /// held constant beyond the ends.
    Tabulated {
        points: Vec<(f64, f64)>,
    },
}

impl SpectralDensity {
    pub fn validate(&self) -> Result<()> {
        match self {
            SpectralDensity::Constant { value } => non_negative("s0", *value),
            SpectralDensity::Tabulated { points } => {
                if points.is_empty() {
                    return Err(Error::invalid("s0", "tabulated density needs at least one point"));
                }
                for &(w, s) in points {
                    ensure_finite("s0", w)?;
                    non_negative("s0", s)?;
                }
                if points.windows(2).any(|p| p[1].0 <= p[0].0) {
                    return Err(Error::invalid("s0", "sample frequencies must increase strictly"));
                }
                Ok(())
            }
        }
    }

    pub fn evaluate(&self, omega: f64) -> f64 {
        match self {
            SpectralDensity::Constant { value } => *value,
            SpectralDensity::Tabulated { points } => {
                let i = points.partition_point(|p| p.0 <= omega);
                if i == 0 {
                    points[0].1
                } else if i == points.len() {
                    points[i - 1].1
                } else {
                    let (w0, s0) = points[i - 1];
                    let (w1, s1) = points[i];
                    s0 + (s1 - s0) * (omega - w0) / (w1 - w0)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    pub s0: SpectralDensity,
    /// Suppression bandwidth, rad/s.
    #[serde(rename = "sigma_bw_rad_s")]
    pub sigma_bw: f64,
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        self.s0.validate()?;
        positive("sigma_bw_rad_s", self.sigma_bw)
    }

    /// `exp(-dw^2 / (2 sigma^2))`.
    pub fn suppression(&self, delta_omega: f64) -> f64 {
        (-delta_omega * delta_omega / (2.0 * self.sigma_bw * self.sigma_bw)).exp()
    }
}

/// `S_eff(omega) = S0(omega) exp(-dw^2 / (2 sigma^2))`.
pub fn effective_noise(model: &NoiseModel, omega: f64, delta_omega: f64) -> Result<f64> {
    model.validate()?;
    ensure_finite("omega", omega)?;
    ensure_finite("delta_omega", delta_omega)?;
    Ok(model.s0.evaluate(omega) * model.suppression(delta_omega))
}

/// `exp(-t / T2)`.
pub fn fidelity_decay(t: f64, t2: f64) -> Result<f64> {
    non_negative("t_s", t)?;
    positive("t2_s", t2)?;
    Ok((-t / t2).exp())
}

/// `F' = F0 exp(-t / T2')`.
pub fn entangled_fidelity(f0: f64, t: f64, t2_prime: f64) -> Result<f64> {
    ensure_finite("f0", f0)?;
    if !(0.0..=1.0).contains(&f0) {
        return Err(Error::invalid("f0", "must lie in [0, 1]"));
    }
    Ok(f0 * fidelity_decay(t, t2_prime)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(df: f64, gamma: f64) -> CoherenceModel {
        CoherenceModel {
            t2: 20e-6,
            delta_f: df,
            gamma_dec: gamma,
        }
    }

    #[test]
    fn coherence_values() {
        assert_eq!(coherence_improvement(&model(0.0, 1e6)).unwrap(), 20e-6);
        let t = coherence_improvement(&model(2e6 / (2.0 * PI), 1e6)).unwrap();
        assert!((t - 60e-6).abs() < 1e-18);
        let mut last = f64::INFINITY;
        for gamma in [1e3, 1e5, 1e7, 1e9, 1e12] {
            let t = coherence_improvement(&model(1e6, gamma)).unwrap();
            assert!(t < last && t > 20e-6);
            last = t;
        }
        assert!(coherence_improvement(&model(-1.0, 1e6)).is_err());
        assert!(coherence_improvement(&model(1.0, 0.0)).is_err());
    }

    #[test]
    fn noise_values() {
        let m = NoiseModel {
            s0: SpectralDensity::Constant { value: 2.0 },
            sigma_bw: 1e6,
        };
        assert_eq!(effective_noise(&m, 0.0, 0.0).unwrap(), 2.0);
        assert!((effective_noise(&m, 0.0, 1e6).unwrap() / 2.0 - 0.606531).abs() < 1e-6);
        assert!((effective_noise(&m, 0.0, 3e6).unwrap() / 2.0 - 0.011109).abs() < 1e-6);
    }

    #[test]
    fn tabulated_density() {
        let s = SpectralDensity::Tabulated {
            points: vec![(0.0, 1.0), (2.0, 3.0)],
        };
        assert_eq!(s.evaluate(-1.0), 1.0);
        assert_eq!(s.evaluate(1.0), 2.0);
        assert_eq!(s.evaluate(5.0), 3.0);
        let bad = SpectralDensity::Tabulated {
            points: vec![(1.0, 1.0), (1.0, 2.0)],
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn decay_values() {
        assert_eq!(fidelity_decay(0.0, 1e-5).unwrap(), 1.0);
        assert!((fidelity_decay(1e-5, 1e-5).unwrap() - 0.367879).abs() < 1e-6);
        assert!((fidelity_decay(1e-5 * 2f64.ln(), 1e-5).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(entangled_fidelity(0.97, 0.0, 1e-5).unwrap(), 0.97);
        assert!((entangled_fidelity(0.99, 1e-5, 1e-5).unwrap() - 0.364200).abs() < 1e-6);
        assert!((entangled_fidelity(1.0, 1e-5, 3e-5).unwrap() - 0.716531).abs() < 1e-6);
        assert!(entangled_fidelity(1.1, 0.0, 1.0).is_err());
        assert!(fidelity_decay(-1.0, 1.0).is_err());
    }
}
