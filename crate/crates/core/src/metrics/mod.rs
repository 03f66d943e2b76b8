//! Figures of merit: connectivity and gate depth, coherence gain, noise
//! suppression and state fidelity.

mod coherence;
mod connectivity;
mod fidelity;

pub use coherence::{
    coherence_improvement, effective_noise, entangled_fidelity, fidelity_decay, CoherenceModel, NoiseModel,
    SpectralDensity,
};
pub use connectivity::{connectivity_ratio, ConnectivityReport};
pub use fidelity::{fidelity, DensityMatrix, DENSITY_TOLERANCE};

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::qubits::{CouplingGraph, PureState};

fn unit() -> f64 {
    1.0
}

/// A point at which the effective noise density is reported.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoisePoint {
    #[serde(rename = "omega_rad_s")]
    pub omega: f64,
    #[serde(rename = "delta_omega_rad_s")]
    pub delta_omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsConfig {
    /// Baseline gate depth of the monochromatic array.
    #[serde(default = "unit")]
    pub d_mono: f64,
    #[serde(default)]
    pub coherence: Option<CoherenceModel>,
    #[serde(default)]
    pub noise: Option<NoiseModel>,
    #[serde(default)]
    pub noise_points: Vec<NoisePoint>,
    /// Fidelity at t = 0 for the decay comparison.
    #[serde(default = "unit")]
    pub initial_fidelity: f64,
    /// Time at which decayed fidelities are reported; defaults to T2.
    #[serde(rename = "eval_time_s", default)]
    pub eval_time: Option<f64>,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self {
            d_mono: 1.0,
            coherence: None,
            noise: None,
            noise_points: Vec::new(),
            initial_fidelity: 1.0,
            eval_time: None,
        }
    }
}

impl MetricsConfig {
    pub fn validate(&self) -> Result<()> {
        ensure_finite("d_mono", self.d_mono)?;
        if self.d_mono <= 0.0 {
            return Err(Error::invalid("d_mono", "must be positive"));
        }
        if let Some(c) = &self.coherence {
            c.validate()?;
        }
        match &self.noise {
            Some(n) => n.validate()?,
            None if !self.noise_points.is_empty() => {
                return Err(Error::invalid("noise_points", "given without a noise model"));
            }
            None => {}
        }
        for p in &self.noise_points {
            ensure_finite("omega_rad_s", p.omega)?;
            ensure_finite("delta_omega_rad_s", p.delta_omega)?;
        }
        ensure_finite("initial_fidelity", self.initial_fidelity)?;
        if !(0.0..=1.0).contains(&self.initial_fidelity) {
            return Err(Error::invalid("initial_fidelity", "must lie in [0, 1]"));
        }
        if let Some(t) = self.eval_time {
            ensure_finite("eval_time_s", t)?;
            if t < 0.0 {
                return Err(Error::invalid("eval_time_s", "must be non-negative"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceSummary {
    pub t2_s: f64,
    pub t2_prime_s: f64,
    pub eval_time_s: f64,
    pub fidelity_mono: f64,
    pub fidelity_poly: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSample {
    pub omega_rad_s: f64,
    pub delta_omega_rad_s: f64,
    pub s0: f64,
    pub s_eff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub connectivity: ConnectivityReport,
    pub coherence: Option<CoherenceSummary>,
    pub noise: Vec<NoiseSample>,
    /// Fidelity of the evolved state against the reference state.
    pub state_fidelity: Option<f64>,
}

/// Evaluates every configured metric. `states` is an optional
/// `(evolved, reference)` pair.
pub fn metrics_report(
    mono: &CouplingGraph,
    poly: &CouplingGraph,
    config: &MetricsConfig,
    states: Option<(&PureState, &PureState)>,
) -> Result<MetricsReport> {
    config.validate()?;
    let connectivity = connectivity_ratio(mono, poly, config.d_mono)?;
    let coherence = match &config.coherence {
        Some(model) => {
            let t2_prime = coherence_improvement(model)?;
            let t = config.eval_time.unwrap_or(model.t2);
            Some(CoherenceSummary {
                t2_s: model.t2,
                t2_prime_s: t2_prime,
                eval_time_s: t,
                fidelity_mono: entangled_fidelity(config.initial_fidelity, t, model.t2)?,
                fidelity_poly: entangled_fidelity(config.initial_fidelity, t, t2_prime)?,
            })
        }
        None => None,
    };
    let mut noise = Vec::with_capacity(config.noise_points.len());
    if let Some(model) = &config.noise {
        for p in &config.noise_points {
            noise.push(NoiseSample {
                omega_rad_s: p.omega,
                delta_omega_rad_s: p.delta_omega,
                s0: model.s0.evaluate(p.omega),
                s_eff: effective_noise(model, p.omega, p.delta_omega)?,
            });
        }
    }
    let state_fidelity = match states {
        Some((evolved, reference)) => {
            if evolved.basis != reference.basis || evolved.amplitudes.len() != reference.amplitudes.len() {
                return Err(Error::DimensionMismatch {
                    left: evolved.amplitudes.len(),
                    right: reference.amplitudes.len(),
                });
            }
            let rho = DensityMatrix::from_pure(&evolved.amplitudes)?;
            let sigma = DensityMatrix::from_pure(&reference.amplitudes)?;
            Some(fidelity(&rho, &sigma)?)
        }
        None => None,
    };
    Ok(MetricsReport {
        connectivity,
        coherence,
        noise,
        state_fidelity,
    })
}
