//! Scattering of an obliquely incident plane wave by the space-time-modulated
//! slab.
//!
//! The slab occupies `0 <= z <= d` with vacuum on both sides (or a perfect
//! conductor behind it, see [`Backing`]). Fields carry `exp(j omega t)` time
//! dependence; the `n`-th space-time harmonic oscillates at
//! `omega_n = omega_0 + n omega_s` and shares the transverse wavenumber
//! `k_x = k_0 sin(theta_i)` of the incident wave.
//!
//! The single tangential field component `psi` obeys
//! `d_x^2 psi + d_z^2 psi = c^-2 d_t^2 (eps_r(z, t) psi)`, and both `psi` and
//! `d_z psi` are continuous across the interfaces.

mod bloch;
mod convergence;
mod fdtd;
mod slab;
mod spectrum;

pub use bloch::{bloch_modes, BlochModeSet};
pub use convergence::{
    convergence_study, find_converged_truncation, max_relative_change, solve_refined, ConvergenceReport,
    ConvergenceStep, REFINE_STEP, STUDY_WINDOW,
};
pub use fdtd::{fdtd_oracle, FdtdConfig};
pub use slab::solve_slab;
pub use spectrum::{Harmonic, HarmonicKind, HarmonicSpectrum};

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::modulation::{default_samples, sampling_floor, ModulationProfile};
use crate::SPEED_OF_LIGHT;

fn unit_amplitude() -> f64 {
    1.0
}

/// Monochromatic plane wave incident from `z < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IncidentWave {
    #[serde(rename = "f_0_hz")]
    pub f_0: f64,
    /// Angle from the slab normal.
    #[serde(rename = "theta_i_rad", default)]
    pub theta_i: f64,
    #[serde(default = "unit_amplitude")]
    pub amplitude: f64,
}

impl IncidentWave {
    pub fn normal(f_0: f64) -> Self {
        Self {
            f_0,
            theta_i: 0.0,
            amplitude: 1.0,
        }
    }

    pub fn oblique(f_0: f64, theta_i: f64) -> Self {
        Self {
            f_0,
            theta_i,
            amplitude: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("f_0_hz", self.f_0)?;
        ensure_finite("theta_i_rad", self.theta_i)?;
        ensure_finite("amplitude", self.amplitude)?;
        if self.f_0 <= 0.0 {
            return Err(Error::invalid("f_0_hz", "must be positive"));
        }
        if !(0.0..FRAC_PI_2).contains(&self.theta_i) {
            return Err(Error::invalid("theta_i_rad", "must lie in [0, pi/2)"));
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.f_0
    }

    pub fn k0(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.f_0 / SPEED_OF_LIGHT
    }
}

/// What terminates the slab at `z = d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backing {
    /// Free space behind the slab; reflection and transmission.
    #[default]
    Vacuum,
    /// Perfect electric conductor at `z = d`; reflection only.
    Conductor,
}

fn default_truncation() -> usize {
    12
}

fn default_tol() -> f64 {
    1e-6
}

fn default_max_truncation() -> usize {
    96
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    /// Harmonics `n` in `[-N, N]` are retained.
    #[serde(default = "default_truncation")]
    pub truncation: usize,
    /// Quadrature points for the permittivity harmonics; `None` uses
    /// `16 (4N + 1)`.
    #[serde(default)]
    pub quadrature_samples: Option<usize>,
    #[serde(default = "default_tol")]
    pub convergence_tol: f64,
    /// Upper limit for automatic truncation refinement.
    #[serde(default = "default_max_truncation")]
    pub max_truncation: usize,
    /// Refine the truncation until `convergence_tol` holds.
    #[serde(default = "default_true")]
    pub auto_refine: bool,
    /// Reject Bloch mode sets whose eigenvector matrix condition exceeds this.
    #[serde(default)]
    pub mode_condition_bound: Option<f64>,
    #[serde(default)]
    pub backing: Backing,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            truncation: default_truncation(),
            quadrature_samples: None,
            convergence_tol: default_tol(),
            max_truncation: default_max_truncation(),
            auto_refine: true,
            mode_condition_bound: None,
            backing: Backing::Vacuum,
        }
    }
}

impl SolverConfig {
    pub fn with_truncation(truncation: usize) -> Self {
        Self {
            truncation,
            ..Self::default()
        }
    }

    /// Fourier order needed for the permittivity convolution, `2N`.
    pub fn fourier_order(&self) -> usize {
        2 * self.truncation
    }

    pub fn samples(&self) -> usize {
        self.quadrature_samples
            .unwrap_or_else(|| default_samples(self.fourier_order()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.truncation < 1 {
            return Err(Error::invalid("truncation", "must be at least 1"));
        }
        let floor = sampling_floor(self.fourier_order());
        if self.samples() < floor {
            return Err(Error::SamplingFloor {
                samples: self.samples(),
                order: self.fourier_order(),
                floor,
            });
        }
        if !(self.convergence_tol > 0.0) {
            return Err(Error::invalid("convergence_tol", "must be positive"));
        }
        if self.max_truncation < self.truncation {
            return Err(Error::invalid("max_truncation", "must not be below truncation"));
        }
        if let Some(bound) = self.mode_condition_bound {
            if !(bound > 1.0) {
                return Err(Error::invalid("mode_condition_bound", "must exceed 1"));
            }
        }
        Ok(())
    }
}

/// `f_0 + n f_s` for `n` in `[-N, N]`, ascending in `n`.
pub fn harmonic_frequencies(f_0: f64, f_s: f64, truncation: usize) -> Result<Vec<f64>> {
    if !(f_0 > 0.0) {
        return Err(Error::invalid("f_0_hz", "must be positive"));
    }
    if !(f_s > 0.0) {
        return Err(Error::invalid("f_s_hz", "must be positive"));
    }
    let n = truncation as i64;
    Ok((-n..=n).map(|k| f_0 + k as f64 * f_s).collect())
}

/// Reflection angle of one harmonic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HarmonicAngle {
    Propagating(f64),
    Evanescent,
    NonPositiveFrequency,
}

impl HarmonicAngle {
    pub fn angle(self) -> Option<f64> {
        match self {
            HarmonicAngle::Propagating(a) => Some(a),
            _ => None,
        }
    }
}

/// Phase-matched reflection angles `asin((f_0 / f_n) sin(theta_i))`.
pub fn harmonic_angles(theta_i: f64, f_0: f64, frequencies: &[f64]) -> Result<Vec<HarmonicAngle>> {
    if !(0.0..FRAC_PI_2).contains(&theta_i) {
        return Err(Error::invalid("theta_i_rad", "must lie in [0, pi/2)"));
    }
    Ok(frequencies
        .iter()
        .map(|&f_n| {
            if f_n <= 0.0 {
                return HarmonicAngle::NonPositiveFrequency;
            }
            if f_n == f_0 {
                return HarmonicAngle::Propagating(theta_i);
            }
            let s = f_0 / f_n * theta_i.sin();
            if s > 1.0 {
                HarmonicAngle::Evanescent
            } else {
                HarmonicAngle::Propagating(s.asin())
            }
        })
        .collect())
}

/// Dimensionless description of one scattering problem. Wavenumbers are
/// scaled by `k_0`, frequencies by `omega_0` and lengths by `1 / k_0`.
#[derive(Debug, Clone)]
pub(crate) struct Setup {
    pub truncation: usize,
    /// Harmonic indices kept in the expansion (zero-frequency harmonics are
    /// decoupled and undriven, so they are dropped).
    pub retained: Vec<i64>,
    /// `omega_n / omega_0` for each retained harmonic.
    pub omega: Vec<f64>,
    pub kappa: f64,
    pub kx: f64,
    pub thickness: f64,
    pub eps_b: f64,
    pub coeffs: crate::modulation::FourierSeries,
    pub phase: f64,
    pub f_0: f64,
    pub f_mod: f64,
    pub k0: f64,
}

/// Harmonics whose frequency is below this fraction of `f_0` are treated as static.
pub(crate) const ZERO_FREQUENCY_FRACTION: f64 = 1e-9;

impl Setup {
    pub fn new(profile: &ModulationProfile, wave: &IncidentWave, config: &SolverConfig) -> Result<Self> {
        profile.validate()?;
        wave.validate()?;
        config.validate()?;
        let coeffs = profile.fourier_coefficients(config.fourier_order(), config.samples())?;
        let f_mod = profile.signed_modulation_frequency();
        let ratio = f_mod / wave.f_0;
        let n = config.truncation as i64;
        let (retained, omega): (Vec<i64>, Vec<f64>) = (-n..=n)
            .map(|k| (k, 1.0 + k as f64 * ratio))
            .filter(|(_, w)| w.abs() > ZERO_FREQUENCY_FRACTION)
            .unzip();
        let k0 = wave.k0();
        Ok(Self {
            truncation: config.truncation,
            retained,
            omega,
            kappa: profile.kappa_s() / k0,
            kx: wave.theta_i.sin(),
            thickness: 2.0 * std::f64::consts::PI * profile.thickness,
            eps_b: profile.eps_background,
            coeffs,
            phase: profile.phase,
            f_0: wave.f_0,
            f_mod,
            k0,
        })
    }

    pub fn len(&self) -> usize {
        self.retained.len()
    }

    /// Permittivity harmonic coupling retained harmonics `p` and `q`,
    /// `c_(p-q) exp(-j (p-q) phase)`.
    pub fn coupling(&self, p: i64, q: i64) -> num_complex::Complex64 {
        let k = p - q;
        self.coeffs.get(k) * num_complex::Complex64::from_polar(1.0, -(k as f64) * self.phase)
    }

    /// Normalized exterior longitudinal wavenumber for a retained harmonic,
    /// chosen outgoing (propagating) or decaying (evanescent).
    pub fn exterior_kz(&self, idx: usize) -> num_complex::Complex64 {
        let w = self.omega[idx];
        let arg = w * w - self.kx * self.kx;
        if arg > 0.0 {
            num_complex::Complex64::new(w.signum() * arg.sqrt(), 0.0)
        } else {
            num_complex::Complex64::new(0.0, -(-arg).sqrt())
        }
    }
}
