//! Space-time-modulated Josephson inductance.
//!
//! The sheet inductance of the junction array follows
//! `L(z, t) = L_J0 * sec(phi_dc + phi_rf * sin(kappa_s z - omega_s t + phase))`.
//! Inside the slab the relative permittivity is taken proportional to the
//! normalized inductance, `eps_r(z, t) = eps_b * m(xi)`, with
//! `m(xi) = sec(phi_dc + phi_rf sin xi) / sec(phi_dc)` so that the static
//! limit reproduces the unmodulated background.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::{FLUX_QUANTUM, SPEED_OF_LIGHT};

/// How the raw secant profile is scaled before it enters the permittivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Divide by `sec(phi_dc)`: the static slab has `eps_r = eps_b` for any bias.
    #[default]
    Bias,
    /// Use `sec(...)` as is; the DC bias then also scales the background.
    Raw,
}

/// Travel direction of the modulation pattern along `z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `xi = kappa_s z - omega_s t + phase`: co-propagating with the incident wave.
    #[default]
    Forward,
    /// `xi = kappa_s z + omega_s t + phase`: the temporal modulation sign flipped.
    Reverse,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Reverse => -1.0,
        }
    }
}

fn default_eps() -> f64 {
    1.0
}

fn default_l_scale() -> f64 {
    // Phi_0 / (2 pi I_0) for a 1 uA critical current.
    FLUX_QUANTUM / (2.0 * PI * 1e-6)
}

/// All parameters of the modulated inductance profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulationProfile {
    /// Normalized DC flux bias `2 pi Phi_dc / Phi_0`.
    pub phi_dc: f64,
    /// Normalized RF flux amplitude `2 pi Phi_rf / Phi_0`.
    pub phi_rf: f64,
    #[serde(rename = "phase_rad", default)]
    pub phase: f64,
    /// Temporal modulation frequency.
    #[serde(rename = "f_s_hz")]
    pub f_s: f64,
    /// Modulation phase velocity over the background phase velocity.
    pub gamma_v: f64,
    /// Slab thickness in units of the incident free-space wavelength.
    #[serde(rename = "thickness_wavelengths")]
    pub thickness: f64,
    #[serde(default = "default_eps")]
    pub eps_background: f64,
    /// Inductance prefactor `Phi_0 / (2 pi I_0)`.
    #[serde(rename = "l_scale_h", default = "default_l_scale")]
    pub l_scale: f64,
    #[serde(default)]
    pub normalization: Normalization,
    #[serde(default)]
    pub direction: Direction,
}

impl ModulationProfile {
    /// Profile with the given flux biases and defaults for everything that
    /// is not a modulation parameter.
    pub fn new(phi_dc: f64, phi_rf: f64, thickness: f64, f_s: f64, gamma_v: f64) -> Self {
        Self {
            phi_dc,
            phi_rf,
            phase: 0.0,
            f_s,
            gamma_v,
            thickness,
            eps_background: default_eps(),
            l_scale: default_l_scale(),
            normalization: Normalization::Bias,
            direction: Direction::Forward,
        }
    }

    pub fn with_eps_background(mut self, eps: f64) -> Self {
        self.eps_background = eps;
        self
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (field, value) in [
            ("phi_dc", self.phi_dc),
            ("phi_rf", self.phi_rf),
            ("phase_rad", self.phase),
            ("f_s_hz", self.f_s),
            ("gamma_v", self.gamma_v),
            ("thickness_wavelengths", self.thickness),
            ("eps_background", self.eps_background),
            ("l_scale_h", self.l_scale),
        ] {
            ensure_finite(field, value)?;
        }
        let sum = self.phi_dc.abs() + self.phi_rf.abs();
        if sum >= FRAC_PI_2 {
            return Err(Error::SecantPole { sum });
        }
        if self.f_s <= 0.0 {
            return Err(Error::invalid("f_s_hz", "must be positive"));
        }
        if self.gamma_v <= 0.0 {
            return Err(Error::invalid("gamma_v", "must be positive"));
        }
        if self.thickness <= 0.0 {
            return Err(Error::invalid("thickness_wavelengths", "must be positive"));
        }
        if self.eps_background < 1.0 {
            return Err(Error::invalid("eps_background", "must be at least 1"));
        }
        if self.l_scale <= 0.0 {
            return Err(Error::invalid("l_scale_h", "must be positive"));
        }
        Ok(())
    }

    /// Distance of the largest reachable secant argument from the pole at pi/2.
    pub fn pole_margin(&self) -> f64 {
        FRAC_PI_2 - (self.phi_dc.abs() + self.phi_rf.abs())
    }

    /// Raw secant `sec(phi_dc + phi_rf sin xi)`.
    pub fn secant(&self, xi: f64) -> f64 {
        1.0 / (self.phi_dc + self.phi_rf * xi.sin()).cos()
    }

    /// Normalized profile `m(xi)` that multiplies the background permittivity.
    pub fn normalized(&self, xi: f64) -> f64 {
        match self.normalization {
            Normalization::Bias => self.secant(xi) * self.phi_dc.cos(),
            Normalization::Raw => self.secant(xi),
        }
    }

    /// Smallest and largest values of `m(xi)` over one period.
    pub fn normalized_range(&self) -> (f64, f64) {
        // The secant argument sweeps [dc - |rf|, dc + |rf|]; sec is even and
        // increasing in |x| on (-pi/2, pi/2).
        let lo = self.phi_dc - self.phi_rf.abs();
        let hi = self.phi_dc + self.phi_rf.abs();
        let scale = match self.normalization {
            Normalization::Bias => self.phi_dc.cos(),
            Normalization::Raw => 1.0,
        };
        let min_arg = if lo <= 0.0 && hi >= 0.0 {
            0.0
        } else {
            lo.abs().min(hi.abs())
        };
        let max_arg = lo.abs().max(hi.abs());
        (scale / min_arg.cos(), scale / max_arg.cos())
    }

    pub fn omega_s(&self) -> f64 {
        2.0 * PI * self.f_s
    }

    /// Signed temporal modulation frequency: harmonic `n` sits at `f_0 + n * this`.
    pub fn signed_modulation_frequency(&self) -> f64 {
        self.direction.sign() * self.f_s
    }

    /// Phase velocity of the unmodulated slab.
    pub fn background_velocity(&self) -> f64 {
        SPEED_OF_LIGHT / self.eps_background.sqrt()
    }

    /// Spatial modulation wavenumber `kappa_s = omega_s / (gamma_v v_b)`, rad/m.
    pub fn kappa_s(&self) -> f64 {
        self.omega_s() / (self.gamma_v * self.background_velocity())
    }

    pub fn spatial_period(&self) -> f64 {
        2.0 * PI / self.kappa_s()
    }

    pub fn temporal_period(&self) -> f64 {
        1.0 / self.f_s
    }

    /// Modulation phase `xi(z, t)`.
    pub fn phase_argument(&self, z: f64, t: f64) -> f64 {
        self.kappa_s() * z - self.direction.sign() * self.omega_s() * t + self.phase
    }

    /// Sheet inductance at position `z` (m) and time `t` (s), in henries.
    pub fn inductance_at(&self, z: f64, t: f64) -> Result<f64> {
        self.validate()?;
        Ok(self.l_scale * self.secant(self.phase_argument(z, t)))
    }

    /// Relative permittivity of the slab at `(z, t)`.
    pub fn permittivity_at(&self, z: f64, t: f64) -> f64 {
        self.eps_background * self.normalized(self.phase_argument(z, t))
    }

    /// Discrete Fourier coefficients `c_k`, `|k| <= order`, of `m(xi)` on a
    /// uniform grid of `samples` points, normalized so that
    /// `m(xi) = sum_k c_k exp(-j k xi)`.
    pub fn fourier_coefficients(&self, order: usize, samples: usize) -> Result<FourierSeries> {
        self.validate()?;
        let floor = sampling_floor(order);
        if samples < floor {
            return Err(Error::SamplingFloor { samples, order, floor });
        }
        let values: Vec<f64> = (0..samples)
            .map(|i| self.normalized(2.0 * PI * i as f64 / samples as f64))
            .collect();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * order + 1];
        for k in 0..=order {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, &v) in values.iter().enumerate() {
                // Reduce the index before taking the angle to keep it accurate for large k.
                let j = (k * i) % samples;
                let angle = 2.0 * PI * j as f64 / samples as f64;
                acc += Complex64::from_polar(v, angle);
            }
            let c = acc / samples as f64;
            coeffs[order + k] = c;
            coeffs[order - k] = c.conj();
        }
        // Real profile: c_0 is real up to roundoff.
        coeffs[order].im = 0.0;
        Ok(FourierSeries { order, coeffs })
    }

    /// Fourier series with the default sample count `16 (2K + 1)`.
    pub fn fourier_series(&self, order: usize) -> Result<FourierSeries> {
        self.fourier_coefficients(order, default_samples(order))
    }

    /// Smallest order `K*` (searched by doubling from 4) for which doubling
    /// the order moves no retained `|c_k|` by `tol` or more and the tail
    /// coefficient `|c_K|` is itself below `tol`.
    pub fn converged_order(&self, tol: f64) -> Result<usize> {
        let mut order = 4;
        let mut current = self.fourier_series(order)?;
        while order <= 1 << 14 {
            let doubled = self.fourier_series(2 * order)?;
            let change = current
                .indices()
                .map(|k| (current.get(k).norm() - doubled.get(k).norm()).abs())
                .fold(0.0, f64::max);
            let tail = current.get(order as i64).norm();
            if change < tol && tail < tol {
                return Ok(order);
            }
            order *= 2;
            current = doubled;
        }
        Err(Error::NotConverged {
            truncation: order,
            change: f64::NAN,
        })
    }

    /// `(xi, m(xi))` on a uniform grid over one period.
    pub fn sample_normalized(&self, samples: usize) -> Vec<(f64, f64)> {
        (0..samples)
            .map(|i| {
                let xi = 2.0 * PI * i as f64 / samples as f64;
                (xi, self.normalized(xi))
            })
            .collect()
    }
}

pub fn sampling_floor(order: usize) -> usize {
    8 * (2 * order + 1)
}

pub fn default_samples(order: usize) -> usize {
    16 * (2 * order + 1)
}

/// Harmonic coefficients `c_k` for `k` in `[-order, order]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries {
    order: usize,
    coeffs: Vec<Complex64>,
}

impl FourierSeries {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> {
        let k = self.order as i64;
        -k..=k
    }

    /// `c_k`, zero outside the retained range.
    pub fn get(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.order {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + self.order as i64) as usize]
        }
    }

    /// Partial sum `sum_k c_k exp(-j k xi)`.
    pub fn evaluate(&self, xi: f64) -> f64 {
        self.indices()
            .map(|k| self.get(k) * Complex64::from_polar(1.0, -(k as f64) * xi))
            .sum::<Complex64>()
            .re
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }
}
