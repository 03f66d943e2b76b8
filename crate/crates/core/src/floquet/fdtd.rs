//! One-dimensional finite-difference time-domain reference solver.
//!
//! Lengths are measured in incident wavelengths and time in incident periods
//! (`c = 1`, `omega_0 = 2 pi`). The grid stores `D = eps E` and `H` on a Yee
//! lattice, `d_t D = d_z H`, `d_t H = d_z E`, which is the same scalar wave
//! equation the mode-matching solver uses. Fields are complex so that a
//! single `exp(j omega_0 t)` source reproduces the complex amplitudes of
//! every harmonic, negative frequencies included.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::spectrum::{Harmonic, HarmonicSpectrum};
use super::IncidentWave;
use crate::error::{Error, Result};
use crate::modulation::ModulationProfile;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FdtdConfig {
    /// Harmonics `n` in `[-N, N]` are extracted.
    pub truncation: usize,
    pub cells_per_wavelength: usize,
    /// Fraction of the stability limit `sqrt(min(1, eps_min))`.
    pub courant_fraction: f64,
    /// Modulation periods simulated before recording starts.
    pub settle_periods: usize,
    /// Modulation periods in the recording window.
    pub window_periods: usize,
    /// Absorber depth in incident wavelengths.
    pub absorber_wavelengths: f64,
    /// Source ramp duration in incident periods.
    pub ramp_periods: f64,
    /// Largest allowed relative drift between the two halves of the window.
    pub steady_tolerance: f64,
}

impl Default for FdtdConfig {
    fn default() -> Self {
        Self {
            truncation: 24,
            cells_per_wavelength: 600,
            courant_fraction: 0.95,
            settle_periods: 40,
            window_periods: 8,
            absorber_wavelengths: 2.0,
            ramp_periods: 5.0,
            steady_tolerance: 1e-2,
        }
    }
}

/// Vacuum between absorber and slab on each side, in wavelengths.
const GAP: f64 = 0.5;
/// Source plane and probes, distances from the near slab face in wavelengths.
const SOURCE_OFFSET: f64 = 0.25;
const REFLECTION_PROBE: f64 = 0.4;
const TRANSMISSION_PROBE: f64 = 0.25;
/// Graded absorber strength: one-way attenuation `exp(-ABSORPTION)`.
const ABSORPTION: f64 = 12.0;

struct Grid {
    dz: f64,
    dt: f64,
    cells: usize,
    slab_start: usize,
    slab_end: usize,
    source: usize,
    probe_r: usize,
    probe_t: usize,
    /// Loss per node for `D` (index `i`) and `H` (index `i + 1/2`).
    sigma_e: Vec<f64>,
    sigma_h: Vec<f64>,
    steps_per_period: usize,
}

impl Grid {
    fn z(&self, i: usize) -> f64 {
        (i as f64 - self.slab_start as f64) * self.dz
    }
}

fn numerical_wavenumber(omega: f64, dz: f64, dt: f64) -> f64 {
    omega.signum() * (2.0 / dz) * ((dz / dt) * (omega.abs() * dt / 2.0).sin()).asin()
}

fn validate(profile: &ModulationProfile, wave: &IncidentWave, config: &FdtdConfig) -> Result<f64> {
    profile.validate()?;
    wave.validate()?;
    if wave.theta_i != 0.0 {
        return Err(Error::invalid(
            "theta_i_rad",
            "the time-domain oracle is one-dimensional; normal incidence only",
        ));
    }
    if config.cells_per_wavelength < 20 {
        return Err(Error::invalid("cells_per_wavelength", "must be at least 20"));
    }
    if !(config.absorber_wavelengths > 0.0) || !(config.ramp_periods >= 0.0) || !(config.steady_tolerance > 0.0) {
        return Err(Error::invalid(
            "fdtd",
            "absorber, ramp and steady tolerance must be positive",
        ));
    }
    let (eps_min, _) = profile.normalized_range();
    let limit = (eps_min * profile.eps_background).min(1.0).sqrt();
    let courant = config.courant_fraction * limit;
    if !(config.courant_fraction > 0.0) || courant > limit {
        return Err(Error::Courant { courant, limit });
    }
    if config.window_periods < 1 {
        return Err(Error::SteadyState(
            "recording window needs at least one modulation period".into(),
        ));
    }
    Ok(courant)
}

fn build_grid(profile: &ModulationProfile, wave: &IncidentWave, config: &FdtdConfig, courant: f64) -> Result<Grid> {
    let d = profile.thickness;
    let slab_cells = ((d * config.cells_per_wavelength as f64).ceil() as usize).max(1);
    let dz = d / slab_cells as f64;
    let cells_of = |len: f64| (len / dz).ceil() as usize;
    let absorber = cells_of(config.absorber_wavelengths);
    let gap = cells_of(GAP);
    let slab_start = absorber + gap;
    let slab_end = slab_start + slab_cells;
    let cells = slab_end + gap + absorber + 1;

    // Integer number of steps per modulation period, in incident periods.
    let period = wave.f_0 / profile.f_s;
    let steps_per_period = (period / (courant * dz)).ceil() as usize;
    let dt = period / steps_per_period as f64;

    let sigma_max = 4.0 * ABSORPTION / (absorber as f64 * dz);
    let depth = |z_cells: f64| -> f64 {
        let left = (absorber as f64 - z_cells) / absorber as f64;
        let right = (z_cells - (cells - 1 - absorber) as f64) / absorber as f64;
        let rho = left.max(right).clamp(0.0, 1.0);
        sigma_max * rho.powi(3)
    };
    let sigma_e = (0..cells).map(|i| depth(i as f64)).collect();
    let sigma_h = (0..cells).map(|i| depth(i as f64 + 0.5)).collect();

    Ok(Grid {
        dz,
        dt,
        cells,
        slab_start,
        slab_end,
        source: slab_start - cells_of(SOURCE_OFFSET),
        probe_r: slab_start - cells_of(REFLECTION_PROBE),
        probe_t: slab_end + cells_of(TRANSMISSION_PROBE),
        sigma_e,
        sigma_h,
        steps_per_period,
    })
}

/// Time-domain reference spectrum of the slab at normal incidence.
pub fn fdtd_oracle(profile: &ModulationProfile, wave: &IncidentWave, config: &FdtdConfig) -> Result<HarmonicSpectrum> {
    let courant = validate(profile, wave, config)?;
    let g = build_grid(profile, wave, config, courant)?;
    let lambda = wave.wavelength();
    let f0 = wave.f_0;
    let omega0 = 2.0 * PI;
    let k_inc = numerical_wavenumber(omega0, g.dz, g.dt);
    let amplitude = wave.amplitude;
    let ramp = config.ramp_periods;
    let incident = |z: f64, t: f64| -> Complex64 {
        let a = if t <= 0.0 {
            0.0
        } else if t < ramp {
            (0.5 * PI * t / ramp).sin().powi(2)
        } else {
            1.0
        };
        Complex64::from_polar(amplitude * a, omega0 * t - k_inc * z)
    };
    let permittivity = |i: usize, t: f64| -> f64 {
        if i < g.slab_start || i > g.slab_end {
            return 1.0;
        }
        let eps = profile.permittivity_at(g.z(i) * lambda, t / f0);
        if i == g.slab_start || i == g.slab_end {
            0.5 * (1.0 + eps)
        } else {
            eps
        }
    };

    let n = g.cells;
    let zero = Complex64::new(0.0, 0.0);
    let mut d = vec![zero; n];
    let mut e = vec![zero; n];
    let mut h = vec![zero; n];
    let r = g.dt / g.dz;
    let coef = |sigma: f64| {
        let x = 0.5 * sigma * g.dt;
        ((1.0 - x) / (1.0 + x), r / (1.0 + x))
    };
    let ce: Vec<(f64, f64)> = g.sigma_e.iter().map(|&s| coef(s)).collect();
    let ch: Vec<(f64, f64)> = g.sigma_h.iter().map(|&s| coef(s)).collect();

    let per = g.steps_per_period;
    let settle_steps = config.settle_periods * per;
    let window_steps = config.window_periods * per;
    let transit = (n as f64 * g.dz) * 2.0;
    let ramp_steps = ((ramp + transit) / g.dt).ceil() as usize;
    if settle_steps < ramp_steps {
        return Err(Error::SteadyState(format!(
            "settling time of {} modulation periods is shorter than ramp plus two domain transits ({} steps needed)",
            config.settle_periods, ramp_steps
        )));
    }

    let nmax = config.truncation as i64;
    let f_mod = profile.signed_modulation_frequency() / f0;
    let omegas: Vec<f64> = (-nmax..=nmax).map(|k| omega0 * (1.0 + k as f64 * f_mod)).collect();
    let half = window_steps / 2;
    let split = config.window_periods >= 2;
    // Accumulators: [reflected, transmitted] x [first half, second half].
    let mut acc = vec![[[zero; 2]; 2]; omegas.len()];
    let mut eps_now: Vec<f64> = (0..n).map(|i| permittivity(i, 0.0)).collect();

    for step in 0..settle_steps + window_steps {
        let t = step as f64 * g.dt;
        let t_half = t + 0.5 * g.dt;
        let t_next = t + g.dt;
        // D at t_next from H at t_half.
        for i in 1..n - 1 {
            let (a, b) = ce[i];
            d[i] = d[i] * a + (h[i] - h[i - 1]) * b;
        }
        let zs = g.z(g.source);
        d[g.source] -= -incident(zs - 0.5 * g.dz, t_half) * ce[g.source].1;
        for i in g.slab_start..=g.slab_end {
            eps_now[i] = permittivity(i, t_next);
        }
        for i in 0..n {
            e[i] = d[i] / eps_now[i];
        }
        // H at t_next + dt/2 from E at t_next.
        for i in 0..n - 1 {
            let (a, b) = ch[i];
            h[i] = h[i] * a + (e[i + 1] - e[i]) * b;
        }
        h[g.source - 1] -= incident(zs, t_next) * ch[g.source - 1].1;

        let k = step + 1;
        if k > settle_steps {
            let local = k - settle_steps - 1;
            let section = usize::from(split && local >= half);
            let tk = t_next;
            let er = e[g.probe_r];
            let et = e[g.probe_t];
            for (slot, &w) in acc.iter_mut().zip(&omegas) {
                let kernel = Complex64::from_polar(1.0, -w * tk);
                slot[0][section] += er * kernel;
                slot[1][section] += et * kernel;
            }
        }
    }

    let zr = g.z(g.probe_r);
    let zt = g.z(g.probe_t) - profile.thickness;
    let mut harmonics = Vec::with_capacity(omegas.len());
    let mut drift: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (idx, &w) in omegas.iter().enumerate() {
        let n_idx = idx as i64 - nmax;
        let f_hz = f0 + n_idx as f64 * profile.signed_modulation_frequency();
        let static_harmonic = w.abs() <= super::ZERO_FREQUENCY_FRACTION * omega0;
        let kw = if static_harmonic {
            0.0
        } else {
            numerical_wavenumber(w, g.dz, g.dt)
        };
        let [refl, trans] = acc[idx];
        let (denom_full, denom_half) = (window_steps as f64, half as f64);
        let unphase_r = Complex64::from_polar(1.0, -kw * zr) / amplitude;
        let unphase_t = Complex64::from_polar(1.0, kw * zt) / amplitude;
        let rn = (refl[0] + refl[1]) / denom_full * unphase_r;
        let tn = (trans[0] + trans[1]) / denom_full * unphase_t;
        if split {
            let a = refl[0] / denom_half * unphase_r;
            let b = refl[1] / (window_steps - half) as f64 * unphase_r;
            drift = drift.max((a - b).norm());
            scale = scale.max(rn.norm());
        }
        let (rn, tn) = if static_harmonic { (zero, zero) } else { (rn, tn) };
        let propagating = f_hz > 0.0 && !static_harmonic;
        let flux = if propagating { 1.0 } else { 0.0 };
        harmonics.push(Harmonic {
            n: n_idx,
            f_hz,
            re_r: rn.re * amplitude,
            im_r: rn.im * amplitude,
            re_t: tn.re * amplitude,
            im_t: tn.im * amplitude,
            theta_r_rad: propagating.then_some(0.0),
            power_r: rn.norm_sqr() * flux,
            power_t: tn.norm_sqr() * flux,
            evanescent: !propagating,
        });
    }
    if split && scale > 0.0 && drift / scale > config.steady_tolerance {
        return Err(Error::SteadyState(format!(
            "reflected amplitudes drift by {:.3e} (relative) across the window",
            drift / scale
        )));
    }
    Ok(HarmonicSpectrum {
        f_0_hz: f0,
        f_mod_hz: profile.signed_modulation_frequency(),
        theta_i_rad: 0.0,
        truncation: config.truncation,
        harmonics,
    })
}
