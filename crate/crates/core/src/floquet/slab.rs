//! Field matching at the slab interfaces.
//!
//! Inside the slab mode `q` contributes `a_q V_nq exp(-j beta_q (z - z_q))
//! exp(-j n kappa z)` to harmonic `n`, where `z_q = d` for modes growing
//! towards `+z` and `0` otherwise, so no exponential overflows. Outside,
//! harmonic `n` carries `delta_n0 exp(-j k_z0 z) + R_n exp(j k_zn z)` for
//! `z < 0` and `T_n exp(-j k_zn (z - d))` for `z > d`.

use faer::Mat;
use num_complex::Complex64;

use super::bloch::{modes_from_setup, BlochModeSet};
use super::spectrum::{Harmonic, HarmonicSpectrum};
use super::{harmonic_angles, Backing, HarmonicAngle, IncidentWave, Setup, SolverConfig};
use crate::error::{Error, Result};
use crate::linalg;
use crate::modulation::ModulationProfile;

/// Matching residual above which the system is reported singular.
const RESIDUAL_LIMIT: f64 = 1e-8;

const J: Complex64 = Complex64::new(0.0, 1.0);

/// Reflected and transmitted harmonics of the slab at the configured truncation.
///
/// This is a single solve; [`super::solve_refined`] adds truncation refinement.
pub fn solve_slab(profile: &ModulationProfile, wave: &IncidentWave, config: &SolverConfig) -> Result<HarmonicSpectrum> {
    let setup = Setup::new(profile, wave, config)?;
    let modes = modes_from_setup(&setup, config)?;
    let (r, t) = match_fields(&setup, &modes, config.backing, wave.amplitude).map_err(|e| match e {
        Error::SingularSystem { details } => Error::SingularSystem {
            details: format!(
                "{details}; phi_dc = {}, phi_rf = {}, d = {} wavelengths, f_s = {} Hz, gamma = {}, \
                 f_0 = {} Hz, theta_i = {} rad, N = {}",
                profile.phi_dc,
                profile.phi_rf,
                profile.thickness,
                profile.f_s,
                profile.gamma_v,
                wave.f_0,
                wave.theta_i,
                config.truncation
            ),
        },
        other => other,
    })?;
    assemble(&setup, wave, &r, &t)
}

fn match_fields(
    setup: &Setup,
    modes: &BlochModeSet,
    backing: Backing,
    amplitude: f64,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let m = setup.len();
    let nm = 2 * m;
    let d = setup.thickness;
    let incident = setup
        .retained
        .iter()
        .position(|&n| n == 0)
        .expect("incident harmonic is always retained");
    let kz: Vec<Complex64> = (0..m).map(|i| setup.exterior_kz(i)).collect();

    let (e0, ed): (Vec<Complex64>, Vec<Complex64>) = modes
        .eigenvalues
        .iter()
        .map(|&b| {
            let zref = if b.im > 0.0 { d } else { 0.0 };
            ((-J * b * (0.0 - zref)).exp(), (-J * b * (d - zref)).exp())
        })
        .unzip();
    let exit_phase: Vec<Complex64> = setup
        .retained
        .iter()
        .map(|&n| Complex64::from_polar(1.0, -(n as f64) * setup.kappa * d))
        .collect();
    let wavenumber = |i: usize, q: usize| modes.eigenvalues[q] + setup.retained[i] as f64 * setup.kappa;

    let with_t = backing == Backing::Vacuum;
    let size = if with_t { 4 * m } else { 3 * m };
    let mut s = Mat::<Complex64>::zeros(size, size);
    let mut rhs = vec![Complex64::new(0.0, 0.0); size];

    for i in 0..m {
        for q in 0..nm {
            let v = modes.eigenvectors[(i, q)];
            s[(i, q)] = v * e0[q];
            s[(m + i, q)] = v * (-J * wavenumber(i, q)) * e0[q];
            s[(2 * m + i, q)] = v * ed[q] * exit_phase[i];
            if with_t {
                s[(3 * m + i, q)] = v * (-J * wavenumber(i, q)) * ed[q] * exit_phase[i];
            }
        }
        s[(i, nm + i)] = Complex64::new(-1.0, 0.0);
        s[(m + i, nm + i)] = -J * kz[i];
        if with_t {
            s[(2 * m + i, nm + m + i)] = Complex64::new(-1.0, 0.0);
            s[(3 * m + i, nm + m + i)] = J * kz[i];
        }
    }
    rhs[incident] = Complex64::new(amplitude, 0.0);
    rhs[m + incident] = -J * kz[incident] * amplitude;

    let (x, residual) = linalg::solve(&s, &rhs);
    if !(residual <= RESIDUAL_LIMIT) || x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::SingularSystem {
            details: format!("relative residual {residual:.3e}"),
        });
    }
    let r = x[nm..nm + m].to_vec();
    let t = if with_t {
        x[nm + m..nm + 2 * m].to_vec()
    } else {
        vec![Complex64::new(0.0, 0.0); m]
    };
    Ok((r, t))
}

fn assemble(setup: &Setup, wave: &IncidentWave, r: &[Complex64], t: &[Complex64]) -> Result<HarmonicSpectrum> {
    let n_max = setup.truncation as i64;
    let frequencies: Vec<f64> = (-n_max..=n_max).map(|n| setup.f_0 + n as f64 * setup.f_mod).collect();
    let angles = harmonic_angles(wave.theta_i, wave.f_0, &frequencies)?;
    let incident_flux = wave.amplitude * wave.amplitude * wave.theta_i.cos();
    let zero = Complex64::new(0.0, 0.0);

    let harmonics = (-n_max..=n_max)
        .zip(frequencies.iter().zip(&angles))
        .map(|(n, (&f_hz, &angle))| {
            let slot = setup.retained.iter().position(|&k| k == n);
            let (rn, tn) = slot.map_or((zero, zero), |i| (r[i], t[i]));
            let (theta_r_rad, flux) = match (angle, slot) {
                (HarmonicAngle::Propagating(a), Some(i)) => {
                    let w = setup.omega[i];
                    (Some(a), setup.exterior_kz(i).re.abs() / w.abs())
                }
                _ => (None, 0.0),
            };
            Harmonic {
                n,
                f_hz,
                re_r: rn.re,
                im_r: rn.im,
                re_t: tn.re,
                im_t: tn.im,
                theta_r_rad,
                power_r: rn.norm_sqr() * flux / incident_flux,
                power_t: tn.norm_sqr() * flux / incident_flux,
                evanescent: theta_r_rad.is_none(),
            }
        })
        .collect();
    Ok(HarmonicSpectrum {
        f_0_hz: setup.f_0,
        f_mod_hz: setup.f_mod,
        theta_i_rad: wave.theta_i,
        truncation: setup.truncation,
        harmonics,
    })
}
