//! Interior Bloch (Floquet) modes of the modulated slab.
//!
//! Substituting `psi = sum_n A_n exp(j(omega_n t - k_x x - (beta + n kappa) z))`
//! into the wave equation gives, per retained harmonic `p`,
//!
//! `(beta + p kappa)^2 A_p + k_x^2 A_p - eps_b omega_p^2 sum_q c_(p-q) A_q = 0`
//!
//! (all quantities scaled by `k_0`). This is a quadratic eigenproblem
//! `(beta^2 I + 2 beta K + A_0) A = 0`, linearized by the first companion
//! form `[[0, I], [-A_0, -2K]] [A; beta A] = beta [A; beta A]`.

use faer::Mat;
use num_complex::Complex64;

use super::{IncidentWave, Setup, SolverConfig};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::modulation::ModulationProfile;

/// Eigenpairs of the truncated dispersion problem.
#[derive(Debug, Clone)]
pub struct BlochModeSet {
    /// Harmonic index of each eigenvector row.
    pub harmonics: Vec<i64>,
    /// Longitudinal wavenumbers `beta_q` in units of `k_0`.
    pub eigenvalues: Vec<Complex64>,
    /// Harmonic amplitudes, one unit-norm column per mode.
    pub eigenvectors: CMat,
    /// Spatial modulation wavenumber in units of `k_0`.
    pub kappa: f64,
    /// Incident free-space wavenumber, rad/m.
    pub k0: f64,
    /// Condition number of the companion eigenvector matrix, when computed.
    pub condition: Option<f64>,
    dispersion: Dispersion,
}

#[derive(Debug, Clone)]
struct Dispersion {
    shift: Vec<f64>,
    kx2: f64,
    w: CMat,
}

impl Dispersion {
    fn new(setup: &Setup) -> Self {
        let m = setup.len();
        let shift = setup.retained.iter().map(|&n| n as f64 * setup.kappa).collect();
        let w = Mat::from_fn(m, m, |i, j| {
            let p = setup.retained[i];
            let q = setup.retained[j];
            setup.coupling(p, q) * (setup.eps_b * setup.omega[i] * setup.omega[i])
        });
        Self {
            shift,
            kx2: setup.kx * setup.kx,
            w,
        }
    }

    /// Relative residual of `Q(beta) a` against the size of its terms.
    fn residual(&self, beta: Complex64, a: &[Complex64]) -> f64 {
        let wa = linalg::matvec(&self.w, a);
        let mut num = 0.0;
        let mut scale = 0.0;
        for i in 0..a.len() {
            let b = beta + self.shift[i];
            let diag = (b * b + self.kx2) * a[i];
            num += (diag - wa[i]).norm_sqr();
            scale += diag.norm_sqr() + wa[i].norm_sqr();
        }
        num.sqrt() / scale.sqrt().max(f64::MIN_POSITIVE)
    }
}

impl BlochModeSet {
    pub fn count(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Longitudinal wavenumbers in rad/m.
    pub fn wavenumbers(&self) -> Vec<Complex64> {
        self.eigenvalues.iter().map(|b| b * self.k0).collect()
    }

    pub fn mode(&self, q: usize) -> Vec<Complex64> {
        (0..self.eigenvectors.nrows())
            .map(|i| self.eigenvectors[(i, q)])
            .collect()
    }

    /// Relative residual of mode `q` in the dispersion equation.
    pub fn residual(&self, q: usize) -> f64 {
        self.dispersion.residual(self.eigenvalues[q], &self.mode(q))
    }

    pub fn max_residual(&self) -> f64 {
        (0..self.count()).map(|q| self.residual(q)).fold(0.0, f64::max)
    }

    /// Row of the eigenvector component with the largest magnitude.
    pub fn dominant_row(&self, q: usize) -> usize {
        (0..self.eigenvectors.nrows())
            .max_by(|&a, &b| {
                self.eigenvectors[(a, q)]
                    .norm()
                    .total_cmp(&self.eigenvectors[(b, q)].norm())
            })
            .unwrap_or(0)
    }
}

pub(crate) fn modes_from_setup(setup: &Setup, config: &SolverConfig) -> Result<BlochModeSet> {
    let m = setup.len();
    let dispersion = Dispersion::new(setup);
    let companion = Mat::from_fn(2 * m, 2 * m, |i, j| {
        let zero = Complex64::new(0.0, 0.0);
        match (i < m, j < m) {
            (true, true) => zero,
            (true, false) => {
                if j - m == i {
                    Complex64::new(1.0, 0.0)
                } else {
                    zero
                }
            }
            (false, true) => {
                let r = i - m;
                let mut a0 = -dispersion.w[(r, j)];
                if r == j {
                    a0 += dispersion.shift[r] * dispersion.shift[r] + dispersion.kx2;
                }
                -a0
            }
            (false, false) => {
                if i == j {
                    Complex64::new(-2.0 * dispersion.shift[i - m], 0.0)
                } else {
                    zero
                }
            }
        }
    });
    let (values, vectors) = linalg::eig(&companion)?;
    if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::EigenSolver("non-finite eigenvalue".into()));
    }

    let condition = match config.mode_condition_bound {
        Some(bound) => {
            let mut normalized = vectors.clone();
            for q in 0..2 * m {
                let n = (0..2 * m).map(|i| normalized[(i, q)].norm_sqr()).sum::<f64>().sqrt();
                for i in 0..2 * m {
                    normalized[(i, q)] /= n;
                }
            }
            let cond = linalg::condition_number(&normalized)?;
            if cond > bound {
                return Err(Error::NearDefective { condition: cond, bound });
            }
            Some(cond)
        }
        None => None,
    };

    // Deterministic ordering and normalization: sort by (Re, Im) of beta,
    // unit-norm amplitude columns with the largest entry real and positive.
    let mut order: Vec<usize> = (0..2 * m).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .re
            .total_cmp(&values[b].re)
            .then(values[a].im.total_cmp(&values[b].im))
    });
    let mut eigenvectors = Mat::<Complex64>::zeros(m, 2 * m);
    let mut eigenvalues = Vec::with_capacity(2 * m);
    for (col, &q) in order.iter().enumerate() {
        let top: Vec<Complex64> = (0..m).map(|i| vectors[(i, q)]).collect();
        let norm = linalg::norm(&top);
        if !(norm > 0.0) {
            return Err(Error::EigenSolver(format!(
                "mode {q} has no harmonic amplitude (beta = {})",
                values[q]
            )));
        }
        let pivot = top
            .iter()
            .copied()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .unwrap_or(Complex64::new(1.0, 0.0));
        let phase = pivot.conj() / pivot.norm();
        for (i, z) in top.iter().enumerate() {
            eigenvectors[(i, col)] = z * phase / norm;
        }
        eigenvalues.push(values[q]);
    }

    Ok(BlochModeSet {
        harmonics: setup.retained.clone(),
        eigenvalues,
        eigenvectors,
        kappa: setup.kappa,
        k0: setup.k0,
        condition,
        dispersion,
    })
}

/// Solves the truncated dispersion eigenproblem of the slab interior.
///
/// The set holds two modes (forward and backward families) per retained
/// harmonic; zero-frequency harmonics are decoupled from the drive and are
/// not expanded.
pub fn bloch_modes(profile: &ModulationProfile, wave: &IncidentWave, config: &SolverConfig) -> Result<BlochModeSet> {
    let setup = Setup::new(profile, wave, config)?;
    modes_from_setup(&setup, config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_branch(eps: f64, omega: f64, kx: f64) -> Complex64 {
        Complex64::new(eps * omega * omega - kx * kx, 0.0).sqrt()
    }

    #[test]
    fn static_slab_branches() {
        let profile = ModulationProfile::new(0.8, 0.0, 0.4, 1.3e9, 0.7).with_eps_background(2.5);
        let wave = IncidentWave::oblique(3e9, 0.3);
        let config = SolverConfig::with_truncation(3);
        let modes = bloch_modes(&profile, &wave, &config).unwrap();
        assert_eq!(modes.count(), 2 * 7);
        let ratio = 1.3 / 3.0;
        for q in 0..modes.count() {
            let row = modes.dominant_row(q);
            let n = modes.harmonics[row];
            let k = modes.eigenvalues[q] + n as f64 * modes.kappa;
            let expected = uniform_branch(2.5, 1.0 + n as f64 * ratio, 0.3f64.sin());
            assert!(
                (k - expected).norm().min((k + expected).norm()) < 1e-9,
                "mode {q}: {k} vs {expected}"
            );
            assert!((modes.eigenvectors[(row, q)].norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn residuals_small_for_modulated_slab() {
        for (profile, f0) in [
            (ModulationProfile::new(1.22, 0.23, 0.4, 3e9, 1.0), 3e9),
            (ModulationProfile::new(0.73, 0.73, 0.4, 1.5e9, 1.0), 1.5e9),
            (ModulationProfile::new(0.95, 0.4, 0.4, 3e9, 0.5).with_phase(1.1), 3e9),
        ] {
            let wave = IncidentWave::oblique(f0, 0.2);
            let modes = bloch_modes(&profile, &wave, &SolverConfig::with_truncation(10)).unwrap();
            assert!(modes.max_residual() < 1e-8, "residual {}", modes.max_residual());
        }
    }

    #[test]
    fn zero_frequency_harmonic_dropped() {
        let profile = ModulationProfile::new(1.22, 0.23, 0.4, 3e9, 1.0);
        let modes = bloch_modes(&profile, &IncidentWave::normal(3e9), &SolverConfig::with_truncation(4)).unwrap();
        assert!(!modes.harmonics.contains(&-1));
        assert_eq!(modes.count(), 2 * 8);
    }

    #[test]
    fn small_modulation_shift_is_second_order() {
        // gamma away from 1 keeps the static branches non-degenerate.
        let base = ModulationProfile::new(0.6, 0.0, 0.4, 1.1e9, 0.45);
        let wave = IncidentWave::normal(3e9);
        let config = SolverConfig::with_truncation(3);
        let reference = bloch_modes(&base, &wave, &config).unwrap();
        let shift = |rf: f64| {
            let p = ModulationProfile { phi_rf: rf, ..base };
            let modes = bloch_modes(&p, &wave, &config).unwrap();
            reference
                .eigenvalues
                .iter()
                .map(|b0| {
                    modes
                        .eigenvalues
                        .iter()
                        .map(|b| (b - b0).norm())
                        .fold(f64::MAX, f64::min)
                })
                .fold(0.0, f64::max)
        };
        let s1 = shift(1e-3);
        let s2 = shift(2e-3);
        // Quadratic scaling: doubling the amplitude quadruples the shift.
        assert!((s2 / s1 - 4.0).abs() < 0.05, "ratio {}", s2 / s1);
    }

    #[test]
    fn condition_bound_reported() {
        let profile = ModulationProfile::new(1.22, 0.23, 0.4, 3e9, 1.0);
        let mut config = SolverConfig::with_truncation(4);
        config.mode_condition_bound = Some(1e15);
        let modes = bloch_modes(&profile, &IncidentWave::normal(3e9), &config).unwrap();
        assert!(modes.condition.unwrap() >= 1.0);
        config.mode_condition_bound = Some(1.0 + 1e-12);
        assert!(matches!(
            bloch_modes(&profile, &IncidentWave::normal(3e9), &config),
            Err(Error::NearDefective { .. })
        ));
    }
}
