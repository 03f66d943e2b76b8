//! Truncation refinement of the slab solve.

use serde::{Deserialize, Serialize};

use super::slab::solve_slab;
use super::spectrum::HarmonicSpectrum;
use super::{IncidentWave, SolverConfig};
use crate::error::Result;
use crate::modulation::ModulationProfile;

/// Harmonics `|n| <= STUDY_WINDOW` are compared by [`convergence_study`].
pub const STUDY_WINDOW: i64 = 4;

/// Truncation increment used by [`find_converged_truncation`].
pub const REFINE_STEP: usize = 4;

/// Magnitudes below this fraction of the window maximum, or below
/// `ROUNDOFF` outright, are not compared.
const NEGLIGIBLE: f64 = 1e-10;
const ROUNDOFF: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStep {
    pub truncation: usize,
    /// `|R_n|` for `n` in `[-window, window]`.
    pub r_magnitudes: Vec<f64>,
    /// Relative change against the previous step; `None` for the first.
    pub change: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub window: i64,
    pub tolerance: f64,
    pub steps: Vec<ConvergenceStep>,
    pub max_change: f64,
    pub converged: bool,
    /// Smallest truncation whose refinement changed less than the tolerance.
    pub converged_truncation: Option<usize>,
}

/// Largest relative change of `|R_n|` over `|n| <= window` between two spectra.
pub fn max_relative_change(coarse: &HarmonicSpectrum, fine: &HarmonicSpectrum, window: i64) -> f64 {
    let scale = (-window..=window)
        .map(|n| fine.r_magnitude(n).max(coarse.r_magnitude(n)))
        .fold(0.0, f64::max);
    let floor = (NEGLIGIBLE * scale).max(ROUNDOFF);
    (-window..=window)
        .filter_map(|n| {
            let a = coarse.r_magnitude(n);
            let b = fine.r_magnitude(n);
            let m = a.max(b);
            (m >= floor).then(|| (a - b).abs() / m)
        })
        .fold(0.0, f64::max)
}

fn step(spectrum: &HarmonicSpectrum, window: i64, previous: Option<&HarmonicSpectrum>) -> ConvergenceStep {
    ConvergenceStep {
        truncation: spectrum.truncation,
        r_magnitudes: (-window..=window).map(|n| spectrum.r_magnitude(n)).collect(),
        change: previous.map(|p| max_relative_change(p, spectrum, window)),
    }
}

fn solve_at(
    profile: &ModulationProfile,
    wave: &IncidentWave,
    base: &SolverConfig,
    n: usize,
) -> Result<HarmonicSpectrum> {
    let config = SolverConfig {
        truncation: n,
        quadrature_samples: None,
        max_truncation: base.max_truncation.max(n),
        ..*base
    };
    solve_slab(profile, wave, &config)
}

/// Solves at `N`, `N + 2` and `N + 4` and reports the largest relative change
/// of `|R_n|` over `|n| <= 4`.
pub fn convergence_study(
    profile: &ModulationProfile,
    wave: &IncidentWave,
    base: &SolverConfig,
) -> Result<ConvergenceReport> {
    let n = base.truncation;
    let spectra = [n, n + 2, n + 4]
        .into_iter()
        .map(|k| solve_at(profile, wave, base, k))
        .collect::<Result<Vec<_>>>()?;
    let steps: Vec<ConvergenceStep> = spectra
        .iter()
        .enumerate()
        .map(|(i, s)| step(s, STUDY_WINDOW, i.checked_sub(1).map(|j| &spectra[j])))
        .collect();
    let max_change = steps.iter().filter_map(|s| s.change).fold(0.0, f64::max);
    let converged = max_change < base.convergence_tol;
    Ok(ConvergenceReport {
        window: STUDY_WINDOW,
        tolerance: base.convergence_tol,
        steps,
        max_change,
        converged,
        converged_truncation: converged.then_some(n),
    })
}

/// Raises the truncation in steps of four from `config.truncation` until the
/// change between `N` and `N + 4` over `|n| <= window` drops below the
/// tolerance or `N + 4` would exceed `config.max_truncation`.
///
/// Returns the report and the finest spectrum computed.
pub fn find_converged_truncation(
    profile: &ModulationProfile,
    wave: &IncidentWave,
    config: &SolverConfig,
    window: i64,
) -> Result<(ConvergenceReport, HarmonicSpectrum)> {
    let mut n = config.truncation;
    let mut previous = solve_at(profile, wave, config, n)?;
    let mut steps = vec![step(&previous, window, None)];
    let mut last_change = f64::INFINITY;
    let mut converged_truncation = None;
    while n + REFINE_STEP <= config.max_truncation.max(config.truncation) {
        let next = solve_at(profile, wave, config, n + REFINE_STEP)?;
        let s = step(&next, window, Some(&previous));
        last_change = s.change.unwrap_or(f64::INFINITY);
        steps.push(s);
        previous = next;
        if last_change < config.convergence_tol {
            converged_truncation = Some(n);
            break;
        }
        n += REFINE_STEP;
    }
    let report = ConvergenceReport {
        window,
        tolerance: config.convergence_tol,
        steps,
        max_change: last_change,
        converged: converged_truncation.is_some(),
        converged_truncation,
    };
    Ok((report, previous))
}

/// The slab spectrum with truncation refinement when `config.auto_refine` is
/// set. Non-convergence is reported, not raised; the spectrum returned is the
/// finest one computed.
pub fn solve_refined(
    profile: &ModulationProfile,
    wave: &IncidentWave,
    config: &SolverConfig,
    window: i64,
) -> Result<(HarmonicSpectrum, ConvergenceReport)> {
    if !config.auto_refine {
        let spectrum = solve_slab(profile, wave, config)?;
        let report = ConvergenceReport {
            window,
            tolerance: config.convergence_tol,
            steps: vec![step(&spectrum, window, None)],
            max_change: f64::NAN,
            converged: false,
            converged_truncation: None,
        };
        return Ok((spectrum, report));
    }
    let (report, spectrum) = find_converged_truncation(profile, wave, config, window)?;
    Ok((spectrum, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn static_profile_converges_immediately() {
        let profile = ModulationProfile::new(0.8, 0.0, 0.4, 3e9, 1.0).with_eps_background(2.0);
        let report =
            convergence_study(&profile, &IncidentWave::normal(3e9), &SolverConfig::with_truncation(1)).unwrap();
        assert!(report.converged, "{report:?}");
        assert_eq!(report.converged_truncation, Some(1));
        assert!(report.max_change < 1e-12);
    }

    #[test]
    fn change_is_zero_for_identical_spectra() {
        let profile = ModulationProfile::new(1.22, 0.23, 0.4, 3e9, 1.0);
        let s = solve_slab(&profile, &IncidentWave::normal(3e9), &SolverConfig::with_truncation(6)).unwrap();
        assert_eq!(max_relative_change(&s, &s, 4), 0.0);
    }

    #[test]
    fn refinement_disabled_is_single_solve() {
        let profile = ModulationProfile::new(1.22, 0.23, 0.4, 3e9, 1.0);
        let mut config = SolverConfig::with_truncation(6);
        config.auto_refine = false;
        let (spectrum, report) = solve_refined(&profile, &IncidentWave::normal(3e9), &config, 4).unwrap();
        assert_eq!(spectrum.truncation, 6);
        assert_eq!(report.steps.len(), 1);
        assert!(!report.converged);
    }
}
