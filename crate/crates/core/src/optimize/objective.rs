use serde::{Deserialize, Serialize};

use super::scenario::Scenario;
use crate::error::Result;
use crate::floquet::{solve_slab, HarmonicSpectrum};
use crate::modulation::ModulationProfile;

/// Score of one profile; `score` is infinite when the solve failed, with
/// the failure kept in `diagnostic`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub score: f64,
    pub diagnostic: Option<String>,
}

/// `-sum_targets P_n + penalty * sum_suppressed P_n` from the spectrum.
pub fn score_spectrum(spectrum: &HarmonicSpectrum, scenario: &Scenario) -> f64 {
    let gain: f64 = scenario.targets.iter().map(|&n| spectrum.power_r(n)).sum();
    let leak: f64 = scenario.suppressed_set().iter().map(|&n| spectrum.power_r(n)).sum();
    -gain + scenario.penalty * leak
}

/// Solves the slab once at the scenario's truncation and scores it.
pub fn evaluate(profile: &ModulationProfile, scenario: &Scenario) -> Result<(f64, HarmonicSpectrum)> {
    let spectrum = solve_slab(profile, &scenario.incident(), &scenario.solver)?;
    Ok((score_spectrum(&spectrum, scenario), spectrum))
}

/// Lower is better.
pub fn objective(profile: &ModulationProfile, scenario: &Scenario) -> Evaluation {
    match evaluate(profile, scenario) {
        Ok((score, _)) => Evaluation {
            score,
            diagnostic: None,
        },
        Err(e) => Evaluation {
            score: f64::INFINITY,
            diagnostic: Some(e.to_string()),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairMargin {
    pub target: i64,
    pub suppressed: i64,
    pub margin_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selectivity {
    pub passed: bool,
    /// Smallest target-over-suppressed power ratio, dB; infinite when
    /// nothing is suppressed.
    pub worst_margin_db: f64,
    pub required_margin_db: f64,
    pub margins: Vec<PairMargin>,
}

fn ratio_db(p_target: f64, p_suppressed: f64) -> f64 {
    match (p_target > 0.0, p_suppressed > 0.0) {
        (_, false) if p_target > 0.0 => f64::INFINITY,
        (false, _) => f64::NEG_INFINITY,
        _ => 10.0 * (p_target / p_suppressed).log10(),
    }
}

/// Passes when every target outshines every suppressed harmonic by the
/// scenario margin.
pub fn verify_selectivity(spectrum: &HarmonicSpectrum, scenario: &Scenario) -> Selectivity {
    let suppressed = scenario.suppressed_set();
    let mut margins = Vec::new();
    for &t in &scenario.targets {
        for &s in &suppressed {
            margins.push(PairMargin {
                target: t,
                suppressed: s,
                margin_db: ratio_db(spectrum.power_r(t), spectrum.power_r(s)),
            });
        }
    }
    let worst = margins.iter().map(|m| m.margin_db).fold(f64::INFINITY, f64::min);
    Selectivity {
        passed: worst >= scenario.margin_db,
        worst_margin_db: worst,
        required_margin_db: scenario.margin_db,
        margins,
    }
}
