use std::f64::consts::FRAC_PI_2;

use stcq_core::floquet::SolverConfig;
use stcq_core::modulation::ModulationProfile;
use stcq_core::optimize::{objective, search, verify_selectivity, Scenario, SearchConfig, JOINT_MARGIN};

fn quick() -> SearchConfig {
    SearchConfig {
        restarts: 4,
        max_evals: 120,
        seed: 17,
        simplex_tol: 1e-4,
    }
}

fn free_scenario(target: i64) -> Scenario {
    let mut s = Scenario::new([target], 3e9);
    s.fixed.f_s_hz = Some(3e9);
    s.solver = SolverConfig::with_truncation(10);
    s
}

#[test]
fn pinned_panel_a_returns_its_parameters() {
    let panel = ModulationProfile::new(1.22, 0.23, 0.4, 3e9, 1.0);
    let mut scenario = Scenario::pinned([1], 3e9, &panel);
    scenario.solver = SolverConfig::with_truncation(24);
    let r = search(&scenario, &quick()).unwrap();
    assert_eq!(r.best_params, panel);
    assert_eq!(r.restarts_used, 1);
    assert_eq!(r.spectrum.argmax_power_r(1..=7), Some(1));
    assert_eq!(r.best_score, objective(&panel, &scenario).score);
}

#[test]
fn fixed_seed_is_bit_identical() {
    let scenario = free_scenario(1);
    let a = search(&scenario, &quick()).unwrap();
    let b = search(&scenario, &quick()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.best_score.to_bits(), b.best_score.to_bits());
}

#[test]
fn search_properties() {
    let scenario = free_scenario(2);
    let r = search(&scenario, &quick()).unwrap();
    // Reproducible score, never worse than any start, feasible optimum.
    assert_eq!(r.best_score, objective(&r.best_params, &scenario).score);
    assert!(r.start_scores.iter().all(|&s| r.best_score <= s));
    assert!(r.best_params.phi_dc + r.best_params.phi_rf <= FRAC_PI_2 - JOINT_MARGIN + 1e-12);
    for restart in 0..r.restarts_used {
        let scores: Vec<f64> = r
            .trace
            .iter()
            .filter(|t| t.restart == restart)
            .map(|t| t.best_score)
            .collect();
        assert!(scores.windows(2).all(|w| w[1] <= w[0]));
    }
}

#[test]
fn different_targets_give_different_argmax() {
    let one = search(&free_scenario(1), &quick()).unwrap();
    let three = search(&free_scenario(3), &quick()).unwrap();
    let a1 = one.spectrum.argmax_power_r(1..=7);
    let a3 = three.spectrum.argmax_power_r(1..=7);
    assert_eq!(a1, Some(1));
    assert_ne!(a1, a3);
    assert!(verify_selectivity(&one.spectrum, &free_scenario(1)).worst_margin_db > 0.0);
}
