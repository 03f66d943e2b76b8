use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::objective::{evaluate, objective};
use super::scenario::Scenario;
use crate::error::{Error, Result};
use crate::floquet::HarmonicSpectrum;
use crate::modulation::ModulationProfile;

const PRIMES: [u64; 5] = [2, 3, 5, 7, 11];

/// Initial simplex edge in unit coordinates.
const SIMPLEX_STEP: f64 = 0.1;

fn default_restarts() -> usize {
    8
}

fn default_max_evals() -> usize {
    300
}

fn default_simplex_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    /// Objective evaluations allowed per restart.
    #[serde(default = "default_max_evals")]
    pub max_evals: usize,
    #[serde(default)]
    pub seed: u64,
    /// Stop once the simplex is this small in unit box coordinates.
    #[serde(default = "default_simplex_tol")]
    pub simplex_tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            restarts: default_restarts(),
            max_evals: default_max_evals(),
            seed: 0,
            simplex_tol: default_simplex_tol(),
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts < 1 {
            return Err(Error::invalid("restarts", "must be at least 1"));
        }
        if self.max_evals < 1 {
            return Err(Error::invalid("max_evals", "must be at least 1"));
        }
        if !(self.simplex_tol > 0.0) {
            return Err(Error::invalid("simplex_tol", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub restart: usize,
    pub iteration: usize,
    pub evaluations: usize,
    /// Best score of this restart so far.
    pub best_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best_params: ModulationProfile,
    pub best_score: f64,
    pub spectrum: HarmonicSpectrum,
    pub trace: Vec<TracePoint>,
    pub restarts_used: usize,
    pub evaluations: usize,
    /// Score at each restart's start point.
    pub start_scores: Vec<f64>,
    /// Last solver failure seen during the search.
    pub last_failure: Option<String>,
}

/// Radical inverse of `index` in `base`.
fn halton(mut index: u64, base: u64) -> f64 {
    let (mut f, mut r) = (1.0, 0.0);
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

/// Halton points with a seeded Cranley-Patterson rotation, one per restart.
pub fn start_points(dims: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..dims).map(|_| rng.gen::<f64>()).collect();
    (0..count)
        .map(|j| {
            (0..dims)
                .map(|d| (halton(j as u64 + 1, PRIMES[d]) + shift[d]).fract())
                .collect()
        })
        .collect()
}

/// Maps unit coordinates of the free parameters onto the feasible region.
struct Space<'a> {
    scenario: &'a Scenario,
    free: Vec<usize>,
    intervals: [[f64; 2]; 5],
}

impl Space<'_> {
    fn point(&self, u: &[f64]) -> [f64; 5] {
        let mut x = self.intervals.map(|iv| iv[0]);
        for (&i, &ui) in self.free.iter().zip(u) {
            let [lo, hi] = self.intervals[i];
            x[i] = lo + ui.clamp(0.0, 1.0) * (hi - lo);
        }
        self.scenario.project(&x)
    }

    fn profile(&self, u: &[f64]) -> ModulationProfile {
        self.scenario.profile_at(&self.point(u))
    }

    fn score(&self, u: &[f64], failure: &mut Option<String>) -> f64 {
        let profile = self.profile(u);
        assert!(profile.pole_margin() > 0.0, "projection left the secant domain");
        let e = objective(&profile, self.scenario);
        if e.diagnostic.is_some() {
            *failure = e.diagnostic;
        }
        if e.score.is_nan() {
            f64::INFINITY
        } else {
            e.score
        }
    }
}

struct Restart {
    best: Vec<f64>,
    best_score: f64,
    start_score: f64,
    evaluations: usize,
    trace: Vec<TracePoint>,
    failure: Option<String>,
}

fn by_score(a: &(Vec<f64>, f64), b: &(Vec<f64>, f64)) -> Ordering {
    a.1.total_cmp(&b.1)
}

/// Nelder-Mead on the unit box with clamped trial points.
fn nelder_mead(space: &Space, start: Vec<f64>, restart: usize, config: &SearchConfig) -> Restart {
    let k = start.len();
    let mut failure = None;
    let evals = std::cell::Cell::new(0usize);
    let eval = |u: &[f64], failure: &mut Option<String>| {
        evals.set(evals.get() + 1);
        space.score(u, failure)
    };
    let start_score = eval(&start, &mut failure);
    let mut simplex = vec![(start.clone(), start_score)];
    for i in 0..k {
        let mut v = start.clone();
        v[i] = if v[i] + SIMPLEX_STEP <= 1.0 {
            v[i] + SIMPLEX_STEP
        } else {
            v[i] - SIMPLEX_STEP
        };
        let f = eval(&v, &mut failure);
        simplex.push((v, f));
    }
    let clamp = |v: Vec<f64>| v.into_iter().map(|x| x.clamp(0.0, 1.0)).collect::<Vec<f64>>();
    let mut trace = Vec::new();
    let mut iteration = 0;
    loop {
        simplex.sort_by(by_score);
        trace.push(TracePoint {
            restart,
            iteration,
            evaluations: evals.get(),
            best_score: simplex[0].1,
        });
        let size = simplex
            .iter()
            .skip(1)
            .flat_map(|(v, _)| v.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if k == 0 || size <= config.simplex_tol || evals.get() >= config.max_evals {
            break;
        }
        iteration += 1;
        let centroid: Vec<f64> = (0..k)
            .map(|d| simplex[..k].iter().map(|(v, _)| v[d]).sum::<f64>() / k as f64)
            .collect();
        let worst = simplex[k].clone();
        let along = |t: f64| clamp(centroid.iter().zip(&worst.0).map(|(c, w)| c + t * (c - w)).collect());
        let reflected = along(1.0);
        let f_r = eval(&reflected, &mut failure);
        if f_r < simplex[0].1 {
            let expanded = along(2.0);
            let f_e = eval(&expanded, &mut failure);
            simplex[k] = if f_e < f_r { (expanded, f_e) } else { (reflected, f_r) };
        } else if f_r < simplex[k - 1].1 {
            simplex[k] = (reflected, f_r);
        } else {
            let (contracted, f_c) = if f_r < worst.1 {
                let c = along(0.5);
                let f = eval(&c, &mut failure);
                (c, f)
            } else {
                let c = along(-0.5);
                let f = eval(&c, &mut failure);
                (c, f)
            };
            if f_c < f_r.min(worst.1) {
                simplex[k] = (contracted, f_c);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let v: Vec<f64> = best.iter().zip(&entry.0).map(|(b, x)| b + 0.5 * (x - b)).collect();
                    let f = eval(&v, &mut failure);
                    *entry = (v, f);
                }
            }
        }
    }
    let (best, best_score) = simplex.swap_remove(0);
    Restart {
        best,
        best_score,
        start_score,
        evaluations: evals.get(),
        trace,
        failure,
    }
}

/// Multi-start simplex search over the scenario's free parameters.
///
/// Restarts run in parallel and are merged by `(score, restart index)`, so
/// the result depends only on the scenario and `config`.
pub fn search(scenario: &Scenario, config: &SearchConfig) -> Result<OptimizationResult> {
    scenario.validate()?;
    config.validate()?;
    let space = Space {
        scenario,
        free: scenario.free_parameters(),
        intervals: scenario.intervals(),
    };
    let restarts = if space.free.is_empty() { 1 } else { config.restarts };
    let starts = start_points(space.free.len(), restarts, config.seed);
    let runs: Vec<Restart> = starts
        .into_par_iter()
        .enumerate()
        .map(|(j, u)| nelder_mead(&space, u, j, config))
        .collect();
    let (index, winner) = runs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.best_score.total_cmp(&b.1.best_score).then(a.0.cmp(&b.0)))
        .expect("at least one restart");
    if !winner.best_score.is_finite() {
        return Err(Error::NoFeasibleEvaluation);
    }
    let best_params = space.profile(&winner.best);
    let (score, spectrum) = evaluate(&best_params, scenario)?;
    debug_assert_eq!(
        score.to_bits(),
        winner.best_score.to_bits(),
        "restart {index} not reproducible"
    );
    Ok(OptimizationResult {
        best_params,
        best_score: score,
        spectrum,
        trace: runs.iter().flat_map(|r| r.trace.iter().copied()).collect(),
        restarts_used: restarts,
        evaluations: runs.iter().map(|r| r.evaluations).sum(),
        start_scores: runs.iter().map(|r| r.start_score).collect(),
        last_failure: runs.iter().rev().find_map(|r| r.failure.clone()),
    })
}
