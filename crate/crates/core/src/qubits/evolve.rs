//! Exponential-midpoint propagation of a pure state.
//!
//! Each step applies `exp(-i H(t + dt/2) dt)` to the state, the second-order
//! Magnus integrator. The exponential acts through its Taylor series on the
//! sparse Hamiltonian, summed to machine precision, so every step is unitary
//! up to rounding.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::array::QubitArray;
use super::graph::CouplingGraph;
use super::hamiltonian::{Frame, Model};
use super::state::{PureState, NORM_TOLERANCE};
use crate::error::{ensure_finite, Error, Result};

/// Steps per inverse Hamiltonian norm when no step is given.
pub const DEFAULT_STEPS_PER_NORM: f64 = 50.0;

fn default_samples() -> usize {
    201
}

fn default_step_guard() -> f64 {
    0.5
}

fn default_norm_tolerance() -> f64 {
    NORM_TOLERANCE
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    #[serde(rename = "t_final_s")]
    pub t_final: f64,
    /// Time step, s; `None` uses `1 / (50 |H|)`.
    #[serde(rename = "dt_s", default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub frame: Frame,
    /// Recorded trajectory points, endpoints included.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Largest accepted `dt |H|`.
    #[serde(default = "default_step_guard")]
    pub step_guard: f64,
    #[serde(default = "default_norm_tolerance")]
    pub norm_tolerance: f64,
}

impl EvolveConfig {
    pub fn new(t_final: f64) -> Self {
        Self {
            t_final,
            dt: None,
            frame: Frame::Rotating,
            samples: default_samples(),
            step_guard: default_step_guard(),
            norm_tolerance: NORM_TOLERANCE,
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }

    pub fn with_frame(mut self, frame: Frame) -> Self {
        self.frame = frame;
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("t_final_s", self.t_final)?;
        if self.t_final < 0.0 {
            return Err(Error::invalid("t_final_s", "must be non-negative"));
        }
        if let Some(dt) = self.dt {
            ensure_finite("dt_s", dt)?;
            if dt <= 0.0 {
                return Err(Error::invalid("dt_s", "must be positive"));
            }
        }
        if self.samples < 2 {
            return Err(Error::invalid("samples", "need at least the two endpoints"));
        }
        if !(self.step_guard > 0.0) || !(self.norm_tolerance > 0.0) {
            return Err(Error::invalid(
                "step_guard",
                "guard and norm tolerance must be positive",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Per-qubit excitation probability at each recorded time.
    pub populations: Vec<Vec<f64>>,
    pub excitation_numbers: Vec<f64>,
    /// Largest `| |psi|^2 - 1 |` over the recorded points.
    pub max_norm_drift: f64,
    pub dt: f64,
    pub steps: usize,
    pub final_state: PureState,
}

/// Applies `exp(-i H dt)` by Taylor summation.
fn step_exponential(
    model: &Model,
    t_mid: f64,
    dt: f64,
    psi: &mut [Complex64],
    term: &mut Vec<Complex64>,
    next: &mut Vec<Complex64>,
    phases: &mut Vec<Complex64>,
) {
    term.clear();
    term.extend_from_slice(psi);
    let scale: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut k = 0usize;
    loop {
        k += 1;
        model.apply_at(t_mid, phases, term, next);
        let factor = Complex64::new(0.0, -dt / k as f64);
        let mut size = 0.0;
        for (t, n) in term.iter_mut().zip(next.iter()) {
            *t = n * factor;
            size += t.norm_sqr();
        }
        for (p, t) in psi.iter_mut().zip(term.iter()) {
            *p += t;
        }
        if size.sqrt() <= 1e-18 * scale || k >= 80 {
            break;
        }
    }
}

/// Propagates `state` to `config.t_final`.
pub fn evolve(
    state: &PureState,
    graph: &CouplingGraph,
    array: &QubitArray,
    config: &EvolveConfig,
) -> Result<Trajectory> {
    config.validate()?;
    array.validate()?;
    if state.qubits != array.len() {
        return Err(Error::DimensionMismatch {
            left: state.qubits,
            right: array.len(),
        });
    }
    let model = Model::new(graph, array, state.basis, config.frame)?;
    if model.dim != state.amplitudes.len() {
        return Err(Error::DimensionMismatch {
            left: state.amplitudes.len(),
            right: model.dim,
        });
    }
    let norm = model.norm_inf();
    let dt_max = match config.dt {
        Some(dt) => dt,
        None if norm > 0.0 => 1.0 / (DEFAULT_STEPS_PER_NORM * norm),
        None => config.t_final.max(f64::MIN_POSITIVE),
    };
    let product = dt_max * norm;
    if product > config.step_guard {
        return Err(Error::StepSize {
            product,
            limit: config.step_guard,
        });
    }
    let steps = ((config.t_final / dt_max).ceil() as usize).max(1);
    let dt = config.t_final / steps as f64;

    // Sample indices spread evenly over [0, steps].
    let intervals = (config.samples - 1).min(steps);
    let mut marks = (0..=intervals).map(|j| j * steps / intervals).peekable();

    let mut current = state.clone();
    let mut trajectory = Trajectory {
        times: Vec::with_capacity(intervals + 1),
        populations: Vec::with_capacity(intervals + 1),
        excitation_numbers: Vec::with_capacity(intervals + 1),
        max_norm_drift: 0.0,
        dt,
        steps,
        final_state: state.clone(),
    };
    let record = |k: usize, s: &PureState, traj: &mut Trajectory| -> Result<()> {
        let t = k as f64 * dt;
        let drift = (s.norm_sqr() - 1.0).abs();
        traj.max_norm_drift = traj.max_norm_drift.max(drift);
        if !(drift <= config.norm_tolerance) {
            return Err(Error::NormDrift { drift, time: t });
        }
        traj.times.push(t);
        traj.populations.push(s.excitation_probabilities());
        traj.excitation_numbers.push(s.excitation_number());
        Ok(())
    };

    let (mut term, mut next, mut phases) = (Vec::new(), vec![Complex64::new(0.0, 0.0); model.dim], Vec::new());
    while marks.peek() == Some(&0) {
        marks.next();
    }
    record(0, &current, &mut trajectory)?;
    for k in 1..=steps {
        let t_mid = (k as f64 - 0.5) * dt;
        step_exponential(
            &model,
            t_mid,
            dt,
            &mut current.amplitudes,
            &mut term,
            &mut next,
            &mut phases,
        );
        if marks.peek() == Some(&k) {
            while marks.peek() == Some(&k) {
                marks.next();
            }
            record(k, &current, &mut trajectory)?;
        }
    }
    trajectory.final_state = current;
    Ok(trajectory)
}
