//! Scenario files: one JSON document holding every stage's settings.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use stcq_core::floquet::{IncidentWave, SolverConfig, STUDY_WINDOW};
use stcq_core::metrics::MetricsConfig;
use stcq_core::modulation::ModulationProfile;
use stcq_core::optimize::{Scenario, SearchConfig};
use stcq_core::qubits::{Basis, CouplingMapConfig, EvolveConfig, Frame, PureState, QubitArray};
use stcq_core::Error as CoreError;

use crate::error::CliError;

fn unit() -> f64 {
    1.0
}

fn three() -> f64 {
    3.0
}

fn default_samples() -> usize {
    201
}

fn default_window() -> i64 {
    STUDY_WINDOW
}

fn default_guard() -> f64 {
    0.5
}

/// Qubit array with either explicit frequencies or a `k * f_base` ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitsSection {
    pub rows: usize,
    pub cols: usize,
    #[serde(default)]
    pub f_q_hz: Option<Vec<f64>>,
    /// Qubit `k` (one-based) sits at `k * ladder_base_hz`.
    #[serde(default)]
    pub ladder_base_hz: Option<f64>,
    /// Qubit pitch, m.
    #[serde(rename = "spacing_m", default = "unit")]
    pub spacing: f64,
    #[serde(default)]
    pub g0_hz: f64,
    #[serde(default = "three")]
    pub decay_exponent: f64,
}

impl QubitsSection {
    pub fn array(&self) -> Result<QubitArray, CoreError> {
        let mut array = match (&self.f_q_hz, self.ladder_base_hz) {
            (Some(f), None) => QubitArray::new(self.rows, self.cols, f.clone(), self.g0_hz),
            (None, Some(base)) => QubitArray::ladder(self.rows, self.cols, base, self.g0_hz),
            _ => {
                return Err(CoreError::InvalidParameter {
                    field: "qubits",
                    reason: "give exactly one of f_q_hz and ladder_base_hz".into(),
                })
            }
        };
        array.spacing = self.spacing;
        array.decay_exponent = self.decay_exponent;
        array.validate()?;
        Ok(array)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionSection {
    pub t_final_s: f64,
    #[serde(default)]
    pub dt_s: Option<f64>,
    #[serde(default)]
    pub frame: Frame,
    #[serde(default)]
    pub basis: Basis,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_guard")]
    pub step_guard: f64,
    /// Zero-based qubit carrying the initial excitation.
    #[serde(default)]
    pub initial_qubit: usize,
    /// Qubit whose excited state is the fidelity reference.
    #[serde(default)]
    pub reference_qubit: Option<usize>,
}

impl EvolutionSection {
    pub fn config(&self) -> EvolveConfig {
        let mut c = EvolveConfig::new(self.t_final_s).with_frame(self.frame);
        c.dt = self.dt_s;
        c.samples = self.samples;
        c.step_guard = self.step_guard;
        c
    }

    pub fn initial_state(&self, qubits: usize) -> Result<PureState, CoreError> {
        PureState::excited(self.basis, qubits, self.initial_qubit)
    }

    pub fn reference_state(&self, qubits: usize) -> Result<Option<PureState>, CoreError> {
        self.reference_qubit
            .map(|q| PureState::excited(self.basis, qubits, q))
            .transpose()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeSection {
    pub scenario: Scenario,
    #[serde(default)]
    pub search: SearchConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    PhiDc,
    PhiRf,
    ThicknessWavelengths,
    FSHz,
    GammaV,
    ThetaIRad,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

impl SweepSection {
    /// Profile and incident wave with the swept parameter set to `value`.
    pub fn apply(&self, base: &ScenarioFile, value: f64) -> (ModulationProfile, IncidentWave) {
        let (mut m, mut w) = (base.modulation, base.incident);
        match self.parameter {
            SweepParameter::PhiDc => m.phi_dc = value,
            SweepParameter::PhiRf => m.phi_rf = value,
            SweepParameter::ThicknessWavelengths => m.thickness = value,
            SweepParameter::FSHz => m.f_s = value,
            SweepParameter::GammaV => m.gamma_v = value,
            SweepParameter::ThetaIRad => w.theta_i = value,
        }
        (m, w)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub name: Option<String>,
    pub modulation: ModulationProfile,
    pub incident: IncidentWave,
    #[serde(default)]
    pub solver: SolverConfig,
    /// Harmonics `|n| <=` this are compared during truncation refinement.
    #[serde(default = "default_window")]
    pub convergence_window: i64,
    #[serde(default)]
    pub qubits: Option<QubitsSection>,
    #[serde(default)]
    pub mapping: Option<CouplingMapConfig>,
    #[serde(default)]
    pub evolution: Option<EvolutionSection>,
    #[serde(default)]
    pub metrics: Option<MetricsConfig>,
    #[serde(default)]
    pub optimize: Option<OptimizeSection>,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
}

/// A parsed scenario together with the hash of its canonical form.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub file: ScenarioFile,
    pub hash: String,
}

/// SHA-256 of the compact JSON with keys sorted at every level, so the hash
/// ignores key order and whitespace.
pub fn canonical_hash(value: &serde_json::Value) -> String {
    // serde_json's default map is ordered by key.
    let text = serde_json::to_string(value).expect("a JSON value always serializes");
    hex::encode(Sha256::digest(text.as_bytes()))
}

pub fn parse(text: &str) -> Result<LoadedScenario, CliError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    let hash = canonical_hash(&value);
    let file: ScenarioFile = serde_json::from_value(value).map_err(|e| CliError::Config(e.to_string()))?;
    file.validate()?;
    Ok(LoadedScenario { file, hash })
}

pub fn load(path: &Path) -> Result<LoadedScenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse(&text)
}

fn section<T>(name: &'static str, result: Result<T, CoreError>) -> Result<T, CliError> {
    result.map_err(|e| CliError::Validation {
        section: name,
        error: e,
    })
}

impl ScenarioFile {
    /// Runs every owning module's checks; nothing is computed before this
    /// passes.
    pub fn validate(&self) -> Result<(), CliError> {
        section("modulation", self.modulation.validate())?;
        section("incident", self.incident.validate())?;
        section("solver", self.solver.validate())?;
        if self.convergence_window < 0 {
            return Err(CliError::Validation {
                section: "convergence_window",
                error: CoreError::InvalidParameter {
                    field: "convergence_window",
                    reason: "must be non-negative".into(),
                },
            });
        }
        let array = self.qubits.as_ref().map(|q| section("qubits", q.array())).transpose()?;
        if let Some(m) = &self.mapping {
            section("mapping", m.validate())?;
        }
        if let Some(ev) = &self.evolution {
            let array = array.as_ref().ok_or(CliError::MissingSection("qubits"))?;
            section("evolution", ev.config().validate())?;
            section("evolution", ev.initial_state(array.len()).map(|_| ()))?;
            section("evolution", ev.reference_state(array.len()).map(|_| ()))?;
            if self.mapping.is_none() {
                return Err(CliError::MissingSection("mapping"));
            }
        }
        if let Some(m) = &self.metrics {
            section("metrics", m.validate())?;
        }
        if let Some(o) = &self.optimize {
            section("optimize", o.scenario.validate())?;
            section("optimize", o.search.validate())?;
        }
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                return Err(CliError::Validation {
                    section: "sweep",
                    error: CoreError::InvalidParameter {
                        field: "values",
                        reason: "nothing to sweep".into(),
                    },
                });
            }
            for &v in &s.values {
                let (m, w) = s.apply(self, v);
                section("sweep", m.validate())?;
                section("sweep", w.validate())?;
            }
        }
        Ok(())
    }

    pub fn array(&self) -> Result<QubitArray, CliError> {
        let q = self.qubits.as_ref().ok_or(CliError::MissingSection("qubits"))?;
        section("qubits", q.array())
    }

    pub fn mapping(&self) -> Result<&CouplingMapConfig, CliError> {
        self.mapping.as_ref().ok_or(CliError::MissingSection("mapping"))
    }

    pub fn evolution(&self) -> Result<&EvolutionSection, CliError> {
        self.evolution.as_ref().ok_or(CliError::MissingSection("evolution"))
    }
}
