use std::collections::BTreeSet;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::array::QubitArray;
use crate::error::{ensure_finite, Error, Result};
use crate::floquet::HarmonicSpectrum;

/// One flip-flop channel: an excitation moves from qubit `a` to qubit `b`
/// while harmonic `m` supplies the energy difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub m: i64,
    /// Coupling strength, Hz.
    pub g_hz: f64,
    /// Residual detuning `(omega_b - omega_a) - m omega_mod`, rad/s.
    pub delta_omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingGraph {
    pub qubits: usize,
    /// Signed modulation angular frequency carried by harmonic `m = 1`, rad/s.
    pub omega_mod: f64,
    pub edges: Vec<Edge>,
}

impl CouplingGraph {
    /// Unordered qubit pairs joined by at least one edge.
    pub fn pairs(&self) -> BTreeSet<(usize, usize)> {
        self.edges.iter().map(|e| (e.a.min(e.b), e.a.max(e.b))).collect()
    }

    pub fn has_pair(&self, a: usize, b: usize) -> bool {
        self.pairs().contains(&(a.min(b), a.max(b)))
    }

    pub fn edges_between(&self, a: usize, b: usize) -> impl Iterator<Item = &Edge> {
        self.edges
            .iter()
            .filter(move |e| (e.a, e.b) == (a, b) || (e.a, e.b) == (b, a))
    }

    /// Qubits joined to `q` by at least one edge.
    pub fn neighbours(&self, q: usize) -> BTreeSet<usize> {
        self.edges
            .iter()
            .filter_map(|e| {
                if e.a == q {
                    Some(e.b)
                } else if e.b == q {
                    Some(e.a)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn is_static(&self) -> bool {
        self.edges.iter().all(|e| e.delta_omega == 0.0 && e.m == 0)
    }

    pub fn validate(&self) -> Result<()> {
        for e in &self.edges {
            if e.a == e.b {
                return Err(Error::invalid("edges", format!("self-edge on qubit {}", e.a)));
            }
            if e.a >= self.qubits || e.b >= self.qubits {
                return Err(Error::DimensionMismatch {
                    left: e.a.max(e.b) + 1,
                    right: self.qubits,
                });
            }
            ensure_finite("g_hz", e.g_hz)?;
            ensure_finite("delta_omega", e.delta_omega)?;
            if e.g_hz < 0.0 {
                return Err(Error::invalid("g_hz", "must be non-negative"));
            }
        }
        ensure_finite("omega_mod", self.omega_mod)
    }
}

/// Nearest-neighbour graph of the bare array. Each edge carries the bare
/// detuning of its pair.
pub fn monochromatic_graph(array: &QubitArray) -> Result<CouplingGraph> {
    array.validate()?;
    let mut edges = Vec::new();
    for a in 0..array.len() {
        let (r, c) = array.position(a);
        let right = (c + 1 < array.cols).then(|| array.index(r, c + 1));
        let down = (r + 1 < array.rows).then(|| array.index(r + 1, c));
        for b in [right, down].into_iter().flatten() {
            edges.push(Edge {
                a,
                b,
                m: 0,
                g_hz: array.g0,
                delta_omega: array.omega(b) - array.omega(a),
            });
        }
    }
    Ok(CouplingGraph {
        qubits: array.len(),
        omega_mod: 0.0,
        edges,
    })
}

/// Calibration of the harmonic-amplitude to coupling-strength map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingMapConfig {
    /// Coupling per unit reflection amplitude, Hz.
    #[serde(rename = "g_ms_hz")]
    pub g_ms: f64,
    /// Rotating-wave acceptance window, rad/s. `None` uses
    /// `10 * 2 pi * g_ms * max |R_m|`.
    #[serde(rename = "w_rwa_rad_s", default)]
    pub w_rwa: Option<f64>,
}

impl CouplingMapConfig {
    pub fn new(g_ms: f64) -> Self {
        Self { g_ms, w_rwa: None }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("g_ms_hz", self.g_ms)?;
        if self.g_ms < 0.0 {
            return Err(Error::invalid("g_ms_hz", "must be non-negative"));
        }
        if let Some(w) = self.w_rwa {
            ensure_finite("w_rwa_rad_s", w)?;
            if w < 0.0 {
                return Err(Error::invalid("w_rwa_rad_s", "must be non-negative"));
            }
        }
        Ok(())
    }

    pub fn window(&self, spectrum: &HarmonicSpectrum) -> f64 {
        self.w_rwa.unwrap_or_else(|| {
            let r_max = radiating(spectrum).map(|(_, r)| r).fold(0.0, f64::max);
            10.0 * 2.0 * PI * self.g_ms * r_max
        })
    }
}

/// Harmonics that reach the qubits: propagating, with a nonzero amplitude.
fn radiating(spectrum: &HarmonicSpectrum) -> impl Iterator<Item = (i64, f64)> + '_ {
    spectrum
        .harmonics
        .iter()
        .filter(|h| h.is_propagating())
        .map(|h| (h.n, h.r().norm()))
        .filter(|&(_, r)| r > 0.0)
}

/// Metasurface-mediated couplings.
///
/// Every ordered pair `(a, b)` and radiating harmonic `m` with
/// `|(omega_b - omega_a) - m omega_mod| <= w_rwa` yields an edge of strength
/// `g_ms |R_m|`, independent of distance. The specular harmonic `m = 0` is
/// the same channel in both directions and is emitted once per pair.
pub fn polychromatic_graph(
    array: &QubitArray,
    spectrum: &HarmonicSpectrum,
    mapping: &CouplingMapConfig,
) -> Result<CouplingGraph> {
    array.validate()?;
    mapping.validate()?;
    if spectrum.harmonics.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    let omega_mod = 2.0 * PI * spectrum.f_mod_hz;
    let window = mapping.window(spectrum);
    let harmonics: Vec<(i64, f64)> = radiating(spectrum).collect();
    let mut edges = Vec::new();
    for a in 0..array.len() {
        for b in 0..array.len() {
            if a == b {
                continue;
            }
            for &(m, r) in &harmonics {
                if m == 0 && b < a {
                    continue;
                }
                let delta_omega = (array.omega(b) - array.omega(a)) - m as f64 * omega_mod;
                if delta_omega.abs() <= window {
                    edges.push(Edge {
                        a,
                        b,
                        m,
                        g_hz: mapping.g_ms * r,
                        delta_omega,
                    });
                }
            }
        }
    }
    Ok(CouplingGraph {
        qubits: array.len(),
        omega_mod,
        edges,
    })
}
