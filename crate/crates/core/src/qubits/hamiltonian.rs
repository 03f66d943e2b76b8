use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::array::QubitArray;
use super::graph::CouplingGraph;
use super::state::Basis;
use crate::error::{Error, Result};
use crate::linalg::CMat;

/// Reference frame of the Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    /// Interaction picture with respect to the bare qubit energies: no
    /// diagonal, couplings rotate at their residual detuning.
    #[default]
    Rotating,
    /// Qubit energies on the diagonal relative to the mean frequency;
    /// couplings rotate at the harmonic's modulation frequency.
    Lab,
}

/// Sparse Hermitian matrix in coordinate form, rad/s.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHamiltonian {
    pub dim: usize,
    pub diagonal: Vec<f64>,
    /// Off-diagonal entries `(row, col, value)`; each has its conjugate
    /// partner at `(col, row)`.
    pub entries: Vec<(usize, usize, Complex64)>,
}

impl SparseHamiltonian {
    /// `out = H x`.
    pub fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        for (o, (d, xi)) in out.iter_mut().zip(self.diagonal.iter().zip(x)) {
            *o = xi * *d;
        }
        for &(r, c, v) in &self.entries {
            out[r] += v * x[c];
        }
    }

    pub fn to_dense(&self) -> CMat {
        let mut m = Mat::<Complex64>::zeros(self.dim, self.dim);
        for (i, &d) in self.diagonal.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let mut rows: Vec<f64> = self.diagonal.iter().map(|d| d.abs()).collect();
        for &(r, _, v) in &self.entries {
            rows[r] += v.norm();
        }
        rows.into_iter().fold(0.0, f64::max)
    }
}

/// Mean qubit frequency, the diagonal offset of the lab frame, rad/s.
pub(crate) fn reference_omega(array: &QubitArray) -> f64 {
    (0..array.len()).map(|q| array.omega(q)).sum::<f64>() / array.len() as f64
}

/// Time-dependent Hamiltonian: every off-diagonal entry is
/// `amplitude * exp(i rate t)`.
#[derive(Debug, Clone)]
pub(crate) struct Model {
    pub dim: usize,
    pub diagonal: Vec<f64>,
    pub entries: Vec<(usize, usize, Complex64, f64)>,
}

impl Model {
    pub fn new(graph: &CouplingGraph, array: &QubitArray, basis: Basis, frame: Frame) -> Result<Self> {
        graph.validate()?;
        if graph.qubits != array.len() {
            return Err(Error::DimensionMismatch {
                left: graph.qubits,
                right: array.len(),
            });
        }
        let n = array.len();
        let offset = reference_omega(array);
        let energies: Vec<f64> = (0..n)
            .map(|q| match frame {
                Frame::Rotating => 0.0,
                Frame::Lab => array.omega(q) - offset,
            })
            .collect();
        let channel = |delta_omega: f64, m: i64| match frame {
            Frame::Rotating => delta_omega,
            Frame::Lab => -(m as f64) * graph.omega_mod,
        };
        let mut model = Self {
            dim: basis.dimension(n)?,
            diagonal: Vec::new(),
            entries: Vec::new(),
        };
        let mut push = |row: usize, col: usize, amplitude: f64, rate: f64| {
            model.entries.push((row, col, Complex64::new(amplitude, 0.0), rate));
            model.entries.push((col, row, Complex64::new(amplitude, 0.0), -rate));
        };
        match basis {
            Basis::SingleExcitation => {
                for e in &graph.edges {
                    push(e.b, e.a, 2.0 * PI * e.g_hz, channel(e.delta_omega, e.m));
                }
                model.diagonal = energies;
            }
            Basis::FullHilbert => {
                let dim = 1usize << n;
                for e in &graph.edges {
                    let (ma, mb) = (1usize << e.a, 1usize << e.b);
                    for s in 0..dim {
                        if s & ma != 0 && s & mb == 0 {
                            push(s ^ ma ^ mb, s, 2.0 * PI * e.g_hz, channel(e.delta_omega, e.m));
                        }
                    }
                }
                model.diagonal = (0..dim)
                    .map(|s| (0..n).filter(|q| s >> q & 1 == 1).map(|q| energies[q]).sum())
                    .collect();
            }
        }
        Ok(model)
    }

    pub fn at(&self, t: f64) -> SparseHamiltonian {
        SparseHamiltonian {
            dim: self.dim,
            diagonal: self.diagonal.clone(),
            entries: self
                .entries
                .iter()
                .map(|&(r, c, a, rate)| (r, c, a * Complex64::from_polar(1.0, rate * t)))
                .collect(),
        }
    }

    /// `out = H(t) x` without materializing `H(t)`.
    pub fn apply_at(&self, t: f64, phases: &mut Vec<Complex64>, x: &[Complex64], out: &mut [Complex64]) {
        phases.clear();
        phases.extend(
            self.entries
                .iter()
                .map(|&(_, _, a, rate)| a * Complex64::from_polar(1.0, rate * t)),
        );
        for (o, (d, xi)) in out.iter_mut().zip(self.diagonal.iter().zip(x)) {
            *o = xi * *d;
        }
        for (&(r, c, _, _), v) in self.entries.iter().zip(phases.iter()) {
            out[r] += v * x[c];
        }
    }

    /// Time-independent bound on the row sums of `|H(t)|`.
    pub fn norm_inf(&self) -> f64 {
        let mut rows: Vec<f64> = self.diagonal.iter().map(|d| d.abs()).collect();
        for &(r, _, a, _) in &self.entries {
            rows[r] += a.norm();
        }
        rows.into_iter().fold(0.0, f64::max)
    }
}

/// `H(t)` of the coupling graph, in rad/s.
///
/// An edge `(a, b, m, g, dw)` contributes `2 pi g exp(i dw t)` to
/// `<b|H|a>` in the rotating frame and `2 pi g exp(-i m omega_mod t)` in the
/// lab frame, plus the Hermitian conjugate. In the full basis the lab-frame
/// diagonal is the sum of excited-qubit energies relative to the mean.
pub fn hamiltonian_at(
    graph: &CouplingGraph,
    array: &QubitArray,
    t: f64,
    basis: Basis,
    frame: Frame,
) -> Result<SparseHamiltonian> {
    Ok(Model::new(graph, array, basis, frame)?.at(t))
}
