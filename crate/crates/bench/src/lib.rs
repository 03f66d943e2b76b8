//! Benchmarks for the numerical core. Inputs shared by the benches live here.

use stcq_core::floquet::solve_slab;
use stcq_core::qubits::{polychromatic_graph, CouplingGraph, CouplingMapConfig, QubitArray};
use stcq_core::{HarmonicSpectrum, IncidentWave, ModulationProfile, SolverConfig};

/// Selective single-harmonic panel at 3 GHz.
pub fn panel_a() -> ModulationProfile {
    ModulationProfile::new(1.22, 0.23, 0.4, 3e9, 1.0)
}

pub fn incident() -> IncidentWave {
    IncidentWave::normal(3e9)
}

pub fn spectrum(truncation: usize) -> HarmonicSpectrum {
    solve_slab(&panel_a(), &incident(), &SolverConfig::with_truncation(truncation)).expect("panel (a) solves")
}

/// Ladder of `qubits` qubits on multiples of 3 GHz coupled through the panel (a) spectrum.
pub fn ladder(qubits: usize) -> (QubitArray, CouplingGraph) {
    let array = QubitArray::ladder(1, qubits, 3e9, 5e6);
    let graph = polychromatic_graph(&array, &spectrum(16), &CouplingMapConfig::new(20e6)).expect("graph builds");
    (array, graph)
}
