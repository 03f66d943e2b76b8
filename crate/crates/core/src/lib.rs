//! Numerical core for space-time-coupled superconducting qubits.
//!
//! The crate models a Josephson metasurface whose kinetic inductance is
//! modulated in space and time, computes the space-time harmonics it
//! reflects, maps those harmonics onto polychromatic couplings inside a qubit
//! array, evolves the resulting dynamics and evaluates connectivity,
//! coherence, noise and fidelity figures of merit.
//!
//! Module map:
//!
//! * [`modulation`]: the modulated inductance and its Fourier harmonics.
//! * [`floquet`]: slab scattering by Bloch-mode matching, plus an FDTD oracle.
//! * [`qubits`]: qubit arrays, coupling graphs, Hamiltonians and propagation.
//! * [`metrics`]: connectivity, coherence, noise and fidelity formulas.
//! * [`optimize`]: multi-start simplex search over metasurface parameters.

pub mod error;
pub mod floquet;
pub mod linalg;
pub mod metrics;
pub mod modulation;
pub mod optimize;
pub mod qubits;

pub use error::{Error, Result};
pub use floquet::{FdtdConfig, Harmonic, HarmonicSpectrum, IncidentWave, SolverConfig};
pub use modulation::{Direction, ModulationProfile, Normalization};
pub use num_complex::Complex64;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Magnetic flux quantum h/2e, Wb.
pub const FLUX_QUANTUM: f64 = 2.067_833_848_484_619e-15;
