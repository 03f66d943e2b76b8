//! Qubit arrays, coupling graphs and their dynamics.
//!
//! Frequencies and couplings are stored in hertz; Hamiltonians are in rad/s
//! (`H = 2 pi g` on a coupled pair) and time in seconds.

mod array;
mod evolve;
mod graph;
mod hamiltonian;
mod state;

pub use array::{coupling_decay, QubitArray};
pub use evolve::{evolve, EvolveConfig, Trajectory, DEFAULT_STEPS_PER_NORM};
pub use graph::{monochromatic_graph, polychromatic_graph, CouplingGraph, CouplingMapConfig, Edge};
pub use hamiltonian::{hamiltonian_at, Frame, SparseHamiltonian};
pub use state::{excitation_probabilities, Basis, PureState, FULL_HILBERT_CAP, NORM_TOLERANCE};
