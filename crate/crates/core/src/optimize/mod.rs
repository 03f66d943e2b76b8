//! Parameter search for selective harmonic excitation.
//!
//! A [`Scenario`] names the harmonics to brighten and to suppress and the
//! box of metasurface parameters to explore. [`search`] runs seeded
//! multi-start Nelder-Mead over that box, scoring each point with a single
//! slab solve.

mod objective;
mod scenario;
mod search;

pub use objective::{evaluate, objective, score_spectrum, verify_selectivity, Evaluation, PairMargin, Selectivity};
pub use scenario::{Bounds, Fixed, Scenario, JOINT_MARGIN, PARAMETERS};
pub use search::{search, start_points, OptimizationResult, SearchConfig, TracePoint};
