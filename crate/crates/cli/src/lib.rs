//! Scenario files, subcommands and output writers for the `stcq` binary.

pub mod config;
pub mod error;
pub mod output;
pub mod pipeline;

pub use config::{load, parse, LoadedScenario, ScenarioFile};
pub use error::CliError;
pub use output::{Emitter, Format, RunManifest};
pub use pipeline::{run_scenario, PipelineOutcome};
