//! File formats, on-disk caches, reports and the command-line front end
//! for `omegalab-core`.

pub mod cache;
pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod parallel;
pub mod report;

pub use config::{Experiment, ExperimentConfig, MachineSource, PrefixSource, SpecFile};
pub use error::{Error, Result};
pub use experiments::{run_experiment, Document};
pub use report::{emit_report, parse_json_report, Format, Report, PROVENANCE as PROVENANCE_COLUMN};
