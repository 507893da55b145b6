//! Experiment configuration, CSV datasets and the runners behind the `qsl` binary.

mod config;
mod csv;
mod figures;
mod validate;

pub use config::{Experiment, ExperimentConfig, Spacing, CONFIG_KEYS};
pub use csv::{Cell, CsvDataset};
pub use figures::{figure1_state, run_exclusion, run_figure1, run_figure2, run_ghz_scaling};
pub use validate::{invariant_count, records_dataset, run_validate, validation_records, InvariantRecord};

use crate::error::Result;

/// Runs the experiment named in `cfg`.
pub fn run(cfg: &ExperimentConfig) -> Result<CsvDataset> {
    match cfg.experiment {
        Experiment::Figure1 => run_figure1(cfg),
        Experiment::Figure2 => run_figure2(cfg),
        Experiment::Exclusion => run_exclusion(cfg),
        Experiment::GhzScaling => run_ghz_scaling(cfg),
        Experiment::Validate => run_validate(cfg),
    }
}
