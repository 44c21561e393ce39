//! The four studies. Each turns a validated [`Scenario`] into result tables.
//!
//! Item `i` of a study (a realization, a UE drop, a random pair) is driven by
//! `derive_seed(master_seed, stream_id(study name), i)`, so a study's output
//! does not depend on thread count or evaluation order.

use eit_core::rng::{derive_seed, stream_id};

use crate::error::{Result, SimError};
use crate::scenario::{Scenario, StudyKind};
use crate::table::{Metadata, ResultTable};

pub mod dense;
pub mod emcore;
pub mod nearfield;
pub mod tripol;

/// Which columns to plot against which.
#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub x: &'static str,
    pub y: &'static [&'static str],
    /// Column that splits the rows into separate curves.
    pub series: Option<&'static str>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableOutput {
    pub table: ResultTable,
    pub description: &'static str,
    pub plot: Option<Plot>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyOutput {
    pub study: StudyKind,
    pub metadata: Metadata,
    pub tables: Vec<TableOutput>,
}

impl StudyOutput {
    pub fn table(&self, name: &str) -> Option<&ResultTable> {
        self.tables.iter().map(|t| &t.table).find(|t| t.name == name)
    }
}

/// Seed of item `index` of the scenario's study.
pub fn item_seed(scenario: &Scenario, index: usize) -> u64 {
    derive_seed(scenario.seed, stream_id(scenario.study.as_str()), index as u64)
}

/// Sub-stream of an item seed, for draws that must not share a generator.
pub fn sub_seed(item: u64, label: &str) -> u64 {
    derive_seed(item, stream_id(label), 0)
}

pub fn run_study(scenario: &Scenario) -> Result<StudyOutput> {
    let errors = scenario.validate();
    if !errors.is_empty() {
        return Err(SimError::Validation(errors));
    }
    log::info!(
        "running {} study, seed {}, scale {}",
        scenario.study.as_str(),
        scenario.seed,
        scenario.scale
    );
    let tables = match scenario.study {
        StudyKind::DenselySpaced => dense::run(scenario)?,
        StudyKind::NearField => nearfield::run(scenario)?,
        StudyKind::TriPol => tripol::run(scenario)?,
        StudyKind::EmCoreValidation => emcore::run(scenario)?,
    };
    Ok(StudyOutput {
        study: scenario.study,
        metadata: Metadata {
            study: scenario.study.as_str().to_string(),
            seed: scenario.seed,
            scale: scenario.scale,
            generator: format!("eit-sim {}", env!("CARGO_PKG_VERSION")),
            scenario_hash: scenario.content_hash(),
        },
        tables,
    })
}

/// Turns file-level validation messages raised while a study runs into a
/// validation error (they are caught by `validate` first in normal use).
pub(crate) fn invalid(errors: Vec<String>) -> SimError {
    SimError::Validation(errors)
}
