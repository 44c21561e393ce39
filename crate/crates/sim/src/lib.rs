//! Scenario files, the four studies and result output for `eitsim`.
//!
//! A scenario is a TOML file naming one study plus its parameters:
//!
//! ```toml
//! study = "near-field"
//! seed = 7
//! scale = 0.2
//!
//! [near_field]
//! k_factor_db = 6.0
//! ```
//!
//! [`load_scenario`] parses and validates it, [`run_study`] produces result
//! tables and [`write_results`] stores them as CSV or JSON next to a
//! manifest.

pub mod error;
pub mod formats;
pub mod output;
pub mod runner;
pub mod scenario;
pub mod studies;
pub mod table;

pub use error::{Result, SimError};
pub use output::write_results;
pub use scenario::{load_scenario, OutputFormat, Scenario, StudyKind};
pub use studies::{run_study, StudyOutput};
pub use table::{Cell, ResultTable};
