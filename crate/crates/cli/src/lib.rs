//! Scenario runner for matrix N-dilations: reads JSON scenarios, runs the
//! validate, factorize, dilate, gns and bridge suites from [`matdil_core`],
//! and writes JSON reports.

pub mod error;
pub mod fixtures;
pub mod format;
pub mod report;
pub mod runner;
pub mod scenario;

pub use error::CliError;
pub use fixtures::{builtin_fixtures, fixture};
pub use report::{Report, Status, SuiteDetail};
pub use runner::{run_all, run_scenario, summary, RunOptions, DEFAULT_SEED};
pub use scenario::{parse_config, ChannelSpec, Scenario, Suite};
