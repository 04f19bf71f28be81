//! Command-line runner for prepsim: scenario configs in, JSON reports and
//! a summary table out.

pub mod app;
pub mod config;
pub mod report;
pub mod runner;

pub use config::ScenarioConfig;
pub use report::RunReport;
pub use runner::run_scenario;
