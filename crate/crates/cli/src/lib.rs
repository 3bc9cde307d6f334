//! File formats, scenario generation, property sweeps and the `dsm-vcg`
//! command line, on top of the `dsm-vcg-core` engine.

pub mod cli;
pub mod generate;
pub mod report;
pub mod scenario_file;
pub mod sweep;

pub use generate::{generate_scenario, sweep_scenario, GenerateConfig, ProductionPolicy};
pub use report::{build_report, scenario_digest, write_report, ReportDocument};
pub use scenario_file::{load_scenario, parse_scenario, save_scenario, scenario_to_json, LoadError};
pub use sweep::{run_sweep, summarize, SweepConfig, SweepItem, SweepSummary};
