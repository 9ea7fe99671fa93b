//! Scenario files and the `analyze`, `simulate`, `compare` and `sweep`
//! commands behind the `hwbeam` binary.

mod commands;
mod config;
mod sweep;

pub use commands::{
    analytic_counts, cmd_analyze, cmd_compare, cmd_simulate, cmd_sweep, schema_line,
    write_comparison_csv, write_json, write_key_value_csv, write_sweep_csv, AnalysisReport,
    ComparisonReport, ComparisonRow, DoubleSideDetail, Format, Gate, SimulationReport,
    GATE_REL_TOL,
};
pub use config::{
    parse_config, CodebookSection, Densities, Highway, OverheadSection, RunSection, ScenarioConfig,
};
pub use sweep::{SweepOutput, SweepParameter, SweepRow, SweepSpec};
