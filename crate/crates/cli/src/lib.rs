//! Process files, the built-in example scenarios and report rendering
//! behind the `qkolmo` command-line tool.

pub mod format;
pub mod report;
pub mod scenarios;

pub use format::{parse_process, Diagnostic, ParseError, ParsedProcess, ProcessFile};
pub use scenarios::{run_scenario, scenario, Scenario, ScenarioId};
