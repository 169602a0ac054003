//! Scenario files, report rendering and the `run`, `sweep` and `enumerate`
//! commands behind the `fdda` binary.

pub mod commands;
pub mod render;
pub mod scenario_file;

pub use commands::{
    cmd_enumerate, cmd_run, cmd_sweep, CliError, EnumerateTarget, ExitStatus, Rendered,
};
pub use render::{parse_machine_report, render_report, Format};
pub use scenario_file::{load_scenario, parse_scenario, render_scenario, ScenarioFileError};

/// Directory holding the bundled scenario files.
pub fn bundled_scenario_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}
