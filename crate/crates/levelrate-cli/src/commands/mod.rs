//! Subcommand implementations behind the `levelrate` binary.

pub mod gradcheck_cmd;
pub mod optimize;
pub mod report;
pub mod topology_cmd;

pub use gradcheck_cmd::run_gradcheck_command;
pub use optimize::{run_optimize, run_optimize_sweep};
pub use report::run_report;
pub use topology_cmd::run_topology;
