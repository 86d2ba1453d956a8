//! JSON task runner over hitchin-core: one task file in, one report out,
//! with a corpus mode that diffs a directory of tasks against recorded
//! expectations. Exit codes separate verdicts (0) from rejected input (2),
//! numeric non-convergence (3), and internal faults (4).

pub mod corpus;
pub mod report;
pub mod run;
pub mod task;

pub use run::{run_task, Failure};
pub use task::{resolve_settings, Command, Settings, TaskFile, TaskOptions};
