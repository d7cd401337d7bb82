//! Library half of the `coalsim` binary: experiment commands and report
//! encodings, kept callable so tests can drive them directly.

pub mod commands;
pub mod report;

pub use commands::{cmd_commtime, cmd_compare, cmd_run, cmd_sweep, cmd_tables, SweepParameter};
pub use report::{
    allocation_string, parse_allocation, CommtimeRow, CompareRow, ExperimentRecord, RunReport,
    TableRow,
};
