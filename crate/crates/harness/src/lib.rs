//! Experiment harness for the random 2-SAT laboratory: grid cells, run
//! records, CSV and SVG output, and the verification suites behind the
//! `walklab` CLI.

pub mod cell;
pub mod plot;
pub mod record;
pub mod verify;

pub use cell::{run_cell, run_cells, run_cells_sequential, run_formula, Cell, CellOptions};
pub use plot::render_svg;
pub use record::{summarize, GroupSummary, RunRecord, CSV_HEADER};
pub use verify::{exit_code, run_default_suite, CheckKind, CheckOutcome};

#[cfg(feature = "parallel")]
pub use cell::run_cells_parallel;
