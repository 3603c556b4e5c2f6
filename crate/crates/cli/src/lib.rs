//! Command-line tool, file formats and the parallel Monte Carlo driver for
//! `l2boost-core`.

pub mod cli;
pub mod io;
pub mod montecarlo;
pub mod report;

pub use cli::run;
