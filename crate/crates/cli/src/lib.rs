//! Batch benchmarking and the file plumbing behind the `tstar` binary.

pub mod bench;
pub mod io;

pub use bench::{draw_conditions, run_bench, BenchConfig, BenchRecord, BenchReport, Conditions};
