//! Benchmark and convergence-study harness for the growth distance solver.
//!
//! Instances are generated deterministically from a seed, solved with
//! per-call timing, and written as CSV records under a JSON config line.

pub mod config;
pub mod instances;
pub mod records;
pub mod stats;
pub mod suite;
pub mod trace;

pub use config::{BenchConfig, ShapeClass};
pub use instances::{generate_instances, PairSpec};
pub use records::{read_records, write_records, BenchRecord};
pub use stats::{quantile, Percentiles};
pub use suite::{run_specs, run_suite, Summary, SuiteOutput};
pub use trace::{trace_convergence, write_trace_csv};
