//! Library side of the `bench` binary: input generation, CSV records, and
//! the benchmark suites, kept callable so tests can drive them directly.

pub mod input;
pub mod record;
pub mod suites;

pub use input::{gen_input, Pattern};
pub use record::{read_csv, write_csv, BenchRecord};
pub use suites::{multiset_fingerprint, run_suite, BenchOpts, Suite};
