//! Generators, instance files, reports and the command line.

pub mod cli;
pub mod format;
pub mod generate;
pub mod report;

pub use format::{format_matrix, parse_instance, read_instance, write_instance, Format};
pub use generate::{gen_euclidean, gen_gap, gen_stars};
pub use report::{ExperimentRecord, Method};
