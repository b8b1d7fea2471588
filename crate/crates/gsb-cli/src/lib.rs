//! File formats, configuration, density estimation, report tables and
//! command drivers for the `gsb` toolkit. The binary in this crate is a
//! thin wrapper over [`pipeline::run`].

pub mod config;
pub mod csv_io;
pub mod error;
pub mod kde;
pub mod pipeline;
pub mod table;

pub use error::{CliError, CliResult};
