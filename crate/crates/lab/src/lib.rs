//! File formats, run manifests, parallel drivers and the `sperner` command line on top of
//! `sperner-core`.

pub mod cli;
pub mod drivers;
pub mod error;
pub mod io;
pub mod manifest;
pub mod selftest;

pub use error::{ExitCode, LabError, LabResult};
