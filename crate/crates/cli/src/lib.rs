//! Command-line front end for `outlierfreq-core`: experiment files, return
//! series ingestion, CSV/JSON/SVG output and replayable run manifests.

pub mod commands;
pub mod config;
pub mod error;
pub mod ingest;
pub mod manifest;
pub mod output;
pub mod svg;

pub use error::{exit, CliError, Result};
