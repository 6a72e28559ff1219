//! Experiment runner, file formats and CLI support for `grassfeed-core`.
//!
//! A run reads an [`config::ExperimentConfig`], simulates every scenario
//! with [`experiment::run_experiment`] and writes CSV, JSON and SVG files
//! with [`output::emit_outputs`].

pub mod codebook_io;
pub mod config;
pub mod error;
pub mod experiment;
pub mod output;

pub use error::{SimError, SimResult};
