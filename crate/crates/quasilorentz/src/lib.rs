//! Parallel batch runs, file formats and the command-line driver for the
//! `quasilorentz-core` free-path simulator.

pub mod batch;
pub mod cli;
pub mod error;
pub mod experiment;
pub mod fields;
pub mod io;

pub use error::{AppError, AppResult};
