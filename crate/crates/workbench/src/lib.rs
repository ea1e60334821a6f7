//! Configuration, batch CLI and HTTP session service for the workbench.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod journal;
pub mod service;

pub use config::WorkbenchConfig;
pub use error::{Result, WorkbenchError};
