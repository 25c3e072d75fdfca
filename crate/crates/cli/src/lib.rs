//! File formats, generators and commands around `decospan-core`.
//!
//! Every command is a deterministic function of its inputs and `--seed`.
//! The seed fans out into labelled streams (see `decospan_core::rng`):
//! `gen/<kind>` for generators, `scheme` for calibration, `build` for the
//! construction itself, and `probe`, `probe/pairs`, `probe/reference` for
//! the probe command.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
mod error;
pub mod gen;
pub mod io;

pub use error::{CliError, Result};
