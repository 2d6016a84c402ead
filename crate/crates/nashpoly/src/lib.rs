//! File formats, command line and multi-threaded drivers for the
//! `nashpoly-core` equilibrium solver.

pub mod cache;
pub mod cli;
pub mod error;
pub mod gamefile;
pub mod parallel;
pub mod phc;
pub mod validate;

pub use error::{Error, Result};
pub use nashpoly_core as core;
