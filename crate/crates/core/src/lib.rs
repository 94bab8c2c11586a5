//! Exact ramification computations for local field extensions.

pub mod cli;
pub mod document;
pub mod error;
pub mod exec;
pub mod filtration;
pub mod herbrand;
pub mod propgroup;
pub mod rational;
pub mod sample;
pub mod step;
pub mod tower;

pub use error::{Error, Result};
