//! Degrees-of-freedom regions, phase durations, transmission plans and an
//! exact decodability simulator for the three-user MIMO broadcast channel
//! with delayed CSIT.

pub mod durations;
pub mod error;
pub mod geometry;
pub mod math;
pub mod regions;
pub mod scheme;
pub mod simulator;

pub use error::{DofError, Result};
