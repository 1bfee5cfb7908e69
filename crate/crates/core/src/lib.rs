//! Boson sampling with partially distinguishable photons.

pub mod cli;
pub mod distinguishability;
pub mod error;
pub mod interference;
pub mod linalg;
pub mod metrics;
pub mod oracle;
pub mod permgroup;
pub mod photon_model;
pub mod stats;

pub use error::{Error, Result};
