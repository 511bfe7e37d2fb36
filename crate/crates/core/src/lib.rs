//! Analysis toolkit for repeater-assisted QKD.
//!
//! - [`werner`]: closed-form fidelity maps for swapping and purification.
//! - [`noise`]: link, memory and signalling models.
//! - [`dm_oracle`]: exact density-matrix circuits used as a ground truth.
//! - [`chain`]: the nested swap/purify schedule and its fidelity trace.
//! - [`rate`]: bit-rate curves, threshold distance and scaling fits.

pub mod chain;
pub mod dm_oracle;
pub mod error;
pub mod format;
pub mod noise;
pub mod rate;
pub mod werner;

pub use error::{Error, Result};
pub use noise::{LinkModel, MemoryModel};
pub use werner::{Fidelity, FixedPoints, GateNoiseParams};
