//! Simulation and verification engine for deterministic entangled atom pairs
//! produced by Feshbach-molecule dissociation.
//!
//! Modules map onto the physical pipeline: [`source`] prepares the entangled
//! resource states, [`control`] builds addressed single-qubit gates as pulse
//! schedules, [`noise`] composes imperfections, and [`measure`] evaluates the
//! entanglement witnesses analytically or by seeded Monte Carlo sampling.

pub mod control;
pub mod error;
pub mod measure;
pub mod noise;
pub mod qcore;
pub mod shots;
pub mod source;

pub use error::{Error, Result};
