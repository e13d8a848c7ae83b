//! Simulation, boundary classification and closed-form validation for
//! one-dimensional SDEs `dZ = σ(Z-) dX` driven by an α-stable Lévy process.

// Reference constants are kept digit for digit, and `!(x > 0.0)` guards also reject NaN.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod boundary_classifier;
pub mod cli;
pub mod error;
pub mod fluctuation_oracles;
pub mod montecarlo_harness;
pub mod parallel;
pub mod quad;
pub mod rng;
pub mod sde_timechange;
pub mod sigma_model;
pub mod special;
pub mod stable_core;
pub mod transforms;

pub use error::{Error, Result};
pub use rng::RandomState;
pub use sigma_model::SigmaFunction;
pub use stable_core::{Path, Sidedness, StableParams};
