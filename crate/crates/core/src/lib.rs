//! Simulation of noisy short-depth quantum circuits together with two error
//! mitigation schemes: zero-noise Richardson extrapolation and probabilistic
//! error cancellation through quasi-probability representations.

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod lp;
pub mod pec;
pub mod qpr;
pub mod quantum;
pub mod rng;
pub mod zne;

pub use error::{QemError, Result};
