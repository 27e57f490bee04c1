//! Continuous-time noisy evolution under piecewise-constant Hamiltonians.

pub mod drift;
pub mod integrate;
pub mod noise;
pub mod schedule;

pub use drift::{build_drift_schedule, haar_su2};
pub use integrate::{evolve_master_equation, evolve_with, Integrator, DEFAULT_DT_MAX};
pub use noise::{noise_rate_from_depolarizing_strength, NoiseGenerator};
pub use schedule::{rescale_schedule, Schedule, Segment};
