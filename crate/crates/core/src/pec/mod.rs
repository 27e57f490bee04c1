//! Probabilistic error cancellation: sampling circuits from a QPR and estimating with signs.

pub mod estimate;
pub mod sampling;
pub mod simulate;

pub use estimate::{
    allocate, exhaustive_pec_expectation, required_samples, run_pec, run_pec_grouped, run_unmitigated, GroupAllocation,
    GroupedOptions, PecEstimate, MAX_BRANCHES,
};
pub use sampling::{choice_probability, sample_noisy_circuit, PlanSampler, SampledCircuit};
pub use simulate::{diagonal_weights, PlanSimulator};
