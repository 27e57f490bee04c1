//! Drawing noisy circuits from a circuit QPR.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::error::{QemError, Result};
use crate::qpr::CircuitQpr;
use crate::quantum::NoisyCircuit;

#[derive(Clone, Debug, PartialEq)]
pub struct SampledCircuit {
    /// Outcome index per unit of the plan.
    pub choice: Vec<usize>,
    pub circuit: NoisyCircuit,
    pub sign: i8,
    /// Probability of drawing this outcome combination.
    pub probability: f64,
}

/// Per-unit outcome distributions `|η|/γ_unit`.
#[derive(Clone, Debug)]
pub struct PlanSampler {
    dists: Vec<WeightedIndex<f64>>,
}

impl PlanSampler {
    pub fn new(plan: &CircuitQpr) -> Result<Self> {
        let dists = plan
            .units
            .iter()
            .map(|u| {
                WeightedIndex::new(u.outcomes.iter().map(|o| o.eta.abs()))
                    .map_err(|e| QemError::InvalidArgument(format!("unit weights: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { dists })
    }

    pub fn choice<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        self.dists.iter().map(|d| d.sample(rng)).collect()
    }
}

/// Probability of an outcome combination under the plan.
pub fn choice_probability(plan: &CircuitQpr, choice: &[usize]) -> f64 {
    plan.units.iter().zip(choice).map(|(u, &c)| u.outcomes[c].eta.abs() / u.gamma()).product()
}

pub fn sample_noisy_circuit<R: Rng + ?Sized>(plan: &CircuitQpr, rng: &mut R) -> Result<SampledCircuit> {
    let choice = PlanSampler::new(plan)?.choice(rng);
    let (circuit, sign) = plan.circuit_for(&choice)?;
    let probability = choice_probability(plan, &choice);
    Ok(SampledCircuit { choice, circuit, sign, probability })
}
