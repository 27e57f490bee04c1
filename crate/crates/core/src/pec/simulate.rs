//! Noisy simulation of sampled circuits with prefix reuse.

use crate::error::{QemError, Result};
use crate::qpr::CircuitQpr;
use crate::quantum::circuit::{apply_layer, GateCache};
use crate::quantum::{DensityMatrix, NoiseModel, NoisyCircuit, Observable};

/// Simulates noisy circuits drawn from one plan.
///
/// States of the plan's most likely circuit are stored before every layer, so
/// a sampled circuit is only evolved from its first layer that differs.
pub struct PlanSimulator {
    noise: NoiseModel,
    reference: NoisyCircuit,
    /// `prefix[l]` is the reference state before layer `l`; the last entry is the output.
    prefix: Vec<DensityMatrix>,
}

impl PlanSimulator {
    pub fn new(plan: &CircuitQpr, rho0: &DensityMatrix) -> Result<Self> {
        if rho0.n_qubits() != plan.n_qubits {
            return Err(QemError::DimensionMismatch { expected: plan.n_qubits, found: rho0.n_qubits() });
        }
        let (reference, _) = plan.circuit_for(&plan.mode_choice())?;
        let mut cache = GateCache::default();
        let mut prefix = Vec::with_capacity(reference.depth() + 1);
        let mut rho = rho0.clone();
        prefix.push(rho.clone());
        for layer in &reference.layers {
            apply_layer(layer, Some(&plan.noise), &mut rho, &mut cache);
            prefix.push(rho.clone());
        }
        Ok(Self { noise: plan.noise, reference, prefix })
    }

    /// Final noisy state of `c`.
    pub fn final_state(&self, c: &NoisyCircuit) -> Result<DensityMatrix> {
        if c.depth() != self.reference.depth() || c.n_qubits != self.reference.n_qubits {
            return Err(QemError::InvalidArgument("circuit does not come from this plan".into()));
        }
        let start = c.layers.iter().zip(&self.reference.layers).position(|(a, b)| a != b).unwrap_or(c.depth());
        let mut rho = self.prefix[start].clone();
        c.apply_from(start, Some(&self.noise), &mut rho, &mut GateCache::default());
        Ok(rho)
    }

    /// Z-basis outcome probabilities of `c`.
    pub fn probabilities(&self, c: &NoisyCircuit) -> Result<Vec<f64>> {
        Ok(self.final_state(c)?.probabilities())
    }
}

/// Per-outcome values of an observable measured in the Z basis.
pub fn diagonal_weights(a: &Observable) -> Result<Vec<f64>> {
    let norm = a.norm();
    if norm > 1.0 + 1e-12 {
        return Err(QemError::ObservableNorm(norm));
    }
    (0..1usize << a.n_qubits())
        .map(|i| a.readout_value(i).ok_or_else(|| QemError::InvalidArgument("observable is not diagonal in the Z basis".into())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qpr::compose_circuit_qpr;
    use crate::quantum::state::plus_state;
    use crate::quantum::Circuit;

    #[test]
    fn prefix_reuse_matches_full_simulation() {
        let c: Circuit = "qubits 2\nH 0 | T 1\nCNOT 0 1\nS 0 | H 1".parse().unwrap();
        for noise in [NoiseModel::Depolarizing { eps: 0.1 }, NoiseModel::AmplitudeDamping { eps: 0.1 }] {
            let plan = compose_circuit_qpr(&c, &noise).unwrap();
            let sim = PlanSimulator::new(&plan, &plus_state(2)).unwrap();
            let choices = [vec![0; plan.units.len()], plan.units.iter().map(|u| u.outcomes.len() - 1).collect()];
            for choice in choices {
                let (nc, _) = plan.circuit_for(&choice).unwrap();
                let full = nc.apply(Some(&noise), &plus_state(2)).unwrap();
                assert!(sim.final_state(&nc).unwrap().matrix().max_abs_diff(full.matrix()) < 1e-14);
            }
        }
    }

    #[test]
    fn pauli_x_words_are_not_diagonal() {
        assert!(diagonal_weights(&Observable::Pauli("XZ".parse().unwrap())).is_err());
        assert_eq!(diagonal_weights(&Observable::Pauli("ZI".parse().unwrap())).unwrap(), vec![1.0, 1.0, -1.0, -1.0]);
    }
}
