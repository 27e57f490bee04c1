//! Random Clifford+T circuits, median projectors and random Pauli observables.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{QemError, Result};
use crate::quantum::{Circuit, Gate, Observable, PauliString, PlacedGate};

/// `d` alternating layers: odd layers (1-based) are random `{I,H,S,T}` on every
/// qubit, even layers pair all qubits into CNOTs with random roles.
pub fn gen_clifford_t_circuit<R: Rng + ?Sized>(rng: &mut R, n: usize, d: usize) -> Result<Circuit> {
    if n == 0 || n % 2 == 1 {
        return Err(QemError::InvalidArgument(format!("qubit count {n} must be even and positive")));
    }
    if d == 0 {
        return Err(QemError::InvalidArgument("depth must be at least 1".into()));
    }
    let mut layers = Vec::with_capacity(d);
    for l in 0..d {
        if l % 2 == 0 {
            layers.push(
                (0..n).map(|q| PlacedGate::new(Gate::SINGLE_QUBIT_CLIFFORD_T[rng.gen_range(0..4)].clone(), vec![q])).collect(),
            );
        } else {
            let mut qs: Vec<usize> = (0..n).collect();
            qs.shuffle(rng);
            layers.push(qs.chunks(2).map(|p| PlacedGate::new(Gate::Cnot, vec![p[0], p[1]])).collect());
        }
    }
    Circuit::new(n, layers)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MedianProjector {
    /// Selected basis indices, most probable first.
    pub indices: Vec<usize>,
    /// Weight of the selection under the ideal distribution.
    pub ideal_value: f64,
}

impl MedianProjector {
    pub fn observable(&self, n_qubits: usize) -> Observable {
        Observable::projector(n_qubits, &self.indices)
    }
}

/// The `2^{n−1}` most probable outcomes; ties go to the lexicographically smaller bitstring.
pub fn median_projector(probabilities: &[f64]) -> Result<MedianProjector> {
    let dim = probabilities.len();
    if dim < 2 || !dim.is_power_of_two() {
        return Err(QemError::InvalidArgument(format!("{dim} probabilities do not describe n ≥ 1 qubits")));
    }
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| probabilities[b].total_cmp(&probabilities[a]).then(a.cmp(&b)));
    order.truncate(dim / 2);
    let ideal_value = order.iter().map(|&i| probabilities[i]).sum();
    Ok(MedianProjector { indices: order, ideal_value })
}

/// Uniform over the `4^n − 1` non-identity words.
pub fn random_pauli_observable<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<PauliString> {
    if n == 0 || n > 15 {
        return Err(QemError::InvalidArgument(format!("cannot draw a Pauli word on {n} qubits")));
    }
    Ok(PauliString::from_index(n, rng.gen_range(1..1usize << (2 * n))))
}
