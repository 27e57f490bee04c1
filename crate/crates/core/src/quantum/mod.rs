//! Linear-algebra substrate: Pauli words, states, channels, gates and circuits.

pub mod channel;
pub mod circuit;
pub mod gate;
pub mod matrix;
pub mod pauli;
pub mod state;

pub use channel::{compose_ptm, ptm_from_kraus, KrausChannel, PauliTransferMatrix};
pub use circuit::{apply_circuit, Circuit, NoiseModel, NoisyCircuit, PlacedGate, PlacedOp};
pub use gate::{gate_unitary, Gate, PrepState};
pub use matrix::{CMatrix, C64, ONE, ZERO};
pub use pauli::{pauli_matrix, Pauli, PauliString, PauliSum};
pub use state::{
    expectation_value, observable_readout, sample_observable, sample_z_readout, DensityMatrix, Observable, ReadoutSampler,
};
