//! Quasi-probability representations of ideal operations in terms of noisy ones.

pub mod analytic;
pub mod basis;
pub mod circuit_qpr;
pub mod gate_qpr;

pub use analytic::{
    damping_gate_qpr_analytic, damping_inverse_coefficients, damping_plus_prep_gamma, damping_single_qubit_gamma,
    depolarizing_gamma, depolarizing_gate_qpr_analytic, depolarizing_insertion_probability, DampingTarget,
};
pub use basis::{
    amplitude_damping_channel, build_damping_basis, build_depolarizing_basis, depolarizing_channel, noisy_op_ptm,
    BasisEntry, Body, NoisyBasis, Target, BASIS_GATES,
};
pub use circuit_qpr::{compose_circuit_qpr, CircuitQpr, Outcome, QprUnit};
pub use gate_qpr::{lp_gate_qpr, solve_qpr_lp, GateQpr, LpQpr, QprTerm, RECONSTRUCTION_TOL};
