use qem_core::pec::{
    exhaustive_pec_expectation, run_pec, run_pec_grouped, sample_noisy_circuit, GroupedOptions, PlanSampler,
};
use qem_core::qpr::{compose_circuit_qpr, depolarizing_insertion_probability};
use qem_core::quantum::state::plus_state;
use qem_core::quantum::{apply_circuit, expectation_value, Circuit, DensityMatrix, Gate, NoiseModel, Observable};
use qem_core::rng::{stream, StreamKey};
use qem_core::QemError;
use rand::Rng;

fn random_two_qubit_depth_two(seed: u64) -> Circuit {
    let mut rng = stream(seed, &[3]);
    let g = |rng: &mut qem_core::rng::StreamRng| Gate::SINGLE_QUBIT_CLIFFORD_T[rng.gen_range(0..4)].clone();
    let (c, t) = if rng.gen::<bool>() { (0, 1) } else { (1, 0) };
    format!("qubits 2\n{} 0 | {} 1\nCNOT {c} {t}\n", g(&mut rng), g(&mut rng)).parse().unwrap()
}

fn ideal(c: &Circuit, rho0: &DensityMatrix, a: &Observable) -> f64 {
    expectation_value(a, &apply_circuit(c, None, rho0).unwrap()).unwrap()
}

fn z0() -> Observable {
    Observable::Pauli("ZI".parse().unwrap())
}

#[test]
fn noiseless_plan_always_returns_the_ideal_circuit() {
    let c = random_two_qubit_depth_two(1);
    let plan = compose_circuit_qpr(&c, &NoiseModel::Depolarizing { eps: 0.0 }).unwrap();
    let ideal = qem_core::quantum::NoisyCircuit::from_ideal(&c);
    let mut rng = stream(0, &[]);
    for _ in 0..50 {
        let s = sample_noisy_circuit(&plan, &mut rng).unwrap();
        assert_eq!(s.sign, 1);
        assert_eq!(s.circuit, ideal);
        assert_eq!(s.probability, 1.0);
    }
}

#[test]
fn insertion_frequencies_match_closed_form() {
    let eps = 0.01;
    for (text, k) in [("qubits 1\nH 0", 1), ("qubits 2\nCNOT 0 1", 2)] {
        let c: Circuit = text.parse().unwrap();
        let plan = compose_circuit_qpr(&c, &NoiseModel::Depolarizing { eps }).unwrap();
        let sampler = PlanSampler::new(&plan).unwrap();
        let mut rng = stream(11, &[k as u64]);
        let n = 100_000;
        let hits = (0..n).filter(|_| sampler.choice(&mut rng)[0] != 0).count() as f64;
        let p = ((1usize << (2 * k)) - 1) as f64 * depolarizing_insertion_probability(k, eps);
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        assert!((hits - n as f64 * p).abs() < 4.0 * sigma, "k={k}: {hits} vs {}", n as f64 * p);
    }
}

#[test]
fn sign_is_parity_of_insertions() {
    let c: Circuit = "qubits 2\nH 0 | T 1\nCNOT 0 1\nS 0 | H 1".parse().unwrap();
    let plan = compose_circuit_qpr(&c, &NoiseModel::Depolarizing { eps: 0.3 }).unwrap();
    let mut rng = stream(2, &[]);
    let mut seen_negative = false;
    for _ in 0..500 {
        let s = sample_noisy_circuit(&plan, &mut rng).unwrap();
        let r = s.circuit.layers.iter().flatten().flat_map(|op| &op.body).filter(|(g, _)| matches!(g, Gate::Pauli(_))).count();
        assert_eq!(s.sign, if r % 2 == 0 { 1 } else { -1 });
        seen_negative |= s.sign < 0;
    }
    assert!(seen_negative);
}

#[test]
fn exhaustive_single_gate_matches_closed_form() {
    let c: Circuit = "qubits 1\nH 0".parse().unwrap();
    let a = Observable::Pauli("X".parse().unwrap());
    let rho0 = DensityMatrix::zero_state(1);
    let plan = compose_circuit_qpr(&c, &NoiseModel::Depolarizing { eps: 0.2 }).unwrap();
    // ⟨X⟩ after H|0⟩ is 1.
    assert!((exhaustive_pec_expectation(&plan, &rho0, &a).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn exhaustive_oracle_is_unbiased_for_both_models() {
    for seed in 0..20 {
        let c = random_two_qubit_depth_two(seed);
        for rho0 in [plus_state(2), DensityMatrix::zero_state(2)] {
            for a in [z0(), Observable::Pauli("XY".parse().unwrap()), Observable::projector(2, &[0, 3])] {
                let want = ideal(&c, &rho0, &a);
                for noise in [NoiseModel::Depolarizing { eps: 0.05 }, NoiseModel::AmplitudeDamping { eps: 0.05 }] {
                    let plan = compose_circuit_qpr(&c, &noise).unwrap();
                    let got = exhaustive_pec_expectation(&plan, &rho0, &a).unwrap();
                    assert!((got - want).abs() < 1e-9, "seed {seed} {noise:?}: {got} vs {want}");
                }
            }
        }
    }
}

#[test]
fn exhaustive_oracle_refuses_large_supports() {
    let text = format!("qubits 2\n{}", "H 0 | H 1\n".repeat(5));
    let plan = compose_circuit_qpr(&text.parse().unwrap(), &NoiseModel::Depolarizing { eps: 0.01 }).unwrap();
    assert!(matches!(exhaustive_pec_expectation(&plan, &plus_state(2), &z0()), Err(QemError::TooLarge(_))));
}

#[test]
fn noiseless_flat_estimate_is_within_sampling_error() {
    let c = random_two_qubit_depth_two(4);
    let rho0 = plus_state(2);
    let plan = compose_circuit_qpr(&c, &NoiseModel::Depolarizing { eps: 0.0 }).unwrap();
    let m = 20_000;
    let est = run_pec(&plan, &rho0, &z0(), m, StreamKey::new(1)).unwrap();
    assert!((est.value - ideal(&c, &rho0, &z0())).abs() < 4.0 / (m as f64).sqrt());
}

#[test]
fn flat_estimator_is_unbiased_and_concentrated() {
    let c: Circuit = "qubits 1\nH 0".parse().unwrap();
    let rho0 = DensityMatrix::zero_state(1);
    let a = Observable::projector(1, &[0]);
    let want = ideal(&c, &rho0, &a);
    for noise in [NoiseModel::Depolarizing { eps: 0.05 }, NoiseModel::AmplitudeDamping { eps: 0.05 }] {
        let plan = compose_circuit_qpr(&c, &noise).unwrap();
        let m = 400;
        let xs: Vec<f64> =
            (0..200).map(|r| run_pec(&plan, &rho0, &a, m, StreamKey::new(r)).unwrap().value).collect();
        let mean = xs.iter().sum::<f64>() / 200.0;
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 199.0).sqrt();
        assert!((mean - want).abs() < 3.0 * sd / 200f64.sqrt(), "{noise:?}: {mean} vs {want}");
        assert!(sd <= 1.5 * plan.gamma() / (m as f64).sqrt());
    }
}

#[test]
fn grouped_estimator_is_unbiased() {
    let c = random_two_qubit_depth_two(6);
    let rho0 = plus_state(2);
    let a = Observable::projector(2, &[0, 1]);
    let want = ideal(&c, &rho0, &a);
    for noise in [NoiseModel::Depolarizing { eps: 0.1 }, NoiseModel::AmplitudeDamping { eps: 0.1 }] {
        let plan = compose_circuit_qpr(&c, &noise).unwrap();
        let opts = GroupedOptions { k: 50, pilot_runs: 2 };
        let xs: Vec<f64> =
            (0..200).map(|r| run_pec_grouped(&plan, &rho0, &a, 400, &opts, StreamKey::new(r)).unwrap().value).collect();
        let mean = xs.iter().sum::<f64>() / 200.0;
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 199.0).sqrt();
        assert!((mean - want).abs() < 3.0 * sd / 200f64.sqrt(), "{noise:?}: {mean} vs {want}");
    }
}

#[test]
fn grouped_estimator_bookkeeping() {
    let c = random_two_qubit_depth_two(8);
    let rho0 = plus_state(2);
    let a = Observable::projector(2, &[0]);
    let plan = compose_circuit_qpr(&c, &NoiseModel::Depolarizing { eps: 0.05 }).unwrap();
    let est = run_pec_grouped(&plan, &rho0, &a, 300, &GroupedOptions { k: 40, pilot_runs: 3 }, StreamKey::new(9)).unwrap();
    let spent: usize = est.groups.iter().map(|g| g.runs + g.pilot_runs).sum();
    assert_eq!(spent, est.runs);
    assert_eq!(est.groups.iter().map(|g| g.multiplicity).sum::<usize>(), 40);
    assert!(est.groups.iter().all(|g| g.runs >= 1));
    assert!(est.value.abs() <= est.gamma);
    assert!(est.std_error.is_some());
    // K = 1: one group gets every readout and the estimate is γσ times its mean.
    let one = run_pec_grouped(&plan, &rho0, &a, 100, &GroupedOptions { k: 1, pilot_runs: 2 }, StreamKey::new(3)).unwrap();
    assert_eq!(one.groups.len(), 1);
    assert_eq!(one.groups[0].runs, 100);
    let g = &one.groups[0];
    assert!((one.value - one.gamma * g.sign as f64 * g.mean).abs() < 1e-12);
    // Too small a budget is rejected.
    assert!(run_pec_grouped(&plan, &rho0, &a, 5, &GroupedOptions { k: 40, pilot_runs: 2 }, StreamKey::new(9)).is_err());
}

#[test]
fn estimates_are_reproducible() {
    let c = random_two_qubit_depth_two(9);
    let plan = compose_circuit_qpr(&c, &NoiseModel::AmplitudeDamping { eps: 0.05 }).unwrap();
    let a = Observable::projector(2, &[1]);
    let run = || run_pec(&plan, &plus_state(2), &a, 500, StreamKey::new(4)).unwrap();
    assert_eq!(run(), run());
    let opts = GroupedOptions { k: 100, pilot_runs: 2 };
    let grouped = || run_pec_grouped(&plan, &plus_state(2), &a, 500, &opts, StreamKey::new(4)).unwrap();
    assert_eq!(grouped(), grouped());
}
