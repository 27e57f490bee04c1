use nalgebra::DMatrix;
use num_complex::Complex64;
use qem_core::dynamics::{
    build_drift_schedule, evolve_master_equation, evolve_with, rescale_schedule, Integrator, NoiseGenerator, Schedule,
};
use qem_core::quantum::{CMatrix, DensityMatrix, C64};
use qem_core::rng::stream;

fn random_pure(n: usize, seed: u64) -> DensityMatrix {
    use rand_distr::{Distribution, StandardNormal};
    let mut rng = stream(seed, &[77]);
    let psi: Vec<C64> = (0..1 << n)
        .map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
        .collect();
    DensityMatrix::from_pure(n, &psi).unwrap()
}

/// `exp(−iHt)` through a Hermitian eigendecomposition.
fn exact_propagator(h: &CMatrix, t: f64) -> CMatrix {
    let d = h.rows();
    let m = DMatrix::from_fn(d, d, |i, j| h[(i, j)]);
    let eig = m.symmetric_eigen();
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| Complex64::from_polar(1.0, -e * t)));
    let u = &eig.eigenvectors * phases * eig.eigenvectors.adjoint();
    CMatrix::from_vec(d, d, (0..d * d).map(|k| u[(k / d, k % d)]).collect())
}

fn unitary_evolution(s: &Schedule, rho: &DensityMatrix) -> DensityMatrix {
    let n = s.n_qubits();
    let mut u = CMatrix::identity(1 << n);
    for seg in s.segments() {
        u = exact_propagator(&seg.hamiltonian(n).unwrap().to_matrix(), seg.duration).matmul(&u);
    }
    DensityMatrix::from_matrix_unchecked(n, u.matmul(rho.matrix()).matmul(&u.adjoint())).unwrap()
}

#[test]
fn noise_free_limit_matches_exact_propagator() {
    for seed in 0..3 {
        let s = build_drift_schedule(&mut stream(seed, &[1]), 3, 3, 1.0, 0.5).unwrap();
        let rho0 = random_pure(3, seed);
        let want = unitary_evolution(&s, &rho0);
        for g in [NoiseGenerator::Depolarizing, NoiseGenerator::coherent_bath()] {
            let got = evolve_master_equation(&s, &g, 0.0, &rho0, 0.01).unwrap();
            assert!(got.trace_distance(&want) < 1e-8, "{g:?}: {}", got.trace_distance(&want));
            assert!((got.purity() - 1.0).abs() < 1e-8);
            let tight = evolve_with(&s, &g, 0.0, &rho0, &Integrator::exact()).unwrap();
            assert!(tight.trace_distance(&want) < 1e-11);
        }
    }
}

#[test]
fn mixed_input_noise_free_is_unitary() {
    let s = build_drift_schedule(&mut stream(4, &[1]), 2, 2, 1.0, 1.0).unwrap();
    let a = random_pure(2, 1);
    let b = random_pure(2, 2);
    let mut m = a.matrix().scale_real(0.3);
    m.axpy(C64::new(0.7, 0.0), b.matrix());
    let rho0 = DensityMatrix::new(2, m).unwrap();
    let got = evolve_master_equation(&s, &NoiseGenerator::Depolarizing, 0.0, &rho0, 0.01).unwrap();
    assert!(got.trace_distance(&unitary_evolution(&s, &rho0)) < 1e-8);
    assert!((got.purity() - rho0.purity()).abs() < 1e-8);
}

#[test]
fn rk4_is_fourth_order() {
    let generators = [NoiseGenerator::Depolarizing, NoiseGenerator::damping_dephasing(), NoiseGenerator::coherent_bath()];
    for (k, g) in generators.iter().enumerate() {
        let s = build_drift_schedule(&mut stream(20 + k as u64, &[]), 2, 2, 1.0, 1.0).unwrap();
        let mut rho0 = random_pure(2, 5).into_matrix().scale_real(0.9);
        rho0.axpy(C64::new(0.1, 0.0), DensityMatrix::maximally_mixed(2).matrix());
        let rho0 = DensityMatrix::new(2, rho0).unwrap();
        let dt = 0.2;
        let run = |h: f64| evolve_master_equation(&s, g, 0.3, &rho0, h).unwrap();
        let reference = run(dt / 4.0);
        let e1 = run(dt).trace_norm_distance(&reference);
        let e2 = run(dt / 2.0).trace_norm_distance(&reference);
        let ratio = e1 / e2;
        // Against a dt/4 reference the ideal ratio is (1 − 4⁻⁴)/(2⁻⁴ − 4⁻⁴) = 17.
        assert!((12.0..22.0).contains(&ratio), "{g:?}: ratio {ratio} ({e1:e}, {e2:e})");
    }
}

#[test]
fn rescaling_is_equivalent_to_stronger_noise() {
    for (k, g) in [NoiseGenerator::Depolarizing, NoiseGenerator::damping_dephasing(), NoiseGenerator::coherent_bath()]
        .iter()
        .enumerate()
    {
        let s = build_drift_schedule(&mut stream(40 + k as u64, &[]), 2, 2, 0.5, 0.5).unwrap();
        let rho0 = random_pure(2, k as u64);
        for c in [1.5, 2.0, 4.0] {
            let a = evolve_master_equation(&rescale_schedule(&s, c).unwrap(), g, 0.05, &rho0, 0.01).unwrap();
            let b = evolve_master_equation(&s, g, 0.05 * c, &rho0, 0.01).unwrap();
            assert!(a.trace_norm_distance(&b) < 1e-6, "{g:?} c={c}: {}", a.trace_norm_distance(&b));
        }
    }
}

#[test]
fn output_trace_stays_at_one() {
    let s = build_drift_schedule(&mut stream(8, &[]), 3, 2, 1.0, 0.5).unwrap();
    let rho0 = random_pure(3, 8);
    for g in [NoiseGenerator::Depolarizing, NoiseGenerator::damping_dephasing(), NoiseGenerator::coherent_bath()] {
        let rho = evolve_master_equation(&s, &g, 0.1, &rho0, 0.01).unwrap();
        assert!((rho.trace() - 1.0).abs() < 1e-9, "{g:?}: {}", rho.trace());
        assert!(rho.validate().is_ok(), "{g:?}: {:?}", rho.validate());
    }
}
