//! Time stepping of `dρ/dt = −i[K(t), ρ] + λ𝓛(ρ)` over a piecewise-constant schedule.

use rayon::prelude::*;

use super::noise::NoiseGenerator;
use super::schedule::Schedule;
use crate::error::{QemError, Result};
use crate::quantum::{CMatrix, DensityMatrix, PauliString, PauliSum, C64, ZERO};

/// Trace (or norm) drift after a segment that counts as a step-size failure.
pub const TRACE_DRIFT_TOL: f64 = 1e-6;
pub const DEFAULT_DT_MAX: f64 = 0.01;

const MAX_TAYLOR_TERMS: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Integrator {
    /// Classical fixed-step Runge–Kutta; each segment is split into equal steps no longer than `dt_max`.
    Rk4 { dt_max: f64 },
    /// Truncated Taylor series of the segment propagator, substeps with `h‖G‖ ≤ 1`,
    /// summed until a term falls below `tol` relative to the partial sum.
    Taylor { tol: f64 },
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator::Rk4 { dt_max: DEFAULT_DT_MAX }
    }
}

impl Integrator {
    /// Near machine-precision propagation.
    pub fn exact() -> Self {
        Integrator::Taylor { tol: 1e-16 }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Integrator::Rk4 { dt_max } => dt_max > 0.0 && dt_max.is_finite(),
            Integrator::Taylor { tol } => tol > 0.0 && tol.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(QemError::InvalidArgument(format!("bad integrator settings {self:?}")))
        }
    }
}

/// Evolves `ρ0` over the whole schedule with RK4 steps of at most `dt_max`.
pub fn evolve_master_equation(
    s: &Schedule,
    g: &NoiseGenerator,
    lambda: f64,
    rho0: &DensityMatrix,
    dt_max: f64,
) -> Result<DensityMatrix> {
    evolve_with(s, g, lambda, rho0, &Integrator::Rk4 { dt_max })
}

/// Same as [`evolve_master_equation`] with a chosen integrator.
///
/// For the bath model the ancillas are appended in their thermal state and
/// traced out at the end. With the Taylor integrator, unitary dynamics and a
/// pure `ρ0`, state vectors are propagated instead of the density matrix.
pub fn evolve_with(
    s: &Schedule,
    g: &NoiseGenerator,
    lambda: f64,
    rho0: &DensityMatrix,
    integrator: &Integrator,
) -> Result<DensityMatrix> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(QemError::InvalidArgument(format!("noise rate {lambda} must be non-negative")));
    }
    g.validate()?;
    integrator.validate()?;
    let n = s.n_qubits();
    if rho0.n_qubits() != n {
        return Err(QemError::DimensionMismatch { expected: n, found: rho0.n_qubits() });
    }
    let nb = g.bath_qubits(n);
    let total = n + nb;
    let hamiltonians = segment_hamiltonians(s, g, lambda, total)?;

    // RK4 is not norm preserving on state vectors, so only the Taylor propagator takes this shortcut.
    let unitary = g.is_hamiltonian() || lambda == 0.0;
    if unitary && matches!(integrator, Integrator::Taylor { .. }) {
        if let Some(psi) = pure_vector(rho0) {
            return evolve_pure(&psi, n, g, &hamiltonians, s, integrator);
        }
    }

    let rho = match g.bath_state(nb) {
        Some(bath) => rho0.tensor(&bath),
        None => rho0.clone(),
    };
    let dim = 1usize << total;
    let mut y = rho.into_matrix().into_vec();
    let dissipate = if g.is_hamiltonian() { 0.0 } else { lambda };
    for (idx, (seg, h)) in s.segments().iter().zip(&hamiltonians).enumerate() {
        let f = |x: &[C64], out: &mut [C64]| {
            out.fill(ZERO);
            h.commutator_into(C64::new(0.0, -1.0), x, out);
            if dissipate > 0.0 {
                g.dissipator_into(total, dissipate, x, out);
            }
        };
        let bound = 2.0 * h.weight_norm() + dissipate * g.dissipator_bound(total);
        propagate(&mut y, &f, seg.duration, bound, integrator);
        // The generators are traceless, so blow-ups also show as entries leaving the unit disc.
        let tr: f64 = (0..dim).map(|i| y[i * dim + i].re).sum();
        let overflow = y.iter().map(|a| a.norm()).fold(0.0, f64::max) - 1.0;
        let drift = (tr - 1.0).abs().max(overflow);
        if !(drift <= TRACE_DRIFT_TOL) {
            return Err(QemError::Integration { segment: idx, drift });
        }
    }
    let out = DensityMatrix::from_matrix_unchecked(total, CMatrix::from_vec(dim, dim, y))?;
    Ok(if nb > 0 { out.partial_trace_tail(n) } else { out })
}

fn segment_hamiltonians(s: &Schedule, g: &NoiseGenerator, lambda: f64, total: usize) -> Result<Vec<PauliSum>> {
    let n = s.n_qubits();
    let system: Vec<usize> = (0..n).collect();
    let coupling: Vec<(f64, PauliString)> =
        g.bath_coupling(n).into_iter().map(|(w, p)| (w * lambda, p)).collect();
    s.segments()
        .iter()
        .map(|seg| {
            let mut terms: Vec<(f64, PauliString)> = seg
                .terms
                .iter()
                .map(|(w, p)| (*w, if total == n { p.clone() } else { p.embed(total, &system) }))
                .collect();
            terms.extend(coupling.iter().cloned());
            PauliSum::new(total, terms)
        })
        .collect()
}

/// `ψ` with `ρ = |ψ⟩⟨ψ|`, if `ρ` is pure.
fn pure_vector(rho: &DensityMatrix) -> Option<Vec<C64>> {
    if (rho.purity() - 1.0).abs() > 1e-12 {
        return None;
    }
    let probs = rho.probabilities();
    let k = (0..probs.len()).max_by(|&a, &b| probs[a].total_cmp(&probs[b]))?;
    let norm = probs[k].sqrt();
    Some((0..rho.dim()).map(|i| rho.matrix()[(i, k)] / norm).collect())
}

fn evolve_pure(
    psi: &[C64],
    n: usize,
    g: &NoiseGenerator,
    hamiltonians: &[PauliSum],
    s: &Schedule,
    integrator: &Integrator,
) -> Result<DensityMatrix> {
    let nb = g.bath_qubits(n);
    let (ds, db) = (1usize << n, 1usize << nb);
    // Thermal bath states are diagonal, so the joint state is a mixture of products |ψ⟩|b⟩.
    let weights: Vec<(usize, f64)> = match g.bath_state(nb) {
        Some(bath) => bath.probabilities().into_iter().enumerate().filter(|(_, p)| *p > 0.0).collect(),
        None => vec![(0, 1.0)],
    };
    let parts: Vec<Result<CMatrix>> = weights
        .par_iter()
        .map(|&(b, p)| {
            let mut y = vec![ZERO; ds * db];
            for (a, &amp) in psi.iter().enumerate() {
                y[a * db + b] = amp;
            }
            for (idx, (seg, h)) in s.segments().iter().zip(hamiltonians).enumerate() {
                let f = |x: &[C64], out: &mut [C64]| {
                    out.fill(ZERO);
                    h.apply_vec_into(C64::new(0.0, -1.0), x, out);
                };
                propagate(&mut y, &f, seg.duration, h.weight_norm(), integrator);
                let norm: f64 = y.iter().map(|a| a.norm_sqr()).sum();
                if !((norm - 1.0).abs() <= TRACE_DRIFT_TOL) {
                    return Err(QemError::Integration { segment: idx, drift: (norm - 1.0).abs() });
                }
            }
            let mut m = CMatrix::zeros(ds, ds);
            for a in 0..ds {
                for a2 in 0..ds {
                    let mut acc = ZERO;
                    for t in 0..db {
                        acc += y[a * db + t] * y[a2 * db + t].conj();
                    }
                    m[(a, a2)] = acc * p;
                }
            }
            Ok(m)
        })
        .collect();
    let mut total = CMatrix::zeros(ds, ds);
    for part in parts {
        total = &total + &part?;
    }
    DensityMatrix::from_matrix_unchecked(n, total)
}

/// Advances `y' = f(y)` by `tau`. `bound` is an upper bound on `‖f‖`.
fn propagate(y: &mut [C64], f: &dyn Fn(&[C64], &mut [C64]), tau: f64, bound: f64, integrator: &Integrator) {
    let len = y.len();
    match *integrator {
        Integrator::Rk4 { dt_max } => {
            let steps = (tau / dt_max).ceil().max(1.0) as usize;
            let h = tau / steps as f64;
            let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
                (vec![ZERO; len], vec![ZERO; len], vec![ZERO; len], vec![ZERO; len], vec![ZERO; len]);
            for _ in 0..steps {
                f(y, &mut k1);
                axpy_into(&mut tmp, y, 0.5 * h, &k1);
                f(&tmp, &mut k2);
                axpy_into(&mut tmp, y, 0.5 * h, &k2);
                f(&tmp, &mut k3);
                axpy_into(&mut tmp, y, h, &k3);
                f(&tmp, &mut k4);
                let w = h / 6.0;
                for i in 0..len {
                    y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * w;
                }
            }
        }
        Integrator::Taylor { tol } => {
            let steps = (tau * bound).ceil().max(1.0) as usize;
            let h = tau / steps as f64;
            let (mut term, mut next) = (vec![ZERO; len], vec![ZERO; len]);
            for _ in 0..steps {
                term.copy_from_slice(y);
                for k in 1..=MAX_TAYLOR_TERMS {
                    f(&term, &mut next);
                    let s = h / k as f64;
                    let mut term_max = 0.0f64;
                    let mut acc_max = 0.0f64;
                    for i in 0..len {
                        term[i] = next[i] * s;
                        y[i] += term[i];
                        term_max = term_max.max(term[i].norm());
                        acc_max = acc_max.max(y[i].norm());
                    }
                    if term_max <= tol * acc_max {
                        break;
                    }
                }
            }
        }
    }
}

fn axpy_into(out: &mut [C64], y: &[C64], s: f64, k: &[C64]) {
    for ((o, &a), &b) in out.iter_mut().zip(y).zip(k) {
        *o = a + b * s;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::schedule::Segment;
    use crate::quantum::{Pauli, ONE};

    fn one_qubit_plus() -> DensityMatrix {
        crate::quantum::state::plus_state(1)
    }

    #[test]
    fn depolarizing_bloch_decay() {
        let lambda = 0.3;
        let s = Schedule::idle(1, 2.0).unwrap();
        for integ in [Integrator::default(), Integrator::exact()] {
            let rho = evolve_with(&s, &NoiseGenerator::Depolarizing, lambda, &one_qubit_plus(), &integ).unwrap();
            let x = 2.0 * rho.matrix()[(0, 1)].re;
            assert!((x - (-lambda * 2.0f64).exp()).abs() < 1e-10, "{integ:?}: {x}");
        }
    }

    #[test]
    fn density_and_vector_paths_agree_for_bath() {
        let s = Schedule::new(
            1,
            vec![Segment { duration: 1.5, terms: vec![(0.4, PauliString::single(1, 0, Pauli::Y))] }],
        )
        .unwrap();
        let g = NoiseGenerator::coherent_bath();
        let pure = evolve_with(&s, &g, 0.2, &one_qubit_plus(), &Integrator::exact()).unwrap();
        // A slightly mixed input forces the density-matrix path; compare by linearity.
        let mixed_in = {
            let mut m = one_qubit_plus().into_matrix().scale_real(0.5);
            m[(0, 0)] += ONE * 0.25;
            m[(1, 1)] += ONE * 0.25;
            DensityMatrix::new(1, m).unwrap()
        };
        let mixed = evolve_with(&s, &g, 0.2, &mixed_in, &Integrator::exact()).unwrap();
        let mm = evolve_with(&s, &g, 0.2, &DensityMatrix::maximally_mixed(1), &Integrator::exact()).unwrap();
        let mut want = pure.matrix().scale_real(0.5);
        want.axpy(C64::new(0.5, 0.0), mm.matrix());
        assert!(mixed.matrix().max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn rejects_negative_rate() {
        let s = Schedule::idle(1, 1.0).unwrap();
        assert!(evolve_master_equation(&s, &NoiseGenerator::Depolarizing, -1.0, &one_qubit_plus(), 0.01).is_err());
    }

    #[test]
    fn huge_steps_report_the_segment() {
        let s = Schedule::new(
            1,
            vec![
                Segment { duration: 0.1, terms: vec![] },
                Segment { duration: 5.0, terms: vec![] },
            ],
        )
        .unwrap();
        let err = evolve_master_equation(&s, &NoiseGenerator::Depolarizing, 3.0, &DensityMatrix::zero_state(1), 10.0)
            .unwrap_err();
        assert!(matches!(err, QemError::Integration { segment: 1, .. }), "{err:?}");
    }
}
