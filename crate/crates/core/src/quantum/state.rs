//! Density matrices, local operations on them, observables and Z readout.

use rand::Rng;

use super::channel::KrausChannel;
use super::matrix::{r, CMatrix, C64, ONE, ZERO};
use super::pauli::PauliString;
use crate::error::{QemError, Result};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-9;
pub const PSD_TOL: f64 = -1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    m: CMatrix,
}

impl DensityMatrix {
    /// Wraps a matrix after checking Hermiticity, unit trace and positivity.
    pub fn new(n_qubits: usize, m: CMatrix) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(n_qubits, m)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Wraps a matrix checking only its shape.
    pub fn from_matrix_unchecked(n_qubits: usize, m: CMatrix) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if m.rows() != dim || m.cols() != dim {
            return Err(QemError::DimensionMismatch { expected: dim, found: m.rows() });
        }
        Ok(Self { n_qubits, m })
    }

    pub fn validate(&self) -> Result<()> {
        let herm = self.m.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(QemError::InvalidArgument(format!("state is not Hermitian ({herm:.2e})")));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(QemError::InvalidArgument(format!("state trace {tr} differs from 1")));
        }
        let min = self.m.hermitian_eigenvalues().first().copied().unwrap_or(0.0);
        if min < PSD_TOL {
            return Err(QemError::InvalidArgument(format!("state has eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    pub fn basis_state(n_qubits: usize, index: usize) -> Self {
        let dim = 1usize << n_qubits;
        let mut m = CMatrix::zeros(dim, dim);
        m[(index, index)] = ONE;
        Self { n_qubits, m }
    }

    /// `|0…0⟩⟨0…0|`.
    pub fn zero_state(n_qubits: usize) -> Self {
        Self::basis_state(n_qubits, 0)
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        Self { n_qubits, m: CMatrix::identity(dim).scale_real(1.0 / dim as f64) }
    }

    pub fn from_pure(n_qubits: usize, psi: &[C64]) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if psi.len() != dim {
            return Err(QemError::DimensionMismatch { expected: dim, found: psi.len() });
        }
        let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let v: Vec<C64> = psi.iter().map(|a| a / norm).collect();
        Ok(Self { n_qubits, m: CMatrix::outer(&v, &v) })
    }

    /// Product of identical single-qubit pure states.
    pub fn product(n_qubits: usize, single: [C64; 2]) -> Self {
        let mut psi = vec![ONE];
        for _ in 0..n_qubits {
            psi = psi.iter().flat_map(|&a| [a * single[0], a * single[1]]).collect();
        }
        Self::from_pure(n_qubits, &psi).expect("dimension matches")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    pub fn purity(&self) -> f64 {
        self.m.as_slice().iter().map(|x| x.norm_sqr()).sum()
    }

    /// Diagonal of `ρ` in the computational basis.
    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.m[(i, i)].re).collect()
    }

    /// `‖ρ − σ‖₁`.
    pub fn trace_norm_distance(&self, other: &DensityMatrix) -> f64 {
        (&self.m - &other.m).hermitian_trace_norm()
    }

    /// `½‖ρ − σ‖₁`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        0.5 * self.trace_norm_distance(other)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix { n_qubits: self.n_qubits + other.n_qubits, m: self.m.kron(&other.m) }
    }

    /// Traces out all but the leading `keep` qubits.
    pub fn partial_trace_tail(&self, keep: usize) -> DensityMatrix {
        assert!(keep <= self.n_qubits);
        let traced = self.n_qubits - keep;
        let (dk, dt) = (1usize << keep, 1usize << traced);
        let mut out = CMatrix::zeros(dk, dk);
        for a in 0..dk {
            for b in 0..dk {
                let mut s = ZERO;
                for t in 0..dt {
                    s += self.m[(a * dt + t, b * dt + t)];
                }
                out[(a, b)] = s;
            }
        }
        DensityMatrix { n_qubits: keep, m: out }
    }

    /// `ρ ↦ U ρ U†` with `U` acting on the listed qubits.
    pub fn apply_unitary(&mut self, u: &CMatrix, qubits: &[usize]) {
        let n = self.n_qubits;
        let dim = self.dim();
        apply_left(self.m.as_mut_slice(), dim, n, u, qubits);
        apply_right_adjoint(self.m.as_mut_slice(), dim, n, u, qubits);
    }

    /// Applies a Kraus channel to the listed qubits.
    pub fn apply_channel(&mut self, channel: &KrausChannel, qubits: &[usize]) {
        assert_eq!(channel.n_qubits(), qubits.len(), "channel support mismatch");
        if channel.ops().len() == 1 {
            self.apply_unitary(&channel.ops()[0], qubits);
            return;
        }
        let n = self.n_qubits;
        let dim = self.dim();
        let mut acc = vec![ZERO; dim * dim];
        for k in channel.ops() {
            let mut work = self.m.as_slice().to_vec();
            apply_left(&mut work, dim, n, k, qubits);
            apply_right_adjoint(&mut work, dim, n, k, qubits);
            for (a, w) in acc.iter_mut().zip(work) {
                *a += w;
            }
        }
        self.m = CMatrix::from_vec(dim, dim, acc);
    }

    /// `ρ ↦ (1−ε) ρ + ε · I_S/2^k ⊗ Tr_S ρ` on the support `S`.
    pub fn depolarize(&mut self, eps: f64, qubits: &[usize]) {
        if eps == 0.0 {
            return;
        }
        let n = self.n_qubits;
        let dim = self.dim();
        let mask = support_mask(n, qubits);
        let k = qubits.len();
        let sub = 1usize << k;
        let offsets: Vec<usize> = (0..sub).map(|t| scatter_bits(n, qubits, t)).collect();
        // Partial trace over the support, indexed by the rest bits of (i, j).
        let mut reduced = vec![ZERO; dim * dim];
        let rest: Vec<usize> = (0..dim).filter(|i| i & mask == 0).collect();
        let data = self.m.as_slice();
        for &a in &rest {
            for &b in &rest {
                let s: C64 = offsets.iter().map(|&o| data[(a | o) * dim + (b | o)]).sum();
                reduced[a * dim + b] = s;
            }
        }
        let w = eps / sub as f64;
        let data = self.m.as_mut_slice();
        for i in 0..dim {
            for j in 0..dim {
                let idx = i * dim + j;
                data[idx] *= 1.0 - eps;
                if i & mask == j & mask {
                    data[idx] += reduced[(i & !mask) * dim + (j & !mask)] * w;
                }
            }
        }
    }

    pub fn apply_pauli(&mut self, p: &PauliString, qubits: &[usize]) {
        let full = p.embed(self.n_qubits, qubits);
        let (x, dim) = (full.x_mask(), self.dim());
        let phases: Vec<C64> = (0..dim).map(|i| full.phase(i)).collect();
        let old = self.m.as_slice().to_vec();
        let data = self.m.as_mut_slice();
        for i in 0..dim {
            for j in 0..dim {
                data[(i ^ x) * dim + (j ^ x)] = phases[i] * old[i * dim + j] * phases[j].conj();
            }
        }
    }
}

/// Bit mask of the listed qubits in an `n`-qubit index.
pub fn support_mask(n: usize, qubits: &[usize]) -> usize {
    qubits.iter().fold(0, |m, &q| m | (1 << (n - 1 - q)))
}

/// Places the `k` bits of a local index onto the listed qubits.
#[inline]
pub fn scatter_bits(n: usize, qubits: &[usize], local: usize) -> usize {
    let k = qubits.len();
    let mut out = 0;
    for (m, &q) in qubits.iter().enumerate() {
        if (local >> (k - 1 - m)) & 1 == 1 {
            out |= 1 << (n - 1 - q);
        }
    }
    out
}

/// Left-multiplies a row-major `dim × dim` buffer by `u` on the listed qubits.
fn apply_left(data: &mut [C64], dim: usize, n: usize, u: &CMatrix, qubits: &[usize]) {
    let sub = u.rows();
    let mask = support_mask(n, qubits);
    let offsets: Vec<usize> = (0..sub).map(|t| scatter_bits(n, qubits, t)).collect();
    let um = u.as_slice();
    let mut gather = vec![ZERO; sub];
    for base in (0..dim).filter(|i| i & mask == 0) {
        for col in 0..dim {
            for (t, &o) in offsets.iter().enumerate() {
                gather[t] = data[(base | o) * dim + col];
            }
            for (t, &o) in offsets.iter().enumerate() {
                let row = &um[t * sub..(t + 1) * sub];
                data[(base | o) * dim + col] = row.iter().zip(&gather).map(|(&a, &b)| a * b).sum();
            }
        }
    }
}

/// Right-multiplies a row-major buffer by `u†` on the listed qubits.
fn apply_right_adjoint(data: &mut [C64], dim: usize, n: usize, u: &CMatrix, qubits: &[usize]) {
    let sub = u.rows();
    let mask = support_mask(n, qubits);
    let offsets: Vec<usize> = (0..sub).map(|t| scatter_bits(n, qubits, t)).collect();
    let um = u.as_slice();
    let mut gather = vec![ZERO; sub];
    for row in 0..dim {
        let r0 = row * dim;
        for base in (0..dim).filter(|i| i & mask == 0) {
            for (s, &o) in offsets.iter().enumerate() {
                gather[s] = data[r0 + (base | o)];
            }
            // (ρ U†)[row][t] = Σ_s ρ[row][s] conj(U[t][s])
            for (t, &o) in offsets.iter().enumerate() {
                let urow = &um[t * sub..(t + 1) * sub];
                data[r0 + (base | o)] = urow.iter().zip(&gather).map(|(&a, &b)| a.conj() * b).sum();
            }
        }
    }
}

/// Applies a local unitary to a state vector.
pub fn apply_unitary_vec(psi: &mut [C64], n: usize, u: &CMatrix, qubits: &[usize]) {
    let sub = u.rows();
    let mask = support_mask(n, qubits);
    let offsets: Vec<usize> = (0..sub).map(|t| scatter_bits(n, qubits, t)).collect();
    let um = u.as_slice();
    let mut gather = vec![ZERO; sub];
    for base in (0..psi.len()).filter(|i| i & mask == 0) {
        for (t, &o) in offsets.iter().enumerate() {
            gather[t] = psi[base | o];
        }
        for (t, &o) in offsets.iter().enumerate() {
            psi[base | o] = um[t * sub..(t + 1) * sub].iter().zip(&gather).map(|(&a, &b)| a * b).sum();
        }
    }
}

/// An observable, either diagonal in the Z basis or a Pauli word.
#[derive(Clone, Debug, PartialEq)]
pub enum Observable {
    Diagonal(Vec<f64>),
    Pauli(PauliString),
}

impl Observable {
    /// Diagonal observable with `‖A‖ ≤ 1` enforced.
    pub fn diagonal(weights: Vec<f64>) -> Result<Self> {
        let norm = weights.iter().map(|w| w.abs()).fold(0.0, f64::max);
        if norm > 1.0 + 1e-12 {
            return Err(QemError::ObservableNorm(norm));
        }
        if !weights.len().is_power_of_two() {
            return Err(QemError::InvalidArgument("diagonal length is not 2^n".into()));
        }
        Ok(Observable::Diagonal(weights))
    }

    /// Projector onto a set of basis states.
    pub fn projector(n_qubits: usize, indices: &[usize]) -> Self {
        let mut w = vec![0.0; 1 << n_qubits];
        for &i in indices {
            w[i] = 1.0;
        }
        Observable::Diagonal(w)
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            Observable::Diagonal(w) => w.len().trailing_zeros() as usize,
            Observable::Pauli(p) => p.n_qubits(),
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            Observable::Diagonal(w) => w.iter().map(|x| x.abs()).fold(0.0, f64::max),
            Observable::Pauli(_) => 1.0,
        }
    }

    /// Value assigned to a Z-basis readout, for diagonal observables.
    pub fn readout_value(&self, index: usize) -> Option<f64> {
        match self {
            Observable::Diagonal(w) => Some(w[index]),
            Observable::Pauli(p) if p.x_mask() == 0 => Some(p.phase(index).re),
            Observable::Pauli(_) => None,
        }
    }
}

/// `Tr[A ρ]`.
pub fn expectation_value(a: &Observable, rho: &DensityMatrix) -> Result<f64> {
    if a.n_qubits() != rho.n_qubits() {
        return Err(QemError::DimensionMismatch { expected: rho.n_qubits(), found: a.n_qubits() });
    }
    let norm = a.norm();
    if norm > 1.0 + 1e-12 {
        return Err(QemError::ObservableNorm(norm));
    }
    let m = rho.matrix();
    Ok(match a {
        Observable::Diagonal(w) => w.iter().enumerate().map(|(i, &wi)| wi * m[(i, i)].re).sum(),
        Observable::Pauli(p) => {
            let x = p.x_mask();
            (0..rho.dim()).map(|j| p.phase(j) * m[(j, j ^ x)]).sum::<C64>().re
        }
    })
}

/// Cumulative readout distribution for repeated Z-basis sampling.
#[derive(Clone, Debug)]
pub struct ReadoutSampler {
    cumulative: Vec<f64>,
}

impl ReadoutSampler {
    pub fn new(probabilities: &[f64]) -> Self {
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = probabilities
            .iter()
            .map(|&p| {
                acc += p.max(0.0);
                acc
            })
            .collect();
        let total = acc;
        for c in &mut cumulative {
            *c /= total;
        }
        Self { cumulative }
    }

    pub fn from_state(rho: &DensityMatrix) -> Self {
        Self::new(&rho.probabilities())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let idx = self.cumulative.partition_point(|&c| c <= u);
        idx.min(self.cumulative.len() - 1)
    }
}

/// Draws one Z-basis readout; returns the basis index (qubit 0 is the leading bit).
pub fn sample_z_readout<R: Rng + ?Sized>(rho: &DensityMatrix, rng: &mut R) -> usize {
    ReadoutSampler::from_state(rho).sample(rng)
}

/// Bitstring of a basis index, qubit 0 first.
pub fn bitstring(index: usize, n_qubits: usize) -> String {
    (0..n_qubits).map(|q| if (index >> (n_qubits - 1 - q)) & 1 == 1 { '1' } else { '0' }).collect()
}

/// One-shot ±1 (or weighted) sample of an observable, rotating Pauli words into the Z basis.
pub fn sample_observable<R: Rng + ?Sized>(a: &Observable, rho: &DensityMatrix, rng: &mut R) -> f64 {
    let (sampler, values) = observable_readout(a, rho);
    values[sampler.sample(rng)]
}

/// Outcome distribution of measuring `a` on `ρ`, with the value of each outcome.
/// Pauli observables are rotated into the Z basis first.
pub fn observable_readout(a: &Observable, rho: &DensityMatrix) -> (ReadoutSampler, Vec<f64>) {
    match a {
        Observable::Diagonal(w) => (ReadoutSampler::from_state(rho), w.clone()),
        Observable::Pauli(p) => {
            let mut rotated = rho.clone();
            let h = super::gate::gate_unitary(&super::gate::Gate::H).expect("H");
            let sdg = super::gate::gate_unitary(&super::gate::Gate::Sdg).expect("SDG");
            let y_rot = h.matmul(&sdg);
            for (q, &letter) in p.letters().iter().enumerate() {
                match letter {
                    super::pauli::Pauli::X => rotated.apply_unitary(&h, &[q]),
                    super::pauli::Pauli::Y => rotated.apply_unitary(&y_rot, &[q]),
                    _ => {}
                }
            }
            let z_mask = p.x_mask() | p.z_mask();
            let values = (0..rho.dim()).map(|x| if (x & z_mask).count_ones() % 2 == 1 { -1.0 } else { 1.0 }).collect();
            (ReadoutSampler::from_state(&rotated), values)
        }
    }
}

/// `|+⟩^⊗n`.
pub fn plus_state(n_qubits: usize) -> DensityMatrix {
    let h = r(std::f64::consts::FRAC_1_SQRT_2);
    DensityMatrix::product(n_qubits, [h, h])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::gate::{gate_unitary, Gate};
    use crate::quantum::pauli::Pauli;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn z_on_zero_state() {
        let rho = DensityMatrix::zero_state(1);
        let z = Observable::Pauli("Z".parse().unwrap());
        assert_eq!(expectation_value(&z, &rho).unwrap(), 1.0);
    }

    #[test]
    fn projector_on_maximally_mixed() {
        let rho = DensityMatrix::maximally_mixed(2);
        let a = Observable::projector(2, &[0]);
        assert!((expectation_value(&a, &rho).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn x_on_plus_state() {
        let x = Observable::Pauli("X".parse().unwrap());
        assert!((expectation_value(&x, &plus_state(1)).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn norm_violation_is_rejected() {
        assert!(matches!(Observable::diagonal(vec![0.5, 1.5]), Err(QemError::ObservableNorm(_))));
    }

    #[test]
    fn local_unitary_matches_kron() {
        // CNOT on qubits (2, 0) of 3 against the explicit embedding.
        let mut rho = DensityMatrix::from_pure(
            3,
            &[r(0.1), r(0.2), r(0.3), r(0.4), r(0.5), r(0.1), r(0.6), r(0.2)],
        )
        .unwrap();
        let before = rho.clone();
        let cnot = gate_unitary(&Gate::Cnot).unwrap();
        rho.apply_unitary(&cnot, &[2, 0]);
        // Permutation: control qubit 2 (lowest bit), target qubit 0 (highest bit).
        let mut u = CMatrix::zeros(8, 8);
        for i in 0..8 {
            let j = if i & 1 == 1 { i ^ 4 } else { i };
            u[(j, i)] = ONE;
        }
        let want = u.matmul(before.matrix()).matmul(&u.adjoint());
        assert!(rho.matrix().max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn depolarize_matches_kraus_form() {
        let mut a = DensityMatrix::from_pure(2, &[r(0.6), r(0.0), C64::new(0.0, 0.8), r(0.0)]).unwrap();
        let mut b = a.clone();
        let eps = 0.3;
        a.depolarize(eps, &[1]);
        let ops = vec![
            CMatrix::identity(2).scale_real((1.0 - 0.75 * eps).sqrt()),
            Pauli::X.matrix().scale_real((eps / 4.0).sqrt()),
            Pauli::Y.matrix().scale_real((eps / 4.0).sqrt()),
            Pauli::Z.matrix().scale_real((eps / 4.0).sqrt()),
        ];
        b.apply_channel(&KrausChannel::new(ops).unwrap(), &[1]);
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-15);
    }

    #[test]
    fn partial_trace_of_product() {
        let a = plus_state(1);
        let b = DensityMatrix::maximally_mixed(2);
        let ab = a.tensor(&b);
        assert!(ab.partial_trace_tail(1).matrix().max_abs_diff(a.matrix()) < 1e-15);
    }

    #[test]
    fn readout_of_basis_state_is_deterministic() {
        let rho = DensityMatrix::zero_state(2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(bitstring(sample_z_readout(&rho, &mut rng), 2), "00");
        }
    }

    fn binomial_check(rho: &DensityMatrix, seed: u64) {
        let draws = 10_000;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ones = (0..draws).filter(|_| sample_z_readout(rho, &mut rng) == 1).count();
        let sigma = (draws as f64 * 0.25).sqrt();
        assert!((ones as f64 - 0.5 * draws as f64).abs() < 3.0 * sigma, "ones = {ones}");
    }

    #[test]
    fn readout_frequencies_of_mixed_and_plus() {
        binomial_check(&DensityMatrix::maximally_mixed(1), 11);
        binomial_check(&plus_state(1), 12);
    }

    #[test]
    fn sampled_pauli_observable_is_unbiased() {
        let rho = plus_state(2);
        let a = Observable::Pauli("XX".parse().unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mean: f64 = (0..500).map(|_| sample_observable(&a, &rho, &mut rng)).sum::<f64>() / 500.0;
        assert_eq!(mean, 1.0);
    }
}
