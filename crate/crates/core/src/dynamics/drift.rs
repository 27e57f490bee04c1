//! Random "drift" Hamiltonians `U K_0 U†` with Haar-random local `U`.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::schedule::{Schedule, Segment};
use crate::error::{QemError, Result};
use crate::quantum::{CMatrix, Pauli, PauliString, PauliSum, C64};

/// One coupling `J X_i Z_j` of `K_0`.
#[derive(Clone, Debug, PartialEq)]
pub struct DriftCoupling {
    pub i: usize,
    pub j: usize,
    pub strength: f64,
}

/// Erdős–Rényi graph over the qubits with Gaussian couplings, resampled until
/// at least one edge exists. The orientation of each edge (which end carries
/// the `X`) is a fair coin.
pub fn sample_drift_couplings<R: Rng + ?Sized>(rng: &mut R, n: usize, p: f64) -> Result<Vec<DriftCoupling>> {
    if n < 2 {
        return Err(QemError::InvalidArgument("drift model needs at least two qubits".into()));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(QemError::InvalidArgument(format!("edge probability {p} outside (0, 1]")));
    }
    loop {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen::<f64>() < p {
                    let (i, j) = if rng.gen::<bool>() { (a, b) } else { (b, a) };
                    let strength: f64 = StandardNormal.sample(rng);
                    edges.push(DriftCoupling { i, j, strength });
                }
            }
        }
        if !edges.is_empty() {
            return Ok(edges);
        }
    }
}

/// Haar-random element of SU(2) from a normalised Gaussian 4-vector.
pub fn haar_su2<R: Rng + ?Sized>(rng: &mut R) -> CMatrix {
    let mut q = [0.0f64; 4];
    loop {
        for x in q.iter_mut() {
            *x = StandardNormal.sample(rng);
        }
        let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            q.iter_mut().for_each(|x| *x /= norm);
            break;
        }
    }
    let [a, b, c, d] = q;
    CMatrix::from_rows(&[vec![C64::new(a, b), C64::new(c, d)], vec![C64::new(-c, d), C64::new(a, -b)]])
}

/// `R[a][b] = ½ Tr(σ_a U σ_b U†)` for `a, b ∈ {X, Y, Z}`.
fn rotation(u: &CMatrix) -> [[f64; 3]; 3] {
    let sig = [Pauli::X.matrix(), Pauli::Y.matrix(), Pauli::Z.matrix()];
    let ud = u.adjoint();
    let mut r = [[0.0; 3]; 3];
    for b in 0..3 {
        let img = u.matmul(&sig[b]).matmul(&ud);
        for a in 0..3 {
            r[a][b] = 0.5 * sig[a].matmul(&img).trace().re;
        }
    }
    r
}

const XYZ: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

/// `U^{⊗n} K_0 U^{⊗n}†` expanded in the Pauli basis.
pub fn rotate_couplings(n: usize, couplings: &[DriftCoupling], locals: &[CMatrix]) -> Result<Vec<(f64, PauliString)>> {
    if locals.len() != n {
        return Err(QemError::DimensionMismatch { expected: n, found: locals.len() });
    }
    let rots: Vec<[[f64; 3]; 3]> = locals.iter().map(rotation).collect();
    let mut terms = Vec::with_capacity(9 * couplings.len());
    for e in couplings {
        // X is column 0, Z is column 2.
        for a in 0..3 {
            for b in 0..3 {
                let w = e.strength * rots[e.i][a][0] * rots[e.j][b][2];
                let mut letters = vec![Pauli::I; n];
                letters[e.i] = XYZ[a];
                letters[e.j] = XYZ[b];
                terms.push((w, PauliString::new(letters)?));
            }
        }
    }
    Ok(PauliSum::new(n, terms)?.terms().to_vec())
}

/// `d` segments of duration `step_time`, each `U_k K_0 U_k†` with a fresh
/// local Haar unitary and one fixed `K_0`.
pub fn build_drift_schedule<R: Rng + ?Sized>(
    rng: &mut R,
    n_qubits: usize,
    d_steps: usize,
    step_time: f64,
    edge_probability: f64,
) -> Result<Schedule> {
    if d_steps == 0 {
        return Err(QemError::InvalidArgument("need at least one drift step".into()));
    }
    let couplings = sample_drift_couplings(rng, n_qubits, edge_probability)?;
    let mut segments = Vec::with_capacity(d_steps);
    for _ in 0..d_steps {
        let locals: Vec<CMatrix> = (0..n_qubits).map(|_| haar_su2(rng)).collect();
        segments.push(Segment { duration: step_time, terms: rotate_couplings(n_qubits, &couplings, &locals)? });
    }
    Schedule::new(n_qubits, segments)
}
