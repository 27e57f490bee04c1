//! Noise generators `𝓛` entering `dρ/dt = −i[K, ρ] + λ𝓛(ρ)`.

use crate::error::{QemError, Result};
use crate::quantum::{DensityMatrix, Pauli, PauliString, C64};

/// The three noise processes. Rates are relative weights; the overall
/// strength `λ` is passed to the integrator so it can be rescaled.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseGenerator {
    /// `Σ_i (I/2 ⊗ Tr_i ρ − ρ)`.
    Depolarizing,
    /// `Σ_i λ1 (σ⁻ρσ⁺ − ½{σ⁺σ⁻, ρ}) + λ2 (ZρZ − ρ)`, with `σ⁻ = |0⟩⟨1|`.
    DampingDephasing { damping: f64, dephasing: f64 },
    /// Each system qubit coupled to its own thermal bath qubit through
    /// `V_i = ½ X_i X_{b_i} + ½ Z_{b_i}`.
    CoherentBath { beta: f64 },
}

impl NoiseGenerator {
    pub const DEFAULT_DAMPING_RATIO: f64 = 1.5;
    pub const DEFAULT_BETA: f64 = 1.0;

    pub fn damping_dephasing() -> Self {
        NoiseGenerator::DampingDephasing { damping: 1.0, dephasing: 1.0 / Self::DEFAULT_DAMPING_RATIO }
    }

    pub fn coherent_bath() -> Self {
        NoiseGenerator::CoherentBath { beta: Self::DEFAULT_BETA }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseGenerator::Depolarizing => Ok(()),
            NoiseGenerator::DampingDephasing { damping, dephasing } => {
                if damping >= 0.0 && dephasing >= 0.0 && damping.is_finite() && dephasing.is_finite() {
                    Ok(())
                } else {
                    Err(QemError::InvalidArgument(format!("rates ({damping}, {dephasing}) must be non-negative")))
                }
            }
            NoiseGenerator::CoherentBath { beta } => {
                if beta.is_finite() {
                    Ok(())
                } else {
                    Err(QemError::InvalidArgument(format!("inverse temperature {beta} is not finite")))
                }
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NoiseGenerator::Depolarizing => "depolarizing",
            NoiseGenerator::DampingDephasing { .. } => "damping",
            NoiseGenerator::CoherentBath { .. } => "bath",
        }
    }

    /// Number of ancilla qubits appended to an `n`-qubit system.
    pub fn bath_qubits(&self, n: usize) -> usize {
        match self {
            NoiseGenerator::CoherentBath { .. } => n,
            _ => 0,
        }
    }

    /// `exp(−β Σ σ^z)` over the `n` bath qubits, normalised to unit trace.
    pub fn bath_state(&self, n: usize) -> Option<DensityMatrix> {
        let NoiseGenerator::CoherentBath { beta } = *self else { return None };
        let z = 2.0 * beta.cosh();
        let single = [(-beta).exp() / z, beta.exp() / z];
        let dim = 1usize << n;
        let mut m = crate::quantum::CMatrix::zeros(dim, dim);
        for i in 0..dim {
            let p: f64 = (0..n).map(|q| single[(i >> (n - 1 - q)) & 1]).product();
            m[(i, i)] = C64::new(p, 0.0);
        }
        Some(DensityMatrix::from_matrix_unchecked(n, m).expect("dimension matches"))
    }

    /// Pauli terms of `V` on system plus bath (bath qubit of `i` is `n + i`).
    pub fn bath_coupling(&self, n: usize) -> Vec<(f64, PauliString)> {
        if !matches!(self, NoiseGenerator::CoherentBath { .. }) {
            return Vec::new();
        }
        let total = 2 * n;
        let mut terms = Vec::with_capacity(2 * n);
        for i in 0..n {
            let mut xx = vec![Pauli::I; total];
            xx[i] = Pauli::X;
            xx[n + i] = Pauli::X;
            terms.push((0.5, PauliString::new(xx).expect("valid length")));
            terms.push((0.5, PauliString::single(total, n + i, Pauli::Z)));
        }
        terms
    }

    /// Whether `𝓛` is a pure commutator, so evolution stays unitary.
    pub fn is_hamiltonian(&self) -> bool {
        matches!(self, NoiseGenerator::CoherentBath { .. })
    }

    /// `out += s · 𝓛(ρ)` for the dissipative variants; no-op for the bath,
    /// whose action is folded into the Hamiltonian.
    pub fn dissipator_into(&self, n: usize, s: f64, rho: &[C64], out: &mut [C64]) {
        match *self {
            NoiseGenerator::Depolarizing => {
                for q in 0..n {
                    depolarizing_site_into(n, q, s, rho, out);
                }
            }
            NoiseGenerator::DampingDephasing { damping, dephasing } => {
                for q in 0..n {
                    damping_site_into(n, q, s * damping, s * dephasing, rho, out);
                }
            }
            NoiseGenerator::CoherentBath { .. } => {}
        }
    }

    /// Upper bound on the induced max-norm of `𝓛` on `n` qubits.
    pub fn dissipator_bound(&self, n: usize) -> f64 {
        match *self {
            NoiseGenerator::Depolarizing => 2.0 * n as f64,
            NoiseGenerator::DampingDephasing { damping, dephasing } => n as f64 * (2.0 * damping + 2.0 * dephasing),
            NoiseGenerator::CoherentBath { .. } => 0.0,
        }
    }
}

/// `out += s (I/2 ⊗ Tr_q ρ − ρ)`.
pub fn depolarizing_site_into(n: usize, q: usize, s: f64, rho: &[C64], out: &mut [C64]) {
    let dim = 1usize << n;
    let b = 1usize << (n - 1 - q);
    for i in 0..dim {
        for j in 0..dim {
            let mut v = -rho[i * dim + j];
            if (i & b) == (j & b) {
                let (i0, j0) = (i & !b, j & !b);
                v += 0.5 * (rho[i0 * dim + j0] + rho[(i0 | b) * dim + (j0 | b)]);
            }
            out[i * dim + j] += v * s;
        }
    }
}

/// `out += a (σ⁻ρσ⁺ − ½{σ⁺σ⁻, ρ}) + z (ZρZ − ρ)` on qubit `q`.
pub fn damping_site_into(n: usize, q: usize, a: f64, z: f64, rho: &[C64], out: &mut [C64]) {
    let dim = 1usize << n;
    let b = 1usize << (n - 1 - q);
    for i in 0..dim {
        let bi = (i & b != 0) as u8;
        for j in 0..dim {
            let bj = (j & b != 0) as u8;
            let r = rho[i * dim + j];
            let mut v = r * (-0.5 * a * (bi + bj) as f64);
            if bi == 0 && bj == 0 {
                v += rho[(i | b) * dim + (j | b)] * a;
            }
            if bi != bj {
                v -= r * (2.0 * z);
            }
            out[i * dim + j] += v;
        }
    }
}

/// `λ = −½ ln(1 − ε)`, the rate whose unit-time depolarizing map has strength `ε`.
pub fn noise_rate_from_depolarizing_strength(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(QemError::InvalidArgument(format!("depolarizing strength {eps} outside (0, 1)")));
    }
    Ok(-0.5 * (-eps).ln_1p())
}
