//! Channels in Kraus form and their Pauli transfer matrices.

use nalgebra::DMatrix;

use super::matrix::{CMatrix, C64};
use super::pauli::{pauli_matrix, PauliString};
use crate::error::{QemError, Result};

/// Completeness tolerance for Kraus decompositions.
pub const KRAUS_TOL: f64 = 1e-12;

/// A channel `ρ ↦ Σ K ρ K†` on `k` qubits.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    n_qubits: usize,
    ops: Vec<CMatrix>,
}

impl KrausChannel {
    /// Validates shapes and the completeness relation `Σ K†K = 1`.
    pub fn new(ops: Vec<CMatrix>) -> Result<Self> {
        let dim = ops.first().ok_or_else(|| QemError::InvalidArgument("empty Kraus list".into()))?.rows();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(QemError::InvalidArgument(format!("Kraus dimension {dim} is not 2^k")));
        }
        for k in &ops {
            if k.rows() != dim || k.cols() != dim {
                return Err(QemError::DimensionMismatch { expected: dim, found: k.rows().max(k.cols()) });
            }
        }
        let mut sum = CMatrix::zeros(dim, dim);
        for k in &ops {
            sum = &sum + &k.adjoint().matmul(k);
        }
        let residual = sum.max_abs_diff(&CMatrix::identity(dim));
        if residual > KRAUS_TOL {
            return Err(QemError::NotTracePreserving(residual));
        }
        Ok(Self { n_qubits: dim.trailing_zeros() as usize, ops })
    }

    pub fn unitary(u: CMatrix) -> Self {
        let n_qubits = u.rows().trailing_zeros() as usize;
        Self { n_qubits, ops: vec![u] }
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self::unitary(CMatrix::identity(1 << n_qubits))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(rho.rows(), rho.cols());
        for k in &self.ops {
            out = &out + &k.matmul(rho).matmul(&k.adjoint());
        }
        out
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &KrausChannel) -> KrausChannel {
        assert_eq!(self.n_qubits, other.n_qubits, "channel sizes differ");
        let mut ops = Vec::with_capacity(self.ops.len() * other.ops.len());
        for a in &self.ops {
            for b in &other.ops {
                ops.push(a.matmul(b));
            }
        }
        KrausChannel { n_qubits: self.n_qubits, ops }
    }

    /// Tensor product; `self` acts on the leading qubits.
    pub fn tensor(&self, other: &KrausChannel) -> KrausChannel {
        let mut ops = Vec::with_capacity(self.ops.len() * other.ops.len());
        for a in &self.ops {
            for b in &other.ops {
                ops.push(a.kron(b));
            }
        }
        KrausChannel { n_qubits: self.n_qubits + other.n_qubits, ops }
    }
}

/// Real `4^k × 4^k` matrix of a channel in the normalized Pauli basis `P/√(2^k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTransferMatrix {
    k_qubits: usize,
    entries: DMatrix<f64>,
}

impl PauliTransferMatrix {
    pub fn from_matrix(k_qubits: usize, entries: DMatrix<f64>) -> Result<Self> {
        let d = 1usize << (2 * k_qubits);
        if entries.nrows() != d || entries.ncols() != d {
            return Err(QemError::DimensionMismatch { expected: d, found: entries.nrows() });
        }
        Ok(Self { k_qubits, entries })
    }

    pub fn identity(k_qubits: usize) -> Self {
        let d = 1usize << (2 * k_qubits);
        Self { k_qubits, entries: DMatrix::identity(d, d) }
    }

    pub fn diagonal(k_qubits: usize, diag: &[f64]) -> Result<Self> {
        let d = 1usize << (2 * k_qubits);
        if diag.len() != d {
            return Err(QemError::DimensionMismatch { expected: d, found: diag.len() });
        }
        Ok(Self { k_qubits, entries: DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(diag)) })
    }

    pub fn k_qubits(&self) -> usize {
        self.k_qubits
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    /// Deviation of the first row from `(1, 0, …, 0)`.
    pub fn trace_preservation_error(&self) -> f64 {
        (0..self.dim())
            .map(|j| (self.entries[(0, j)] - if j == 0 { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.trace_preservation_error() <= tol
    }

    pub fn max_abs_diff(&self, other: &PauliTransferMatrix) -> f64 {
        (&self.entries - &other.entries).abs().max()
    }

    pub fn scaled(&self, s: f64) -> PauliTransferMatrix {
        PauliTransferMatrix { k_qubits: self.k_qubits, entries: &self.entries * s }
    }

    pub fn add(&self, other: &PauliTransferMatrix) -> Result<PauliTransferMatrix> {
        if self.k_qubits != other.k_qubits {
            return Err(QemError::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(PauliTransferMatrix { k_qubits: self.k_qubits, entries: &self.entries + &other.entries })
    }

    /// `Σ_k R_k ⊗ S_k` ordering: `self` on the leading qubits.
    pub fn tensor(&self, other: &PauliTransferMatrix) -> PauliTransferMatrix {
        PauliTransferMatrix { k_qubits: self.k_qubits + other.k_qubits, entries: self.entries.kronecker(&other.entries) }
    }
}

/// Pauli transfer matrix of a Kraus channel, entry `(i, j) = 2^{-k} Tr[P_i Σ K P_j K†]`.
pub fn ptm_from_kraus(channel: &KrausChannel) -> PauliTransferMatrix {
    let k = channel.n_qubits();
    let d = 1usize << (2 * k);
    let norm = 1.0 / (1u64 << k) as f64;
    let paulis: Vec<CMatrix> = (0..d).map(|i| pauli_matrix(&PauliString::from_index(k, i))).collect();
    let mut entries = DMatrix::zeros(d, d);
    for (j, pj) in paulis.iter().enumerate() {
        let image = channel.apply(pj);
        for (i, pi) in paulis.iter().enumerate() {
            // Tr[P_i X] for Hermitian P_i is the sum over entries of P_i^T ∘ X.
            let tr: C64 = (0..pi.rows())
                .flat_map(|a| (0..pi.cols()).map(move |b| (a, b)))
                .filter(|&(a, b)| pi[(b, a)].norm_sqr() > 0.0)
                .map(|(a, b)| pi[(b, a)] * image[(a, b)])
                .sum();
            entries[(i, j)] = tr.re * norm;
        }
    }
    PauliTransferMatrix { k_qubits: k, entries }
}

/// Composition `a ∘ b` (apply `b` first) as a matrix product.
pub fn compose_ptm(a: &PauliTransferMatrix, b: &PauliTransferMatrix) -> Result<PauliTransferMatrix> {
    if a.k_qubits != b.k_qubits {
        return Err(QemError::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(PauliTransferMatrix { k_qubits: a.k_qubits, entries: &a.entries * &b.entries })
}
