//! Pauli words, their matrices, and sums of weighted Pauli words.
//!
//! Qubit `q` of an `n`-qubit register is the letter at position `q` and the
//! bit `n - 1 - q` of a computational-basis index (qubit 0 is leftmost).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::matrix::{c, r, CMatrix, C64, ONE, ZERO};
use crate::error::{QemError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> CMatrix {
        match self {
            Pauli::I => CMatrix::identity(2),
            Pauli::X => CMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]),
            Pauli::Y => CMatrix::from_rows(&[vec![ZERO, c(0.0, -1.0)], vec![c(0.0, 1.0), ZERO]]),
            Pauli::Z => CMatrix::from_rows(&[vec![ONE, ZERO], vec![ZERO, r(-1.0)]]),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(ch: char) -> Option<Pauli> {
        match ch {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// Index in the ordering I, X, Y, Z.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Pauli {
        Pauli::ALL[i & 3]
    }
}

/// A tensor word over {I, X, Y, Z}.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Result<Self> {
        if letters.is_empty() {
            return Err(QemError::InvalidArgument("Pauli word must have at least one qubit".into()));
        }
        if letters.len() > 16 {
            return Err(QemError::InvalidArgument(format!("Pauli word of {} qubits is too long", letters.len())));
        }
        Ok(Self { letters })
    }

    pub fn identity(n: usize) -> Self {
        Self { letters: vec![Pauli::I; n] }
    }

    /// Single-site operator `p` on qubit `q` of `n`.
    pub fn single(n: usize, q: usize, p: Pauli) -> Self {
        let mut letters = vec![Pauli::I; n];
        letters[q] = p;
        Self { letters }
    }

    /// Word whose letters are the base-4 digits of `index` (qubit 0 most significant).
    pub fn from_index(n: usize, index: usize) -> Self {
        let letters = (0..n).map(|q| Pauli::from_index(index >> (2 * (n - 1 - q)))).collect();
        Self { letters }
    }

    pub fn index(&self) -> usize {
        self.letters.iter().fold(0, |acc, p| (acc << 2) | p.index())
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn letter(&self, q: usize) -> Pauli {
        self.letters[q]
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// Bit mask of positions flipped by the word (X or Y letters).
    pub fn x_mask(&self) -> usize {
        let n = self.n_qubits();
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, p)| matches!(p, Pauli::X | Pauli::Y))
            .fold(0, |m, (q, _)| m | (1 << (n - 1 - q)))
    }

    /// Bit mask of positions carrying a sign (Y or Z letters).
    pub fn z_mask(&self) -> usize {
        let n = self.n_qubits();
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, p)| matches!(p, Pauli::Y | Pauli::Z))
            .fold(0, |m, (q, _)| m | (1 << (n - 1 - q)))
    }

    fn y_count(&self) -> usize {
        self.letters.iter().filter(|&&p| p == Pauli::Y).count()
    }

    /// Phase `c` with `P|i⟩ = c |i ⊕ x_mask⟩`.
    #[inline]
    pub fn phase(&self, index: usize) -> C64 {
        phase_of(self.y_count(), self.z_mask(), index)
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        assert_eq!(self.n_qubits(), other.n_qubits());
        let anti = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(&a, &b)| a != Pauli::I && b != Pauli::I && a != b)
            .count();
        anti % 2 == 0
    }

    /// Word obtained by placing `self` on the listed qubits of an `n`-qubit register.
    pub fn embed(&self, n: usize, qubits: &[usize]) -> PauliString {
        assert_eq!(qubits.len(), self.n_qubits());
        let mut letters = vec![Pauli::I; n];
        for (&q, &p) in qubits.iter().zip(&self.letters) {
            letters[q] = p;
        }
        PauliString { letters }
    }

    /// Applies the word to a state vector.
    pub fn apply_vec(&self, v: &[C64]) -> Vec<C64> {
        let (x, z, ny) = (self.x_mask(), self.z_mask(), self.y_count());
        let mut out = vec![ZERO; v.len()];
        for (i, &a) in v.iter().enumerate() {
            out[i ^ x] = phase_of(ny, z, i) * a;
        }
        out
    }
}

#[inline]
fn phase_of(y_count: usize, z_mask: usize, index: usize) -> C64 {
    let base = match y_count % 4 {
        0 => c(1.0, 0.0),
        1 => c(0.0, 1.0),
        2 => c(-1.0, 0.0),
        _ => c(0.0, -1.0),
    };
    if (index & z_mask).count_ones() % 2 == 1 {
        -base
    } else {
        base
    }
}

/// The `2^n × 2^n` matrix of a Pauli word.
pub fn pauli_matrix(p: &PauliString) -> CMatrix {
    let dim = 1usize << p.n_qubits();
    let (x, z, ny) = (p.x_mask(), p.z_mask(), p.y_count());
    let mut m = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        m[(i ^ x, i)] = phase_of(ny, z, i);
    }
    m
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.letters {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = QemError;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .trim()
            .chars()
            .map(|ch| Pauli::from_char(ch.to_ascii_uppercase()))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| QemError::InvalidArgument(format!("`{s}` is not a Pauli word")))?;
        PauliString::new(letters)
    }
}

impl TryFrom<String> for PauliString {
    type Error = QemError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PauliString> for String {
    fn from(p: PauliString) -> String {
        p.to_string()
    }
}

/// A real-weighted sum of Pauli words, compiled for fast application.
///
/// Terms sharing an X-mask are merged into one diagonal, so that
/// `H = Σ_g X^{g} D_g` and each application costs `groups × dim`.
#[derive(Clone, Debug)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<(f64, PauliString)>,
    groups: Vec<(usize, Vec<C64>)>,
}

impl PauliSum {
    pub fn new(n_qubits: usize, terms: Vec<(f64, PauliString)>) -> Result<Self> {
        let mut merged: BTreeMap<PauliString, f64> = BTreeMap::new();
        for (w, p) in terms {
            if p.n_qubits() != n_qubits {
                return Err(QemError::DimensionMismatch { expected: n_qubits, found: p.n_qubits() });
            }
            *merged.entry(p).or_insert(0.0) += w;
        }
        let terms: Vec<(f64, PauliString)> =
            merged.into_iter().filter(|(_, w)| *w != 0.0).map(|(p, w)| (w, p)).collect();
        let dim = 1usize << n_qubits;
        let mut by_mask: BTreeMap<usize, Vec<C64>> = BTreeMap::new();
        for (w, p) in &terms {
            let d = by_mask.entry(p.x_mask()).or_insert_with(|| vec![ZERO; dim]);
            for (i, di) in d.iter_mut().enumerate() {
                *di += p.phase(i) * *w;
            }
        }
        Ok(Self { n_qubits, terms, groups: by_mask.into_iter().collect() })
    }

    pub fn zero(n_qubits: usize) -> Self {
        Self { n_qubits, terms: Vec::new(), groups: Vec::new() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    /// Sum of absolute weights; bounds the operator norm.
    pub fn weight_norm(&self) -> f64 {
        self.terms.iter().map(|(w, _)| w.abs()).sum()
    }

    pub fn to_matrix(&self) -> CMatrix {
        let dim = 1usize << self.n_qubits;
        let mut m = CMatrix::zeros(dim, dim);
        for (x, d) in &self.groups {
            for (i, &di) in d.iter().enumerate() {
                m[(i ^ x, i)] += di;
            }
        }
        m
    }

    /// `out += s · H v`.
    pub fn apply_vec_into(&self, s: C64, v: &[C64], out: &mut [C64]) {
        for (x, d) in &self.groups {
            for (i, (&a, &di)) in v.iter().zip(d).enumerate() {
                out[i ^ x] += s * di * a;
            }
        }
    }

    /// `out += s · [H, ρ]` for a row-major `dim × dim` matrix `ρ`.
    pub fn commutator_into(&self, s: C64, rho: &[C64], out: &mut [C64]) {
        let dim = 1usize << self.n_qubits;
        debug_assert_eq!(rho.len(), dim * dim);
        for (x, d) in &self.groups {
            // (Hρ)[i^x][j] = d[i] ρ[i][j]
            for i in 0..dim {
                let f = s * d[i];
                let src = &rho[i * dim..(i + 1) * dim];
                let dst = &mut out[(i ^ x) * dim..((i ^ x) + 1) * dim];
                for (o, &a) in dst.iter_mut().zip(src) {
                    *o += f * a;
                }
            }
            // (ρH)[i][b] = ρ[i][b^x] d[b]
            for i in 0..dim {
                let row = i * dim;
                for b in 0..dim {
                    out[row + b] -= s * rho[row + (b ^ x)] * d[b];
                }
            }
        }
    }
}
