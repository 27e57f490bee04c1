//! The Clifford+T gate alphabet plus the auxiliary operations that sampled
//! circuits need: Pauli insertions, `S†`, and state preparations.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use super::channel::KrausChannel;
use super::matrix::{c, r, CMatrix, C64, ONE, ZERO};
use super::pauli::{pauli_matrix, PauliString};
use crate::error::{QemError, Result};

/// Single-qubit states that can be prepared mid-circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrepState {
    Plus,
    Minus,
    Zero,
    One,
}

impl PrepState {
    pub const ALL: [PrepState; 4] = [PrepState::Plus, PrepState::Minus, PrepState::Zero, PrepState::One];

    pub fn vector(self) -> [C64; 2] {
        let h = r(FRAC_1_SQRT_2);
        match self {
            PrepState::Plus => [h, h],
            PrepState::Minus => [h, -h],
            PrepState::Zero => [ONE, ZERO],
            PrepState::One => [ZERO, ONE],
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            PrepState::Plus => "+",
            PrepState::Minus => "-",
            PrepState::Zero => "0",
            PrepState::One => "1",
        }
    }

    fn parse(s: &str) -> Option<PrepState> {
        match s {
            "+" => Some(PrepState::Plus),
            "-" => Some(PrepState::Minus),
            "0" => Some(PrepState::Zero),
            "1" => Some(PrepState::One),
            _ => None,
        }
    }

    /// The map `ρ ↦ Tr(ρ)|ψ⟩⟨ψ|`.
    pub fn channel(self) -> KrausChannel {
        let psi = self.vector();
        let ops = (0..2)
            .map(|m| {
                let mut k = CMatrix::zeros(2, 2);
                k[(0, m)] = psi[0];
                k[(1, m)] = psi[1];
                k
            })
            .collect();
        KrausChannel::new(ops).expect("state preparation is trace preserving")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gate {
    I,
    H,
    S,
    Sdg,
    T,
    Cnot,
    Pauli(PauliString),
    Prep(PrepState),
}

impl Gate {
    /// The ideal single-qubit gates drawn by the random circuit generator.
    pub const SINGLE_QUBIT_CLIFFORD_T: [Gate; 4] = [Gate::I, Gate::H, Gate::S, Gate::T];

    pub fn arity(&self) -> usize {
        match self {
            Gate::Cnot => 2,
            Gate::Pauli(p) => p.n_qubits(),
            _ => 1,
        }
    }

    pub fn is_unitary(&self) -> bool {
        !matches!(self, Gate::Prep(_))
    }

    /// Whether the gate fixes `|0⟩` up to a phase.
    pub fn fixes_zero(&self) -> bool {
        matches!(self, Gate::I | Gate::S | Gate::Sdg | Gate::T)
    }

    pub fn channel(&self) -> KrausChannel {
        match self {
            Gate::Prep(s) => s.channel(),
            g => KrausChannel::unitary(gate_unitary(g).expect("unitary gate")),
        }
    }
}

/// Unitary matrix of a gate. State preparations have none.
pub fn gate_unitary(g: &Gate) -> Result<CMatrix> {
    let h = r(FRAC_1_SQRT_2);
    Ok(match g {
        Gate::I => CMatrix::identity(2),
        Gate::H => CMatrix::from_rows(&[vec![h, h], vec![h, -h]]),
        Gate::S => CMatrix::diag(&[ONE, c(0.0, 1.0)]),
        Gate::Sdg => CMatrix::diag(&[ONE, c(0.0, -1.0)]),
        Gate::T => CMatrix::diag(&[ONE, C64::from_polar(1.0, std::f64::consts::FRAC_PI_4)]),
        Gate::Cnot => {
            let mut m = CMatrix::zeros(4, 4);
            m[(0, 0)] = ONE;
            m[(1, 1)] = ONE;
            m[(2, 3)] = ONE;
            m[(3, 2)] = ONE;
            m
        }
        Gate::Pauli(p) => pauli_matrix(p),
        Gate::Prep(s) => {
            return Err(QemError::InvalidArgument(format!("state preparation {} has no unitary", s.symbol())))
        }
    })
}

/// Looks up a gate by its text name, e.g. `"T"` or `"CNOT"`.
pub fn gate_unitary_by_name(name: &str) -> Result<CMatrix> {
    gate_unitary(&name.parse()?)
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::I => write!(f, "I"),
            Gate::H => write!(f, "H"),
            Gate::S => write!(f, "S"),
            Gate::Sdg => write!(f, "SDG"),
            Gate::T => write!(f, "T"),
            Gate::Cnot => write!(f, "CNOT"),
            Gate::Pauli(p) => write!(f, "PAULI {p}"),
            Gate::Prep(s) => write!(f, "PREP {}", s.symbol()),
        }
    }
}

impl FromStr for Gate {
    type Err = QemError;

    /// Parses the gate part of a text token, e.g. `H`, `PAULI XZ`, `PREP +`.
    fn from_str(s: &str) -> Result<Gate> {
        let mut parts = s.split_whitespace();
        let head = parts.next().unwrap_or("").to_ascii_uppercase();
        let gate = match head.as_str() {
            "I" | "ID" => Gate::I,
            "H" => Gate::H,
            "S" => Gate::S,
            "SDG" => Gate::Sdg,
            "T" => Gate::T,
            "CNOT" | "CX" => Gate::Cnot,
            "PAULI" => {
                let word = parts.next().ok_or_else(|| QemError::UnknownGate(s.to_string()))?;
                Gate::Pauli(word.parse()?)
            }
            "PREP" => {
                let st = parts.next().ok_or_else(|| QemError::UnknownGate(s.to_string()))?;
                Gate::Prep(PrepState::parse(st).ok_or_else(|| QemError::UnknownGate(s.to_string()))?)
            }
            _ => return Err(QemError::UnknownGate(s.to_string())),
        };
        if parts.next().is_some() {
            return Err(QemError::UnknownGate(s.to_string()));
        }
        Ok(gate)
    }
}
