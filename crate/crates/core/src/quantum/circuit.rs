//! Layered circuits, their text format, and noisy application to states.
//!
//! Text format, one layer per line:
//!
//! ```text
//! qubits 4
//! H 0 | T 1 | CNOT 2 3   # comment
//! PAULI XZ 0 1 | PREP + 2
//! -                      # empty layer
//! ```

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use super::channel::KrausChannel;
use super::gate::{gate_unitary, Gate};
use super::matrix::CMatrix;
use super::state::DensityMatrix;
use crate::error::{QemError, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlacedGate {
    pub gate: Gate,
    pub qubits: Vec<usize>,
}

impl PlacedGate {
    pub fn new(gate: Gate, qubits: Vec<usize>) -> Self {
        Self { gate, qubits }
    }

    fn check(&self, n_qubits: usize) -> Result<()> {
        if self.qubits.len() != self.gate.arity() {
            return Err(QemError::InvalidArgument(format!(
                "{} expects {} qubits, got {}",
                self.gate,
                self.gate.arity(),
                self.qubits.len()
            )));
        }
        for (i, &q) in self.qubits.iter().enumerate() {
            if q >= n_qubits {
                return Err(QemError::InvalidArgument(format!("qubit {q} out of range for {n_qubits} qubits")));
            }
            if self.qubits[..i].contains(&q) {
                return Err(QemError::InvalidArgument(format!("repeated qubit {q} in {}", self.gate)));
            }
        }
        Ok(())
    }
}

impl fmt::Display for PlacedGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.gate)?;
        for q in &self.qubits {
            write!(f, " {q}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Circuit {
    n_qubits: usize,
    layers: Vec<Vec<PlacedGate>>,
}

impl Circuit {
    pub fn new(n_qubits: usize, layers: Vec<Vec<PlacedGate>>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(QemError::InvalidArgument("circuit needs at least one qubit".into()));
        }
        for (l, layer) in layers.iter().enumerate() {
            let mut used = vec![false; n_qubits];
            for g in layer {
                g.check(n_qubits)?;
                for &q in &g.qubits {
                    if used[q] {
                        return Err(QemError::InvalidArgument(format!("layer {l} touches qubit {q} twice")));
                    }
                    used[q] = true;
                }
            }
        }
        Ok(Self { n_qubits, layers })
    }

    pub fn empty(n_qubits: usize) -> Self {
        Self { n_qubits, layers: Vec::new() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Vec<PlacedGate>] {
        &self.layers
    }

    pub fn gates(&self) -> impl Iterator<Item = (usize, &PlacedGate)> {
        self.layers.iter().enumerate().flat_map(|(l, layer)| layer.iter().map(move |g| (l, g)))
    }

    /// Counts of (single-qubit, two-qubit) gates.
    pub fn gate_counts(&self) -> (usize, usize) {
        self.gates().fold((0, 0), |(a, b), (_, g)| if g.qubits.len() == 1 { (a + 1, b) } else { (a, b + 1) })
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.n_qubits)?;
        for layer in &self.layers {
            if layer.is_empty() {
                writeln!(f, "-")?;
                continue;
            }
            let parts: Vec<String> = layer.iter().map(ToString::to_string).collect();
            writeln!(f, "{}", parts.join(" | "))?;
        }
        Ok(())
    }
}

impl FromStr for Circuit {
    type Err = QemError;

    fn from_str(text: &str) -> Result<Circuit> {
        let mut n_qubits: Option<usize> = None;
        let mut layers = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| QemError::Parse { line: lineno + 1, msg };
            if let Some(rest) = line.strip_prefix("qubits") {
                if !layers.is_empty() || n_qubits.is_some() {
                    return Err(err("`qubits` header must come first".into()));
                }
                n_qubits = Some(rest.trim().parse().map_err(|_| err(format!("bad qubit count `{rest}`")))?);
                continue;
            }
            if line == "-" {
                layers.push(Vec::new());
                continue;
            }
            let mut layer = Vec::new();
            for part in line.split('|') {
                let tokens: Vec<&str> = part.split_whitespace().collect();
                let name_len = match tokens.first().map(|t| t.to_ascii_uppercase()) {
                    Some(t) if t == "PAULI" || t == "PREP" => 2,
                    Some(_) => 1,
                    None => return Err(err("empty gate slot".into())),
                };
                if tokens.len() < name_len {
                    return Err(err(format!("incomplete gate `{}`", part.trim())));
                }
                let gate: Gate = tokens[..name_len].join(" ").parse().map_err(|e: QemError| err(e.to_string()))?;
                let qubits = tokens[name_len..]
                    .iter()
                    .map(|t| t.parse::<usize>().map_err(|_| err(format!("bad qubit index `{t}`"))))
                    .collect::<Result<Vec<_>>>()?;
                layer.push(PlacedGate::new(gate, qubits));
            }
            layers.push(layer);
        }
        let n = match n_qubits {
            Some(n) => n,
            None => layers.iter().flatten().flat_map(|g| g.qubits.iter().copied()).max().map_or(1, |m| m + 1),
        };
        Circuit::new(n, layers).map_err(|e| QemError::Parse { line: 0, msg: e.to_string() })
    }
}

/// Noise attached after every operation of a circuit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseModel {
    /// `D_k` on the whole support of each operation.
    Depolarizing { eps: f64 },
    /// `A` on every qubit of each operation.
    AmplitudeDamping { eps: f64 },
}

impl NoiseModel {
    pub fn eps(&self) -> f64 {
        match *self {
            NoiseModel::Depolarizing { eps } | NoiseModel::AmplitudeDamping { eps } => eps,
        }
    }

    pub fn apply(&self, rho: &mut DensityMatrix, qubits: &[usize]) {
        match *self {
            NoiseModel::Depolarizing { eps } => rho.depolarize(eps, qubits),
            NoiseModel::AmplitudeDamping { eps } => {
                if eps == 0.0 {
                    return;
                }
                let a = amplitude_damping_kraus(eps);
                for &q in qubits {
                    rho.apply_channel(&a, &[q]);
                }
            }
        }
    }
}

/// Kraus pair `A_0 = diag(1, √(1−ε))`, `A_1 = √ε |0⟩⟨1|`.
pub fn amplitude_damping_kraus(eps: f64) -> KrausChannel {
    use super::matrix::{r, ZERO};
    let a0 = CMatrix::from_rows(&[vec![r(1.0), ZERO], vec![ZERO, r((1.0 - eps).sqrt())]]);
    let a1 = CMatrix::from_rows(&[vec![ZERO, r(eps.sqrt())], vec![ZERO, ZERO]]);
    KrausChannel::new(vec![a0, a1]).expect("amplitude damping is trace preserving")
}

/// A noisy operation slot: a short sequence of ideal operations on a
/// support, followed once by the device noise.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlacedOp {
    pub qubits: Vec<usize>,
    /// Operations applied in order; qubit lists index into `qubits`.
    pub body: Vec<(Gate, Vec<usize>)>,
}

impl PlacedOp {
    pub fn from_gate(g: &PlacedGate) -> Self {
        let local = (0..g.qubits.len()).collect();
        Self { qubits: g.qubits.clone(), body: vec![(g.gate.clone(), local)] }
    }

    /// Ideal operations on absolute qubit indices.
    pub fn placed_body(&self) -> impl Iterator<Item = PlacedGate> + '_ {
        self.body
            .iter()
            .map(|(g, local)| PlacedGate::new(g.clone(), local.iter().map(|&i| self.qubits[i]).collect()))
    }
}

impl fmt::Display for PlacedOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.placed_body().map(|g| g.to_string()).collect();
        write!(f, "{}", parts.join(" ; "))
    }
}

/// A circuit of noisy operation slots with the same layering as its ideal source.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NoisyCircuit {
    pub n_qubits: usize,
    pub layers: Vec<Vec<PlacedOp>>,
}

impl NoisyCircuit {
    pub fn from_ideal(c: &Circuit) -> Self {
        Self {
            n_qubits: c.n_qubits(),
            layers: c.layers().iter().map(|l| l.iter().map(PlacedOp::from_gate).collect()).collect(),
        }
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Applies layers `from..` to a state.
    pub fn apply_from(&self, from: usize, noise: Option<&NoiseModel>, rho: &mut DensityMatrix, cache: &mut GateCache) {
        for layer in &self.layers[from..] {
            apply_layer(layer, noise, rho, cache);
        }
    }

    pub fn apply(&self, noise: Option<&NoiseModel>, rho0: &DensityMatrix) -> Result<DensityMatrix> {
        if rho0.n_qubits() != self.n_qubits {
            return Err(QemError::DimensionMismatch { expected: self.n_qubits, found: rho0.n_qubits() });
        }
        let mut rho = rho0.clone();
        self.apply_from(0, noise, &mut rho, &mut GateCache::default());
        Ok(rho)
    }
}

impl fmt::Display for NoisyCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.n_qubits)?;
        for layer in &self.layers {
            let parts: Vec<String> = layer.iter().map(|op| format!("[{op}]")).collect();
            writeln!(f, "{}", if parts.is_empty() { "-".to_string() } else { parts.join(" | ") })?;
        }
        Ok(())
    }
}

/// Memoized gate channels.
#[derive(Default)]
pub struct GateCache {
    channels: HashMap<Gate, KrausChannel>,
}

impl GateCache {
    pub fn channel(&mut self, g: &Gate) -> &KrausChannel {
        self.channels.entry(g.clone()).or_insert_with(|| g.channel())
    }
}

/// Applies one layer of noisy slots.
pub fn apply_layer(layer: &[PlacedOp], noise: Option<&NoiseModel>, rho: &mut DensityMatrix, cache: &mut GateCache) {
    for op in layer {
        for g in op.placed_body() {
            match &g.gate {
                Gate::Pauli(p) => rho.apply_pauli(p, &g.qubits),
                Gate::I => {}
                gate => {
                    let ch = cache.channel(gate);
                    rho.apply_channel(ch, &g.qubits);
                }
            }
        }
        if let Some(n) = noise {
            n.apply(rho, &op.qubits);
        }
    }
}

/// Runs a circuit on `ρ0`, attaching `noise` after each gate when given.
pub fn apply_circuit(c: &Circuit, noise: Option<&NoiseModel>, rho0: &DensityMatrix) -> Result<DensityMatrix> {
    NoisyCircuit::from_ideal(c).apply(noise, rho0)
}

/// Pure-state simulation of a unitary circuit.
pub fn simulate_pure(c: &Circuit, psi0: &[super::matrix::C64]) -> Result<Vec<super::matrix::C64>> {
    let dim = 1usize << c.n_qubits();
    if psi0.len() != dim {
        return Err(QemError::DimensionMismatch { expected: dim, found: psi0.len() });
    }
    let mut psi = psi0.to_vec();
    for (_, g) in c.gates() {
        let u = gate_unitary(&g.gate)?;
        super::state::apply_unitary_vec(&mut psi, c.n_qubits(), &u, &g.qubits);
    }
    Ok(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::state::{expectation_value, plus_state, Observable};

    #[test]
    fn empty_circuit_is_identity() {
        let rho = plus_state(2);
        let out = apply_circuit(&Circuit::empty(2), None, &rho).unwrap();
        assert_eq!(out, rho);
    }

    #[test]
    fn hadamard_on_zero_gives_plus() {
        let c: Circuit = "H 0".parse().unwrap();
        let out = apply_circuit(&c, None, &DensityMatrix::zero_state(1)).unwrap();
        assert!(out.matrix().max_abs_diff(plus_state(1).matrix()) < 1e-15);
    }

    #[test]
    fn noisy_single_gate_matches_definition() {
        let eps = 0.07;
        let c: Circuit = "T 0\nH 0".parse::<Circuit>().unwrap();
        let noise = NoiseModel::Depolarizing { eps };
        let out = apply_circuit(&c, Some(&noise), &DensityMatrix::zero_state(1)).unwrap();
        // Two rounds of (1−ε) U ρ U† + ε I/2.
        let mut want = DensityMatrix::zero_state(1).into_matrix();
        for g in [Gate::T, Gate::H] {
            let u = gate_unitary(&g).unwrap();
            let ideal = u.matmul(&want).matmul(&u.adjoint());
            want = &ideal.scale_real(1.0 - eps) + &CMatrix::identity(2).scale_real(eps / 2.0);
        }
        assert!(out.matrix().max_abs_diff(&want) < 1e-15);
        assert!((out.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_state_parity() {
        let c: Circuit = "H 0\nCNOT 0 1".parse().unwrap();
        let out = apply_circuit(&c, None, &DensityMatrix::zero_state(2)).unwrap();
        let zz = Observable::Pauli("ZZ".parse().unwrap());
        let xx = Observable::Pauli("XX".parse().unwrap());
        assert!((expectation_value(&zz, &out).unwrap() - 1.0).abs() < 1e-14);
        assert!((expectation_value(&xx, &out).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn text_round_trip_with_comments() {
        let text = "# header comment\nqubits 4\nH 0 | T 1 | CNOT 2 3  # trailing\nPAULI XZ 0 1 | PREP + 2\n-\nSDG 3\n";
        let c: Circuit = text.parse().unwrap();
        assert_eq!(c.depth(), 4);
        let again: Circuit = c.to_string().parse().unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn overlapping_layer_is_rejected() {
        assert!("H 0 | CNOT 0 1".parse::<Circuit>().is_err());
        assert!("CNOT 1 1".parse::<Circuit>().is_err());
        assert!("CNOT 0".parse::<Circuit>().is_err());
        assert!("qubits 2\nH 5".parse::<Circuit>().is_err());
        assert!("FOO 0".parse::<Circuit>().is_err());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let c: Circuit = "qubits 2\nH 0".parse().unwrap();
        assert!(matches!(
            apply_circuit(&c, None, &DensityMatrix::zero_state(3)),
            Err(QemError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn pure_and_mixed_simulation_agree() {
        let c: Circuit = "qubits 3\nH 0 | T 1 | S 2\nCNOT 0 2\nH 1 | T 0\nCNOT 1 0".parse().unwrap();
        let mut psi0 = vec![super::super::matrix::ZERO; 8];
        psi0[0] = super::super::matrix::ONE;
        let psi = simulate_pure(&c, &psi0).unwrap();
        let rho = apply_circuit(&c, None, &DensityMatrix::zero_state(3)).unwrap();
        let from_psi = DensityMatrix::from_pure(3, &psi).unwrap();
        assert!(rho.matrix().max_abs_diff(from_psi.matrix()) < 1e-14);
    }
}
