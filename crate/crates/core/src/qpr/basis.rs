//! Noise channels and the bases of implementable noisy operations.

use std::fmt;

use crate::error::{QemError, Result};
use crate::quantum::circuit::amplitude_damping_kraus;
use crate::quantum::state::apply_unitary_vec;
use crate::quantum::{ptm_from_kraus, CMatrix, Gate, KrausChannel, NoiseModel, Pauli, PauliString, PauliTransferMatrix, PrepState, C64};

/// Ideal operations in order; local qubit lists index the operation's support.
pub type Body = Vec<(Gate, Vec<usize>)>;

fn check_eps(eps: f64) -> Result<()> {
    if (0.0..1.0).contains(&eps) {
        Ok(())
    } else {
        Err(QemError::InvalidArgument(format!("noise strength {eps} outside [0, 1)")))
    }
}

/// `D_k(ρ) = (1−ε)ρ + ε Tr(ρ) I/2^k` as a Pauli mixture.
pub fn depolarizing_channel(k: usize, eps: f64) -> Result<KrausChannel> {
    if !(1..=2).contains(&k) {
        return Err(QemError::InvalidArgument(format!("depolarizing channel on {k} qubits")));
    }
    check_eps(eps)?;
    let d2 = 1usize << (2 * k);
    let rest = eps / d2 as f64;
    let ops = (0..d2)
        .map(|i| {
            let w = if i == 0 { 1.0 - eps + rest } else { rest };
            crate::quantum::pauli_matrix(&PauliString::from_index(k, i)).scale_real(w.sqrt())
        })
        .collect();
    KrausChannel::new(ops)
}

pub fn amplitude_damping_channel(eps: f64) -> Result<KrausChannel> {
    check_eps(eps)?;
    Ok(amplitude_damping_kraus(eps))
}

/// The device noise acting after an operation on `k` qubits.
pub fn noise_channel(noise: &NoiseModel, k: usize) -> Result<KrausChannel> {
    match *noise {
        NoiseModel::Depolarizing { eps } => depolarizing_channel(k, eps),
        NoiseModel::AmplitudeDamping { eps } => {
            let a = amplitude_damping_channel(eps)?;
            Ok((1..k).fold(a.clone(), |acc, _| acc.tensor(&a)))
        }
    }
}

/// Embeds a `2^m × 2^m` operator acting on `local` into `k` qubits.
fn embed(op: &CMatrix, k: usize, local: &[usize]) -> CMatrix {
    let dim = 1usize << k;
    let mut out = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut v = vec![C64::new(0.0, 0.0); dim];
        v[col] = C64::new(1.0, 0.0);
        apply_unitary_vec(&mut v, k, op, local);
        for (row, a) in v.into_iter().enumerate() {
            out[(row, col)] = a;
        }
    }
    out
}

/// Channel of an ideal body on `k` qubits.
pub fn body_channel(body: &[(Gate, Vec<usize>)], k: usize) -> KrausChannel {
    let mut ch = KrausChannel::identity(k);
    for (g, local) in body {
        let ops: Vec<CMatrix> = g.channel().ops().iter().map(|m| embed(m, k, local)).collect();
        let step = KrausChannel::new(ops).expect("embedded channel is trace preserving");
        ch = step.compose(&ch);
    }
    ch
}

/// PTM of `noise ∘ body`.
pub fn noisy_op_ptm(body: &[(Gate, Vec<usize>)], k: usize, noise: Option<&NoiseModel>) -> Result<PauliTransferMatrix> {
    let ideal = body_channel(body, k);
    let ch = match noise {
        Some(n) => noise_channel(n, k)?.compose(&ideal),
        None => ideal,
    };
    Ok(ptm_from_kraus(&ch))
}

/// Ideal target of a decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Target {
    Gate(Gate),
    Prep(PrepState),
}

impl Target {
    pub fn arity(&self) -> usize {
        match self {
            Target::Gate(g) => g.arity(),
            Target::Prep(_) => 1,
        }
    }

    pub fn ptm(&self) -> PauliTransferMatrix {
        match self {
            Target::Gate(g) => ptm_from_kraus(&g.channel()),
            Target::Prep(s) => ptm_from_kraus(&s.channel()),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Gate(g) => write!(f, "{g}"),
            Target::Prep(s) => write!(f, "PREP {}", s.symbol()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasisEntry {
    pub label: String,
    /// Ideal gate this entry is built around; `None` for shared preparations.
    pub family: Option<Gate>,
    pub k: usize,
    pub body: Body,
}

/// A set `Ω` of implementable noisy operations under one noise model.
#[derive(Clone, Debug, PartialEq)]
pub struct NoisyBasis {
    pub noise: NoiseModel,
    pub entries: Vec<BasisEntry>,
}

impl NoisyBasis {
    pub fn ptm(&self, e: &BasisEntry) -> Result<PauliTransferMatrix> {
        noisy_op_ptm(&e.body, e.k, Some(&self.noise))
    }

    /// Entries built around `g` plus, when `with_preps`, the shared preparations.
    pub fn candidates(&self, g: &Gate, with_preps: bool) -> Vec<&BasisEntry> {
        self.entries
            .iter()
            .filter(|e| e.family.as_ref() == Some(g) || (with_preps && e.family.is_none() && e.k == g.arity()))
            .collect()
    }

    pub fn preparations(&self) -> Vec<&BasisEntry> {
        self.entries.iter().filter(|e| e.family.is_none()).collect()
    }
}

/// Single-qubit ideal gates the bases are built for.
pub const BASIS_GATES: [Gate; 5] = [Gate::I, Gate::H, Gate::S, Gate::Sdg, Gate::T];

fn pauli_letter(p: Pauli) -> Gate {
    Gate::Pauli(PauliString::single(1, 0, p))
}

/// `D_k 𝒫 𝒰` for every Pauli `𝒫` and every gate `U`.
pub fn build_depolarizing_basis(eps: f64) -> Result<NoisyBasis> {
    check_eps(eps)?;
    let mut entries = Vec::new();
    for g in BASIS_GATES {
        for p in Pauli::ALL {
            let mut body = vec![(g.clone(), vec![0])];
            if p != Pauli::I {
                body.push((pauli_letter(p), vec![0]));
            }
            entries.push(BasisEntry { label: format!("D {} {g}", p.as_char()), family: Some(g.clone()), k: 1, body });
        }
    }
    for i in 0..16 {
        let p = PauliString::from_index(2, i);
        let mut body = vec![(Gate::Cnot, vec![0, 1])];
        if !p.is_identity() {
            body.push((Gate::Pauli(p.clone()), vec![0, 1]));
        }
        entries.push(BasisEntry { label: format!("D {p} CNOT"), family: Some(Gate::Cnot), k: 2, body });
    }
    Ok(NoisyBasis { noise: NoiseModel::Depolarizing { eps }, entries })
}

fn s_power(y: i8) -> Option<Gate> {
    match y {
        1 => Some(Gate::S),
        -1 => Some(Gate::Sdg),
        _ => None,
    }
}

fn s_label(y: i8) -> &'static str {
    match y {
        1 => "S ",
        -1 => "SDG ",
        _ => "",
    }
}

/// `A𝒰`, `A𝒮^{±1}𝒰` per gate, the nine `A_cA_t 𝒮_c^y 𝒮_t^z CNOT`, and the four noisy preparations.
pub fn build_damping_basis(eps: f64) -> Result<NoisyBasis> {
    check_eps(eps)?;
    let mut entries = Vec::new();
    for g in BASIS_GATES {
        for y in [0i8, 1, -1] {
            let mut body = vec![(g.clone(), vec![0])];
            body.extend(s_power(y).map(|s| (s, vec![0])));
            entries.push(BasisEntry { label: format!("A {}{g}", s_label(y)), family: Some(g.clone()), k: 1, body });
        }
    }
    for y in [0i8, 1, -1] {
        for z in [0i8, 1, -1] {
            let mut body = vec![(Gate::Cnot, vec![0, 1])];
            body.extend(s_power(y).map(|s| (s, vec![0])));
            body.extend(s_power(z).map(|s| (s, vec![1])));
            entries.push(BasisEntry {
                label: format!("A A {}{}CNOT", cnot_s_label(y, 'c'), cnot_s_label(z, 't')),
                family: Some(Gate::Cnot),
                k: 2,
                body,
            });
        }
    }
    for s in PrepState::ALL {
        entries.push(BasisEntry { label: format!("A PREP {}", s.symbol()), family: None, k: 1, body: vec![(Gate::Prep(s), vec![0])] });
    }
    Ok(NoisyBasis { noise: NoiseModel::AmplitudeDamping { eps }, entries })
}

fn cnot_s_label(y: i8, which: char) -> String {
    match y {
        0 => String::new(),
        1 => format!("S_{which} "),
        _ => format!("SDG_{which} "),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::DensityMatrix;

    #[test]
    fn depolarizing_ptms_are_diagonal() {
        let eps = 0.07;
        let d1 = ptm_from_kraus(&depolarizing_channel(1, eps).unwrap());
        let want1 = PauliTransferMatrix::diagonal(1, &[1.0, 1.0 - eps, 1.0 - eps, 1.0 - eps]).unwrap();
        assert!(d1.max_abs_diff(&want1) < 1e-14);
        let d2 = ptm_from_kraus(&depolarizing_channel(2, eps).unwrap());
        let mut diag = vec![1.0 - eps; 16];
        diag[0] = 1.0;
        assert!(d2.max_abs_diff(&PauliTransferMatrix::diagonal(2, &diag).unwrap()) < 1e-14);
        let id = ptm_from_kraus(&depolarizing_channel(2, 0.0).unwrap());
        assert!(id.max_abs_diff(&PauliTransferMatrix::identity(2)) < 1e-15);
        assert!(depolarizing_channel(3, 0.1).is_err());
        assert!(depolarizing_channel(1, 1.0).is_err());
    }

    #[test]
    fn damping_relaxes_one() {
        let eps = 0.2;
        let a = amplitude_damping_channel(eps).unwrap();
        let out = a.apply(DensityMatrix::basis_state(1, 1).matrix());
        assert!((out[(1, 1)].re - (1.0 - eps)).abs() < 1e-15);
        assert!((out[(0, 0)].re - eps).abs() < 1e-15);
        let mixed = a.apply(DensityMatrix::maximally_mixed(1).matrix());
        assert!((mixed[(0, 0)].re - 0.5).abs() > 0.05);
        let id = ptm_from_kraus(&amplitude_damping_channel(0.0).unwrap());
        assert!(id.max_abs_diff(&PauliTransferMatrix::identity(1)) < 1e-15);
    }

    #[test]
    fn basis_sizes_and_trace_preservation() {
        let dep = build_depolarizing_basis(0.01).unwrap();
        assert_eq!(dep.candidates(&Gate::H, false).len(), 4);
        assert_eq!(dep.candidates(&Gate::Cnot, false).len(), 16);
        let damp = build_damping_basis(0.01).unwrap();
        assert_eq!(damp.candidates(&Gate::Cnot, false).len(), 9);
        assert_eq!(damp.preparations().len(), 4);
        assert_eq!(damp.candidates(&Gate::T, true).len(), 7);
        for b in [&dep, &damp] {
            for e in &b.entries {
                assert!(b.ptm(e).unwrap().is_trace_preserving(1e-12), "{}", e.label);
            }
        }
    }

    #[test]
    fn noisy_zero_preparation_is_ideal() {
        let damp = build_damping_basis(0.3).unwrap();
        let e = damp.entries.iter().find(|e| e.label == "A PREP 0").unwrap();
        let ideal = Target::Prep(PrepState::Zero).ptm();
        assert!(damp.ptm(e).unwrap().max_abs_diff(&ideal) < 1e-15);
    }

    #[test]
    fn noiseless_bases_are_ideal_gates() {
        let dep = build_depolarizing_basis(0.0).unwrap();
        let e = &dep.candidates(&Gate::H, false)[0];
        assert!(dep.ptm(e).unwrap().max_abs_diff(&Target::Gate(Gate::H).ptm()) < 1e-14);
        let damp = build_damping_basis(0.0).unwrap();
        let e = &damp.candidates(&Gate::Cnot, false)[0];
        assert!(damp.ptm(e).unwrap().max_abs_diff(&Target::Gate(Gate::Cnot).ptm()) < 1e-14);
    }

    #[test]
    fn swapped_cnot_body_differs() {
        let a = noisy_op_ptm(&[(Gate::Cnot, vec![0, 1])], 2, None).unwrap();
        let b = noisy_op_ptm(&[(Gate::Cnot, vec![1, 0])], 2, None).unwrap();
        assert!(a.max_abs_diff(&b) > 0.5);
    }
}
