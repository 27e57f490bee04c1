//! Closed-form optimal decompositions for the two noise models.

use super::basis::{Body, Target};
use super::gate_qpr::{GateQpr, QprTerm};
use crate::error::{QemError, Result};
use crate::quantum::{Gate, NoiseModel, PauliString, PrepState};

fn check_eps(eps: f64) -> Result<()> {
    if (0.0..1.0).contains(&eps) {
        Ok(())
    } else {
        Err(QemError::InvalidArgument(format!("noise strength {eps} outside [0, 1)")))
    }
}

fn check_gate(g: &Gate) -> Result<()> {
    match g {
        Gate::I | Gate::H | Gate::S | Gate::Sdg | Gate::T | Gate::Cnot => Ok(()),
        other => Err(QemError::UnknownGate(format!("no decomposition for {other}"))),
    }
}

/// `η_I = 1 + (4^k−1)ε/(4^k(1−ε))`, every other Pauli `−ε/(4^k(1−ε))`.
pub fn depolarizing_gate_qpr_analytic(g: &Gate, eps: f64) -> Result<GateQpr> {
    check_eps(eps)?;
    check_gate(g)?;
    let k = g.arity();
    let d2 = (1usize << (2 * k)) as f64;
    let off = -eps / (d2 * (1.0 - eps));
    let local: Vec<usize> = (0..k).collect();
    let terms = (0..1usize << (2 * k))
        .map(|i| {
            let p = PauliString::from_index(k, i);
            let mut body = vec![(g.clone(), local.clone())];
            let (label, eta) = if p.is_identity() {
                (format!("D I{} {g}", "I".repeat(k - 1)), 1.0 - (d2 - 1.0) * off)
            } else {
                body.push((Gate::Pauli(p.clone()), local.clone()));
                (format!("D {p} {g}"), off)
            };
            QprTerm { label, body, eta }
        })
        .collect();
    Ok(GateQpr { target: Target::Gate(g.clone()), k, noise: NoiseModel::Depolarizing { eps }, terms })
}

/// Per-Pauli insertion probability `|η|/γ`: `ε/(4+2ε)` for one qubit, `ε/(16+14ε)` for two.
pub fn depolarizing_insertion_probability(k: usize, eps: f64) -> f64 {
    match k {
        1 => eps / (4.0 + 2.0 * eps),
        _ => eps / (16.0 + 14.0 * eps),
    }
}

/// What the damping decomposition is asked to reproduce.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DampingTarget {
    SingleQubit(Gate),
    PlusPrep,
    /// `A𝒫_{|0⟩} = 𝒫_{|0⟩}`, so one term with `η = 1`.
    ZeroPrep,
}

/// Coefficients of `id = η_1 A + η_2 A𝒮 + η_3 A𝒮⁻¹ + η_4 𝒫_{|0⟩}`.
pub fn damping_inverse_coefficients(eps: f64) -> [f64; 4] {
    let s = (1.0 - eps).sqrt();
    let mid = (1.0 - s) / (2.0 * (1.0 - eps));
    [1.0 / s, mid, mid, -eps / (1.0 - eps)]
}

fn prep_body(s: PrepState) -> Body {
    vec![(Gate::Prep(s), vec![0])]
}

pub fn damping_gate_qpr_analytic(target: &DampingTarget, eps: f64) -> Result<GateQpr> {
    check_eps(eps)?;
    let noise = NoiseModel::AmplitudeDamping { eps };
    let (t, terms) = match target {
        DampingTarget::SingleQubit(g) => {
            check_gate(g)?;
            if *g == Gate::Cnot {
                return Err(QemError::InvalidArgument("CNOT is decomposed per arm by the circuit plan".into()));
            }
            let [e1, e2, e3, e4] = damping_inverse_coefficients(eps);
            let u = (g.clone(), vec![0]);
            let terms = vec![
                QprTerm { label: format!("A {g}"), body: vec![u.clone()], eta: e1 },
                QprTerm { label: format!("A S {g}"), body: vec![u.clone(), (Gate::S, vec![0])], eta: e2 },
                QprTerm { label: format!("A SDG {g}"), body: vec![u, (Gate::Sdg, vec![0])], eta: e3 },
                QprTerm { label: "A PREP 0".into(), body: prep_body(PrepState::Zero), eta: e4 },
            ];
            (Target::Gate(g.clone()), terms)
        }
        DampingTarget::PlusPrep => {
            let a = 1.0 / (1.0 - eps).sqrt();
            let b = (1.0 - 2.0 * eps) / (1.0 - eps);
            let terms = vec![
                QprTerm { label: "A PREP +".into(), body: prep_body(PrepState::Plus), eta: 0.5 * (a + b) },
                QprTerm { label: "A PREP -".into(), body: prep_body(PrepState::Minus), eta: 0.5 * (b - a) },
                QprTerm { label: "A PREP 1".into(), body: prep_body(PrepState::One), eta: eps / (1.0 - eps) },
            ];
            (Target::Prep(PrepState::Plus), terms)
        }
        DampingTarget::ZeroPrep => (
            Target::Prep(PrepState::Zero),
            vec![QprTerm { label: "A PREP 0".into(), body: prep_body(PrepState::Zero), eta: 1.0 }],
        ),
    };
    // ε = 0 leaves zero-weight terms that would never be sampled.
    let terms = terms.into_iter().filter(|t| t.eta != 0.0).collect();
    Ok(GateQpr { target: t, k: 1, noise, terms })
}

/// `(1+ε)/(1−ε)`.
pub fn damping_single_qubit_gamma(eps: f64) -> f64 {
    (1.0 + eps) / (1.0 - eps)
}

/// `1/√(1−ε) + ε/(1−ε)`.
pub fn damping_plus_prep_gamma(eps: f64) -> f64 {
    1.0 / (1.0 - eps).sqrt() + eps / (1.0 - eps)
}

/// `(1+ε/2)/(1−ε)` or `(1+7ε/8)/(1−ε)`.
pub fn depolarizing_gamma(k: usize, eps: f64) -> f64 {
    match k {
        1 => (1.0 + eps / 2.0) / (1.0 - eps),
        _ => (1.0 + 7.0 * eps / 8.0) / (1.0 - eps),
    }
}
