//! Product decompositions of whole circuits.
//!
//! A circuit QPR is a list of independent units. Each unit owns one or more
//! slots of the ideal circuit and enumerates its outcomes: a coefficient and
//! the noisy operations placed into those slots. Depolarizing circuits get one
//! unit per gate. Under amplitude damping a CNOT is decomposed arm by arm, and
//! an arm that resolves to `𝒫_{|0⟩}` is merged into the next gate on that
//! qubit, so a CNOT unit also owns the slots of its followers.

use std::collections::HashMap;

use super::analytic::{damping_gate_qpr_analytic, damping_inverse_coefficients, depolarizing_gate_qpr_analytic, DampingTarget};
use super::gate_qpr::GateQpr;
use crate::error::{QemError, Result};
use crate::quantum::{Circuit, Gate, NoiseModel, NoisyCircuit, PlacedGate, PlacedOp, PrepState};

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub eta: f64,
    /// `(layer, op)` pairs filling the unit's slots.
    pub slots: Vec<(usize, PlacedOp)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QprUnit {
    pub outcomes: Vec<Outcome>,
}

impl QprUnit {
    pub fn gamma(&self) -> f64 {
        self.outcomes.iter().map(|o| o.eta.abs()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let g = self.gamma();
        self.outcomes.iter().map(|o| o.eta.abs() / g).collect()
    }

    /// Index of the most likely outcome (first on ties).
    pub fn mode(&self) -> usize {
        let mut best = 0;
        for (i, o) in self.outcomes.iter().enumerate() {
            if o.eta.abs() > self.outcomes[best].eta.abs() {
                best = i;
            }
        }
        best
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircuitQpr {
    pub n_qubits: usize,
    pub depth: usize,
    pub noise: NoiseModel,
    pub units: Vec<QprUnit>,
    /// Single-qubit and two-qubit gate counts of the ideal circuit.
    pub gate_counts: (usize, usize),
}

impl CircuitQpr {
    /// `γ_β`, the product of unit overheads.
    pub fn gamma(&self) -> f64 {
        self.units.iter().map(QprUnit::gamma).product()
    }

    /// Number of distinct outcome combinations, saturating.
    pub fn branch_count(&self) -> u128 {
        self.units.iter().fold(1u128, |acc, u| acc.saturating_mul(u.outcomes.len() as u128))
    }

    /// Assembles the noisy circuit for one outcome per unit, with its sign.
    pub fn circuit_for(&self, choice: &[usize]) -> Result<(NoisyCircuit, i8)> {
        if choice.len() != self.units.len() {
            return Err(QemError::DimensionMismatch { expected: self.units.len(), found: choice.len() });
        }
        let mut layers: Vec<Vec<PlacedOp>> = vec![Vec::new(); self.depth];
        let mut sign = 1i8;
        for (u, &c) in self.units.iter().zip(choice) {
            let o = u.outcomes.get(c).ok_or_else(|| QemError::InvalidArgument(format!("outcome {c} out of range")))?;
            if o.eta < 0.0 {
                sign = -sign;
            }
            for (l, op) in &o.slots {
                layers[*l].push(op.clone());
            }
        }
        for layer in &mut layers {
            layer.sort_by(|a, b| a.qubits.cmp(&b.qubits));
        }
        Ok((NoisyCircuit { n_qubits: self.n_qubits, layers }, sign))
    }

    /// Most likely outcome of every unit.
    pub fn mode_choice(&self) -> Vec<usize> {
        self.units.iter().map(QprUnit::mode).collect()
    }
}

fn unit_from_gate(q: &GateQpr, layer: usize, qubits: &[usize]) -> QprUnit {
    let outcomes = q
        .terms
        .iter()
        .filter(|t| t.eta != 0.0)
        .map(|t| Outcome { eta: t.eta, slots: vec![(layer, PlacedOp { qubits: qubits.to_vec(), body: t.body.clone() })] })
        .collect();
    QprUnit { outcomes }
}

/// Product QPR of `circuit` under `noise`, from the closed-form gate decompositions.
pub fn compose_circuit_qpr(circuit: &Circuit, noise: &NoiseModel) -> Result<CircuitQpr> {
    let units = match *noise {
        NoiseModel::Depolarizing { eps } => {
            let mut cache: HashMap<Gate, GateQpr> = HashMap::new();
            let mut units = Vec::new();
            for (l, g) in circuit.gates() {
                if !cache.contains_key(&g.gate) {
                    cache.insert(g.gate.clone(), depolarizing_gate_qpr_analytic(&g.gate, eps)?);
                }
                units.push(unit_from_gate(&cache[&g.gate], l, &g.qubits));
            }
            units
        }
        NoiseModel::AmplitudeDamping { eps } => damping_units(circuit, eps)?,
    };
    Ok(CircuitQpr {
        n_qubits: circuit.n_qubits(),
        depth: circuit.depth(),
        noise: *noise,
        units,
        gate_counts: circuit.gate_counts(),
    })
}

/// One option for a CNOT arm: the `𝒮^y` appended in the CNOT slot, or a reset.
enum Arm {
    Phase(i8),
    Reset,
}

fn damping_units(circuit: &Circuit, eps: f64) -> Result<Vec<QprUnit>> {
    let gates: Vec<(usize, &PlacedGate)> = circuit.gates().collect();
    // next[i][k]: position of the next gate on the k-th qubit of gate i.
    let mut last: HashMap<usize, (usize, usize)> = HashMap::new();
    let mut next: Vec<Vec<Option<usize>>> = gates.iter().map(|(_, g)| vec![None; g.qubits.len()]).collect();
    for (i, (_, g)) in gates.iter().enumerate() {
        for (k, &q) in g.qubits.iter().enumerate() {
            if let Some((p, pk)) = last.insert(q, (i, k)) {
                next[p][pk] = Some(i);
            }
        }
    }

    let mut single: HashMap<Gate, GateQpr> = HashMap::new();
    let mut qpr_for = |g: &Gate| -> Result<GateQpr> {
        if let Some(q) = single.get(g) {
            return Ok(q.clone());
        }
        let q = damping_gate_qpr_analytic(&DampingTarget::SingleQubit(g.clone()), eps)?;
        single.insert(g.clone(), q.clone());
        Ok(q)
    };
    let zero = damping_gate_qpr_analytic(&DampingTarget::ZeroPrep, eps)?;
    let plus = damping_gate_qpr_analytic(&DampingTarget::PlusPrep, eps)?;
    let inv = damping_inverse_coefficients(eps);
    let arms: Vec<(Arm, f64)> = [(Arm::Phase(0), inv[0]), (Arm::Phase(1), inv[1]), (Arm::Phase(-1), inv[2]), (Arm::Reset, inv[3])]
        .into_iter()
        .filter(|(_, e)| *e != 0.0)
        .collect();

    let mut absorbed = vec![false; gates.len()];
    let mut units = Vec::new();
    for (i, &(layer, g)) in gates.iter().enumerate() {
        if absorbed[i] {
            continue;
        }
        if g.gate != Gate::Cnot {
            units.push(unit_from_gate(&qpr_for(&g.gate)?, layer, &g.qubits));
            continue;
        }
        // Per arm: (arm, η, follower outcomes as (η, slot)).
        let mut per_arm: Vec<Vec<(&Arm, f64, Vec<(f64, Option<(usize, PlacedOp)>)>)>> = Vec::new();
        for (k, &q) in g.qubits.iter().enumerate() {
            let follower = match next[i][k] {
                None => None,
                Some(f) => {
                    let (fl, fg) = gates[f];
                    if fg.gate.arity() != 1 {
                        return Err(QemError::CircuitShape(format!(
                            "CNOT in layer {layer} on qubit {q} is followed by {} in layer {fl}",
                            fg.gate
                        )));
                    }
                    absorbed[f] = true;
                    Some((fl, fg))
                }
            };
            let mut options = Vec::new();
            for (arm, eta) in &arms {
                let outs = match (arm, follower) {
                    (_, None) => vec![(1.0, None)],
                    (Arm::Phase(_), Some((fl, fg))) => qpr_outcomes(&qpr_for(&fg.gate)?, fl, q),
                    (Arm::Reset, Some((fl, fg))) => {
                        let merged = if fg.gate.fixes_zero() {
                            &zero
                        } else if fg.gate == Gate::H {
                            &plus
                        } else {
                            return Err(QemError::CircuitShape(format!(
                                "cannot absorb a reset into {} in layer {fl}",
                                fg.gate
                            )));
                        };
                        qpr_outcomes(merged, fl, q)
                    }
                };
                options.push((arm, *eta, outs));
            }
            per_arm.push(options);
        }
        let mut outcomes = Vec::new();
        for (ac, ec, fc) in &per_arm[0] {
            for (at, et, ft) in &per_arm[1] {
                let mut body = vec![(Gate::Cnot, vec![0, 1])];
                for (local, arm) in [(0usize, ac), (1, at)] {
                    match arm {
                        Arm::Phase(1) => body.push((Gate::S, vec![local])),
                        Arm::Phase(-1) => body.push((Gate::Sdg, vec![local])),
                        Arm::Reset if next[i][local].is_none() => body.push((Gate::Prep(PrepState::Zero), vec![local])),
                        _ => {}
                    }
                }
                let cnot_slot = (layer, PlacedOp { qubits: g.qubits.clone(), body });
                for (eta_c, slot_c) in fc {
                    for (eta_t, slot_t) in ft {
                        let mut slots = vec![cnot_slot.clone()];
                        slots.extend(slot_c.iter().cloned());
                        slots.extend(slot_t.iter().cloned());
                        outcomes.push(Outcome { eta: ec * et * eta_c * eta_t, slots });
                    }
                }
            }
        }
        units.push(QprUnit { outcomes });
    }
    Ok(units)
}

fn qpr_outcomes(q: &GateQpr, layer: usize, qubit: usize) -> Vec<(f64, Option<(usize, PlacedOp)>)> {
    q.terms
        .iter()
        .filter(|t| t.eta != 0.0)
        .map(|t| (t.eta, Some((layer, PlacedOp { qubits: vec![qubit], body: t.body.clone() }))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::state::plus_state;
    use crate::quantum::{DensityMatrix, PlacedGate};

    fn circuit(n: usize, text: &str) -> Circuit {
        format!("qubits {n}\n{text}").parse().unwrap()
    }

    /// `Σ_choices Π η · noisy output`, compared with the ideal output.
    fn signed_mixture(plan: &CircuitQpr, rho0: &DensityMatrix) -> DensityMatrix {
        let mut choice = vec![0usize; plan.units.len()];
        let dim = rho0.dim();
        let mut acc = crate::quantum::CMatrix::zeros(dim, dim);
        loop {
            let eta: f64 = plan.units.iter().zip(&choice).map(|(u, &c)| u.outcomes[c].eta).product();
            let (nc, _) = plan.circuit_for(&choice).unwrap();
            let out = nc.apply(Some(&plan.noise), rho0).unwrap();
            acc.axpy(crate::quantum::C64::new(eta, 0.0), out.matrix());
            let mut u = 0;
            loop {
                if u == choice.len() {
                    return DensityMatrix::from_matrix_unchecked(rho0.n_qubits(), acc).unwrap();
                }
                choice[u] += 1;
                if choice[u] < plan.units[u].outcomes.len() {
                    break;
                }
                choice[u] = 0;
                u += 1;
            }
        }
    }

    #[test]
    fn damping_cnot_block_reconstructs_ideal_output() {
        for text in ["CNOT 0 1\nH 0 | T 1", "CNOT 1 0\nS 0 | H 1", "CNOT 0 1", "H 0 | I 1\nCNOT 0 1\nH 0"] {
            let c = circuit(2, text);
            let plan = compose_circuit_qpr(&c, &NoiseModel::AmplitudeDamping { eps: 0.1 }).unwrap();
            for rho0 in [plus_state(2), DensityMatrix::basis_state(2, 3)] {
                let ideal = c.clone();
                let want = crate::quantum::apply_circuit(&ideal, None, &rho0).unwrap();
                let got = signed_mixture(&plan, &rho0);
                assert!(got.matrix().max_abs_diff(want.matrix()) < 1e-12, "{text}");
            }
            for choice in [plan.mode_choice(), vec![0; plan.units.len()]] {
                assert_eq!(plan.circuit_for(&choice).unwrap().0.depth(), c.depth());
            }
        }
    }

    #[test]
    fn damping_rejects_cnot_followed_by_cnot() {
        let c = circuit(2, "CNOT 0 1\nCNOT 1 0");
        let err = compose_circuit_qpr(&c, &NoiseModel::AmplitudeDamping { eps: 0.01 }).unwrap_err();
        assert!(matches!(err, QemError::CircuitShape(_)));
        assert!(compose_circuit_qpr(&c, &NoiseModel::Depolarizing { eps: 0.01 }).is_ok());
    }

    #[test]
    fn disjoint_gammas_multiply() {
        let c = Circuit::new(3, vec![vec![PlacedGate::new(Gate::H, vec![0]), PlacedGate::new(Gate::Cnot, vec![1, 2])]]).unwrap();
        let plan = compose_circuit_qpr(&c, &NoiseModel::Depolarizing { eps: 0.02 }).unwrap();
        let want = super::super::analytic::depolarizing_gamma(1, 0.02) * super::super::analytic::depolarizing_gamma(2, 0.02);
        assert!((plan.gamma() - want).abs() < 1e-12);
        assert_eq!(plan.branch_count(), 64);
    }
}
