//! Quasi-probability representations of single operations and the L1 program that finds them.

use std::fmt::Write as _;

use super::basis::{noisy_op_ptm, BasisEntry, Body, NoisyBasis, Target};
use crate::error::{QemError, Result};
use crate::lp::min_l1_combination;
use crate::quantum::{NoiseModel, PauliTransferMatrix};

pub const RECONSTRUCTION_TOL: f64 = 1e-9;

/// Coefficients below this magnitude are dropped from LP solutions.
const ETA_CUTOFF: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq)]
pub struct QprTerm {
    pub label: String,
    /// Ideal operations preceding the device noise; local qubit indices.
    pub body: Body,
    pub eta: f64,
}

/// `target = Σ η_α O_α` with each `O_α = noise ∘ body_α`.
#[derive(Clone, Debug, PartialEq)]
pub struct GateQpr {
    pub target: Target,
    pub k: usize,
    pub noise: NoiseModel,
    pub terms: Vec<QprTerm>,
}

impl GateQpr {
    pub fn gamma(&self) -> f64 {
        self.terms.iter().map(|t| t.eta.abs()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let g = self.gamma();
        self.terms.iter().map(|t| t.eta.abs() / g).collect()
    }

    pub fn signs(&self) -> Vec<i8> {
        self.terms.iter().map(|t| if t.eta < 0.0 { -1 } else { 1 }).collect()
    }

    /// `Σ η_α PTM(O_α)`.
    pub fn reconstruct(&self) -> Result<PauliTransferMatrix> {
        let mut acc = PauliTransferMatrix::identity(self.k).scaled(0.0);
        for t in &self.terms {
            acc = acc.add(&noisy_op_ptm(&t.body, self.k, Some(&self.noise))?.scaled(t.eta))?;
        }
        Ok(acc)
    }

    /// Largest entrywise deviation of the reconstruction from the target.
    pub fn reconstruction_residual(&self) -> Result<f64> {
        Ok(self.reconstruct()?.max_abs_diff(&self.target.ptm()))
    }

    /// Structured text, one term per line, stable across runs.
    pub fn export(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "target {}", self.target);
        let _ = writeln!(out, "noise {}", noise_label(&self.noise));
        for ((t, p), s) in self.terms.iter().zip(self.probabilities()).zip(self.signs()) {
            let _ = writeln!(out, "term {:<24} eta {:+.15e} prob {:.15e} sign {:+}", t.label, t.eta, p, s);
        }
        let _ = writeln!(out, "gamma {:.15e}", self.gamma());
        out
    }
}

pub fn noise_label(n: &NoiseModel) -> String {
    match n {
        NoiseModel::Depolarizing { eps } => format!("depolarizing {eps}"),
        NoiseModel::AmplitudeDamping { eps } => format!("damping {eps}"),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpQpr {
    Feasible { eta: Vec<f64>, gamma: f64 },
    /// No real combination of the candidates equals the target.
    Infeasible,
}

/// Minimises `Σ|η_α|` subject to `Σ η_α R_α = R_target` entrywise.
pub fn solve_qpr_lp(target: &PauliTransferMatrix, candidates: &[PauliTransferMatrix]) -> Result<LpQpr> {
    if let Some(c) = candidates.iter().find(|c| c.dim() != target.dim()) {
        return Err(QemError::DimensionMismatch { expected: target.dim(), found: c.dim() });
    }
    let flat = |m: &PauliTransferMatrix| m.entries().iter().copied().collect::<Vec<f64>>();
    let columns: Vec<Vec<f64>> = candidates.iter().map(flat).collect();
    match min_l1_combination(&columns, &flat(target))? {
        None => Ok(LpQpr::Infeasible),
        Some(eta) => {
            let mut acc = target.scaled(0.0);
            for (c, &e) in candidates.iter().zip(&eta) {
                acc = acc.add(&c.scaled(e))?;
            }
            let resid = acc.max_abs_diff(target);
            if resid > RECONSTRUCTION_TOL {
                return Err(QemError::IllConditioned(format!("LP solution misses the target by {resid:.3e}")));
            }
            let gamma = eta.iter().map(|e| e.abs()).sum();
            Ok(LpQpr::Feasible { eta, gamma })
        }
    }
}

/// LP decomposition of `target` over the given basis entries, or `None` if infeasible.
pub fn lp_gate_qpr(target: &Target, basis: &NoisyBasis, entries: &[&BasisEntry]) -> Result<Option<GateQpr>> {
    let k = target.arity();
    if let Some(e) = entries.iter().find(|e| e.k != k) {
        return Err(QemError::DimensionMismatch { expected: k, found: e.k });
    }
    let ptms = entries.iter().map(|e| basis.ptm(e)).collect::<Result<Vec<_>>>()?;
    match solve_qpr_lp(&target.ptm(), &ptms)? {
        LpQpr::Infeasible => Ok(None),
        LpQpr::Feasible { eta, .. } => {
            let terms = entries
                .iter()
                .zip(eta)
                .filter(|(_, e)| e.abs() > ETA_CUTOFF)
                .map(|(b, eta)| QprTerm { label: b.label.clone(), body: b.body.clone(), eta })
                .collect();
            Ok(Some(GateQpr { target: target.clone(), k, noise: basis.noise, terms }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qpr::basis::build_depolarizing_basis;
    use crate::quantum::Gate;

    #[test]
    fn noiseless_target_in_set_is_one_hot() {
        let basis = build_depolarizing_basis(0.0).unwrap();
        let cands = basis.candidates(&Gate::S, false);
        let q = lp_gate_qpr(&Target::Gate(Gate::S), &basis, &cands).unwrap().unwrap();
        assert_eq!(q.terms.len(), 1);
        assert!((q.gamma() - 1.0).abs() < 1e-12);
        assert_eq!(q.terms[0].label, "D I S");
    }

    #[test]
    fn mismatched_dimensions_are_rejected() {
        let a = PauliTransferMatrix::identity(1);
        assert!(solve_qpr_lp(&a, &[PauliTransferMatrix::identity(2)]).is_err());
    }

    #[test]
    fn export_lists_every_term() {
        let basis = build_depolarizing_basis(0.01).unwrap();
        let q = lp_gate_qpr(&Target::Gate(Gate::H), &basis, &basis.candidates(&Gate::H, false)).unwrap().unwrap();
        let text = q.export();
        assert!(text.starts_with("target H\nnoise depolarizing 0.01\n"));
        assert_eq!(text.lines().filter(|l| l.starts_with("term ")).count(), 4);
        assert!(text.lines().last().unwrap().starts_with("gamma "));
    }
}
