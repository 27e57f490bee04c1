//! Richardson coefficients and the extrapolated estimator.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::nodes::NodeSequence;
use crate::error::{QemError, Result};

/// Residual above which the Vandermonde solve is reported as ill-conditioned.
pub const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RichardsonPlan {
    pub nodes: NodeSequence,
    /// Leading part of `γ_j`.
    pub gamma: Vec<f64>,
    /// Trailing part: `γ_j = gamma[j] + gamma_lo[j]` to roughly twice `f64` precision.
    /// Node sets in `[1, 4]` give terms `γ_j c_j^n` near `10^5`, whose spacing in
    /// `f64` alone exceeds the moment tolerance.
    #[serde(default)]
    pub gamma_lo: Vec<f64>,
    /// `Γ_n = Σ|γ_j| c_j^{n+1}`.
    pub stability: f64,
}

impl RichardsonPlan {
    pub fn order(&self) -> usize {
        self.nodes.order()
    }

    fn coefficients(&self) -> Vec<Dd> {
        self.gamma
            .iter()
            .enumerate()
            .map(|(j, &hi)| Dd::new(hi, self.gamma_lo.get(j).copied().unwrap_or(0.0)))
            .collect()
    }

    /// Largest violation of `Σγ_j c_j^k = δ_{k0}` for `k = 0..n`.
    pub fn residual(&self) -> f64 {
        moment_errors(&self.nodes.c, &self.coefficients()).iter().fold(0.0, |m, e| m.max(e.abs()))
    }
}

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Clone, Copy, Debug)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

impl Dd {
    fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        Dd { hi, lo }
    }

    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        Dd::new(s, e + self.lo + o.lo)
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        Dd::new(p, e + self.hi * o.lo + self.lo * o.hi)
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

fn vandermonde(c: &[f64]) -> DMatrix<f64> {
    let m = c.len();
    DMatrix::from_fn(m, m, |k, j| c[j].powi(k as i32))
}

/// `Σγ_j c_j^k − δ_{k0}` for each `k`, evaluated in double-double.
fn moment_errors(c: &[f64], gamma: &[Dd]) -> Vec<f64> {
    let mut powers: Vec<Dd> = c.iter().map(|_| Dd::from(1.0)).collect();
    (0..c.len())
        .map(|k| {
            let mut s = Dd::from(if k == 0 { -1.0 } else { 0.0 });
            for (j, g) in gamma.iter().enumerate() {
                s = s.add(g.mul(powers[j]));
                powers[j] = powers[j].mul(Dd::from(c[j]));
            }
            s.value()
        })
        .collect()
}

/// Solves `Σγ_j = 1`, `Σγ_j c_j^k = 0` (`k = 1..n`) starting from the Lagrange
/// weights at zero, `γ_j = Π_{i≠j} c_i / (c_i − c_j)`, with iterative
/// refinement against a double-double residual.
pub fn richardson_coefficients(nodes: &NodeSequence) -> Result<RichardsonPlan> {
    let c = &nodes.c;
    let m = c.len();
    let ill = || QemError::IllConditioned(format!("Vandermonde system for nodes {c:?} is singular"));
    let mut gamma: Vec<Dd> = (0..m)
        .map(|j| Dd::from((0..m).filter(|&i| i != j).map(|i| c[i] / (c[i] - c[j])).product()))
        .collect();
    if gamma.iter().any(|g| !g.hi.is_finite()) {
        return Err(ill());
    }
    let lu = vandermonde(c).lu();
    for _ in 0..3 {
        let r = DVector::from_iterator(m, moment_errors(c, &gamma).into_iter().map(|e| -e));
        let d = lu.solve(&r).ok_or_else(ill)?;
        for (g, dg) in gamma.iter_mut().zip(d.iter()) {
            *g = g.add(Dd::from(*dg));
        }
    }
    if gamma.iter().any(|g| !g.hi.is_finite() || !g.lo.is_finite()) {
        return Err(ill());
    }
    let residual = moment_errors(c, &gamma).iter().fold(0.0f64, |m, e| m.max(e.abs()));
    if residual > RESIDUAL_TOL {
        return Err(QemError::IllConditioned(format!("Richardson residual {residual:.2e} for nodes {c:?}")));
    }
    let n = m - 1;
    let stability = gamma.iter().zip(c).map(|(g, cj)| g.hi.abs() * cj.powi(n as i32 + 1)).sum();
    Ok(RichardsonPlan {
        nodes: nodes.clone(),
        gamma: gamma.iter().map(|g| g.hi).collect(),
        gamma_lo: gamma.iter().map(|g| g.lo).collect(),
        stability,
    })
}

/// `Σ γ_j Ê_j`.
pub fn extrapolate(plan: &RichardsonPlan, estimates: &[f64]) -> Result<f64> {
    if estimates.len() != plan.gamma.len() {
        return Err(QemError::DimensionMismatch { expected: plan.gamma.len(), found: estimates.len() });
    }
    let sum = plan.coefficients().iter().zip(estimates).fold(Dd::from(0.0), |acc, (g, &e)| acc.add(g.mul(Dd::from(e))));
    Ok(sum.value())
}

/// `Γ_n (δ* + ‖A‖ l_{n+1} (λT)^{n+1} / (n+1)!)`.
pub fn remainder_and_error_bound(
    plan: &RichardsonPlan,
    lambda: f64,
    total_time: f64,
    a_norm: f64,
    l_next: f64,
    delta_star: f64,
) -> f64 {
    let n1 = plan.order() as i32 + 1;
    let factorial: f64 = (1..=n1).map(f64::from).product();
    plan.stability * (delta_star + a_norm * l_next * (lambda * total_time).powi(n1) / factorial)
}
