//! Extrapolation error against noise strength for random drift evolutions.

use rayon::prelude::*;
use serde::Serialize;

use super::circuits::random_pauli_observable;
use super::config::{IntegratorKind, ModelKind, ZneConfig};
use crate::dynamics::{build_drift_schedule, evolve_with, noise_rate_from_depolarizing_strength, Integrator, NoiseGenerator};
use crate::error::Result;
use crate::quantum::{expectation_value, DensityMatrix, Observable};
use crate::rng::stream;
use crate::zne::{make_node_sequence, run_zne_protocol, Estimator};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fig1Row {
    pub instance: usize,
    pub model: ModelKind,
    pub epsilon: f64,
    pub lambda: f64,
    pub order: usize,
    pub estimate: f64,
    pub exact: f64,
    pub abs_error: f64,
}

/// Median of `abs_error` over instances for one (model, ε, order).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fig1Median {
    pub model: ModelKind,
    pub epsilon: f64,
    pub lambda: f64,
    pub order: usize,
    pub median_abs_error: f64,
    pub instances: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fig1Result {
    pub rows: Vec<Fig1Row>,
    pub medians: Vec<Fig1Median>,
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// For every instance, model, ε and order `n ≤ max_order`: `|E* − Ê^n|` with exact expectations.
///
/// Instance `i` draws its schedule and observable from stream `seed/1/i` and
/// the nodes of order `n` from `seed/2/i/n`, so the nodes are shared across ε and models.
pub fn run_fig1_experiment(cfg: &ZneConfig, seed: u64) -> Result<Fig1Result> {
    cfg.validate()?;
    let integrator = match cfg.integrator {
        IntegratorKind::Taylor => Integrator::exact(),
        IntegratorKind::Rk4 => Integrator::default(),
    };
    let grid = cfg.eps_grid();
    let rho0 = DensityMatrix::zero_state(cfg.n_qubits);
    let per_instance = (0..cfg.instances)
        .into_par_iter()
        .map(|i| -> Result<Vec<Fig1Row>> {
            let mut rng = stream(seed, &[1, i as u64]);
            let schedule = build_drift_schedule(&mut rng, cfg.n_qubits, cfg.steps, cfg.step_time, cfg.edge_probability)?;
            let a = Observable::Pauli(random_pauli_observable(&mut rng, cfg.n_qubits)?);
            let nodes = (0..=cfg.max_order)
                .map(|n| make_node_sequence(&cfg.nodes, n, cfg.min_separation, &mut stream(seed, &[2, i as u64, n as u64])))
                .collect::<Result<Vec<_>>>()?;
            let exact = expectation_value(&a, &evolve_with(&schedule, &NoiseGenerator::Depolarizing, 0.0, &rho0, &integrator)?)?;
            let mut rows = Vec::new();
            for &model in &cfg.models {
                let g = cfg.generator(model);
                for &eps in &grid {
                    let lambda = noise_rate_from_depolarizing_strength(eps)?;
                    for (order, seq) in nodes.iter().enumerate() {
                        let r = run_zne_protocol(&schedule, &g, lambda, &rho0, &a, seq, &Estimator::Exact, &integrator)?;
                        rows.push(Fig1Row {
                            instance: i,
                            model,
                            epsilon: eps,
                            lambda,
                            order,
                            estimate: r.extrapolated,
                            exact,
                            abs_error: (r.extrapolated - exact).abs(),
                        });
                    }
                }
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Fig1Row> = per_instance.into_iter().flatten().collect();
    let mut medians = Vec::new();
    for &model in &cfg.models {
        for &eps in &grid {
            for order in 0..=cfg.max_order {
                let errs: Vec<f64> = rows
                    .iter()
                    .filter(|r| r.model == model && r.epsilon == eps && r.order == order)
                    .map(|r| r.abs_error)
                    .collect();
                medians.push(Fig1Median {
                    model,
                    epsilon: eps,
                    lambda: noise_rate_from_depolarizing_strength(eps)?,
                    order,
                    median_abs_error: median(&errs),
                    instances: errs.len(),
                });
            }
        }
    }
    Ok(Fig1Result { rows, medians })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn medians_and_slopes() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        let xs = [1e-3, 2e-3, 5e-3];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 7.0 * x.powi(3)).collect();
        assert!((log_log_slope(&xs, &ys) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn small_run_has_expected_shape() {
        let cfg = ZneConfig {
            n_qubits: 2,
            steps: 2,
            step_time: 1.0,
            instances: 2,
            eps_points: 2,
            max_order: 1,
            models: vec![ModelKind::Depolarizing, ModelKind::CoherentBath],
            ..ZneConfig::default()
        };
        let res = run_fig1_experiment(&cfg, 5).unwrap();
        assert_eq!(res.rows.len(), 2 * 2 * 2 * 2);
        assert_eq!(res.medians.len(), 2 * 2 * 2);
        assert_eq!(res, run_fig1_experiment(&cfg, 5).unwrap());
    }
}
