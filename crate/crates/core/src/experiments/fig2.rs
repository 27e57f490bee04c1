//! Error cancellation on random Clifford+T circuits.

use rayon::prelude::*;
use serde::Serialize;

use super::circuits::{gen_clifford_t_circuit, median_projector};
use super::config::{EstimatorKind, InitialState, PecConfig};
use super::fig1::median;
use crate::error::Result;
use crate::pec::{run_pec, run_pec_grouped, run_unmitigated, GroupedOptions};
use crate::qpr::compose_circuit_qpr;
use crate::quantum::circuit::simulate_pure;
use crate::quantum::state::plus_state;
use crate::quantum::{DensityMatrix, C64};
use crate::rng::{stream, StreamKey};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PecCsvRow {
    pub circuit_id: usize,
    pub mitigated: f64,
    pub unmitigated: f64,
    pub exact: f64,
    pub delta: f64,
    pub delta0: f64,
    pub gamma: f64,
    #[serde(rename = "M")]
    pub m: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fig2Result {
    pub rows: Vec<PecCsvRow>,
    pub median_delta: f64,
    pub median_delta0: f64,
}

/// Circuit `i` comes from stream `seed/3/i`; its mitigated estimate uses key
/// `seed/4/i` and the unmitigated one `seed/5/i`.
pub fn run_fig2_experiment(cfg: &PecConfig, seed: u64) -> Result<Fig2Result> {
    cfg.validate()?;
    let n = cfg.n_qubits;
    let dim = 1usize << n;
    let (psi0, rho0) = match cfg.initial_state {
        InitialState::Plus => (vec![C64::new(1.0 / (dim as f64).sqrt(), 0.0); dim], plus_state(n)),
        InitialState::Zero => {
            let mut v = vec![C64::new(0.0, 0.0); dim];
            v[0] = C64::new(1.0, 0.0);
            (v, DensityMatrix::zero_state(n))
        }
    };
    let noise = cfg.noise_model();
    let root = StreamKey::new(seed);
    let rows = (0..cfg.circuits)
        .into_par_iter()
        .map(|i| -> Result<PecCsvRow> {
            let circuit = gen_clifford_t_circuit(&mut stream(seed, &[3, i as u64]), n, cfg.depth)?;
            let psi = simulate_pure(&circuit, &psi0)?;
            let probs: Vec<f64> = psi.iter().map(|a| a.norm_sqr()).collect();
            let proj = median_projector(&probs)?;
            let a = proj.observable(n);
            let plan = compose_circuit_qpr(&circuit, &noise)?;
            let key = root.path(&[4, i as u64]);
            let est = match cfg.estimator {
                EstimatorKind::Grouped => {
                    let opts = GroupedOptions { k: cfg.groups, pilot_runs: cfg.pilot_runs };
                    run_pec_grouped(&plan, &rho0, &a, cfg.runs, &opts, key)?
                }
                EstimatorKind::Flat => run_pec(&plan, &rho0, &a, cfg.runs, key)?,
            };
            let unmitigated = run_unmitigated(&circuit, &noise, &rho0, &a, cfg.runs, root.path(&[5, i as u64]))?;
            let exact = proj.ideal_value;
            Ok(PecCsvRow {
                circuit_id: i,
                mitigated: est.value,
                unmitigated,
                exact,
                delta: (est.value - exact).abs(),
                delta0: (unmitigated - exact).abs(),
                gamma: est.gamma,
                m: cfg.runs,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let median_delta = median(&rows.iter().map(|r| r.delta).collect::<Vec<_>>());
    let median_delta0 = median(&rows.iter().map(|r| r.delta0).collect::<Vec<_>>());
    Ok(Fig2Result { rows, median_delta, median_delta0 })
}
