//! The extrapolation protocol: evolve at each amplified noise level, estimate, combine.

use rayon::prelude::*;
use serde::Serialize;

use super::nodes::NodeSequence;
use super::richardson::{extrapolate, richardson_coefficients, RichardsonPlan};
use crate::dynamics::{evolve_with, rescale_schedule, Integrator, NoiseGenerator, Schedule};
use crate::error::Result;
use crate::quantum::{expectation_value, observable_readout, DensityMatrix, Observable};
use crate::rng::StreamKey;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Estimator {
    Exact,
    /// `shots` readouts per node; node `j` draws from stream `key.child(j)`.
    Sampled { shots: usize, key: StreamKey },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZneResult {
    pub extrapolated: f64,
    pub estimates: Vec<f64>,
    pub plan: RichardsonPlan,
}

/// Runs `n + 1` rescaled evolutions and extrapolates. Nodes run in parallel.
#[allow(clippy::too_many_arguments)]
pub fn run_zne_protocol(
    schedule: &Schedule,
    noise: &NoiseGenerator,
    lambda: f64,
    rho0: &DensityMatrix,
    observable: &Observable,
    nodes: &NodeSequence,
    estimator: &Estimator,
    integrator: &Integrator,
) -> Result<ZneResult> {
    let plan = richardson_coefficients(nodes)?;
    let estimates = nodes
        .c
        .par_iter()
        .enumerate()
        .map(|(j, &c)| {
            let rho = evolve_with(&rescale_schedule(schedule, c)?, noise, lambda, rho0, integrator)?;
            estimate(observable, &rho, estimator, j as u64)
        })
        .collect::<Result<Vec<f64>>>()?;
    let extrapolated = extrapolate(&plan, &estimates)?;
    Ok(ZneResult { extrapolated, estimates, plan })
}

fn estimate(a: &Observable, rho: &DensityMatrix, estimator: &Estimator, j: u64) -> Result<f64> {
    match *estimator {
        Estimator::Exact => expectation_value(a, rho),
        Estimator::Sampled { shots, key } => {
            let (sampler, values) = observable_readout(a, rho);
            let mut rng = key.child(j).rng();
            let sum: f64 = (0..shots).map(|_| values[sampler.sample(&mut rng)]).sum();
            Ok(sum / shots.max(1) as f64)
        }
    }
}

/// One line of the extrapolation CSV.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZneCsvRow {
    pub epsilon: f64,
    pub lambda: f64,
    pub node_index: usize,
    pub c_j: f64,
    pub estimate: f64,
    pub n: usize,
    pub extrapolated: f64,
    pub exact: f64,
    pub abs_error: f64,
}

impl ZneResult {
    pub fn csv_rows(&self, epsilon: f64, lambda: f64, exact: f64) -> Vec<ZneCsvRow> {
        self.plan
            .nodes
            .c
            .iter()
            .zip(&self.estimates)
            .enumerate()
            .map(|(j, (&c_j, &estimate))| ZneCsvRow {
                epsilon,
                lambda,
                node_index: j,
                c_j,
                estimate,
                n: self.plan.order(),
                extrapolated: self.extrapolated,
                exact,
                abs_error: (exact - self.extrapolated).abs(),
            })
            .collect()
    }
}
