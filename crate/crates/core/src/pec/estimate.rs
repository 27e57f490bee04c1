//! Monte Carlo estimators of the ideal expectation value.

use std::collections::HashMap;

use rayon::prelude::*;

use super::sampling::PlanSampler;
use super::simulate::{diagonal_weights, PlanSimulator};
use crate::error::{QemError, Result};
use crate::qpr::CircuitQpr;
use crate::quantum::{expectation_value, Circuit, DensityMatrix, NoiseModel, NoisyCircuit, Observable, ReadoutSampler};
use crate::rng::StreamKey;

/// Largest support enumerated by the exhaustive oracle.
pub const MAX_BRANCHES: u128 = 100_000;

/// `⌈(γ/δ)²⌉`.
pub fn required_samples(delta: f64, gamma: f64) -> Result<u64> {
    if !(delta > 0.0) || !(gamma >= 1.0) || !gamma.is_finite() {
        return Err(QemError::InvalidArgument(format!("need δ > 0 and γ ≥ 1, got δ={delta}, γ={gamma}")));
    }
    let m = (gamma / delta).powi(2);
    // Guard against 400.00000000000006 rounding up to 401.
    Ok((m * (1.0 - 1e-12)).ceil() as u64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupAllocation {
    /// Number of the `K` draws that produced this circuit.
    pub multiplicity: usize,
    pub sign: i8,
    pub pilot_runs: usize,
    /// Readouts entering the estimate.
    pub runs: usize,
    pub mean: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PecEstimate {
    pub value: f64,
    pub gamma: f64,
    /// All readouts spent, pilots included.
    pub runs: usize,
    /// Empty for the flat estimator.
    pub groups: Vec<GroupAllocation>,
    pub std_error: Option<f64>,
}

fn readout_values(probs: &[f64], weights: &[f64], count: usize, key: StreamKey) -> Vec<f64> {
    let sampler = ReadoutSampler::new(probs);
    let mut rng = key.rng();
    (0..count).map(|_| weights[sampler.sample(&mut rng)]).collect()
}

/// Simulates each distinct circuit once, in parallel, keeping input order.
fn distinct_probabilities(sim: &PlanSimulator, circuits: &[&NoisyCircuit]) -> Result<Vec<Vec<f64>>> {
    circuits.par_iter().map(|c| sim.probabilities(c)).collect()
}

/// `Ê = (γ/M) Σ_a σ(α^a) A(x^a)`, one fresh circuit and one readout per run.
///
/// Run `a` draws its circuit and its readout from stream `key.child(a)`.
pub fn run_pec(plan: &CircuitQpr, rho0: &DensityMatrix, a: &Observable, m: usize, key: StreamKey) -> Result<PecEstimate> {
    if m == 0 {
        return Err(QemError::InvalidArgument("M must be positive".into()));
    }
    let weights = diagonal_weights(a)?;
    let sampler = PlanSampler::new(plan)?;
    let sim = PlanSimulator::new(plan, rho0)?;
    let mut index: HashMap<NoisyCircuit, usize> = HashMap::new();
    let mut distinct = Vec::new();
    let mut runs = Vec::with_capacity(m);
    for r in 0..m {
        let mut rng = key.child(r as u64).rng();
        let (c, sign) = plan.circuit_for(&sampler.choice(&mut rng))?;
        let id = *index.entry(c.clone()).or_insert_with(|| {
            distinct.push(c);
            distinct.len() - 1
        });
        runs.push((id, sign, rng));
    }
    let probs = distinct_probabilities(&sim, &distinct.iter().collect::<Vec<_>>())?;
    let samplers: Vec<ReadoutSampler> = probs.iter().map(|p| ReadoutSampler::new(p)).collect();
    let gamma = plan.gamma();
    let xs: Vec<f64> = runs
        .into_iter()
        .map(|(id, sign, mut rng)| gamma * sign as f64 * weights[samplers[id].sample(&mut rng)])
        .collect();
    let (mean, sd) = mean_sd(&xs);
    Ok(PecEstimate { value: mean, gamma, runs: m, groups: Vec::new(), std_error: Some(sd / (m as f64).sqrt()) })
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, var.sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupedOptions {
    /// Circuits drawn before grouping identical ones.
    pub k: usize,
    /// Pilot readouts for each group drawn at least twice.
    pub pilot_runs: usize,
}

impl Default for GroupedOptions {
    fn default() -> Self {
        Self { k: 3000, pilot_runs: 2 }
    }
}

/// Grouped estimator `γ Σ_α (n_α/K) σ_α Ē_α` with readouts split `M_α ∝ n_α σ̂_α`.
///
/// Draws `K` circuits and merges identical ones into groups of multiplicity
/// `n_α`. Groups with `n_α ≥ 2` get pilot readouts to estimate their standard
/// deviation, shrunk towards the pooled variance by one pseudo-observation;
/// singletons use the pooled value. Pilots count against `M` but are not part
/// of the estimate. Streams: draws `key/0/j`, pilots `key/1/α`, readouts `key/2/α`.
pub fn run_pec_grouped(
    plan: &CircuitQpr,
    rho0: &DensityMatrix,
    a: &Observable,
    m: usize,
    opts: &GroupedOptions,
    key: StreamKey,
) -> Result<PecEstimate> {
    if opts.k == 0 {
        return Err(QemError::InvalidArgument("K must be positive".into()));
    }
    if opts.pilot_runs < 2 {
        return Err(QemError::InvalidArgument("at least two pilot readouts are needed per group".into()));
    }
    let weights = diagonal_weights(a)?;
    let sampler = PlanSampler::new(plan)?;
    let sim = PlanSimulator::new(plan, rho0)?;

    let mut index: HashMap<(NoisyCircuit, i8), usize> = HashMap::new();
    let mut groups: Vec<(NoisyCircuit, i8, usize)> = Vec::new();
    for j in 0..opts.k {
        let mut rng = key.path(&[0, j as u64]).rng();
        let (c, sign) = plan.circuit_for(&sampler.choice(&mut rng))?;
        match index.get(&(c.clone(), sign)) {
            Some(&g) => groups[g].2 += 1,
            None => {
                index.insert((c.clone(), sign), groups.len());
                groups.push((c, sign, 1));
            }
        }
    }
    let probs = distinct_probabilities(&sim, &groups.iter().map(|g| &g.0).collect::<Vec<_>>())?;

    let piloted: Vec<bool> = groups.iter().map(|g| g.2 >= 2).collect();
    let pilot_total = piloted.iter().filter(|&&p| p).count() * opts.pilot_runs;
    if m < pilot_total + groups.len() {
        return Err(QemError::InvalidArgument(format!(
            "budget M={m} cannot cover {pilot_total} pilot readouts and {} groups",
            groups.len()
        )));
    }
    // Sum of squared deviations from the pilots of each piloted group.
    let pilot_ss: Vec<Option<f64>> = probs
        .par_iter()
        .enumerate()
        .map(|(g, p)| {
            piloted[g].then(|| {
                let xs = readout_values(p, &weights, opts.pilot_runs, key.path(&[1, g as u64]));
                let (_, sd) = mean_sd(&xs);
                sd * sd * (opts.pilot_runs as f64 - 1.0)
            })
        })
        .collect();
    let (ss_sum, dof) = pilot_ss.iter().flatten().fold((0.0, 0.0), |(s, d), v| (s + v, d + opts.pilot_runs as f64 - 1.0));
    let pooled = if dof > 0.0 { ss_sum / dof } else { 0.25 };
    let sigma: Vec<f64> = pilot_ss
        .iter()
        .map(|ss| match ss {
            Some(ss) => ((ss + pooled) / opts.pilot_runs as f64).sqrt(),
            None => pooled.sqrt(),
        })
        .collect();

    let alloc = allocate(m - pilot_total, &groups.iter().zip(&sigma).map(|(g, s)| g.2 as f64 * s).collect::<Vec<_>>());
    let means: Vec<f64> = probs
        .par_iter()
        .enumerate()
        .map(|(g, p)| {
            let xs = readout_values(p, &weights, alloc[g], key.path(&[2, g as u64]));
            xs.iter().sum::<f64>() / xs.len() as f64
        })
        .collect();

    let gamma = plan.gamma();
    let kf = opts.k as f64;
    let terms: Vec<f64> = groups.iter().zip(&means).map(|(g, e)| g.2 as f64 * g.1 as f64 * e).collect();
    let total: f64 = terms.iter().sum();
    let value = gamma * total / kf;
    let std_error = (groups.len() > 1).then(|| {
        let loo: Vec<f64> =
            groups.iter().zip(&terms).map(|(g, t)| gamma * (total - t) / (kf - g.2 as f64)).collect();
        let gcount = loo.len() as f64;
        let mean = loo.iter().sum::<f64>() / gcount;
        ((gcount - 1.0) / gcount * loo.iter().map(|x| (x - mean).powi(2)).sum::<f64>()).sqrt()
    });
    let allocations = groups
        .iter()
        .enumerate()
        .map(|(g, (_, sign, mult))| GroupAllocation {
            multiplicity: *mult,
            sign: *sign,
            pilot_runs: if piloted[g] { opts.pilot_runs } else { 0 },
            runs: alloc[g],
            mean: means[g],
        })
        .collect();
    Ok(PecEstimate { value, gamma, runs: m, groups: allocations, std_error })
}

/// Splits `total` into integers `≥ 1` proportional to `weights` by largest remainder.
/// Zero total weight falls back to an even split.
pub fn allocate(total: usize, weights: &[f64]) -> Vec<usize> {
    let g = weights.len();
    assert!(total >= g, "allocation needs at least one unit per group");
    let sum: f64 = weights.iter().sum();
    let w: Vec<f64> = if sum > 0.0 { weights.to_vec() } else { vec![1.0; g] };
    let sum: f64 = w.iter().sum();
    let spare = (total - g) as f64;
    let quotas: Vec<f64> = w.iter().map(|x| spare * x / sum).collect();
    let mut out: Vec<usize> = quotas.iter().map(|q| 1 + q.floor() as usize).collect();
    let left = total - out.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..g).collect();
    order.sort_by(|&a, &b| (quotas[b] - quotas[b].floor()).total_cmp(&(quotas[a] - quotas[a].floor())).then(a.cmp(&b)));
    for &i in order.iter().take(left) {
        out[i] += 1;
    }
    out
}

/// `γ Σ_α P(α) σ(α) Tr[A O_α(ρ0)]` over every outcome combination.
pub fn exhaustive_pec_expectation(plan: &CircuitQpr, rho0: &DensityMatrix, a: &Observable) -> Result<f64> {
    let branches = plan.branch_count();
    if branches > MAX_BRANCHES {
        return Err(QemError::TooLarge(branches));
    }
    let sim = PlanSimulator::new(plan, rho0)?;
    let mut choices = Vec::with_capacity(branches as usize);
    let mut choice = vec![0usize; plan.units.len()];
    'outer: loop {
        choices.push(choice.clone());
        for u in 0..choice.len() {
            choice[u] += 1;
            if choice[u] < plan.units[u].outcomes.len() {
                continue 'outer;
            }
            choice[u] = 0;
        }
        break;
    }
    let terms = choices
        .par_iter()
        .map(|ch| {
            let eta: f64 = plan.units.iter().zip(ch).map(|(u, &c)| u.outcomes[c].eta).product();
            let (c, _) = plan.circuit_for(ch)?;
            Ok(eta * expectation_value(a, &sim.final_state(&c)?)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(terms.iter().sum())
}

/// Mean of `m` readouts of the unmitigated noisy circuit, from stream `key`.
pub fn run_unmitigated(
    circuit: &Circuit,
    noise: &NoiseModel,
    rho0: &DensityMatrix,
    a: &Observable,
    m: usize,
    key: StreamKey,
) -> Result<f64> {
    if m == 0 {
        return Err(QemError::InvalidArgument("M must be positive".into()));
    }
    let weights = diagonal_weights(a)?;
    let rho = NoisyCircuit::from_ideal(circuit).apply(Some(noise), rho0)?;
    let xs = readout_values(&rho.probabilities(), &weights, m, key);
    Ok(xs.iter().sum::<f64>() / m as f64)
}
