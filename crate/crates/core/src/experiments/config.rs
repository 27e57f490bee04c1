//! TOML experiment configuration.
//!
//! ```toml
//! kind = "pec"          # zne | pec | qpr-solve | circuit-gen (optional)
//! seed = 7
//! output = "fig2.csv"   # optional, stdout otherwise
//! plot_script = "fig2.gp"
//!
//! [zne]
//! n_qubits = 4
//! steps = 6
//! step_time = 2.0
//! edge_probability = 0.5
//! instances = 20
//! eps_min = 1e-3
//! eps_max = 1e-2
//! eps_points = 10
//! max_order = 3
//! models = ["depolarizing", "damping_dephasing", "coherent_bath"]
//! damping_ratio = 1.5
//! beta = 1.0
//! integrator = "taylor"  # or "rk4"
//! nodes = { kind = "random_partition", c_max = 4.0 }
//!
//! [pec]
//! n_qubits = 6
//! depth = 20
//! eps = 0.01
//! noise = "depolarizing"  # or "amplitude_damping"
//! circuits = 100
//! runs = 4000
//! groups = 3000
//! pilot_runs = 2
//! estimator = "grouped"   # or "flat"
//! initial_state = "plus"  # or "zero"
//! ```
//!
//! Every field except `seed` has a default.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::NoiseGenerator;
use crate::error::{QemError, Result};
use crate::quantum::NoiseModel;
use crate::zne::{NodeKind, DEFAULT_MIN_SEPARATION};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Zne,
    Pec,
    QprSolve,
    CircuitGen,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Depolarizing,
    DampingDephasing,
    CoherentBath,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegratorKind {
    Taylor,
    Rk4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PecNoise {
    Depolarizing,
    AmplitudeDamping,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Grouped,
    Flat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    Plus,
    Zero,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZneConfig {
    pub n_qubits: usize,
    pub steps: usize,
    pub step_time: f64,
    pub edge_probability: f64,
    pub instances: usize,
    pub eps_min: f64,
    pub eps_max: f64,
    pub eps_points: usize,
    pub max_order: usize,
    pub models: Vec<ModelKind>,
    pub damping_ratio: f64,
    pub beta: f64,
    pub integrator: IntegratorKind,
    pub nodes: NodeKind,
    pub min_separation: f64,
}

impl Default for ZneConfig {
    fn default() -> Self {
        Self {
            n_qubits: 4,
            steps: 6,
            step_time: 2.0,
            edge_probability: 0.5,
            instances: 20,
            eps_min: 1e-3,
            eps_max: 1e-2,
            eps_points: 10,
            max_order: 3,
            models: vec![ModelKind::Depolarizing, ModelKind::DampingDephasing, ModelKind::CoherentBath],
            damping_ratio: NoiseGenerator::DEFAULT_DAMPING_RATIO,
            beta: NoiseGenerator::DEFAULT_BETA,
            integrator: IntegratorKind::Taylor,
            nodes: NodeKind::default(),
            min_separation: DEFAULT_MIN_SEPARATION,
        }
    }
}

impl ZneConfig {
    /// Log-spaced grid from `eps_min` to `eps_max`.
    pub fn eps_grid(&self) -> Vec<f64> {
        if self.eps_points == 1 {
            return vec![self.eps_min];
        }
        let (a, b) = (self.eps_min.ln(), self.eps_max.ln());
        (0..self.eps_points).map(|i| (a + (b - a) * i as f64 / (self.eps_points - 1) as f64).exp()).collect()
    }

    pub fn generator(&self, m: ModelKind) -> NoiseGenerator {
        match m {
            ModelKind::Depolarizing => NoiseGenerator::Depolarizing,
            ModelKind::DampingDephasing => NoiseGenerator::DampingDephasing { damping: 1.0, dephasing: 1.0 / self.damping_ratio },
            ModelKind::CoherentBath => NoiseGenerator::CoherentBath { beta: self.beta },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(QemError::Config(format!("[zne] {msg}")));
        if !(2..=8).contains(&self.n_qubits) {
            return bad(format!("n_qubits = {} outside 2..=8", self.n_qubits));
        }
        if self.steps == 0 || self.instances == 0 || self.eps_points == 0 {
            return bad("steps, instances and eps_points must be positive".into());
        }
        if !(self.step_time > 0.0 && self.step_time.is_finite()) {
            return bad(format!("step_time = {} must be positive", self.step_time));
        }
        if !(self.edge_probability > 0.0 && self.edge_probability <= 1.0) {
            return bad(format!("edge_probability = {} outside (0, 1]", self.edge_probability));
        }
        if !(0.0 < self.eps_min && self.eps_min <= self.eps_max && self.eps_max < 1.0) {
            return bad(format!("need 0 < eps_min <= eps_max < 1, got {} and {}", self.eps_min, self.eps_max));
        }
        if self.eps_points > 1 && self.eps_min == self.eps_max {
            return bad("eps_min = eps_max with several grid points".into());
        }
        if self.models.is_empty() {
            return bad("no noise models selected".into());
        }
        if !(self.damping_ratio > 0.0 && self.damping_ratio.is_finite()) {
            return bad(format!("damping_ratio = {} must be positive", self.damping_ratio));
        }
        if self.max_order > 6 {
            return bad(format!("max_order = {} above 6", self.max_order));
        }
        if !(self.min_separation > 0.0) {
            return bad("min_separation must be positive".into());
        }
        for m in &self.models {
            self.generator(*m).validate().map_err(|e| QemError::Config(format!("[zne] {e}")))?;
        }
        // Catch impossible node specifications before any evolution runs.
        let mut rng = crate::rng::stream(0, &[]);
        crate::zne::make_node_sequence(&self.nodes, self.max_order, self.min_separation, &mut rng)
            .map_err(|e| QemError::Config(format!("[zne] nodes: {e}")))?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PecConfig {
    pub n_qubits: usize,
    pub depth: usize,
    pub eps: f64,
    pub noise: PecNoise,
    pub circuits: usize,
    /// Readout budget `M` per circuit, shared by the mitigated and unmitigated estimates.
    pub runs: usize,
    /// Circuits `K` drawn by the grouped estimator.
    pub groups: usize,
    pub pilot_runs: usize,
    pub estimator: EstimatorKind,
    pub initial_state: InitialState,
}

impl Default for PecConfig {
    fn default() -> Self {
        Self {
            n_qubits: 6,
            depth: 20,
            eps: 0.01,
            noise: PecNoise::Depolarizing,
            circuits: 100,
            runs: 4000,
            groups: 3000,
            pilot_runs: 2,
            estimator: EstimatorKind::Grouped,
            initial_state: InitialState::Plus,
        }
    }
}

impl PecConfig {
    pub fn noise_model(&self) -> NoiseModel {
        match self.noise {
            PecNoise::Depolarizing => NoiseModel::Depolarizing { eps: self.eps },
            PecNoise::AmplitudeDamping => NoiseModel::AmplitudeDamping { eps: self.eps },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(QemError::Config(format!("[pec] {msg}")));
        if self.n_qubits < 2 || self.n_qubits % 2 == 1 || self.n_qubits > 10 {
            return bad(format!("n_qubits = {} must be even and in 2..=10", self.n_qubits));
        }
        if self.depth == 0 || self.circuits == 0 || self.runs == 0 || self.groups == 0 {
            return bad("depth, circuits, runs and groups must be positive".into());
        }
        if self.circuits > 500 {
            return bad(format!("circuits = {} above 500", self.circuits));
        }
        if !(0.0..1.0).contains(&self.eps) {
            return bad(format!("eps = {} outside [0, 1)", self.eps));
        }
        if self.estimator == EstimatorKind::Grouped {
            if self.pilot_runs < 2 {
                return bad("pilot_runs must be at least 2".into());
            }
            if self.groups > self.runs {
                return bad(format!("groups = {} exceeds the budget runs = {}", self.groups, self.runs));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub kind: Option<ExperimentKind>,
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub plot_script: Option<PathBuf>,
    #[serde(default)]
    pub zne: ZneConfig,
    #[serde(default)]
    pub pec: PecConfig,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| QemError::Config(e.to_string()))?;
        cfg.zne.validate()?;
        cfg.pec.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| QemError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_parse_and_validate() {
        let cfg = ExperimentConfig::from_toml("seed = 3").unwrap();
        assert_eq!(cfg.zne, ZneConfig::default());
        assert_eq!(cfg.pec.runs, 4000);
        let grid = cfg.zne.eps_grid();
        assert_eq!(grid.len(), 10);
        assert!((grid[0] - 1e-3).abs() < 1e-15 && (grid[9] - 1e-2).abs() < 1e-15);
    }

    #[test]
    fn full_example_parses() {
        let text = r#"
            kind = "pec"
            seed = 7
            output = "out.csv"
            [zne]
            models = ["coherent_bath"]
            nodes = { kind = "bulirsch_stoer", base = 2.0 }
            integrator = "rk4"
            [pec]
            noise = "amplitude_damping"
            initial_state = "zero"
            estimator = "flat"
        "#;
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        assert_eq!(cfg.kind, Some(ExperimentKind::Pec));
        assert_eq!(cfg.zne.nodes, NodeKind::BulirschStoer { base: 2.0 });
        assert_eq!(cfg.pec.noise_model(), NoiseModel::AmplitudeDamping { eps: 0.01 });
    }

    #[test]
    fn invalid_values_are_config_errors() {
        for text in [
            "seed = 1\n[pec]\nn_qubits = 5",
            "seed = 1\n[zne]\neps_min = 0.0",
            "seed = 1\n[zne]\nunknown = 2",
            "seed = 1\n[pec]\ngroups = 5000",
            "[pec]\nn_qubits = 4",
        ] {
            assert!(matches!(ExperimentConfig::from_toml(text), Err(QemError::Config(_))), "{text}");
        }
    }
}
