//! Experiment harness: random instances, the two experiment drivers, configuration and output.

pub mod circuits;
pub mod config;
pub mod fig1;
pub mod fig2;
pub mod output;

pub use circuits::{gen_clifford_t_circuit, median_projector, random_pauli_observable, MedianProjector};
pub use config::{
    EstimatorKind, ExperimentConfig, ExperimentKind, InitialState, IntegratorKind, ModelKind, PecConfig, PecNoise,
    ZneConfig,
};
pub use fig1::{log_log_slope, median, run_fig1_experiment, Fig1Median, Fig1Result, Fig1Row};
pub use fig2::{run_fig2_experiment, Fig2Result, PecCsvRow};
pub use output::{fig1_gnuplot, fig2_gnuplot, write_csv, write_csv_file};
