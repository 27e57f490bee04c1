//! `qem`: command-line front end for the mitigation experiments.
//!
//! Exit codes: 0 success, 1 other failures (e.g. unwritable output),
//! 2 invalid configuration or arguments, 3 numerical failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qem_core::experiments::{
    fig1_gnuplot, fig2_gnuplot, gen_clifford_t_circuit, run_fig1_experiment, run_fig2_experiment, write_csv,
    write_csv_file, ExperimentConfig, ExperimentKind,
};
use qem_core::qpr::{
    build_damping_basis, build_depolarizing_basis, damping_plus_prep_gamma, damping_single_qubit_gamma,
    depolarizing_gamma, lp_gate_qpr, Target, BASIS_GATES,
};
use qem_core::quantum::{Gate, PrepState};
use qem_core::rng::stream;
use qem_core::QemError;

#[derive(Parser)]
#[command(name = "qem", version, about = "Zero-noise extrapolation and probabilistic error cancellation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extrapolation error against noise strength (random drift evolutions).
    Zne(RunArgs),
    /// Error cancellation on random Clifford+T circuits.
    Pec(RunArgs),
    /// Quasi-probability representations of single gates.
    Qpr {
        #[command(subcommand)]
        command: QprCommand,
    },
    /// Random Clifford+T circuits.
    Circuit {
        #[command(subcommand)]
        command: CircuitCommand,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    /// TOML experiment file.
    #[arg(long)]
    config: PathBuf,
    /// Overrides `seed` from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `output` from the config; stdout when neither is set.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum QprCommand {
    /// Minimal-overhead representation by linear programming over the noisy basis.
    Solve {
        /// I, H, S, SDG, T, CNOT, or a preparation such as "PREP +".
        #[arg(long)]
        gate: String,
        #[arg(long, value_enum)]
        noise: NoiseArg,
        #[arg(long)]
        epsilon: f64,
        /// Restrict damping candidates to damped unitaries.
        #[arg(long)]
        without_preparations: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum NoiseArg {
    Depolarizing,
    #[value(name = "amplitude_damping", alias = "damping")]
    AmplitudeDamping,
}

#[derive(Subcommand)]
enum CircuitCommand {
    /// Print a random circuit in text form. Identical to circuit 0 of `qem pec` with the same seed.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Debug)]
enum CliError {
    Qem(QemError),
    Output(String),
}

impl From<QemError> for CliError {
    fn from(e: QemError) -> Self {
        CliError::Qem(e)
    }
}

fn exit_code(e: &CliError) -> u8 {
    match e {
        CliError::Qem(e) if e.is_numerical() => 3,
        CliError::Qem(
            QemError::Config(_) | QemError::InvalidArgument(_) | QemError::UnknownGate(_) | QemError::Parse { .. },
        ) => 2,
        _ => 1,
    }
}

fn load(args: &RunArgs, expected: ExperimentKind) -> Result<(ExperimentConfig, u64, Option<PathBuf>), CliError> {
    let cfg = ExperimentConfig::load(&args.config)?;
    if let Some(kind) = cfg.kind {
        if kind != expected {
            return Err(QemError::Config(format!("config kind {kind:?} cannot run as {expected:?}")).into());
        }
    }
    let seed = args.seed.unwrap_or(cfg.seed);
    let output = args.output.clone().or_else(|| cfg.output.clone());
    Ok((cfg, seed, output))
}

fn write_plot(path: &Option<PathBuf>, script: String) -> Result<(), CliError> {
    if let Some(p) = path {
        std::fs::write(p, script).map_err(|e| CliError::Output(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn run_zne(args: &RunArgs) -> Result<(), CliError> {
    let (cfg, seed, output) = load(args, ExperimentKind::Zne)?;
    let res = run_fig1_experiment(&cfg.zne, seed)?;
    match &output {
        Some(path) => {
            write_csv_file(path, &res.medians).map_err(|e| CliError::Output(e.to_string()))?;
            write_csv_file(&sibling(path, "instances.csv"), &res.rows).map_err(|e| CliError::Output(e.to_string()))?;
            write_plot(&cfg.plot_script, fig1_gnuplot(path, cfg.zne.max_order))?;
        }
        None => write_csv(std::io::stdout().lock(), &res.medians).map_err(|e| CliError::Output(e.to_string()))?,
    }
    for m in res.medians.iter().filter(|m| m.epsilon == res.medians[0].epsilon) {
        eprintln!("{:?} eps={:.1e} n={}: median |dE| = {:.3e}", m.model, m.epsilon, m.order, m.median_abs_error);
    }
    Ok(())
}

fn run_pec_cmd(args: &RunArgs) -> Result<(), CliError> {
    let (cfg, seed, output) = load(args, ExperimentKind::Pec)?;
    let res = run_fig2_experiment(&cfg.pec, seed)?;
    match &output {
        Some(path) => {
            write_csv_file(path, &res.rows).map_err(|e| CliError::Output(e.to_string()))?;
            write_plot(&cfg.plot_script, fig2_gnuplot(path))?;
        }
        None => write_csv(std::io::stdout().lock(), &res.rows).map_err(|e| CliError::Output(e.to_string()))?,
    }
    let gamma = res.rows.first().map_or(f64::NAN, |r| r.gamma);
    eprintln!(
        "{} circuits: gamma {gamma:.4}, median delta {:.4}, median delta0 {:.4}",
        res.rows.len(),
        res.median_delta,
        res.median_delta0
    );
    Ok(())
}

fn qpr_solve(gate: &str, noise: NoiseArg, eps: f64, without_preps: bool) -> Result<(), CliError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(QemError::InvalidArgument(format!("epsilon = {eps} outside (0, 1)")).into());
    }
    let target = match gate.parse::<Gate>()? {
        Gate::Prep(s) => Target::Prep(s),
        g if g == Gate::Cnot || BASIS_GATES.contains(&g) => Target::Gate(g),
        g => return Err(QemError::InvalidArgument(format!("{g} is not in the ideal gate set")).into()),
    };
    let (qpr, closed_form) = match noise {
        NoiseArg::Depolarizing => {
            let Target::Gate(g) = &target else {
                return Err(QemError::InvalidArgument("preparations are only represented under amplitude damping".into()).into());
            };
            let basis = build_depolarizing_basis(eps)?;
            (lp_gate_qpr(&target, &basis, &basis.candidates(g, false))?, Some(depolarizing_gamma(g.arity(), eps)))
        }
        NoiseArg::AmplitudeDamping => {
            let basis = build_damping_basis(eps)?;
            match &target {
                Target::Gate(g) => {
                    let closed = (g.arity() == 1 && !without_preps).then(|| damping_single_qubit_gamma(eps));
                    (lp_gate_qpr(&target, &basis, &basis.candidates(g, !without_preps))?, closed)
                }
                Target::Prep(s) => {
                    let closed = match s {
                        PrepState::Plus => Some(damping_plus_prep_gamma(eps)),
                        PrepState::Zero => Some(1.0),
                        _ => None,
                    };
                    (lp_gate_qpr(&target, &basis, &basis.preparations())?, closed)
                }
            }
        }
    };
    match qpr {
        Some(q) => {
            print!("{}", q.export());
            println!("residual {:.3e}", q.reconstruction_residual()?);
            if let Some(c) = closed_form {
                println!("closed_form_gamma {c:.17}");
            }
        }
        None => println!("target {target}\ninfeasible"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Zne(args) => run_zne(&args),
        Command::Pec(args) => run_pec_cmd(&args),
        Command::Qpr { command: QprCommand::Solve { gate, noise, epsilon, without_preparations } } => {
            qpr_solve(&gate, noise, epsilon, without_preparations)
        }
        Command::Circuit { command: CircuitCommand::Gen { n, depth, seed } } => {
            let c = gen_clifford_t_circuit(&mut stream(seed, &[3, 0]), n, depth)?;
            print!("{c}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Qem(q) => eprintln!("qem: {q}"),
                CliError::Output(m) => eprintln!("qem: cannot write output: {m}"),
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
