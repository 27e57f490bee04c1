use std::path::PathBuf;
use std::process::{Command, Output};

fn qem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qem")).args(args).output().expect("spawn qem")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qem-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn circuit_gen_is_deterministic() {
    let a = qem(&["circuit", "gen", "--n", "6", "--depth", "20", "--seed", "5"]);
    let b = qem(&["circuit", "gen", "--n", "6", "--depth", "20", "--seed", "5"]);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    let text = stdout(&a);
    assert!(text.starts_with("qubits 6\n"));
    assert_eq!(text.lines().count(), 21);
    assert_eq!(text.matches("CNOT").count(), 30);
    let c = qem(&["circuit", "gen", "--n", "6", "--depth", "20", "--seed", "6"]);
    assert_ne!(stdout(&a), stdout(&c));
}

#[test]
fn odd_qubit_count_is_rejected() {
    let o = qem(&["circuit", "gen", "--n", "3", "--depth", "2", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn qpr_solve_matches_closed_forms() {
    for (gate, noise, want) in [
        ("H", "depolarizing", (1.0 + 0.005) / 0.99),
        ("CNOT", "depolarizing", (1.0 + 0.00875) / 0.99),
        ("T", "amplitude_damping", 1.01 / 0.99),
    ] {
        let o = qem(&["qpr", "solve", "--gate", gate, "--noise", noise, "--epsilon", "0.01"]);
        assert!(o.status.success(), "{gate}");
        let text = stdout(&o);
        let gamma: f64 = text.lines().find_map(|l| l.strip_prefix("gamma ")).unwrap().parse().unwrap();
        assert!((gamma - want).abs() < 1e-10, "{gate}: {gamma} vs {want}");
    }
    let o = qem(&["qpr", "solve", "--gate", "S", "--noise", "damping", "--epsilon", "0.1", "--without-preparations"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("infeasible"));
}

#[test]
fn invalid_arguments_exit_with_two() {
    assert_eq!(qem(&["qpr", "solve", "--gate", "Q", "--noise", "depolarizing", "--epsilon", "0.01"]).status.code(), Some(2));
    assert_eq!(qem(&["qpr", "solve", "--gate", "H", "--noise", "depolarizing", "--epsilon", "-1"]).status.code(), Some(2));
    assert_eq!(qem(&["pec", "--config", "/nonexistent/qem.toml"]).status.code(), Some(2));
    let dir = scratch("bad");
    let cfg = dir.join("bad.toml");
    std::fs::write(&cfg, "seed = 1\n[pec]\nn_qubits = 5\n").unwrap();
    assert_eq!(qem(&["pec", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&cfg, "kind = \"zne\"\nseed = 1\n").unwrap();
    assert_eq!(qem(&["pec", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn pec_writes_csv_and_seed_overrides() {
    let dir = scratch("pec");
    let cfg = dir.join("pec.toml");
    std::fs::write(&cfg, "seed = 1\n[pec]\nn_qubits = 2\ndepth = 4\ncircuits = 3\nruns = 400\ngroups = 100\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let a = qem(&["pec", "--config", cfg]);
    assert!(a.status.success());
    let text = stdout(&a);
    assert_eq!(text.lines().next().unwrap(), "circuit_id,mitigated,unmitigated,exact,delta,delta0,gamma,M");
    assert_eq!(text.lines().count(), 4);
    assert_eq!(stdout(&qem(&["pec", "--config", cfg])), text);
    assert_ne!(stdout(&qem(&["pec", "--config", cfg, "--seed", "2"])), text);

    let out = dir.join("fig2.csv");
    let o = qem(&["pec", "--config", cfg, "--output", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(&out).unwrap(), text);
}

#[test]
fn zne_writes_medians_instances_and_plot() {
    let dir = scratch("zne");
    let cfg = dir.join("zne.toml");
    let out = dir.join("fig1.csv");
    let plot = dir.join("fig1.gp");
    std::fs::write(
        &cfg,
        format!(
            "seed = 3\nplot_script = {:?}\n[zne]\nn_qubits = 2\nsteps = 2\nstep_time = 1.0\ninstances = 2\neps_points = 3\nmax_order = 2\nmodels = [\"depolarizing\"]\n",
            plot.to_str().unwrap()
        ),
    )
    .unwrap();
    let o = qem(&["zne", "--config", cfg.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let medians = std::fs::read_to_string(&out).unwrap();
    assert_eq!(medians.lines().count(), 1 + 3 * 3);
    let rows = std::fs::read_to_string(dir.join("fig1.instances.csv")).unwrap();
    assert_eq!(rows.lines().count(), 1 + 2 * 3 * 3);
    assert!(std::fs::read_to_string(&plot).unwrap().contains("logscale"));
}
