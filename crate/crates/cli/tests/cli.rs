use std::path::Path;
use std::process::{Command, Output};

use purify_cli::csv::{parse, Table, SUMMARY_HEADER};
use purify_core::analytics::bare_qubit_quadrature;

fn purify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_purify"))
        .args(args)
        .env_remove("PURIFY_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn qubit_config(kind: &str, run: &str) -> String {
    format!(
        "[system]\ndimension = 2\nstrength = 1.0\nstrength_convention = \"gamma\"\n\n\
         [run]\n{run}\n\n[protocol]\nkind = \"{kind}\"\n"
    )
}

fn simulate(config: &str) -> Table {
    let out = purify(&["simulate", config]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some(SUMMARY_HEADER));
    parse(&text).unwrap()
}

#[test]
fn bare_qubit_simulation_matches_quadrature() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bare.toml",
        &qubit_config(
            "bare",
            "dt = 1e-3\nt_final = 2.0\nn_traj = 2000\nseed = 11\nsample_times = [0.5, 1.0, 2.0]",
        ),
    );
    let table = simulate(&cfg);
    let times = table.column("t").unwrap();
    let mean = table.column("mean_L").unwrap();
    let err = table.column("stderr_L").unwrap();
    assert_eq!(table.column("n_traj").unwrap(), vec![2000.0; 3]);
    for i in 0..3 {
        let exact = bare_qubit_quadrature(1.0, times[i]).unwrap();
        assert!(
            (mean[i] - exact).abs() < 3.0 * err[i],
            "t={}: {} vs {exact} ± {}",
            times[i],
            mean[i],
            err[i]
        );
    }
}

#[test]
fn zero_duration_gives_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let body = "[system]\ndimension = 3\nstrength = 1.0\nstrength_convention = \"gamma\"\n\
                [run]\nt_final = 0.0\nn_traj = 3\n[protocol]\nkind = \"qudit-ubb\"\n";
    let table = simulate(&write_config(dir.path(), "zero.toml", body));
    assert_eq!(table.rows.len(), 1);
    assert!((table.column("mean_L").unwrap()[0] - 2.0 / 3.0).abs() < 1e-15);
    assert!(table.column("stderr_L").unwrap()[0] < 1e-15);
}

#[test]
fn qubit_feedback_simulation_follows_deterministic_curve() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "ubb.toml",
        &qubit_config("qubit-ubb", "t_final = 1.0\nn_traj = 100\nseed = 5"),
    );
    let table = simulate(&cfg);
    let mean = table.column("mean_L").unwrap();
    let expected = 0.5 * (-2.0f64).exp();
    assert!((mean[1] / expected - 1.0).abs() < 0.01, "{} vs {expected}", mean[1]);
}

#[test]
fn simulation_output_is_reproducible_across_runs_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    let body = "[system]\nregister_n = 2\nstrength = 1.0\nstrength_convention = \"kappa\"\n\
                [run]\ndt = 1e-3\nt_final = 0.2\nn_traj = 6\nseed = 9\nsample_count = 4\n\
                [protocol]\nkind = \"register-ubb\"\n";
    let cfg = write_config(dir.path(), "reg.toml", body);
    let file = dir.path().join("out.csv");
    let first = purify(&["simulate", &cfg, "--output", file.to_str().unwrap()]);
    assert!(first.status.success(), "{}", stderr(&first));
    assert!(stdout(&first).is_empty());
    let written = std::fs::read_to_string(&file).unwrap();

    let second = purify(&["simulate", &cfg, "--workers", "3"]);
    assert_eq!(stdout(&second), written);

    let env = Command::new(env!("CARGO_BIN_EXE_purify"))
        .args(["simulate", &cfg])
        .env("PURIFY_WORKERS", "2")
        .output()
        .unwrap();
    assert_eq!(stdout(&env), written);
}

#[test]
fn configuration_errors_exit_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let bad_strength = write_config(
        dir.path(),
        "neg.toml",
        &qubit_config("bare", "t_final = 1.0").replace("strength = 1.0", "strength = -2.0"),
    );
    let out = purify(&["simulate", &bad_strength]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("`strength`"), "{}", stderr(&out));

    let unknown = write_config(
        dir.path(),
        "unknown.toml",
        &qubit_config("bare", "t_final = 1.0\nwarmup = 3"),
    );
    let out = purify(&["simulate", &unknown]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("warmup"), "{}", stderr(&out));

    let out = purify(&["simulate", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    let ok = write_config(dir.path(), "ok.toml", &qubit_config("bare", "t_final = 0.0"));
    let out = Command::new(env!("CARGO_BIN_EXE_purify"))
        .args(["simulate", &ok])
        .env("PURIFY_WORKERS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("PURIFY_WORKERS"));

    assert_eq!(purify(&["transmogrify"]).status.code(), Some(1));
}

#[test]
fn oracle_tables() {
    let out = purify(&["oracle", "bounds", "--d-min", "2", "--d-max", "8"]);
    assert!(out.status.success());
    let table = parse(&stdout(&out)).unwrap();
    assert_eq!(table.header, vec!["D", "lower", "upper"]);
    for row in &table.rows {
        let d = row[0];
        assert!((row[1] - 2.0 / 3.0 * (d + 1.0)).abs() < 1e-15);
        assert_eq!(row[2], d * d / 2.0);
    }
    assert_eq!(table.rows.len(), 7);

    let out = purify(&["oracle", "fb-qubit", "--l0", "0.5", "--times", "0,1"]);
    let table = parse(&stdout(&out)).unwrap();
    assert_eq!(table.rows, vec![vec![0.0, 0.5], vec![1.0, 0.5 * (-2.0f64).exp()]]);
}

#[test]
fn jk_with_mixed_start_equals_bare_qubit() {
    let grid = ["--t-final", "3", "--count", "7"];
    let jk = purify(&[&["oracle", "jk", "--z0", "0"][..], &grid[..]].concat());
    let bare = purify(&[&["oracle", "bare-qubit"][..], &grid[..]].concat());
    let jk = parse(&stdout(&jk)).unwrap().column("L").unwrap();
    let bare = parse(&stdout(&bare)).unwrap().column("L").unwrap();
    for (a, b) in jk.iter().zip(&bare) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn oracle_domain_errors_are_reported() {
    let out = purify(&["oracle", "qubit-asymptote", "--times", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("γt"), "{}", stderr(&out));
    let out = purify(&["oracle", "bare-qudit", "--times", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(purify(&["oracle", "warp-drive", "--times", "1"]).status.code() == Some(1));
}

#[test]
fn verify_default_and_single_dimension() {
    let out = purify(&["verify"]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 25);
    for line in text.lines() {
        assert!(line.starts_with("PASS"), "{line}");
        let residual: f64 = line.split_whitespace().nth(4).unwrap().parse().unwrap();
        assert!(residual < 1e-10, "{line}");
    }

    let out = purify(&["verify", "--max-dim", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 5);
}

#[test]
fn verify_fault_injection_fails_with_identity_name() {
    let out = purify(&["verify", "--max-dim", "3", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("unbiased-diagonal"), "{}", stderr(&out));
    assert!(stdout(&out).contains("FAIL"));

    let out = purify(&["verify", "--max-dim", "7"]);
    assert_eq!(out.status.code(), Some(1));
}

fn speedup_value(out: &Output) -> f64 {
    assert!(out.status.success(), "{}", stderr(out));
    stdout(out)
        .lines()
        .find_map(|l| l.strip_prefix("S "))
        .unwrap()
        .trim()
        .parse()
        .unwrap()
}

#[test]
fn speedup_reports() {
    let qubit = purify(&["speedup", "--fb", "fb-qubit", "--bare", "bare-qubit", "--target", "1e-8"]);
    let s = speedup_value(&qubit);
    let formula: f64 = stdout(&qubit)
        .lines()
        .find_map(|l| l.strip_prefix("qubit finite-time S = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((s / formula - 1.0).abs() < 0.01, "{s} vs {formula}");

    let register = purify(&[
        "speedup", "--fb", "fb-register-lower", "--bare", "bare-register", "--qubits", "2", "--target", "1e-6",
    ]);
    let s = speedup_value(&register);
    assert!((s / (4.0 / 3.0) - 1.0).abs() < 0.1, "{s}");
    assert!(stdout(&register).contains("2n = "));
}

#[test]
fn speedup_of_identical_configs_is_one_and_missing_crossing_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "fb.toml",
        &qubit_config("qubit-ubb", "dt = 1e-3\nt_final = 2.0\nn_traj = 4\nsample_count = 21"),
    );
    let out = purify(&["speedup", "--fb", &cfg, "--bare", &cfg, "--target", "0.1"]);
    assert_eq!(speedup_value(&out), 1.0);

    let out = purify(&["speedup", "--fb", &cfg, "--bare", "bare-qubit", "--target", "1e-8"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}
