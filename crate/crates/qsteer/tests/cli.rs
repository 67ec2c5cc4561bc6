use std::fs;
use std::process::{Command, Output};

use qsteer::measurement_set_to_json;
use qsteer_core::build_standard_set;

fn qsteer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsteer"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn qsteer_env(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsteer"))
        .args(args)
        .env("QSTEER_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn first_value(o: &Output) -> f64 {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    stdout(o).lines().next().unwrap().trim().parse().unwrap()
}

#[test]
fn solve_success_ten_steps() {
    let o = qsteer(&["solve", "--objective", "success", "-T", "10", "-N", "10"]);
    assert_eq!(stdout(&o).lines().next(), Some("0.996802"));
    assert!((first_value(&o) - 0.9968).abs() < 5e-4);
}

#[test]
fn solve_arrival_prints_value_and_table() {
    let o = qsteer(&["solve", "--objective", "arrival", "-T", "5"]);
    let v = first_value(&o);
    assert!((3.0..=4.5).contains(&v), "{v}");
    let text = stdout(&o);
    let header = text.lines().find(|l| l.starts_with("x ")).unwrap();
    let row = text.lines().find(|l| l.starts_with("pi(x)")).unwrap();
    let cells = |l: &str| l.split(" | ").map(|c| c.trim().to_string()).collect::<Vec<_>>();
    let (header, row) = (cells(header), cells(row));
    let at = |label: &str| row[header.iter().position(|h| h == label).unwrap()].clone();
    assert_eq!(at("|psi_1>"), "E_5");
    assert_eq!(at("|psi_3>"), "E_1");
    assert_eq!(at("|1>"), "-");
}

#[test]
fn zero_horizon_value_is_zero() {
    let o = qsteer(&["solve", "--objective", "success", "-T", "5", "-N", "0"]);
    assert_eq!(first_value(&o), 0.0);
}

#[test]
fn one_of_t_or_n_sets_both() {
    let a = qsteer(&["solve", "-N", "4"]);
    let b = qsteer(&["solve", "-T", "4"]);
    let c = qsteer(&["solve", "-T", "4", "-N", "4"]);
    assert_eq!(a.stdout, c.stdout);
    assert_eq!(b.stdout, c.stdout);
}

#[test]
fn fidelity_objective_solves() {
    let o = qsteer(&["solve", "--objective", "fidelity", "-T", "5", "-N", "4"]);
    let s = qsteer(&["solve", "--objective", "success", "-T", "5", "-N", "5"]);
    assert!((first_value(&o) - first_value(&s)).abs() < 1e-5);
}

#[test]
fn invalid_configuration_exits_two() {
    for args in [
        vec!["solve"],
        vec!["solve", "--objective", "arrival", "-T", "5", "-N", "3"],
        vec!["solve", "-T", "1"],
        vec!["solve", "-T", "3", "--initial", "banana"],
        vec!["solve", "-T", "3", "--target", "mixed"],
        vec!["solve", "-T", "3", "--eps", "2"],
        vec!["solve", "-T", "3", "--format", "xml"],
        vec!["solve", "-T", "3", "--set-file", "/nonexistent/set.json"],
        vec!["evaluate", "--policy", "s1", "-T", "4"],
        vec!["evaluate", "--policy", "naive", "-T", "3", "-N", "4"],
    ] {
        let o = qsteer(&args);
        assert_eq!(
            o.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn solver_failures_exit_three() {
    // |+> cannot be hit exactly by rotations of the real axis.
    let o = qsteer(&["solve", "--objective", "arrival", "-T", "3", "--target", "+"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no proper policy"));

    let o = qsteer(&["graph", "-T", "50", "--max-states", "10"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("state explosion"));
}

#[test]
fn json_mode_prints_only_the_payload() {
    let o = qsteer(&["solve", "-T", "6", "-N", "6", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["objective"], "success");
    assert_eq!(v["N"], 6);
    assert_eq!(v["policy"]["kind"], "markov");
    assert!((v["value"].as_f64().unwrap() - 0.95032).abs() < 1e-5);

    let o = qsteer(&["evaluate", "--policy", "naive", "-T", "3", "--format", "json"]);
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((rows[0]["exact_value"].as_f64().unwrap() - 0.5625).abs() < 1e-12);
    assert_eq!(rows[0]["policy"], "naive");
}

#[test]
fn evaluate_benchmark_policies() {
    let o = qsteer(&["evaluate", "--policy", "s1", "-T", "3", "--format", "csv"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("policy,T,N,exact_value,mc_estimate,mc_stderr,trials,seed")
    );
    let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(fields[0], "s1");
    let v: f64 = fields[3].parse().unwrap();
    assert!((v - 0.65625).abs() < 1e-12);
}

#[test]
fn policy_file_round_trip_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("policy.json");
    let path = path.to_str().unwrap();
    let solved = qsteer(&["solve", "-T", "7", "-N", "7", "--output", path]);
    let expected = first_value(&solved);
    let o = qsteer(&[
        "evaluate",
        "-T",
        "7",
        "-N",
        "7",
        "--policy-file",
        path,
        "--format",
        "json",
    ]);
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows[0]["policy"], "file");
    assert!((rows[0]["exact_value"].as_f64().unwrap() - expected).abs() < 1e-6);
}

#[test]
fn set_file_matches_standard_set() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("set.json");
    fs::write(&path, measurement_set_to_json(&build_standard_set(5).unwrap()).unwrap()).unwrap();
    let from_file = qsteer(&["solve", "--set-file", path.to_str().unwrap(), "-N", "5"]);
    let standard = qsteer(&["solve", "-T", "5", "-N", "5"]);
    assert_eq!(from_file.stdout, standard.stdout);

    fs::write(&path, "{\"dim\": 2}").unwrap();
    let o = qsteer(&["solve", "--set-file", path.to_str().unwrap(), "-N", "5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulation_is_reproducible_and_schedule_independent() {
    let args = [
        "simulate", "-T", "8", "-N", "8", "--trials", "20000", "--seed", "42", "--format", "csv",
    ];
    let a = qsteer_env(&args, "1");
    let b = qsteer_env(&args, "4");
    let c = qsteer_env(&args, "4");
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(b.stdout, c.stdout);

    let text = stdout(&a);
    let fields: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let exact: f64 = fields[3].parse().unwrap();
    let estimate: f64 = fields[4].parse().unwrap();
    let stderr: f64 = fields[5].parse().unwrap();
    assert!((estimate - exact).abs() <= 4.0 * stderr);
    assert_eq!(fields[6], "20000");
    assert_eq!(fields[7], "42");
}

#[test]
fn simulate_fidelity_and_arrival() {
    let o = qsteer(&[
        "simulate",
        "--objective",
        "fidelity",
        "-T",
        "4",
        "-N",
        "3",
        "--trials",
        "20000",
        "--format",
        "json",
    ]);
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let (exact, mc, se) = (
        rows[0]["exact_value"].as_f64().unwrap(),
        rows[0]["mc_estimate"].as_f64().unwrap(),
        rows[0]["mc_stderr"].as_f64().unwrap(),
    );
    assert!((exact - mc).abs() <= 4.0 * se, "{exact} {mc} {se}");

    let o = qsteer(&[
        "simulate",
        "--objective",
        "arrival",
        "-T",
        "5",
        "--trials",
        "20000",
        "--format",
        "json",
    ]);
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(rows[0]["N"].is_null());
    let (exact, mc, se) = (
        rows[0]["exact_value"].as_f64().unwrap(),
        rows[0]["mc_estimate"].as_f64().unwrap(),
        rows[0]["mc_stderr"].as_f64().unwrap(),
    );
    assert!((exact - mc).abs() <= 4.0 * se, "{exact} {mc} {se}");
}

fn csv_rows(o: &Output) -> Vec<Vec<f64>> {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    stdout(o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn sweep_fig1_dominance() {
    let rows = csv_rows(&qsteer(&["sweep", "fig1", "--format", "csv"]));
    assert_eq!(
        rows.iter().map(|r| r[0] as usize).collect::<Vec<_>>(),
        (3..=10).collect::<Vec<_>>()
    );
    for r in &rows {
        assert!(r[3] > r[2] + 0.01, "{r:?}");
    }
}

#[test]
fn sweep_fig2_limit_curve() {
    let rows = csv_rows(&qsteer(&[
        "sweep",
        "fig2",
        "--t-values",
        "10,100,1000",
        "--format",
        "csv",
    ]));
    assert_eq!(rows.len(), 24);
    let curve = |t: f64| rows.iter().filter(|r| r[0] == t).map(|r| r[2]).collect::<Vec<_>>();
    let (c100, c1000) = (curve(100.0), curve(1000.0));
    for (a, b) in c100.iter().zip(&c1000) {
        assert!((a - b).abs() < 0.01, "{a} vs {b}");
    }
    let c10 = curve(10.0);
    assert!((c10[7] - 0.996802).abs() < 1e-6);
}

#[test]
fn sweep_fig3_band() {
    let o = qsteer(&["sweep", "fig3", "--format", "csv"]);
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 29);
    assert_eq!(rows[0][0], 2.0);
    for r in rows.iter().filter(|r| r[0] >= 3.0) {
        assert!((3.0..=4.5).contains(&r[1]), "{r:?}");
    }
    let again = qsteer(&["sweep", "fig3", "--format", "csv"]);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn graph_export() {
    let o = qsteer(&["graph", "-T", "4", "--format", "json"]);
    let g: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(g["states"].as_array().unwrap().len(), 8);
    assert_eq!(g["initial_id"], 0);
    assert_eq!(g["labels"][0], "|0>");
    assert!(g["horizon"].is_null());

    let o = qsteer(&["graph", "-T", "5", "-N", "1", "--format", "csv"]);
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("id,label,depth,expanded,target"));
    assert_eq!(text.lines().count(), 1 + 9);
}

#[test]
fn output_flag_writes_file_instead_of_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.csv");
    let o = qsteer(&[
        "evaluate",
        "--policy",
        "naive",
        "-T",
        "10",
        "--format",
        "csv",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("policy,T,N"));
}
