use std::path::Path;
use std::process::{Command, Output};

use opjensen::campaign::{expand_cells, schedule};
use opjensen::{cli_entry, CampaignConfig, DimSpec};
use opjensen_core::jensen_checks::{AblationResult, CheckReport};

fn opjensen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opjensen"))
        .args(args)
        .env_remove("OPJENSEN_SEED")
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn write_config(dir: &Path, cfg: &CampaignConfig) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

fn cfl_config(trials: usize, seed: u64) -> CampaignConfig {
    CampaignConfig {
        checks: vec!["check_cfl".into()],
        trials,
        master_seed: seed,
        ..serde_json::from_str(r#"{"checks": ["check_cfl"], "trials": 1}"#).unwrap()
    }
}

fn read_reports(path: &Path) -> Vec<CheckReport> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn check_subcommand_passes_on_cfl() {
    let out = opjensen(&[
        "check", "--name", "check_cfl", "--d1", "2", "--d2", "2", "--function", "square", "--seed", "7",
        "--trials", "100",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["total"], 100);
    assert_eq!(summary["failed"], 0);
}

#[test]
fn unknown_function_is_a_usage_error_listing_the_catalog() {
    let out = opjensen(&["check", "--name", "check_cfl", "--function", "cosh"]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("cosh"), "{err}");
    for name in ["square", "quartic", "hinge", "shifted_square", "power"] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&opjensen(&["check", "--name", "check_nothing"])), 2);
    assert_eq!(code(&opjensen(&["check", "--name", "check_petz", "--map", "cp"])), 2);
    assert_eq!(code(&opjensen(&["check", "--name", "check_cfl", "--trials", "0"])), 2);
    assert_eq!(code(&opjensen(&["check", "--name", "check_cfl", "--branch", "sideways"])), 2);
    assert_eq!(code(&opjensen(&["check", "--name", "check_state_version", "--function", "quartic"])), 2);
    assert_eq!(code(&opjensen(&["search", "--target", "drop_everything"])), 2);
    assert_eq!(code(&opjensen(&["frobnicate"])), 2);
    assert_eq!(code(&opjensen(&["campaign", "--config", "/nonexistent/config.json"])), 2);
    assert_eq!(code(&opjensen(&["--help"])), 0);
}

#[test]
fn empty_or_malformed_configs_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = cfl_config(10, 1);
    cfg.checks.clear();
    let path = write_config(dir.path(), &cfg);
    assert_eq!(code(&opjensen(&["campaign", "--config", &path])), 2);

    std::fs::write(&path, r#"{"checks": ["check_cfl"], "trials": 5, "colour": "red"}"#).unwrap();
    assert_eq!(code(&opjensen(&["campaign", "--config", &path])), 2);

    let mut cfg = cfl_config(10, 1);
    cfg.weights = vec![(0.0, 1.0)];
    assert!(cfg.validate().is_err());
    let mut cfg = cfl_config(10, 1);
    cfg.checks.push("check_cfl".into());
    assert!(cfg.validate().is_err());
}

#[test]
fn dims_accept_scalars_and_pairs() {
    let cfg: CampaignConfig =
        serde_json::from_str(r#"{"checks": ["check_cfl"], "trials": 3, "dims": [3, [2, 4]]}"#).unwrap();
    assert_eq!(cfg.dims, vec![DimSpec::Square(3), DimSpec::Pair(2, 4)]);
    assert_eq!(cfg.dims[0].pair(), (3, 3));
}

#[test]
fn campaign_output_is_byte_identical_across_runs_and_job_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = cfl_config(100, 1);
    cfg.out_path = Some(dir.path().join("a.jsonl"));
    let path = write_config(dir.path(), &cfg);
    let b = dir.path().join("b.jsonl");
    assert_eq!(code(&opjensen(&["campaign", "--config", &path, "--jobs", "1"])), 0);
    assert_eq!(
        code(&opjensen(&["campaign", "--config", &path, "--jobs", "3", "--out", b.to_str().unwrap()])),
        0
    );
    let a_bytes = std::fs::read(dir.path().join("a.jsonl")).unwrap();
    assert!(!a_bytes.is_empty());
    assert_eq!(a_bytes, std::fs::read(&b).unwrap());
    assert_eq!(
        std::fs::read(dir.path().join("a.csv")).unwrap(),
        std::fs::read(dir.path().join("b.csv")).unwrap()
    );
    assert_eq!(read_reports(&b).len(), 100);
}

#[test]
fn seed_changes_output_and_env_seed_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let run = |extra: &[&str], env: Option<&str>, name: &str| {
        let out = dir.path().join(name);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_opjensen"));
        cmd.args(["check", "--name", "check_cfl", "--trials", "5", "--out", out.to_str().unwrap()])
            .args(extra)
            .env_remove("OPJENSEN_SEED");
        if let Some(v) = env {
            cmd.env("OPJENSEN_SEED", v);
        }
        let status = cmd.output().unwrap().status;
        (status.code().unwrap(), std::fs::read(&out).unwrap_or_default())
    };
    let (c0, seed3) = run(&["--seed", "3"], None, "s3.jsonl");
    let (c1, env3) = run(&[], Some("3"), "e3.jsonl");
    let (c2, seed4) = run(&["--seed", "4"], None, "s4.jsonl");
    assert_eq!((c0, c1, c2), (0, 0, 0));
    assert_eq!(seed3, env3);
    assert_ne!(seed3, seed4);
    let (bad, _) = run(&[], Some("many"), "bad.jsonl");
    assert_eq!(bad, 2);
}

#[test]
fn zero_tolerance_duality_exits_1_and_summaries_are_conserved() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("dual.jsonl");
    let o = opjensen(&[
        "check", "--name", "check_partial_trace_duality", "--d1", "3", "--d2", "2", "--w1", "0.3",
        "--w2", "2.5", "--tol", "0", "--trials", "40", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    let reports = read_reports(&out);
    assert_eq!(reports.len(), 40);
    let failures = reports.iter().filter(|r| !r.pass).count();
    assert!(failures > 0);

    let mut csv = csv::Reader::from_path(dir.path().join("dual.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = csv.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 1);
    let headers = csv.headers().unwrap().clone();
    let field = |name: &str| &rows[0][headers.iter().position(|h| h == name).unwrap()];
    assert_eq!(field("trials"), "40");
    assert_eq!(field("failures"), failures.to_string());
    assert_eq!(field("check"), "check_partial_trace_duality");
    let min_gap: f64 = field("min_gap").parse().unwrap();
    let expected = reports.iter().map(|r| r.gap).fold(f64::INFINITY, f64::min);
    assert_eq!(min_gap, expected);

    // every failing line carries a replayable witness
    let failing = reports.iter().find(|r| !r.pass).unwrap();
    let wpath = dir.path().join("witness.json");
    std::fs::write(&wpath, serde_json::to_string(failing).unwrap()).unwrap();
    let o = opjensen(&["replay", "--witness", wpath.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("gap="));
}

#[test]
fn search_finds_and_replays_the_zero_map_violation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("search.json");
    let o = opjensen(&[
        "search", "--target", "petz_drop_f0", "--trials", "10", "--seed", "1", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let result: AblationResult = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert!(result.violations > 0);
    let witness = result.witness.as_ref().unwrap();
    assert!(witness.witness.is_some());
    assert!((witness.gap + 2.0).abs() <= 1e-12);

    let o = opjensen(&["replay", "--witness", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("gap=-2e0"), "{stdout}");

    // a tampered record no longer reproduces
    let mut tampered = witness.clone();
    tampered.gap += 1e-6;
    let tpath = dir.path().join("tampered.json");
    std::fs::write(&tpath, serde_json::to_string(&tampered).unwrap()).unwrap();
    assert_eq!(code(&opjensen(&["replay", "--witness", tpath.to_str().unwrap()])), 3);

    let passing = CheckReport { witness: None, ..tampered };
    std::fs::write(&tpath, serde_json::to_string(&passing).unwrap()).unwrap();
    assert_eq!(code(&opjensen(&["replay", "--witness", tpath.to_str().unwrap()])), 2);
}

#[test]
fn in_process_entry_matches_the_binary() {
    assert_eq!(
        cli_entry(["opjensen", "check", "--name", "check_vector_jensen", "--trials", "20"], None),
        0
    );
    assert_eq!(cli_entry(["opjensen", "check", "--name", "check_cfl", "--d1", "0"], None), 2);
}

#[test]
fn trials_are_spread_round_robin_over_cells() {
    let cfg: CampaignConfig = serde_json::from_str(
        r#"{"checks": ["check_cfl", "check_partial_trace_duality"], "trials": 5,
            "dims": [2, 3], "functions": ["square", "abs"]}"#,
    )
    .unwrap();
    let (cells, skipped) = expand_cells(&cfg).unwrap();
    assert!(skipped.is_empty());
    // cfl: 2 dims × 2 functions; duality: 2 dims × 1 weight pair
    assert_eq!(cells.len(), 6);
    let order = schedule(&cells, cfg.trials);
    assert_eq!(order.len(), 10);
    assert_eq!(&order[..5], &[(0, 0), (1, 0), (2, 0), (3, 0), (0, 1)]);
    assert_eq!(&order[5..], &[(4, 0), (5, 0), (4, 1), (5, 1), (4, 2)]);
}

#[test]
fn incompatible_cells_are_skipped_not_run() {
    let cfg: CampaignConfig = serde_json::from_str(
        r#"{"checks": ["check_petz"], "trials": 30, "functions": ["exp", "square"],
            "map_kinds": ["zero", "ucp_stinespring"]}"#,
    )
    .unwrap();
    let run = opjensen::run_campaign(&cfg, Some(2)).unwrap();
    assert_eq!(run.summary.skipped_cells, 1);
    assert!(run.skipped[0].contains("zero"));
    assert_eq!(run.summary.total, 30);
    assert_eq!(run.summary.failed, 0);
    for (_, r) in &run.reports {
        assert!(!(r.params["map_kind"] == "zero" && r.params["function"] == "exp"));
    }
}
