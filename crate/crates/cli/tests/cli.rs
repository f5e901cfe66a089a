use std::fs;
use std::path::PathBuf;
use std::process::Command;

use matdil::{
    builtin_fixtures, fixture, run_all, run_scenario, Report, RunOptions, Status, SuiteDetail,
};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_matdil"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("matdil-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn report_json_round_trips_for_every_fixture() {
    for s in builtin_fixtures() {
        let report = run_scenario(&s, &RunOptions::default()).unwrap();
        let text = serde_json::to_string(&report).unwrap();
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report, "{}", s.name);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}

#[test]
fn dilation_entry_has_the_documented_shape() {
    let report = run_scenario(&fixture("dft-2-2").unwrap(), &RunOptions::default()).unwrap();
    let value = serde_json::to_value(&report).unwrap();
    let dilate = value["suites"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["suite"] == "dilate")
        .unwrap();
    let d = &dilate["detail"]["dilate"];
    assert_eq!(d["N"], 4);
    assert!(d["max_residual"].as_f64().unwrap() <= d["tolerance"].as_f64().unwrap());
    assert!(d["worst_case"]["basis_index"].is_u64());
    assert!(d["worst_case"]["M"].as_u64().unwrap() >= 1);
    assert_eq!(d["pass"], true);
}

#[test]
fn same_seed_same_residuals() {
    let s = fixture("random-unitary-haar3").unwrap();
    let opts = RunOptions {
        seed: 42,
        tolerance: None,
    };
    let a = run_scenario(&s, &opts).unwrap().without_timings();
    let b = run_scenario(&s, &opts).unwrap().without_timings();
    assert_eq!(a, b);
    let c = run_scenario(&s, &RunOptions { seed: 43, ..opts })
        .unwrap()
        .without_timings();
    assert_ne!(a, c);
}

#[test]
fn parallel_matches_sequential() {
    let all = builtin_fixtures();
    let opts = RunOptions::default();
    let seq: Vec<Report> = run_all(&all, &opts, false)
        .unwrap()
        .iter()
        .map(Report::without_timings)
        .collect();
    let par: Vec<Report> = run_all(&all, &opts, true)
        .unwrap()
        .iter()
        .map(Report::without_timings)
        .collect();
    assert_eq!(seq, par);
}

#[test]
fn double_factorization_has_equal_choi_and_different_environments() {
    let sig = |name: &str| {
        let r = run_scenario(&fixture(name).unwrap(), &RunOptions::default()).unwrap();
        match &r.suite(matdil::Suite::Factorize).unwrap().detail {
            Some(SuiteDetail::Factorize(f)) => f.environment_signature.clone(),
            other => panic!("{other:?}"),
        }
    };
    assert_eq!(sig("depolarizing-swap"), vec![2]);
    assert_eq!(sig("depolarizing-pauli"), vec![1, 1, 1, 1]);
}

#[test]
fn cli_run_writes_report_and_exits_zero() {
    let config = scratch("ok.json");
    fs::write(
        &config,
        r#"{"scenarios":[
            {"name":"depol","channel":{"type":"depolarizing","n":2},"N":3},
            {"name":"schur","channel":{"type":"schur","C":[[[1,0],[0.5,0]],[[0.5,0],[1,0]]]},"suites":["validate","factorize"]}
        ]}"#,
    )
    .unwrap();
    let out = scratch("ok-report.json");
    let status = bin()
        .args([
            "run",
            config.to_str().unwrap(),
            "--seed",
            "7",
            "--parallel",
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(
        status.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&status.stdout)
    );
    let reports: Vec<Report> = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(reports.len(), 2);
    assert!(reports.iter().all(|r| r.pass && r.seed == 7));
    assert_eq!(reports[1].suites.len(), 2);
}

#[test]
fn cli_verification_failure_exits_one() {
    let config = scratch("fail.json");
    // a unitary on C² ⊗ C² that is not the swap, offered as a factorization of the swap channel
    fs::write(
        &config,
        r#"{"name":"bad-u","channel":{"type":"kraus",
            "algebra":{"blocks":[{"dim":2,"weight":1.0}]},
            "kraus":[[[[[0.7071067811865476,0],[0,0]],[[0,0],[0.7071067811865476,0]]]],
                     [[[[0,0],[0.7071067811865476,0]],[[0.7071067811865476,0],[0,0]]]]],
            "unitary":[[[1,0],[0,0],[0,0],[0,0]],[[0,0],[1,0],[0,0],[0,0]],[[0,0],[0,0],[1,0],[0,0]],[[0,0],[0,0],[0,0],[1,0]]],
            "environment":{"blocks":[{"dim":2,"weight":1.0}]}},"N":2}"#,
    )
    .unwrap();
    let out = scratch("fail-report.json");
    let status = bin()
        .args([
            "run",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(1));
    let report: Report = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report.suites[0].status, Status::Pass);
    assert_eq!(report.suites[1].status, Status::Fail);
    assert_eq!(report.suites[2].status, Status::Skipped);
    let stdout = String::from_utf8_lossy(&status.stdout);
    assert!(stdout.contains("SKIPPED"));
}

#[test]
fn cli_config_error_exits_two() {
    let config = scratch("bad.json");
    fs::write(
        &config,
        r#"{"name":"x","channel":{"type":"dft","n":2},"N":1}"#,
    )
    .unwrap();
    let status = bin()
        .args(["run", config.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&status.stderr).contains("config error at $"));
    let missing = bin()
        .args(["run", "/nonexistent/config.json"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
    let unknown = bin().args(["fixtures", "--run", "nope"]).output().unwrap();
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn cli_fixture_listing_and_run() {
    let list = bin().args(["fixtures", "--list"]).output().unwrap();
    assert_eq!(list.status.code(), Some(0));
    let text = String::from_utf8_lossy(&list.stdout);
    for name in [
        "depolarizing-swap",
        "depolarizing-pauli",
        "dft-2-2",
        "dft-2-3",
        "random-unitary-pauli",
        "schur-real-2",
        "schur-dephasing",
        "identity",
    ] {
        assert!(text.contains(name), "{name}");
    }
    let run = bin()
        .args(["fixtures", "--run", "identity", "--tol", "1e-12"])
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&run.stdout).contains("overall   PASS"));
}
