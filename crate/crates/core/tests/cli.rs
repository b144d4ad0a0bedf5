use std::process::{Command, Output};

use rumourlab::experiment::{ExperimentResult, Rows};

fn rumourlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rumourlab")).args(args).env_remove("RUMOURLAB_SEED").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn exact_line_row() {
    let o = rumourlab(&["exact", "--dim", "1", "--dist", "const:r=1", "--p", "0.5", "--k", "2", "--sites", "3", "--seed", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "i,p,k,prob,method\n3,0.5,2,0.75,dp\n");
}

#[test]
fn printed_grid_formula_divergence_exits_3() {
    let args = ["exact", "--dim", "2", "--dist", "const:r=1", "--p", "0.5", "--k", "2", "--sites", "2,2", "--method", "paperEq11", "--seed", "1"];
    let o = rumourlab(&args);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout(&o), "i,j,p,k,prob,method\n2,2,0.5,2,0.1875,paperEq11\n2,2,0.5,2,0.3125,dp\n");
    assert!(String::from_utf8_lossy(&o.stderr).contains("disagree"));
    let mut allowed = args.to_vec();
    allowed.push("--allow-paper-formula-divergence");
    assert_eq!(rumourlab(&allowed).status.code(), Some(0));
}

#[test]
fn p_zero_gives_certain_under_coverage() {
    let o = rumourlab(&["exact", "--p", "0", "--sites", "1..5", "--method", "dp,closedForm,oracle", "--dist", "const:r=3", "--seed", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(3) == Some("1")), "{text}");
}

#[test]
fn full_cover_has_no_under_covered_sites() {
    let o = rumourlab(&["simulate", "--p", "1", "--dist", "const:r=2", "--k", "1", "--n", "200", "--trials", "10", "--seed", "3", "--json"]);
    assert!(o.status.success());
    let r: ExperimentResult = serde_json::from_str(&stdout(&o)).unwrap();
    let Rows::Trials(rows) = &r.rows else { panic!("expected per-trial rows") };
    assert!(rows.iter().all(|t| t.last_under_covered.is_none() && t.deficient_fraction == 0.0));
}

#[test]
fn heavy_reverse_tail_fills_the_window() {
    let o = rumourlab(&["simulate", "--model", "reverse", "--dist", "power:beta=0.5", "--p", "0.5", "--k", "2", "--n", "10000", "--trials", "5", "--seed", "8", "--json"]);
    assert!(o.status.success());
    let r: ExperimentResult = serde_json::from_str(&stdout(&o)).unwrap();
    let deficient = r.summary["deficientFraction"]["mean"].as_f64().unwrap();
    assert!(1.0 - deficient >= 0.99, "{deficient}");
}

#[test]
fn firework_scan_decreases_in_p() {
    let o = rumourlab(&["scan", "--dist", "pareto:alpha=4", "--grid-p", "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9", "--n", "500", "--trials", "100", "--seed", "2"]);
    assert!(o.status.success());
    let means: Vec<f64> = stdout(&o).lines().skip(1).map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert_eq!(means.len(), 9);
    // Same seed at every p, so each trial's statistic is monotone in p.
    assert!(means.windows(2).all(|w| w[1] <= w[0]), "{means:?}");
}

#[test]
fn reverse_scan_over_tail_exponent() {
    let o = rumourlab(&[
        "scan", "--model", "reverse", "--grid-dist", "power:beta=0.5,power:beta=1.5,power:beta=2.5", "--n", "5000", "--trials", "5", "--initiators", "--seed", "4",
    ]);
    assert!(o.status.success());
    let means: Vec<f64> = stdout(&o).lines().skip(1).map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert!(means[0] >= 0.99, "{means:?}");
    assert!(means[1] < 0.99 && means[2] < 0.99, "{means:?}");
}

#[test]
fn single_point_grid_gives_one_row() {
    let o = rumourlab(&["scan", "--grid-lambda", "0.5", "--window", "200", "--trials", "4", "--seed", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 2);
    assert!(stdout(&o).starts_with("param,value,statistic,mean,ci_low,ci_high\n"));
}

#[test]
fn diagnose_rows() {
    let o = rumourlab(&["diagnose", "--p", "0.5", "--k", "1", "--n", "4096", "--seed", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("n,partial_sum,growth_ratio,decay_exponent\n1,"));
    assert!(text.lines().last().unwrap().starts_with("4096,"));
}

#[test]
fn exit_codes() {
    assert_eq!(rumourlab(&["exact", "--sites", "3", "--strict"]).status.code(), Some(2));
    assert_eq!(rumourlab(&["exact", "--sites", "3", "--seed", "1", "--dist", "pareto:alpha=-1"]).status.code(), Some(2));
    assert_eq!(rumourlab(&["exact", "--sites", "x", "--seed", "1"]).status.code(), Some(2));
    assert_eq!(rumourlab(&["simulate", "--seed", "1", "--grid-p"]).status.code(), Some(2));
    assert_eq!(rumourlab(&["scan", "--seed", "1"]).status.code(), Some(2));
    assert_eq!(rumourlab(&["bogus"]).status.code(), Some(2));
    assert_eq!(rumourlab(&["exact", "--sites", "3", "--seed", "1", "--out", "/nonexistent-dir/run"]).status.code(), Some(4));
}

#[test]
fn seed_comes_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_rumourlab"))
        .args(["continuum", "--lambda", "0.1", "--window", "50", "--trials", "2", "--strict", "--json"])
        .env("RUMOURLAB_SEED", "77")
        .output()
        .unwrap();
    assert!(o.status.success());
    let r: ExperimentResult = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.spec.seed, 77);
}

#[test]
fn generated_seed_is_reported_and_recorded() {
    let o = rumourlab(&["exact", "--sites", "2", "--json"]);
    assert!(o.status.success());
    let r: ExperimentResult = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(String::from_utf8_lossy(&o.stderr).contains(&format!("generated seed {}", r.spec.seed)));
}

#[test]
fn svg_written_only_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("scan");
    let stem_s = stem.to_str().unwrap();
    let o = rumourlab(&["scan", "--grid-p", "0.3,0.6", "--n", "50", "--trials", "20", "--seed", "1", "--out", stem_s]);
    assert!(o.status.success());
    assert!(dir.path().join("scan.csv").exists() && dir.path().join("scan.json").exists());
    assert!(!dir.path().join("scan.svg").exists());
    let o = rumourlab(&["scan", "--grid-p", "0.3,0.6", "--n", "50", "--trials", "20", "--seed", "1", "--out", stem_s, "--svg"]);
    assert!(o.status.success());
    let svg = std::fs::read_to_string(dir.path().join("scan.svg")).unwrap();
    assert!(svg.contains("mean lastUnderCovered against p"));
}

#[test]
fn json_parses_back_to_the_same_result() {
    let o = rumourlab(&["simulate", "--dim", "2", "--n", "10", "--sites", "2,2;4,1", "--trials", "300", "--seed", "9", "--json"]);
    let text = stdout(&o);
    let r: ExperimentResult = serde_json::from_str(&text).unwrap();
    assert_eq!(rumourlab::experiment::to_json(&r), text);
    assert!(r.wall_time_ms.is_none());
}
