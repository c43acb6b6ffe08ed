//! End-to-end tests of the command-line binary: files in, files/reports
//! out, exact values on the hand-checkable fixtures.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use spillbound::io::population_to_json;
use spillbound::verify::strong_instrument_population;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spillbound"))
}

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir()
        .join("spillbound-cli-tests")
        .join(format!("{name}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

fn run_json(args: &[&str]) -> Value {
    serde_json::from_str(&run_ok(args)).expect("valid JSON report")
}

fn s(p: &Path) -> String {
    p.display().to_string()
}

#[test]
fn toy_round_trip_reproduces_hand_estimates() {
    let dir = workdir("toy-round-trip");
    let trial = dir.join("toy.csv");
    run_ok(&["simulate", "--toy-a", "--assign", "1,0", "--out", &s(&trial)]);
    assert_eq!(
        std::fs::read_to_string(&trial).unwrap(),
        "cluster_id,z,d,y\n1,1,1,1\n1,1,0,1\n2,0,0,0\n2,0,0,0\n"
    );

    let report = run_json(&["estimate", &s(&trial)]);
    let est = &report["estimates"];
    assert_eq!(est["tau_y_hat"], 1.0);
    assert_eq!(est["tau_d_hat"], 0.5);
    assert_eq!(est["tau_hat"], 2.0);
    assert_eq!(est["n_co_hat"], 2.0);
    assert_eq!(est["n_nt_hat"], 2.0);
    // tau_hat 2 with two compliers and two never-takers pins both
    // intervals to the single point 1
    let b = &report["bounds"];
    assert_eq!(b["te_lower"], 1.0);
    assert_eq!(b["te_upper"], 1.0);
    assert_eq!(b["pe_lower"], 1.0);
    assert_eq!(b["pe_upper"], 1.0);
    assert_eq!(b["mode"], "binary");
    assert_eq!(report["bounds_diagnostic"], Value::Null);
}

#[test]
fn toy_reverse_assignment_rejects_bounds_with_diagnostic() {
    let dir = workdir("toy-reverse");
    let trial = dir.join("toy.csv");
    run_ok(&["simulate", "--toy-a", "--assign", "0,1", "--out", &s(&trial)]);

    let report = run_json(&["estimate", &s(&trial)]);
    assert_eq!(report["estimates"]["tau_hat"], 1.0);
    assert_eq!(report["estimates"]["p_co_hat"], 1.0);
    assert_eq!(report["bounds"], Value::Null);
    let diag = report["bounds_diagnostic"].as_str().unwrap();
    assert!(diag.contains("never-taker"), "diagnostic: {diag}");
}

#[test]
fn same_seed_reruns_are_byte_identical() {
    let dir = workdir("determinism");
    let simulate = |seed: &str, stem: &str| -> (Vec<u8>, Vec<u8>) {
        let trial = dir.join(format!("{stem}.csv"));
        let pop = dir.join(format!("{stem}.json"));
        run_ok(&[
            "simulate", "--clusters", "12", "--treated", "6", "--seed", seed, "--out", &s(&trial),
            "--pop-out", &s(&pop),
        ]);
        (std::fs::read(&trial).unwrap(), std::fs::read(&pop).unwrap())
    };
    let (t1, p1) = simulate("99", "a");
    let (t2, p2) = simulate("99", "b");
    assert_eq!(t1, t2, "trial files differ between reruns");
    assert_eq!(p1, p2, "population files differ between reruns");

    let (t3, _) = simulate("100", "c");
    assert_ne!(t1, t3, "different seeds should differ");
}

#[test]
fn curves_emit_six_rows_and_empty_header_only() {
    let csv = run_ok(&[
        "curves",
        "--format",
        "csv",
        "--taus",
        "0.75,1.25",
        "--compliance",
        "0.25,0.5,0.75",
    ]);
    let lines: Vec<&str> = csv.trim_end().lines().collect();
    assert_eq!(lines[0], "tau,p_co,te_lo,te_hi,pe_lo,pe_hi");
    assert_eq!(lines.len(), 7);

    let empty = run_ok(&["curves", "--format", "csv", "--taus", ""]);
    assert_eq!(empty, "tau,p_co,te_lo,te_hi,pe_lo,pe_hi\n");
}

#[test]
fn impossible_confirms_every_target() {
    let report = run_json(&["impossible"]);
    assert_eq!(report["all_confirmed"], true);
    let verdicts = report["verdicts"].as_array().unwrap();
    assert_eq!(verdicts.len(), 3);
    for v in verdicts {
        assert_eq!(v["conclusion"], "counterexample confirmed");
        assert_eq!(v["indexed_identical"], false);
        assert_eq!(v["distribution_identical"], true);
    }
}

#[test]
fn verify_selector_reports_pass() {
    let report = run_json(&["verify", "unbiasedness", "--pops", "5"]);
    assert_eq!(report["all_pass"], true);
    let checks = report["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 1);
    assert_eq!(checks[0]["name"], "estimator-unbiasedness");
    assert_eq!(checks[0]["pass"], true);
}

#[test]
fn region_on_strong_instrument_trial_stays_inside_unit_square() {
    let dir = workdir("region-strong");
    let pop_path = dir.join("pop.json");
    std::fs::write(
        &pop_path,
        population_to_json(&strong_instrument_population(40)).unwrap(),
    )
    .unwrap();

    let trial = dir.join("trial.csv");
    run_ok(&[
        "simulate", "--population", &s(&pop_path), "--treated", "100", "--seed", "3", "--out",
        &s(&trial),
    ]);

    let report = run_json(&["region", &s(&trial), "--grid", "61"]);
    assert_eq!(report["p_co_hat"], 0.9);
    let y = report["y_extent"].as_array().unwrap();
    let (lo, hi) = (y[0].as_f64().unwrap(), y[1].as_f64().unwrap());
    assert!(
        0.0 < lo && hi < 1.0,
        "effect-axis extent [{lo}, {hi}] should be strictly inside the unit interval"
    );
    let rows = report["raster"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 61);
    assert!(rows.iter().any(|r| r.as_str().unwrap().contains('1')));
}

#[test]
fn region_with_alpha_near_one_collapses_to_a_segment() {
    let dir = workdir("region-segment");
    let pop_path = dir.join("pop.json");
    std::fs::write(
        &pop_path,
        population_to_json(&strong_instrument_population(40)).unwrap(),
    )
    .unwrap();
    let trial = dir.join("trial.csv");
    run_ok(&[
        "simulate", "--population", &s(&pop_path), "--treated", "100", "--seed", "5", "--out",
        &s(&trial),
    ]);

    let report = run_json(&["region", &s(&trial), "--alpha", "0.9999999", "--grid", "21"]);
    let seg = &report["band_segment"];
    let width = seg["tau_upper"].as_f64().unwrap() - seg["tau_lower"].as_f64().unwrap();
    assert!(
        (0.0..1e-5).contains(&width),
        "near-degenerate alpha should give a hairline segment, got width {width}"
    );
}

#[test]
fn estimate_reports_parse_errors_with_row_numbers() {
    let dir = workdir("parse-error");
    let bad = dir.join("bad.csv");
    std::fs::write(&bad, "cluster_id,z,d,y\n1,1,1,oops\n").unwrap();
    let out = run(&["estimate", &s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(":2:"), "stderr should name row 2: {err}");
}

#[test]
fn estimate_accepts_renamed_columns_via_map() {
    let dir = workdir("column-map");
    let trial = dir.join("renamed.csv");
    std::fs::write(
        &trial,
        "school,assigned,took,infected\nA,1,1,1\nA,1,0,1\nB,0,0,0\nB,0,0,0\n",
    )
    .unwrap();
    let report = run_json(&[
        "estimate",
        &s(&trial),
        "--map",
        "cluster_id=school,z=assigned,d=took,y=infected",
    ]);
    assert_eq!(report["estimates"]["tau_hat"], 2.0);
}

#[test]
fn raster_csv_matches_inline_grid() {
    let dir = workdir("raster-csv");
    let pop_path = dir.join("pop.json");
    std::fs::write(
        &pop_path,
        population_to_json(&strong_instrument_population(10)).unwrap(),
    )
    .unwrap();
    let trial = dir.join("trial.csv");
    run_ok(&[
        "simulate", "--population", &s(&pop_path), "--treated", "25", "--seed", "11", "--out",
        &s(&trial),
    ]);
    let raster = dir.join("raster.csv");
    let report = run_json(&[
        "region",
        &s(&trial),
        "--grid",
        "21",
        "--raster-out",
        &s(&raster),
    ]);
    let lines: Vec<String> = std::fs::read_to_string(&raster)
        .unwrap()
        .lines()
        .map(str::to_string)
        .collect();
    assert_eq!(lines[0], "x,y,inside");
    assert_eq!(lines.len(), 1 + 21 * 21);
    // spot-check one cell against the inline rows: row-major, y outer
    let rows = report["raster"]["rows"].as_array().unwrap();
    let inline_first = rows[0].as_str().unwrap().chars().next().unwrap();
    let csv_first = lines[1].split(',').nth(2).unwrap();
    assert_eq!(csv_first, if inline_first == '1' { "1" } else { "0" });
}
