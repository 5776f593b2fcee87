//! End-to-end CLI tests, driven in-process through `cli::run`.

use std::fs;
use std::path::Path;

use extremefit::cli::run;
use extremefit::harness::MadReport;
use extremefit::io::CSV_HEADER;

fn args(parts: &[&str]) -> Vec<String> {
    std::iter::once("extremefit")
        .chain(parts.iter().copied())
        .map(String::from)
        .collect()
}

fn write_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("exp.conf");
    fs::write(
        &path,
        "dist = pareto\nkappa = 0.5\nn = 1825\nblock_size = 365\n\
         r_values = 1,2\npermutations = 3\nrepetitions = 4\n\
         use_permutations = true\nmaster_seed = 42\n",
    )
    .unwrap();
    path
}

fn write_series_csv(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("series.csv");
    let mut body = String::from("tmax\n");
    // five synthetic years with enough spread to fit
    let mut state = 987_654_321u64;
    for i in 0..1825 {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let noise = (state >> 40) as f64 / 16_777_216.0;
        let seasonal = 60.0 + 25.0 * (2.0 * std::f64::consts::PI * i as f64 / 365.0).sin();
        body.push_str(&format!("{:.0}\n", seasonal + 20.0 * noise));
    }
    fs::write(&path, body).unwrap();
    path
}

#[test]
fn simulate_from_config_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let code = run(args(&[
            "simulate",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]));
        assert_eq!(code, 0);
    }
    let csv_a = fs::read(out_a.join("mad_report.csv")).unwrap();
    let csv_b = fs::read(out_b.join("mad_report.csv")).unwrap();
    assert_eq!(csv_a, csv_b);
    assert!(String::from_utf8(csv_a).unwrap().starts_with(CSV_HEADER));

    let report: MadReport =
        serde_json::from_str(&fs::read_to_string(out_a.join("mad_report.json")).unwrap()).unwrap();
    assert_eq!(report.master_seed, 42);
    // r in {1,2}, metrics xi + one default quantile
    assert_eq!(report.cells.len(), 4);
}

#[test]
fn simulate_seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let out = dir.path().join("out");
    let code = run(args(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(code, 0);
    let report: MadReport =
        serde_json::from_str(&fs::read_to_string(out.join("mad_report.json")).unwrap()).unwrap();
    assert_eq!(report.master_seed, 7);
}

#[test]
fn fit_emits_estimate_json() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_series_csv(dir.path());
    let out = dir.path().join("out");
    let code = run(args(&[
        "fit",
        "--input",
        input.to_str().unwrap(),
        "--column",
        "tmax",
        "--block",
        "365",
        "--r",
        "3",
        "--permutations",
        "5",
        "--p",
        "0.9999726",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(code, 0);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("fit.json")).unwrap()).unwrap();
    assert_eq!(json["r"], 3);
    let estimate = &json["estimate"];
    assert!(estimate["params_median"]["sigma"].as_f64().unwrap() > 0.0);
    assert!(estimate["quantile_median"].as_f64().unwrap().is_finite());
    assert!(estimate["b_effective"].as_u64().unwrap() <= 5);
    assert_eq!(estimate["per_permutation"].as_array().unwrap().len(), 5);
}

#[test]
fn analyze_emits_quartile_rows_for_each_r_and_metric() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_series_csv(dir.path());
    let out = dir.path().join("out");
    let code = run(args(&[
        "analyze",
        "--input",
        input.to_str().unwrap(),
        "--column",
        "tmax",
        "--block",
        "365",
        "--r-values",
        "1,2",
        "--permutations",
        "3",
        "--groups",
        "2",
        "--seed",
        "11",
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(code, 0);
    let csv = fs::read_to_string(out.join("quartile_summary.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 1 + 4); // (r, metric) = {1,2} x {xi, quantile}
    assert!(lines[1..].iter().any(|l| l.contains(",1,,xi,")));
    assert!(lines[1..].iter().any(|l| l.contains(",quantile,")));
}

#[test]
fn bad_flags_exit_2() {
    assert_eq!(run(args(&["simulate", "--bogus"])), 2);
    assert_eq!(run(args(&["no-such-command"])), 2);
    assert_eq!(run(args(&["simulate", "--preset", "not-a-preset"])), 2);
}

#[test]
fn runtime_failures_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    // missing input file
    assert_eq!(
        run(args(&["fit", "--input", dir.path().join("nope.csv").to_str().unwrap()])),
        1
    );
    // config without preset or file
    assert_eq!(run(args(&["simulate"])), 1);
}

#[test]
fn help_exits_0() {
    assert_eq!(run(args(&["--help"])), 0);
}
