//! End-to-end checks of the command-line interface: output determinism,
//! agreement between emitted sweep values and direct library calls, and
//! the documented exit codes.

use std::process::{Command, Output};

use vopq::analysis::{self, DetectionStrategy};

fn vopq_cmd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vopq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = vopq_cmd(args);
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

#[test]
fn simulate_is_byte_deterministic() {
    let args = [
        "simulate",
        "--protocol",
        "b92",
        "--theta0",
        "0.3927",
        "--theta1",
        "-0.3927",
        "--detection",
        "povm",
        "--n",
        "100000",
        "--seed",
        "7",
    ];
    let first = vopq_cmd(&args);
    let second = vopq_cmd(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);

    // Unambiguous detection of the near-pi/8 pair transfers about two
    // bits per photon.
    let report: serde_json::Value =
        serde_json::from_slice(&first.stdout).expect("json report");
    let k = report["k_expected"].as_f64().unwrap();
    let se = report["k_expected_se"].as_f64().unwrap();
    assert!((k - 2.0).abs() < 6.0 * se, "k = {k}");
    assert!((0.0..=2.5).contains(&k));
}

#[test]
fn simulate_json_reports_expected_fields() {
    let text = stdout_of(&[
        "simulate",
        "--protocol",
        "bb84",
        "--encoding",
        "vopq",
        "--n",
        "50000",
        "--seed",
        "7",
    ]);
    let report: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["protocol"], "bb84");
    assert_eq!(report["seed"], 7);
    let k = report["k_expected"].as_f64().unwrap();
    let se = report["k_expected_se"].as_f64().unwrap();
    assert!(se > 0.0);
    assert!((k - 1.0).abs() < 6.0 * se, "k = {k}, se = {se}");
    let h = report["h"].as_f64().unwrap();
    assert!(h <= 1.0);
}

#[test]
fn simulate_csv_has_header_and_row() {
    let text = stdout_of(&[
        "simulate",
        "--protocol",
        "b92",
        "--theta0",
        "0.4",
        "--theta1",
        "-0.4",
        "--n",
        "5000",
        "--format",
        "csv",
    ]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("protocol,encoding,detection"));
    assert_eq!(lines[0].split(',').count(), lines[1].split(',').count());
}

#[test]
fn kmax_sweep_matches_library_and_marks_origin() {
    let text = stdout_of(&["sweep", "--surface", "kmax-povm", "--grid", "5"]);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "sin_theta0,sin_theta1,kmax");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 25);
    assert_eq!(rows[0][2], "NA");

    for row in &rows[1..] {
        let x0: f64 = row[0].parse().unwrap();
        let x1: f64 = row[1].parse().unwrap();
        let value: f64 = row[2].parse().unwrap();
        let direct =
            analysis::kmax_surface(x0.asin(), x1.asin(), DetectionStrategy::Povm).unwrap();
        assert!(
            (value - direct).abs() < 1e-12,
            "row {row:?} disagrees with direct evaluation {direct}"
        );
    }

    // On the diagonal below sin(pi/4) the unambiguous yield is exactly 2.
    let diagonal = rows
        .iter()
        .find(|r| r[0] == r[1] && r[0].starts_with("2.5"))
        .unwrap();
    assert_eq!(diagonal[2].parse::<f64>().unwrap(), 2.0);
}

#[test]
fn loss_sweep_matches_library() {
    let text = stdout_of(&["sweep", "--surface", "loss-limits", "--grid", "8"]);
    let direct = analysis::loss_limit_curve(0.95, 0.2, 8, (0.5, 1.0), DetectionStrategy::Pvm)
        .unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), direct.len());
    for (row, point) in rows.iter().zip(direct) {
        let fields: Vec<&str> = row.split(',').collect();
        assert!((fields[0].parse::<f64>().unwrap() - point.cos2_theta1).abs() < 1e-12);
        assert!((fields[1].parse::<f64>().unwrap() - point.gamma_max).abs() < 1e-12);
        let l: f64 = fields[2].parse().unwrap();
        assert!((l - point.l_max_km.unwrap()).abs() < 1e-9 * l.max(1.0));
    }
}

#[test]
fn loss_sweep_peaks_at_the_symmetric_point() {
    // The emitted loss ceiling is largest where the two squared vacuum
    // weights coincide.
    let text = stdout_of(&["sweep", "--surface", "loss-limits", "--grid", "60"]);
    let rows: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let fields: Vec<&str> = l.split(',').collect();
            (fields[0].parse().unwrap(), fields[1].parse().unwrap())
        })
        .collect();
    let (argmax, _) = rows
        .iter()
        .copied()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    let step = 0.5 / 61.0;
    assert!(
        (argmax - 0.95).abs() <= step + 1e-12,
        "gamma_max peaks at cos2_theta1 = {argmax}"
    );
}

#[test]
fn gamma0_sweep_json_round_trips() {
    let text = stdout_of(&[
        "sweep",
        "--surface",
        "gamma0",
        "--grid",
        "6",
        "--format",
        "json",
    ]);
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["surface"], "gamma0");
    assert_eq!(value["rows"].as_array().unwrap().len(), 6);
    for row in value["rows"].as_array().unwrap() {
        let pvm = row[1].as_f64().unwrap();
        let povm = row[2].as_f64().unwrap();
        assert!(povm >= pvm - 1e-12);
    }
}

#[test]
fn sweep_writes_output_file() {
    let dir = std::env::temp_dir().join(format!("vopq-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("kmax.csv");
    let out = vopq_cmd(&[
        "sweep",
        "--surface",
        "kmax-pvm",
        "--grid",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let written = std::fs::read_to_string(&path).unwrap();
    assert!(written.starts_with("sin_theta0,sin_theta1,kmax\n"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn eve_boundary_pair_blocks_nothing_and_reads_clean() {
    // Orthogonal symmetric pair: Eve's inconclusive probability vanishes,
    // so she forwards everything and the loss test stays clean.
    let text = stdout_of(&[
        "eve",
        "--theta",
        "0.7853981633974483",
        "--gamma",
        "0.0",
        "--n",
        "50000",
        "--seed",
        "5",
    ]);
    let report: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["eve_verdict"], "clean");
    assert_eq!(report["non_arrival_rate"].as_f64().unwrap(), 0.0);
}

#[test]
fn eve_detects_heavy_blocking() {
    let text = stdout_of(&[
        "eve", "--theta", "0.2", "--gamma", "0.05", "--n", "100000", "--seed", "3",
    ]);
    let report: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["eve_verdict"], "suspect");
    let blocked = report["non_arrival_rate"].as_f64().unwrap();
    assert!(blocked > 0.9, "blocked = {blocked}");
}

#[test]
fn usage_errors_exit_2() {
    let out = vopq_cmd(&["simulate", "--badflag"]);
    assert_eq!(out.status.code(), Some(2));
    let out = vopq_cmd(&["simulate", "--protocol", "b92", "--gamma", "0.1", "--alpha", "0.2", "--length", "5", "--theta0", "0.1", "--theta1", "-0.1"]);
    assert_eq!(out.status.code(), Some(2), "conflicting loss flags");
    let out = vopq_cmd(&["simulate", "--protocol", "b92", "--n", "10"]);
    assert_eq!(out.status.code(), Some(2), "b92 without angles");
    let out = vopq_cmd(&["eve", "--n", "10"]);
    assert_eq!(out.status.code(), Some(2), "eve without angles");
}

#[test]
fn domain_errors_exit_3() {
    let out = vopq_cmd(&[
        "simulate",
        "--protocol",
        "b92",
        "--theta0",
        "0.3",
        "--theta1",
        "0.3",
        "--n",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(3), "identical states");

    let out = vopq_cmd(&[
        "sweep",
        "--surface",
        "kmax-pvm",
        "--grid",
        "3",
        "--out",
        "/nonexistent-dir/foo.csv",
    ]);
    assert_eq!(out.status.code(), Some(3), "unwritable path");

    let out = vopq_cmd(&[
        "simulate",
        "--protocol",
        "b92",
        "--theta0",
        "0.3",
        "--theta1",
        "-0.3",
        "--gamma",
        "1.5",
        "--n",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(3), "gamma out of range");
}
