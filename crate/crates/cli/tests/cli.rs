use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_effvol")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Parses CSV output into (provenance, header, rows).
fn csv(o: &Output) -> (Value, Vec<String>, Vec<Vec<String>>) {
    let text = stdout(o);
    let mut lines = text.lines();
    let provenance = serde_json::from_str(lines.next().unwrap().strip_prefix("# ").unwrap()).unwrap();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (provenance, header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

#[test]
fn tdelta_zero_error() {
    let o = run(&["tdelta", "--epsilon", "0", "--v", "1", "--delta", &(-std::f64::consts::FRAC_PI_2).exp().to_string()]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["result"]["t_delta"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["result"]["branch"], "ZeroErrorFormula");
}

#[test]
fn mitigate_rescales() {
    let o = run(&["mitigate", "--raw", "0.2", "--f-eff", "0.5"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["result"]["mitigated"].as_f64().unwrap() - 0.4).abs() < 1e-15);
    let o = run(&["mitigate", "--raw", "-0.1", "--epsilon", "0.01", "--volume", "100"]);
    assert!(o.status.success());
    assert_eq!(run(&["mitigate", "--raw", "0.2"]).status.code(), Some(2));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["tdelta", "--delta", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["fig4b", "--device", "nowhere"]).status.code(), Some(2));
    assert_eq!(run(&["fig4b", "--observable", "Q1"]).status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    let o = run(&["fig4b", "--qubits", "28", "--mem-budget", "1G"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("resource"));
}

#[test]
fn fig4b_small_sweep() {
    let o = run(&["fig4b", "--steps", "3", "--qubits", "8,12", "--theta-grid", "0,pi/4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (prov, header, rows) = csv(&o);
    assert_eq!(prov["command"], "fig4b");
    assert_eq!(prov["steps"], 3);
    assert_eq!(rows.len(), 4);
    let (t, v) = (col(&header, "theta_h"), col(&header, "value"));
    for r in &rows {
        if r[t].parse::<f64>().unwrap() == 0.0 {
            assert!((r[v].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn fig4a_clifford_point_is_the_sign() {
    let o = run(&[
        "fig4a", "--device", "grid:4x4", "--qubits", "16", "--steps", "3", "--theta-grid", "pi/2,0", "--observable",
        "stabilizer:Z5",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (prov, header, rows) = csv(&o);
    let obs = prov["observable"].as_str().unwrap();
    let v = col(&header, "value");
    // The derived string carries its sign, so it stabilizes the state.
    assert!((rows[0][v].parse::<f64>().unwrap() - 1.0).abs() < 1e-9);
    let sign = if obs.starts_with('-') { -1.0 } else { 1.0 };
    let z_only = obs.chars().all(|c| !matches!(c, 'X' | 'Y'));
    let expected = if z_only { sign } else { 0.0 };
    assert!((rows[1][v].parse::<f64>().unwrap() - expected).abs() < 1e-9);
}

#[test]
fn convergence_reaches_the_cone() {
    let o = run(&["convergence", "--qubits", "7,15,25", "--theta-grid", "0,0.3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (_, header, rows) = csv(&o);
    let (v, cone) = (col(&header, "value"), col(&header, "cone_qubits"));
    // At theta = 0 every gate is diagonal and the cone collapses.
    assert!((rows[0][v].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(rows[5][cone], "25");
    assert_eq!(rows[5][col(&header, "delta_largest_n")].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn cost_table_and_empty_circuit() {
    let o = run(&["cost", "--device", "grid:3x4", "--observable", "Z5", "--steps", "2", "--evaluations", "20000"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (_, _, rows) = csv(&o);
    let get = |k: &str| rows.iter().find(|r| r[0] == k).unwrap()[1].parse::<f64>().unwrap();
    assert!(get("closed_log2") <= get("open_log2"));
    assert!(get("closed_log2") <= get("closed_search_log2"));
    let o = run(&["cost", "--device", "grid:3x4", "--observable", "Z5", "--steps", "0"]);
    assert!(o.status.success());
    let (_, _, rows) = csv(&o);
    for k in ["open_log2", "closed_log2", "sv_log2"] {
        assert_eq!(rows.iter().find(|r| r[0] == k).unwrap()[1], "0.0000");
    }
    assert_eq!(run(&["cost", "--evaluations", "0"]).status.code(), Some(2));
}

#[test]
fn purity_curve_shape() {
    let o = run(&["purity", "--device", "grid:3x4", "--gates", "60", "--butterfly", "X5", "--shots", "40", "--seed", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (prov, header, rows) = csv(&o);
    assert_eq!(prov["butterfly_index"], 30);
    assert_eq!(rows.len(), 61);
    let m = col(&header, "mean_purity");
    assert_eq!(rows[0][m].parse::<f64>().unwrap(), 1.0);
    assert!(rows[60][m].parse::<f64>().unwrap() < 0.1);
}

#[test]
fn decay_roundtrip_through_csv() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("series.csv");
    let fits = dir.path().join("fits.jsonl");
    let o = run(&[
        "decay", "--device", "grid:3x4", "--observable", "Z5", "--qubits", "12", "--steps", "12",
        "--theta-grid", "0.9,1.3", "--out", series.to_str().unwrap(), "--fits", fits.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let first = std::fs::read_to_string(&fits).unwrap();
    assert_eq!(first.lines().count(), 3);

    let refit = dir.path().join("refit.jsonl");
    let o = run(&["decay", "--input", series.to_str().unwrap(), "--fits", refit.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let strip = |s: &str| s.lines().skip(1).map(str::to_string).collect::<Vec<_>>();
    assert_eq!(strip(&std::fs::read_to_string(&refit).unwrap()), strip(&first));
}

#[test]
fn outputs_are_reproducible() {
    let args = ["purity", "--device", "grid:2x3", "--gates", "20", "--butterfly", "Z1", "--shots", "10", "--seed", "9"];
    assert_eq!(stdout(&run(&args)), stdout(&run(&args)));
}
