use std::path::Path;
use std::process::{Command, Output};

use gwsr::emission::{EmissionCurve, ScalingReport};
use gwsr::io::{parse_num, CsvTable};
use gwsr::kernels::{f_gw_exact, f_gw_series};
use gwsr::shape_factor::{eta, SweepGrid};
use gwsr::{make_array, GwKernel};

fn gwsr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gwsr")).args(args).env_remove("GWSR_WORKERS").output().expect("binary runs")
}

fn stdout_table(out: &Output) -> CsvTable {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    CsvTable::parse(&String::from_utf8(out.stdout.clone()).unwrap()).unwrap()
}

fn value(t: &CsvTable, col: &str) -> f64 {
    t.column(col).unwrap()[0]
}

#[test]
fn kernel_matches_library_bit_for_bit() {
    let arg = "6.283185307";
    let x: f64 = arg.parse().unwrap();
    let t = stdout_table(&gwsr(&["kernel", "--x", arg, "--omega-bar", "0.1"]));
    assert_eq!(value(&t, "g_exact").to_bits(), f_gw_exact(x, 0.1).value.to_bits());
    assert_eq!(value(&t, "g_series").to_bits(), f_gw_series(x, 0.1).value.to_bits());

    let t = stdout_table(&gwsr(&["kernel", "--x", "0", "--omega-bar", "0.5"]));
    assert_eq!(value(&t, "f_mink"), 1.0);
    assert_eq!(value(&t, "f_tilde"), 0.0);
}

#[test]
fn missing_flag_is_a_usage_error() {
    let out = gwsr(&["kernel", "--omega-bar", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(gwsr(&["shape", "--n", "1"]).status.code(), Some(2));
    assert_eq!(gwsr(&["shape", "--omega-bar", "1.5"]).status.code(), Some(2));
    assert_eq!(gwsr(&["eta-max", "--method", "guess"]).status.code(), Some(2));
}

#[test]
fn shape_reports_nulling_and_library_eta() {
    let t = stdout_table(&gwsr(&["shape", "--n", "100", "--beta", "1", "--omega-bar", "1e-2"]));
    assert_eq!(value(&t, "muM"), 0.0);
    let want = eta(&make_array(100, 1.0).unwrap(), &GwKernel::new(1e-2, 1e-4).unwrap());
    assert_eq!(value(&t, "eta"), want);
}

#[test]
fn eta_max_envelope_order() {
    let t = stdout_table(&gwsr(&["eta-max", "--beta", "1", "--omega-bar", "1e-8", "--method", "envelope"]));
    let j = value(&t, "j_star");
    assert!((1e7..1e8).contains(&j), "{j}");
}

#[test]
fn validate_gates_on_reports() {
    let out = gwsr(&["validate", "--suite", "all", "--tol", "1e-8"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    for line in String::from_utf8(out.stdout).unwrap().lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["pass"], true);
    }
    assert_eq!(gwsr(&["validate", "--suite", "quadrature", "--tol", "1e-20"]).status.code(), Some(1));
    assert_eq!(gwsr(&["validate", "--suite", "nonsense"]).status.code(), Some(2));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"n": [10, 20], "beta": [0.5, 1.0], "omega_bar": 1e-3}"#).unwrap();
    let c = cfg.to_str().unwrap();
    let t = stdout_table(&gwsr(&["sweep", "--config", c]));
    assert_eq!(t.rows.len(), 4);
    let t = stdout_table(&gwsr(&["sweep", "--config", c, "--n", "30"]));
    assert_eq!(t.column("N").unwrap(), vec![30.0, 30.0]);

    std::fs::write(&cfg, r#"{"n": 10, "colour": "red"}"#).unwrap();
    let out = gwsr(&["shape", "--config", c]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
    std::fs::write(&cfg, r#"{"t_max": -1}"#).unwrap();
    assert_eq!(gwsr(&["emission", "--config", c]).status.code(), Some(2));
}

fn run_to_file(dir: &Path, name: &str, args: &[&str], workers: &str) -> Vec<u8> {
    let path = dir.join(name);
    let mut full = args.to_vec();
    full.extend(["--out", path.to_str().unwrap()]);
    let out = Command::new(env!("CARGO_BIN_EXE_gwsr")).args(&full).env("GWSR_WORKERS", workers).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    std::fs::read(path).unwrap()
}

#[test]
fn output_is_independent_of_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 4] = [
        &["sweep", "--n", "1000,300000", "--beta", "0.25,0.37,1", "--omega-bar", "1e-6"],
        &["emission", "--n", "200000", "--beta", "0.37", "--omega-bar", "1e-8", "--h-plus", "1e-16"],
        &["angular", "--n", "10", "--beta", "1", "--phi-samples", "32"],
        &["scaling", "--n", "1000,10000,100000", "--omega-bar", "1e-12"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let one = run_to_file(dir.path(), &format!("a{i}.csv"), args, "1");
        let four = run_to_file(dir.path(), &format!("b{i}.csv"), args, "4");
        assert_eq!(one, four, "{args:?}");
    }
}

#[test]
fn emitted_tables_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let text = |b: Vec<u8>| String::from_utf8(b).unwrap();

    let raw = text(run_to_file(dir.path(), "s.csv", &["sweep", "--n", "10,100", "--beta", "0.3,1"], "2"));
    let grid = SweepGrid::from_table(&CsvTable::parse(&raw).unwrap()).unwrap();
    assert_eq!(grid.to_table().to_csv(), raw);

    let raw = text(run_to_file(dir.path(), "e.csv", &["emission", "--n", "1000", "--samples", "17"], "2"));
    let curve = EmissionCurve::from_table(&CsvTable::parse(&raw).unwrap()).unwrap();
    assert_eq!(curve.times.len(), 17);
    assert_eq!(curve.to_table().to_csv(), raw);

    let raw = text(run_to_file(dir.path(), "r.csv", &["scaling", "--n", "1000,10000", "--omega-bar", "1e-12"], "2"));
    let rep = ScalingReport::from_table(&CsvTable::parse(&raw).unwrap()).unwrap();
    assert_eq!(rep.to_table().to_csv(), raw);

    let raw = text(run_to_file(dir.path(), "k.csv", &["kernel", "--x", "3", "--omega-bar", "0.01"], "2"));
    for field in &CsvTable::parse(&raw).unwrap().rows[0] {
        let v = parse_num(field).unwrap();
        assert_eq!(gwsr::io::fmt_num(v), *field);
    }
}

#[test]
fn failed_run_leaves_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("never.csv");
    let out = gwsr(&["emission", "--n", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!path.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn physical_compares_with_dark_counts() {
    let out = gwsr(&["physical", "--n", "1000000", "--omega-bar", "1e-12"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let length = v["array_length_m"].as_f64().unwrap();
    assert!((length - 999_999.0 * 791e-9).abs() < 1e-9);
    let peak = v["peak_delta_gamma_hz"].as_f64().unwrap();
    assert_eq!(v["above_dark_counts"], peak > 1e-6);
}
