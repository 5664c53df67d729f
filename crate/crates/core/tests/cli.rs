use std::path::Path;
use std::process::{Command, Output};

use ellipcert::coeff::{constant_torus, sample, save_field};
use ellipcert::linalg::identity;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tempfile::TempDir;

fn ellipcert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ellipcert")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_record(o: &Output) -> Value {
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    assert_eq!(err.lines().count(), 1, "stderr: {err}");
    serde_json::from_str(err.trim()).expect("stderr is one JSON record")
}

fn write_fields(dir: &Path) -> (String, String) {
    let id = dir.join("identity.json");
    save_field(&constant_torus(3, 1, identity(3), 8, 8.0).unwrap(), &id).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let herm = dir.join("hermitian.json");
    save_field(&sample::hermitian_torus(3, 1, 8, 8.0, 1.0, 3.0, &mut rng).unwrap(), &herm).unwrap();
    (id.display().to_string(), herm.display().to_string())
}

#[test]
fn table_prints_four_rows() {
    let o = ellipcert(&["--format", "csv", "table"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().next(), Some("d,delta,neg_inv_ln_delta,rho"));
    assert!(out.contains("3,0.8165,4.9326,0.1010"));
    assert_eq!(out.lines().count(), 5);
}

#[test]
fn bounds_structured_report() {
    let o = ellipcert(&["--format", "structured", "bounds", "--d", "3", "--dist", "0.9"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"]["state"], "ok");
    let outputs = v["outputs"].as_array().unwrap();
    let p = outputs.iter().find(|x| x["name"] == "p_plus_lower").unwrap();
    assert!((p["value"].as_f64().unwrap() - 12.4922446357).abs() < 1e-9);
    assert!(v["provenance"]["tool_version"].is_string());
}

#[test]
fn bounds_from_field_file() {
    let dir = TempDir::new().unwrap();
    let (_, herm) = write_fields(dir.path());
    let o = ellipcert(&["--format", "csv", "bounds", "--field", &herm]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let line = stdout(&o).lines().find(|l| l.starts_with("dist,")).unwrap().to_string();
    let dist: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
    assert!((dist - 0.5).abs() < 1e-10);
}

#[test]
fn invalid_inputs_exit_nonzero_with_one_line() {
    let o = ellipcert(&["bounds", "--d", "2", "--dist", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_record(&o)["stage"], "certificate");

    let o = ellipcert(&["degiorgi", "--d", "3", "--eps", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_record(&o)["status"], "error");

    let o = ellipcert(&["simulate", "--field", "/no/such/field.json", "--experiment", "lp", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_record(&o)["stage"], "load_field");

    let o = ellipcert(&["bounds", "--dist", "0.5"]);
    assert_eq!(o.status.code(), Some(1));

    let o = ellipcert(&["simulate", "--experiment", "lp"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_record(&o)["stage"], "parse");
    assert!(o.stdout.is_empty());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let (_, herm) = write_fields(dir.path());
    let args = ["--format", "structured", "simulate", "--field", &herm, "--experiment", "lp", "--seed", "9", "--trials", "2"];
    let a = ellipcert(&args);
    let b = ellipcert(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["record"]["experiment"], "lp");
    assert_eq!(v["record"]["field_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn lp_sweep_shows_no_growth_for_identity() {
    let dir = TempDir::new().unwrap();
    let (id, _) = write_fields(dir.path());
    let csv_path = dir.path().join("lp.csv");
    let o = ellipcert(&[
        "--out",
        csv_path.to_str().unwrap(),
        "simulate",
        "--field",
        &id,
        "--experiment",
        "lp",
        "--p",
        "50",
        "--seed",
        "4",
        "--trials",
        "2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("no_growth_trend = true"));
    let artifact = std::fs::read_to_string(csv_path).unwrap();
    assert!(artifact.starts_with("t,ratio\n"));
    assert!(artifact.contains("record,experiment,lp"));
}

#[test]
fn help_exits_zero() {
    let o = ellipcert(&["--help"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("simulate"));
}
