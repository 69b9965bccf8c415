use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bergman(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bergman"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    assert!(
        o.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).expect("stderr is JSON")
}

#[test]
fn convert_poly_lists_f3() {
    let v = stdout_json(&bergman(&["convert-poly", "--n", "1", "--K", "3"]));
    assert_eq!(v["polynomials"][2], "t^3 + 10t^2 + 8t");
    assert_eq!(v["rows"][1], serde_json::json!(["0/1", "2/1", "1/1"]));
}

#[test]
fn polynomiality_only_at_one() {
    let v = stdout_json(&bergman(&["polynomiality", "--n", "1", "--k0-max", "5"]));
    assert_eq!(v["polynomial_k0"], serde_json::json!([1]));
    assert_eq!(v["table"].as_array().unwrap().len(), 5);
}

#[test]
fn variation_reports_scan() {
    let v = stdout_json(&bergman(&[
        "variation",
        "--n",
        "2",
        "--lambda",
        "3",
        "--J",
        "6",
    ]));
    assert_eq!(v["admissible_k"], serde_json::json!([1]));
    assert_eq!(v["nonzero_orders_past_n"], serde_json::json!([]));
    let v = stdout_json(&bergman(&[
        "variation",
        "--n",
        "1",
        "--k0",
        "2",
        "--J",
        "4",
    ]));
    assert_ne!(v["nonzero_orders_past_n"], serde_json::json!([]));
}

#[test]
fn fs_check_passes() {
    let v = stdout_json(&bergman(&["fs-check", "--n", "1", "--m-max", "30"]));
    assert_eq!(v["pass"], true);
    assert!(v["max_deviation"].as_f64().unwrap() < 1e-9);
    let v = stdout_json(&bergman(&[
        "fs-check", "--n", "2", "--m-max", "3", "--grid", "0,1",
    ]));
    assert_eq!(v["pass"], true);
}

#[test]
fn density_is_deterministic_and_fits() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = bergman(&[
            "density",
            "--family",
            "fubini-study",
            "--ms",
            "10,20,30",
            "--grid",
            "0,2",
            "--output",
            p.to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert!(text.starts_with("s,pi_10,pi_20,pi_30\n"));
    assert!(!text.contains('\r'));

    let v = stdout_json(&bergman(&[
        "fit",
        "--input",
        a.to_str().unwrap(),
        "--s",
        "2",
        "--K",
        "2",
    ]));
    let c = v["fit"]["coeffs"].as_array().unwrap();
    for (x, e) in c.iter().zip([1.0, 1.0, 0.0]) {
        assert!((x.as_f64().unwrap() - e).abs() < 1e-8);
    }
    assert_eq!(v["vanishing"]["entries"][0]["vanishes"], true);
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"n": 1, "K": 2}"#).unwrap();
    let c = cfg.to_str().unwrap();
    let v = stdout_json(&bergman(&["convert-poly", "--config", c]));
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    let v = stdout_json(&bergman(&["convert-poly", "--config", c, "--K", "4"]));
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"n": 1, "K": 2, "bogus": true}"#).unwrap();
    let o = bergman(&["convert-poly", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"]["kind"], "config_invalid");

    let o = bergman(&["density", "--family", "nope", "--m-max", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bergman(&["convert-poly", "--n", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr_json(&o)["error"]["message"]
        .as_str()
        .unwrap()
        .contains("`K`"));
    let o = bergman(&["fit", "--input", "/nonexistent.csv", "--s", "0", "--K", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!Path::new("/nonexistent.csv").exists());
}

#[test]
fn module_errors_carry_operation() {
    let o = bergman(&[
        "density",
        "--family",
        "eigen-bump",
        "--eps",
        "0.6",
        "--m-max",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let e = stderr_json(&o);
    assert_eq!(e["error"]["kind"], "positivity_violation");
    assert_eq!(e["error"]["operation"], "RadialMetric::new");
    assert_eq!(e["error"]["params"]["eps"], 0.6);

    let o = bergman(&[
        "first-variation",
        "--phi-family",
        "eigen-bump",
        "--phi-eps",
        "1",
        "--m",
        "5",
        "--t",
        "1e-12",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_json(&o)["error"]["kind"], "step_underflow");
}

#[test]
fn first_variation_agrees() {
    let v = stdout_json(&bergman(&[
        "first-variation",
        "--phi-family",
        "phi1-polynomial",
        "--phi-coeffs",
        "1,-6,6",
        "--m",
        "20",
        "--s",
        "0.5",
    ]));
    assert!(v["rel_error"].as_f64().unwrap() < 1e-3);
}

#[test]
fn center_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("s.json");
    let o = bergman(&[
        "center",
        "--potential",
        "gauge",
        "--coords",
        "0.02,-0.03,0.025",
        "--summary",
        summary.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let csv = String::from_utf8(o.stdout).unwrap();
    assert!(csv.starts_with("iteration,step_norm,residual_norm,a_norm\n"));
    let s: Value = serde_json::from_str(&std::fs::read_to_string(summary).unwrap()).unwrap();
    assert!(s["residual_norm"].as_f64().unwrap() < 1e-8);
    let a = s["a_coords"].as_array().unwrap();
    assert!((a[0].as_f64().unwrap() + 0.02).abs() < 1e-9);
}

#[test]
fn non_convergence_exits_4() {
    let o = bergman(&[
        "center",
        "--potential",
        "radial",
        "--coeffs",
        "-20,40",
        "--max-iter",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(stderr_json(&o)["error"]["operation"], "center");
}
