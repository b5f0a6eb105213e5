use std::f64::consts::PI;
use std::process::{Command, Output};

use serde_json::Value;

fn chebmark(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chebmark"))
        .args(args)
        .env_remove("CHEBMARK_DEFAULT_TOL")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON output")
}

fn csv_rows(out: &Output) -> (String, Vec<Vec<f64>>) {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn density_matches_the_two_band_formula() {
    let out = chebmark(&[
        "density",
        "--intervals",
        "-1,-0.5,0.5,1",
        "--pole",
        "inf",
        "--grid",
        "9",
    ]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, "x,density");
    assert_eq!(rows.len(), 9);
    for row in rows {
        let x: f64 = row[0];
        let exact = x.abs() / (PI * ((1.0 - x * x) * (x * x - 0.25)).sqrt());
        assert!((row[1] - exact).abs() < 1e-8, "{row:?}");
    }
    assert!(!String::from_utf8(out.stdout).unwrap().contains('\r'));
}

#[test]
fn measure_reports_quantization() {
    let out = chebmark(&[
        "measure",
        "--intervals",
        "-1,-0.5,0.5,1",
        "--poles",
        "2i,-2i,inf,inf",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["q"], serde_json::json!([1, 1]));
    assert_eq!(v["quantized"], Value::Bool(true));

    let out = chebmark(&[
        "measure",
        "--intervals",
        "-1,1",
        "--poles",
        "3",
        "--format",
        "csv",
    ]);
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, "band_index,omega");
    assert!((rows[0][1] - 1.0).abs() < 1e-12);
}

#[test]
fn extremal_json_shape() {
    let out = chebmark(&[
        "extremal",
        "--intervals",
        "-1,-0.5,0.5,1",
        "--poles",
        "inf,inf,inf,inf,inf,inf,inf,inf",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(
        keys,
        ["e_tilde", "markov_constant", "numerator_coeffs", "q", "zeros"]
    );
    assert!((v["markov_constant"].as_f64().unwrap() - 64.0 / 3.0).abs() < 1e-8);
    assert_eq!(v["zeros"].as_array().unwrap().len(), 4);
    assert_eq!(v["numerator_coeffs"].as_array().unwrap().len(), 5);
}

#[test]
fn bound_profile_csv() {
    let out = chebmark(&[
        "bound",
        "--intervals",
        "-1,1",
        "--poles",
        "inf,inf,inf,inf,inf,inf",
        "--grid",
        "11",
    ]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, "x,bound");
    assert_eq!(rows.len(), 11);
    assert!((rows[0][1] - 9.0).abs() < 1e-8 && (rows[10][1] - 9.0).abs() < 1e-8);
}

#[test]
fn reproductions() {
    let v = json(&chebmark(&[
        "reproduce",
        "corollary",
        "--a",
        "0.5",
        "--b",
        "1",
        "--n",
        "4",
    ]));
    assert!((v["markov_constant"].as_f64().unwrap() - 21.333333333333).abs() < 1e-8);
    assert_eq!(v["constant_matches"], Value::Bool(true));
    assert_eq!(v["pass"], Value::Bool(true));

    let out = chebmark(&["reproduce", "rusak"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!((v["r_prime_at_1"].as_f64().unwrap() - 0.062641).abs() < 1e-6);
    assert!((v["m2_prime_at_1"].as_f64().unwrap() - 0.039604).abs() < 1e-6);
    assert_eq!(v["pass"], Value::Bool(true));

    let v = json(&chebmark(&["reproduce", "m4", "--a", "0.1"]));
    let c = v["crossover"].as_array().unwrap();
    assert!(c[0].as_f64().unwrap() > 0.16 && c[1].as_f64().unwrap() < 0.17);
}

#[test]
fn scan_sweeps_the_inner_endpoint() {
    let out = chebmark(&[
        "scan", "--param", "a", "--from", "0.1", "--to", "0.2", "--steps", "11",
    ]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, "a,t3_prime,m4_prime,m4_prime_numeric,margin");
    assert_eq!(rows.len(), 11);
    assert!(rows[0][4] > 0.0 && rows[10][4] < 0.0);
}

#[test]
fn verify_is_byte_identical_and_honours_out() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<String> = (0..2)
        .map(|i| dir.path().join(format!("v{i}.json")).display().to_string())
        .collect();
    for p in &paths {
        let out = chebmark(&[
            "verify",
            "--samples",
            "20",
            "--seed",
            "5",
            "--grid",
            "501",
            "--out",
            p,
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
    }
    let a = std::fs::read(&paths[0]).unwrap();
    assert_eq!(a, std::fs::read(&paths[1]).unwrap());
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 12);
    assert!(v[0]["norms"]["m_prime"].is_number());
}

#[test]
fn tolerance_from_the_environment() {
    let run = |tol: &str| {
        Command::new(env!("CARGO_BIN_EXE_chebmark"))
            .args(["verify", "--samples", "2", "--grid", "201"])
            .env("CHEBMARK_DEFAULT_TOL", tol)
            .output()
            .unwrap()
    };
    let out = run("1e-5");
    assert!(out.status.success());
    assert!(json(&out)
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["claim"] != "sharpness")
        .all(|r| r["tol"] == 1e-5));
    assert_eq!(run("soon").status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| chebmark(args).status.code();
    assert_eq!(code(&["density", "--intervals", "1,0", "--pole", "inf"]), Some(2));
    assert_eq!(
        code(&["density", "--intervals", "-1,1", "--pole", "0.5"]),
        Some(2)
    );
    assert_eq!(
        code(&["extremal", "--intervals", "-1,1", "--poles", "2i,inf"]),
        Some(2)
    );
    assert_eq!(
        code(&["extremal", "--intervals", "-1,-0.5,0.5,1", "--poles", "3,inf"]),
        Some(3)
    );
    assert_eq!(
        code(&[
            "bound",
            "--intervals",
            "-1,-0.5,0.5,1",
            "--poles",
            "inf,inf,inf,inf,inf,inf"
        ]),
        Some(3)
    );
    assert_eq!(
        code(&["reproduce", "corollary", "--a", "0.5", "--b", "1", "--n", "3"]),
        Some(2)
    );
    assert_eq!(code(&["verify", "--samples", "2", "--budget", "0"]), Some(1));
    assert_eq!(code(&["nonsense"]), Some(2));
    assert_eq!(code(&["--help"]), Some(0));

    let out = chebmark(&["extremal", "--intervals", "-1,-0.5,0.5,1", "--poles", "3,inf"]);
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("error: quantization"));
}
