use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freegamma"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(&stdout(&out)).unwrap()
}

#[test]
fn params_edge_is_self_consistent() {
    let p = json(&["params", "--alpha", "1", "--format", "json", "--precision", "17"]);
    let c = p["c_alpha"].as_f64().unwrap();
    let s = p["s_alpha"].as_f64().unwrap();
    assert!((s - c * (1.0 - c) / (1.0 + c)).abs() < 1e-8);
    assert!((p["tail_constant"].as_f64().unwrap() - std::f64::consts::E).abs() < 1e-15);
    assert!(p["omega_alpha"].as_f64().unwrap() > s);
}

#[test]
fn params_accepts_a_list() {
    let p = json(&["params", "--alpha", "2,10", "--format", "json"]);
    let rows = p.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[1]["s_alpha"].as_f64().unwrap() > rows[0]["s_alpha"].as_f64().unwrap());
}

#[test]
fn invalid_input_exits_with_two() {
    for args in [
        &["params", "--alpha", "0"][..],
        &["params", "--alpha", "-1"],
        &["density", "--alpha", "1", "--min", "5", "--max", "1"],
        &["density", "--alpha", "1", "--points", "1"],
        &["density", "--alpha", "1,2"],
        &["limit", "--alpha", "0.5"],
        &["params", "--precision", "0"],
        &["frobnicate"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn density_table_rows() {
    let out = run(&["density", "--alpha", "1", "--min", "0", "--max", "10", "--points", "11"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("xi,f"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 11);
    let s = json(&["params", "--alpha", "1", "--format", "json"])["s_alpha"].as_f64().unwrap();
    for (xi, f) in &rows {
        assert_eq!(*f == 0.0, *xi <= s, "xi = {xi}");
    }
    assert!((rows[1].1 - 0.3309049250513317).abs() < 1e-11);
}

#[test]
fn density_json_is_an_array_of_pairs() {
    let v = json(&["density", "--alpha", "2", "--points", "5", "--format", "json"]);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 5);
    for r in rows {
        assert!(r["xi"].is_f64() && r["f"].is_f64());
    }
}

#[test]
fn output_is_deterministic_and_rounded() {
    let args = ["density", "--alpha", "0.7", "--points", "40", "--precision", "6", "--grid", "log-edge"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.stdout, b.stdout);
    for line in stdout(&a).lines().skip(1) {
        for field in line.split(',') {
            let v: f64 = field.parse().unwrap();
            let rounded: f64 = format!("{v:.5e}").parse().unwrap();
            assert_eq!(v, rounded, "{field}");
        }
    }
}

#[test]
fn moments_and_limits() {
    let v = json(&["moments", "--alpha", "1", "--max-order", "4", "--format", "json"]);
    let rows = v.as_array().unwrap();
    let exact = [1.0, 2.0, 6.0, 23.0];
    for (r, m) in rows.iter().zip(exact) {
        assert_eq!(r["moment"].as_f64().unwrap(), m);
        assert!((r["moment_from_density"].as_f64().unwrap() / m - 1.0).abs() < 1e-6);
    }
    let v = json(&["moments", "--alpha", "1e-3", "--max-order", "2", "--format", "json"]);
    assert!(v[0]["moment_from_density"].is_null());

    let text = stdout(&run(&["limit", "--alpha", "1e-3", "--max-order", "3"]));
    assert!(text.starts_with("alpha,kind,arg,value,limit\n"));
    assert_eq!(text.lines().count(), 1 + 4 + 3);
}

#[test]
fn mode_matches_params() {
    let m = json(&["mode", "--alpha", "2", "--format", "json"]);
    let p = json(&["params", "--alpha", "2", "--format", "json"]);
    assert_eq!(m[0]["omega"], p["omega_alpha"]);
}

fn verify_rows(args: &[&str]) -> (Option<i32>, Vec<serde_json::Value>) {
    let out = run(args);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    (out.status.code(), v.as_array().unwrap().clone())
}

#[test]
fn verify_passes_at_unit_shape() {
    let (code, rows) = verify_rows(&["verify", "--alpha", "1", "--format", "json"]);
    assert_eq!(code, Some(0));
    assert!(rows.len() >= 12);
    assert!(rows.iter().all(|r| r["status"] == "PASS"), "{rows:#?}");
}

#[test]
fn verify_small_alpha_includes_limits() {
    let (code, rows) = verify_rows(&["verify", "--alpha", "1e-3", "--format", "json"]);
    assert_eq!(code, Some(0));
    for name in ["small_alpha_density", "small_alpha_moments"] {
        let row = rows.iter().find(|r| r["check"] == name).expect(name);
        assert_eq!(row["status"], "PASS");
    }
}

#[test]
fn verify_detects_loose_quadrature() {
    let (code, rows) = verify_rows(&["verify", "--alpha", "2", "--quad-tol", "1e-2", "--format", "json"]);
    assert_eq!(code, Some(1));
    assert!(rows.iter().any(|r| r["status"] == "FAIL"));
}
