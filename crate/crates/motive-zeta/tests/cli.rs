//! End-to-end checks of the `mzeta` binary: byte-exact JSON output,
//! determinism across runs and thread counts, exit-code classification,
//! and the machine-readable error channel.

use std::io::Write;
use std::process::{Command, Output};

fn mzeta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mzeta"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_line(out: &Output) -> String {
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .trim_end()
        .to_string()
}

fn tmpfile(content: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(content.as_bytes()).unwrap();
    f
}

const LINE_SPEC: &str = r#"{"vars":["x","y"],"kind":"projective","eqs":[]}"#;

#[test]
fn zeta_of_the_projective_line_is_canonical() {
    let spec = tmpfile(LINE_SPEC);
    let out = mzeta(&[
        "zeta",
        "--spec",
        spec.path().to_str().unwrap(),
        "--q",
        "2",
        "--dnum",
        "0",
        "--dden",
        "2",
    ]);
    assert_eq!(
        stdout_line(&out),
        r#"{"chi":2,"den":[1,-3,2],"det":"1/2","fe_holds":true,"num":[1],"weights":{"0":1,"2":1}}"#
    );
}

#[test]
fn zeta_accepts_a_count_sequence() {
    let out = mzeta(&[
        "zeta", "--counts", "3,5,9,17", "--q", "2", "--dnum", "0", "--dden", "2",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout_line(&out)).unwrap();
    assert_eq!(v["den"], serde_json::json!([1, -3, 2]));
    assert_eq!(v["fe_holds"], serde_json::json!(true));
}

#[test]
fn nearby_solver_command() {
    let out = mzeta(&["near", "--num", "1,-1/5", "--den", "1,-5", "--qv", "5"]);
    assert_eq!(stdout_line(&out), r#"{"den":[1,-6,5],"num":[1]}"#);
}

#[test]
fn output_is_deterministic_and_jobs_insensitive() {
    let spec = tmpfile(LINE_SPEC);
    let path = spec.path().to_str().unwrap();
    let base = ["count", "--spec", path, "--q", "5", "--depth", "3"];
    let first = stdout_line(&mzeta(&base));
    let second = stdout_line(&mzeta(&base));
    assert_eq!(first, second);
    for jobs in ["1", "2", "4"] {
        let with_jobs = stdout_line(&mzeta(&[
            "count", "--spec", path, "--q", "5", "--depth", "3", "--jobs", jobs,
        ]));
        assert_eq!(first, with_jobs, "--jobs {jobs} changed the output");
    }
    assert_eq!(first, r#"{"counts":[6,26,126],"depth":3,"q":5}"#);
}

#[test]
fn algebra_expression_round_trip() {
    let out = mzeta(&["algebra", "dual(twist(lefschetz, 1))", "--q", "3"]);
    let v: serde_json::Value = serde_json::from_str(&stdout_line(&out)).unwrap();
    // Twisting the Lefschetz class by 1 gives the point; its dual is itself.
    assert_eq!(v["den"], serde_json::json!([1, -1]));
    assert_eq!(v["expr"], serde_json::json!("dual(twist(lefschetz, 1))"));
}

#[test]
fn dirichlet_product_solve_mul_inv_eval() {
    // A one-place Euler product, then the inverse returns it to 1.
    let places = tmpfile(r#"[{"norm":2,"degree":1,"num":[1],"den":[1,-1],"tag":"good"}]"#);
    let product = stdout_line(&mzeta(&[
        "dirichlet",
        "product",
        "--places",
        places.path().to_str().unwrap(),
        "--cutoff",
        "8",
    ]));
    let v: serde_json::Value = serde_json::from_str(&product).unwrap();
    assert_eq!(v["a"]["2"], serde_json::json!("1"));
    assert_eq!(v["a"]["8"], serde_json::json!("1"));
    assert_eq!(v["a"].get("3"), None);

    let series = tmpfile(&product);
    let path = series.path().to_str().unwrap();
    let inv = stdout_line(&mzeta(&["dirichlet", "inv", "--a", path]));
    let vi: serde_json::Value = serde_json::from_str(&inv).unwrap();
    assert_eq!(vi["a"]["2"], serde_json::json!("-1"));

    let eval = stdout_line(&mzeta(&["dirichlet", "eval", "--a", path, "--s", "2"]));
    let ve: serde_json::Value = serde_json::from_str(&eval).unwrap();
    let got = ve["value"].as_f64().unwrap();
    // 1/(1 - 2^{-s}) at s = 2, truncated at 8: 1 + 1/4 + 1/16 + 1/64.
    assert!((got - (1.0 + 0.25 + 0.0625 + 0.015625)).abs() < 1e-12);
}

#[test]
fn exit_codes_classify_failures() {
    // Unreadable input file: 2.
    let out = mzeta(&["count", "--spec", "/nonexistent.json", "--q", "2"]);
    assert_eq!(out.status.code(), Some(2));

    // Mathematically unobtainable: 3.
    let out = mzeta(&["near", "--num", "1", "--den", "1,-1", "--qv", "5"]);
    assert_eq!(out.status.code(), Some(3));

    // Resource cap: 4.
    let spec = tmpfile(LINE_SPEC);
    let out = Command::new(env!("CARGO_BIN_EXE_mzeta"))
        .args([
            "count",
            "--spec",
            spec.path().to_str().unwrap(),
            "--q",
            "5",
            "--depth",
            "9",
        ])
        .env("MZETA_ENUM_CAP", "1000")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn error_json_is_machine_readable() {
    let out = mzeta(&[
        "near",
        "--num",
        "1",
        "--den",
        "1,-1",
        "--qv",
        "5",
        "--error-json",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let v: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stdout).trim()).unwrap();
    assert_eq!(v["code"], serde_json::json!(3));
    assert_eq!(v["kind"], serde_json::json!("not_solvable"));
    assert!(v["message"]
        .as_str()
        .unwrap()
        .contains("no rational solution"));
}

#[test]
fn pretty_renders_lines() {
    let out = stdout_line(&mzeta(&[
        "near", "--num", "1,-1/5", "--den", "1,-5", "--qv", "5", "--pretty",
    ]));
    assert!(out.contains("den: [1, -6, 5]"));
    assert!(out.contains("num: [1]"));
}

#[test]
fn ff_assembly_with_functional_equation() {
    // All places of the projective line over F_2 up to degree 6, written
    // the way `dirichlet product` and `ff` consume them.
    let places = motive_zeta::lfun::unit_motive_places(2, 6).unwrap();
    let json = serde_json::Value::Array(places.iter().map(|p| p.to_json()).collect());
    let f = tmpfile(&json.to_string());
    let path = f.path().to_str().unwrap();
    let out = stdout_line(&mzeta(&[
        "ff", "--places", path, "--q", "2", "--depth", "6", "--dnum", "1", "--dden", "2", "--dual",
        path,
    ]));
    assert_eq!(out, r#"{"den":[1,-3,2],"fe":{"B":2,"c":"2"},"num":[1]}"#);
}

#[test]
fn ell_reports_the_multiplicative_place() {
    let out = stdout_line(&mzeta(&[
        "ell",
        "--ainv",
        "0,0,0,-1,1",
        "--bound",
        "30",
        "--cutoff",
        "25",
    ]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["series"]["a"]["23"], serde_json::json!("24"));
    let ledger = v["ledger"].as_array().unwrap();
    let place23 = ledger
        .iter()
        .find(|p| p["norm"] == serde_json::json!(23))
        .unwrap();
    assert_eq!(place23["tag"], serde_json::json!("multiplicative_split"));
    assert_eq!(v["disc"], serde_json::json!("-368"));
}

#[test]
fn gamma_factor_values() {
    let hodge = tmpfile(r#"{"kind":"complex","h":[[0,0,1]]}"#);
    let out = stdout_line(&mzeta(&[
        "gamma",
        "--hodge",
        hodge.path().to_str().unwrap(),
        "--s",
        "1",
    ]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    // Gamma_C(1) = 2 (2 pi)^{-1} Gamma(1) = 1/pi.
    let got = v["value"].as_f64().unwrap();
    assert!((got - 1.0 / std::f64::consts::PI).abs() < 1e-12);

    // Evaluation at a pole is a mathematical failure: exit 3.
    let out = mzeta(&[
        "gamma",
        "--hodge",
        hodge.path().to_str().unwrap(),
        "--s",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(3));
}
