use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_fracseq");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("FRACSEQ_EPS").output().unwrap()
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn coefficient_goldens() {
    let cases: [(&str, &str, [f64; 5]); 3] = [
        ("0.5", "coeffs_0.5.json", [1.0, -1.0 / 2.0, -1.0 / 8.0, -1.0 / 16.0, -5.0 / 128.0]),
        ("-0.5", "coeffs_-0.5.json", [1.0, 1.0 / 2.0, 3.0 / 8.0, 5.0 / 16.0, 35.0 / 128.0]),
        ("2/3", "coeffs_2_3.json", [1.0, -2.0 / 3.0, -1.0 / 9.0, -4.0 / 81.0, -7.0 / 243.0]),
    ];
    for (alpha, file, want) in cases {
        let out = run(&["coeffs", "--alpha", alpha, "--n", "5"]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(out.stdout, std::fs::read(golden(file)).unwrap(), "{alpha}");
        let v = json(&out);
        let got: Vec<f64> =
            v["result"]["coefficients"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() <= 1e-12 * w.abs(), "{alpha}: {g} vs {w}");
        }
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let m = scratch("det.json", r#"{"kind":"band","offsets":[0,1],"values":[1,-0.5]}"#);
    let m = m.to_str().unwrap();
    for args in [
        vec!["class-table", "--alpha", "0.5", "--matrix", m],
        vec!["hmnc", "--alpha", "1/3", "--matrix", m, "--from", "cd", "--to", "c"],
        vec!["norm", "--alpha", "0.5", "--matrix", m, "--from", "c0d"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.status.code(), b.status.code());
    }
}

#[test]
fn pole_exits_one() {
    let out = run(&["coeffs", "--alpha", "-1", "--n", "5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("pole"));
}

#[test]
fn malformed_input_reports_location() {
    let p = scratch("bad.json", "[1, 2,\n  oops]");
    let out = run(&["apply", "--alpha", "0.5", "--input", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.json") && err.contains("line 2"), "{err}");
}

#[test]
fn undetermined_exits_two() {
    let m = scratch("id.json", r#"{"kind":"diagonal","terms":[1],"extend":"constant"}"#);
    let out = run(&["compact", "--alpha", "0.5", "--matrix", m.to_str().unwrap(), "--from", "c0d", "--to", "linf"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["result"]["verdict"], "undetermined");
}

#[test]
fn finite_rank_is_compact() {
    let m = scratch("fr.json", r#"{"kind":"finite_rank","rows":[[1,-2,0.5],[0,3]]}"#);
    for to in ["c0", "c", "l1"] {
        let out = run(&["compact", "--alpha", "0.5", "--matrix", m.to_str().unwrap(), "--from", "cd", "--to", to]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(json(&out)["result"]["verdict"], "compact", "{to}");
    }
}

#[test]
fn zero_order_apply_echoes_input() {
    let x = scratch("x.json", "[1.5, -2, 0.25, 7]");
    let out = run(&["apply", "--alpha", "0", "--input", x.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["terms"], serde_json::json!([1.5, -2.0, 0.25, 7.0]));
}

#[test]
fn eps_from_environment() {
    let out = Command::new(BIN).args(["coeffs", "--alpha", "0.5", "--n", "3"]).env("FRACSEQ_EPS", "1e-5").output().unwrap();
    assert_eq!(json(&out)["tolerance"]["eps"], 1e-5);
    let out = Command::new(BIN)
        .args(["--eps", "1e-3", "coeffs", "--alpha", "0.5", "--n", "3"])
        .env("FRACSEQ_EPS", "1e-5")
        .output()
        .unwrap();
    assert_eq!(json(&out)["tolerance"]["eps"], 1e-3);
}

#[test]
fn table_format_flattens() {
    let out = run(&["--format", "table", "coeffs", "--alpha", "0.5", "--n", "2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.contains("coefficients") && l.contains("-0.5")), "{text}");
}
