use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn normplane(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_normplane")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

/// Same keys in the same order; numbers equal to 1e-12 relative.
fn assert_matches(got: &Value, want: &Value, path: &str) {
    match (got, want) {
        (Value::Object(g), Value::Object(w)) => {
            let gk: Vec<_> = g.keys().collect();
            let wk: Vec<_> = w.keys().collect();
            assert_eq!(gk, wk, "keys at {path}");
            for (k, v) in w {
                assert_matches(&g[k], v, &format!("{path}.{k}"));
            }
        }
        (Value::Array(g), Value::Array(w)) => {
            assert_eq!(g.len(), w.len(), "length at {path}");
            for (i, (a, b)) in g.iter().zip(w).enumerate() {
                assert_matches(a, b, &format!("{path}[{i}]"));
            }
        }
        (Value::Number(a), Value::Number(b)) => {
            let (a, b) = (a.as_f64().unwrap(), b.as_f64().unwrap());
            assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0), "{path}: {a} vs {b}");
        }
        _ => assert_eq!(got, want, "at {path}"),
    }
}

#[test]
fn norm_info_matches_golden_files() {
    for (spec, file) in [("euclid", "euclid.json"), ("lp:4", "lp4.json")] {
        let out = normplane(&["norm-info", "--norm", spec]);
        assert!(out.status.success(), "{}", stderr(&out));
        let golden = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(file)).unwrap();
        assert_matches(&json(&out), &serde_json::from_str(&golden).unwrap(), spec);
    }
}

#[test]
fn euclid_alpha0_is_right_angle() {
    let out = normplane(&["norm-info", "--norm", "euclid"]);
    let a = json(&out)["alpha0"].as_f64().unwrap();
    assert!((a - std::f64::consts::FRAC_PI_2).abs() <= 1e-9);
}

#[test]
fn invalid_norm_exits_2() {
    let out = normplane(&["norm-info", "--norm", "lp:1.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("p must be ≥ 2"), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_flag_exits_2() {
    let out = normplane(&["norm-info", "--norm", "euclid", "--grid-size", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(normplane(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let back = write(dir.path(), "back.csv", "t,x,y\n0,0,0\n1,1,0\n2,0.4,0\n");
    let out = normplane(&["verify", "--curve", &back]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["self_contracted"], false);
    assert_eq!(r["worst_violation"]["triple"], serde_json::json!([0, 1, 2]));
    assert!((r["worst_violation"]["defect"].as_f64().unwrap() - 0.2).abs() <= 1e-12);

    let mono = write(dir.path(), "mono.csv", "t,x,y\n0,0,0\n1,1,0\n2,1.5,0\n");
    let out = normplane(&["verify", "--curve", &mono]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(json(&out)["cosine"]["holds"], true);

    let bad = write(dir.path(), "bad.csv", "t,x,y\n0,0,0\n1,oops,0\n");
    let out = normplane(&["verify", "--curve", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));

    let missing = dir.path().join("nope.csv");
    assert_eq!(normplane(&["verify", "--curve", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn generated_curve_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("g.csv");
    let csv = csv.to_str().unwrap();
    for method in ["greedy", "gd"] {
        let out = normplane(&["generate", "--norm", "lp:4", "--method", method, "--n", "60", "--seed", "9", "--out", csv]);
        assert!(out.status.success(), "{}", stderr(&out));
        let v = normplane(&["verify", "--norm", if method == "gd" { "euclid" } else { "lp:4" }, "--curve", csv]);
        assert_eq!(v.status.code(), Some(0), "{method}: {}", stderr(&v));
    }
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for p in [&a, &b] {
        let out = normplane(&["generate", "--norm", "lp:3", "--seed", "5", "--out", p.to_str().unwrap()]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn bisector_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("trace.csv");
    let svg = dir.path().join("fig.svg");
    let run = |a: &str, b: &str| {
        let out = normplane(&[
            "bisector", "--norm", "lp:4", "--a", a, "--b", b, "--out", csv.to_str().unwrap(), "--svg", svg.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        let rows: Vec<Vec<f64>> = std::fs::read_to_string(&csv)
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
            .collect();
        (json(&out), rows)
    };
    let (_, rows) = run("-0.5,0", "0.5,0");
    assert!(rows.iter().all(|r| r[1].abs() <= 1e-9));
    let (_, rows) = run("0,0", "1,1");
    assert!(rows.iter().all(|r| (r[1] + r[2] - 1.0).abs() <= 1e-9));
    let (report, rows) = run("0.1,-0.2", "0.9,0.5");
    assert!(rows.iter().all(|r| r[3] <= 1e-9));
    assert!(report["max_residual"].as_f64().unwrap() <= 1e-9);
    let slope = report["deviation_slope"].as_f64().unwrap();
    assert!((-1.15..=-0.85).contains(&slope), "{slope}");
    let text = std::fs::read_to_string(&svg).unwrap();
    for class in ["ball", "segment", "bisector", "asymptote", "strip"] {
        assert!(text.contains(&format!("class=\"{class}\"")), "{class}");
    }
    let out = normplane(&["bisector", "--a", "1,1", "--b", "1,1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn certify_two_point_curve() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "two.csv", "t,x,y\n0,0,0\n1,2,0\n");
    let out = normplane(&["certify", "--curve", &c]);
    assert!(out.status.success(), "{}", stderr(&out));
    let r = json(&out);
    let c0 = r["c0"].as_f64().unwrap();
    let row = &r["curves"][0];
    assert_eq!(row["seed"], Value::Null);
    assert!((row["ratio"].as_f64().unwrap() - 1.0).abs() <= 1e-12);
    // unit-diameter coordinates: W drops from 2/π to 0 across the only pair
    let slack = row["min_decrement_slack"].as_f64().unwrap();
    assert!((slack - (2.0 / std::f64::consts::PI - c0)).abs() <= 1e-6, "{slack}");
}

#[test]
fn certify_rejects_non_sc_input() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "back.csv", "t,x,y\n0,0,0\n1,1,0\n2,0.4,0\n");
    let out = normplane(&["certify", "--curve", &c]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("not self-contracted"));
}

#[test]
fn certify_report_file_and_schema() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.json");
    let out = normplane(&["certify", "--norm", "lp:4", "--count", "3", "--n", "60", "--report", p.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    let keys: Vec<_> = r.as_object().unwrap().keys().cloned().collect();
    assert_eq!(
        keys,
        ["norm", "alpha0", "kappa", "lambda", "tau1", "mu", "eps0", "tau", "delta", "c0", "C", "curves", "config"]
    );
    let curves = r["curves"].as_array().unwrap();
    assert_eq!(curves.len(), 3);
    for (k, c) in curves.iter().enumerate() {
        assert_eq!(c["seed"], 42 + k);
        for f in ["n", "length", "diam", "mean_width", "ratio", "min_decrement_slack"] {
            assert!(c[f].is_number(), "{f}");
        }
        assert_eq!(c["pairs"]["both_components"], 0);
    }
    assert_eq!(r["config"]["command"], "certify");
}

#[test]
fn bound_report_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    let out = normplane(&["bound-report", "--norm", "euclid", "--count", "2", "--n", "50"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let r = json(&out);
    for c in r["curves"].as_array().unwrap() {
        assert!(c["ratio"].as_f64().unwrap() <= r["C"].as_f64().unwrap());
        assert_eq!(c["telescope_ok"], true);
    }
    let csv = dir.path().join("g.csv");
    assert!(normplane(&["generate", "--n", "30", "--out", csv.to_str().unwrap()]).status.success());
    let svg = dir.path().join("p.svg");
    let svg = svg.to_str().unwrap();
    for args in [
        vec!["plot", "--norm", "lp:4", "--kind", "ball", "--out", svg],
        vec!["plot", "--kind", "curve", "--curve", csv.to_str().unwrap(), "--out", svg],
        vec!["plot", "--norm", "lp:4", "--kind", "bisector", "--a", "0,0", "--b", "1,0.2", "--out", svg],
    ] {
        let out = normplane(&args);
        assert!(out.status.success(), "{args:?}: {}", stderr(&out));
        assert!(std::fs::read_to_string(svg).unwrap().starts_with("<svg"));
    }
    assert_eq!(normplane(&["plot", "--kind", "curve", "--out", svg]).status.code(), Some(2));
}
