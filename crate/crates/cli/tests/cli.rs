use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn gz(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_gz"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn gz");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

/// Real parts of a `[[re, im], ...]` row.
fn reals(v: &Value) -> Vec<f64> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|z| z[0].as_f64().unwrap())
        .collect()
}

fn matrix_reals(v: &Value) -> Vec<Vec<f64>> {
    v["entries"].as_array().unwrap().iter().map(reals).collect()
}

fn close(a: &[Vec<f64>], b: &[Vec<f64>], tol: f64) -> bool {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .all(|(x, y)| (x - y).abs() <= tol)
}

#[test]
fn ladder_of_swap_matrix() {
    let out = gz(&["ladder", "-"], "[[0,1],[1,0]]");
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["member"], Value::Bool(true));
    let levels = v["ladder"]["levels"].as_array().unwrap();
    assert_eq!(reals(&levels[0]), vec![0.0]);
    let second = reals(&levels[1]);
    assert!((second[0] + 1.0).abs() < 1e-12 && (second[1] - 1.0).abs() < 1e-12);
}

#[test]
fn strict_ladder_rejects_shared_eigenvalue() {
    let lax = gz(&["ladder", "-"], "[[1,0],[0,2]]");
    assert_eq!(lax.status.code(), Some(0));
    assert_eq!(json(&lax)["member"], Value::Bool(false));
    assert_eq!(
        gz(&["ladder", "--strict", "-"], "[[1,0],[0,2]]")
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn malformed_input_is_a_parse_error() {
    assert_eq!(gz(&["ladder", "-"], "[[0,1],").status.code(), Some(1));
    assert_eq!(
        gz(&["ladder", "/nonexistent/file.json"], "").status.code(),
        Some(1)
    );
    assert_eq!(gz(&["frobnicate"], "").status.code(), Some(1));
}

#[test]
fn reconstruct_examples() {
    let cases: [(&str, Vec<Vec<f64>>); 3] = [
        ("[[0],[-1,1]]", vec![vec![0.0, 1.0], vec![1.0, 0.0]]),
        ("[[2],[1,3]]", vec![vec![2.0, 1.0], vec![1.0, 2.0]]),
        (
            "[[0],[-1,1],[-2,0,2]]",
            vec![
                vec![0.0, 1.0, 0.0],
                vec![1.0, 0.0, 3.0],
                vec![0.0, 1.0, 0.0],
            ],
        ),
    ];
    for (ladder, want) in cases {
        let out = gz(&["reconstruct", "-"], ladder);
        assert_eq!(out.status.code(), Some(0), "{ladder}");
        let v = json(&out);
        assert!(close(&matrix_reals(&v["matrix"]), &want, 1e-12), "{v}");
        assert!(v["charpoly_residual"].as_f64().unwrap() < 1e-12);
    }
}

#[test]
fn reconstruct_overflow_is_instability() {
    let out = gz(
        &["reconstruct", "-"],
        "[[1e200],[-1e200,1e200],[-1e200,0,1e200]]",
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn flow_examples() {
    let time = format!("{},0", 2f64.ln());
    let out = gz(
        &["flow", "--index", "1", "--time", &time, "-"],
        "[[0,1],[1,0]]",
    );
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(close(
        &matrix_reals(&v["matrix"]),
        &[vec![0.0, 0.5], vec![2.0, 0.0]],
        1e-12
    ));
    assert!(v["ladder_drift"].as_f64().unwrap() < 1e-12);

    let x = "[[1,2,0],[0.5,-1,1],[3,1,2]]";
    let still = json(&gz(&["flow", "--index", "2", "--time", "0,0", "-"], x));
    assert!(close(
        &matrix_reals(&still["matrix"]),
        &[
            vec![1.0, 2.0, 0.0],
            vec![0.5, -1.0, 1.0],
            vec![3.0, 1.0, 2.0]
        ],
        1e-12
    ));
}

#[test]
fn flow_rejects_top_level_index_and_non_members() {
    let out = gz(
        &["flow", "--index", "2", "--time", "1,0", "-"],
        "[[0,1],[1,0]]",
    );
    assert_eq!(out.status.code(), Some(4));
    let out = gz(
        &["flow", "--index", "1", "--time", "1,0", "-"],
        "[[1,0],[0,2]]",
    );
    assert_eq!(out.status.code(), Some(2));
    let out = gz(
        &["flow", "--index", "1", "--time", "x", "-"],
        "[[0,1],[1,0]]",
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn chart_and_unchart_round_trip() {
    let out = gz(&["chart", "-"], "[[0,2],[0.5,0]]");
    assert_eq!(out.status.code(), Some(0));
    let p = json(&out);
    let r = reals(&p["r"]);
    assert!((r[0]).abs() < 1e-12 && (r[1] + 1.0).abs() < 1e-12 && (r[2] - 1.0).abs() < 1e-12);
    assert!((reals(&p["s"])[0] - 0.5).abs() < 1e-12);

    let back = gz(&["unchart", "-"], &String::from_utf8(out.stdout).unwrap());
    assert_eq!(back.status.code(), Some(0));
    assert!(close(
        &matrix_reals(&json(&back)),
        &[vec![0.0, 2.0], vec![0.5, 0.0]],
        1e-12
    ));
}

#[test]
fn chart_failures_have_distinct_codes() {
    assert_eq!(gz(&["chart", "-"], "[[1,0],[0,2]]").status.code(), Some(2));
    // Generic ladder, but the last column barely meets the level-2
    // eigenline of -1 while the large last row keeps the gaps open.
    let x = "[[0,1,0],[1,0,1e-9],[1e3,0,3]]";
    assert_eq!(gz(&["ladder", "--strict", "-"], x).status.code(), Some(0));
    assert_eq!(gz(&["chart", "-"], x).status.code(), Some(5));
}

#[test]
fn verify_small_cases_pass() {
    for (n, samples) in [("2", "10"), ("4", "5")] {
        let out = gz(
            &["verify", "--n", n, "--seed", "1", "--samples", samples],
            "",
        );
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stdout)
        );
        let v = json(&out);
        assert_eq!(v["all_pass"], Value::Bool(true));
        assert_eq!(v["residuals"].as_object().unwrap().len(), 7);
    }
}

#[test]
fn verify_with_zero_tolerance_fails_and_bad_n_is_rejected() {
    let out = gz(&["verify", "--n", "3", "--samples", "1", "--tol", "0"], "");
    assert_eq!(out.status.code(), Some(7));
    assert_eq!(json(&out)["all_pass"], Value::Bool(false));
    assert_eq!(gz(&["verify", "--n", "9"], "").status.code(), Some(1));
}

#[test]
fn verify_is_byte_stable() {
    let args = ["verify", "--n", "3", "--seed", "5", "--samples", "2"];
    assert_eq!(gz(&args, "").stdout, gz(&args, "").stdout);
}

#[test]
fn demo_orthopoly_reports() {
    let out = gz(
        &["demo-orthopoly", "--measure", "chebyshev1", "--n", "3"],
        "",
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["max_residual"].as_f64().unwrap() <= 1e-10);
    let out = gz(
        &["demo-orthopoly", "--measure", "legendre-like", "--n", "4"],
        "",
    );
    let v = json(&out);
    for r in v["level_residuals"].as_array().unwrap() {
        assert!(r.as_f64().unwrap() <= 1e-9);
    }
    assert_eq!(
        gz(&["demo-orthopoly", "--measure", "hermite", "--n", "3"], "")
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn reserved_order_flag_is_refused() {
    assert_eq!(
        gz(&["--order", "x", "chart", "-"], "[[0,2],[0.5,0]]")
            .status
            .code(),
        Some(1)
    );
}
