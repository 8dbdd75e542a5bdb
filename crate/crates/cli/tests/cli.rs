use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conjapprox"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON output")
}

#[test]
fn construct_writes_both_kinds() {
    let out = run(&[
        "construct",
        "--xi",
        "sqrt:2",
        "--n",
        "2",
        "--count",
        "5",
        "--no-timestamp",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let recs = v["records"].as_array().unwrap();
    assert_eq!(recs.len(), 10);
    assert_eq!(recs.iter().filter(|r| r["kind"] == "degree_n").count(), 5);
    assert_eq!(
        recs.iter()
            .filter(|r| r["kind"] == "monic_degree_n1")
            .count(),
        5
    );
    assert!(v.get("timestamp").is_none());
    for r in recs {
        assert_eq!(r["residue_check"], true);
        assert!(r["height"].is_string() && r["q"].is_string());
        assert_eq!(r["derivative_check"].as_array().unwrap().len(), 3);
        for key in [
            "q",
            "n",
            "c5",
            "kind",
            "coeffs",
            "a",
            "b",
            "residue_check",
            "derivative_check",
            "height",
            "height_ratio",
        ] {
            assert!(r.get(key).is_some(), "missing {key}");
        }
    }
    let with_ts = run(&["construct", "--xi", "sqrt:2", "--n", "1", "--count", "1"]);
    assert!(json(&with_ts)["timestamp"].is_u64());
}

#[test]
fn rational_input_is_a_config_error() {
    let out = run(&["construct", "--xi", "sqrt:4", "--n", "2"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rational"));
}

#[test]
fn usage_errors_exit_3() {
    assert_eq!(run(&["construct", "--n", "2"]).status.code(), Some(3));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(
        run(&["construct", "--xi", "sqrt:2", "--n", "0"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        run(&["construct", "--xi", "sqrt:2", "--n", "2", "--count", "0"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        run(&[
            "sweep",
            "--xi",
            "sqrt:2",
            "--n",
            "2",
            "--grid",
            "1e5..1e2x4"
        ])
        .status
        .code(),
        Some(3)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn unit_branch_at_q_one() {
    let out = run(&[
        "construct",
        "--xi",
        "cf:1,(1)",
        "--n",
        "1",
        "--count",
        "1",
        "--no-timestamp",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["records"][0]["q"], "1");
    assert_eq!(v["records"][0]["index"], 0);
}

#[test]
fn verify_inline_and_from_file() {
    let out = run(&[
        "verify",
        "--xi",
        "sqrt:2",
        "--n",
        "3",
        "--count",
        "12",
        "--kind",
        "P",
        "--no-timestamp",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["report"]["all_pass"], true);
    assert_eq!(v["report"]["records"].as_array().unwrap().len(), 12);

    let dir = std::env::temp_dir().join(format!("conjapprox-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("c.json");
    let f = file.to_str().unwrap();
    let c = run(&[
        "construct",
        "--xi",
        "sqrt:3",
        "--n",
        "2",
        "--count",
        "4",
        "--out",
        f,
    ]);
    assert_eq!(c.status.code(), Some(0));
    assert!(c.stdout.is_empty());
    let out = run(&[
        "verify",
        "--xi",
        "sqrt:3",
        "--n",
        "2",
        "--input",
        f,
        "--no-timestamp",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["report"]["records"].as_array().unwrap().len(), 8);

    let empty = dir.join("empty.json");
    std::fs::write(&empty, "").unwrap();
    let out = run(&[
        "verify",
        "--xi",
        "sqrt:3",
        "--n",
        "2",
        "--input",
        empty.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_quadratic_branch() {
    let out = run(&[
        "verify",
        "--xi",
        "quadratic:1,-1,-1",
        "--n",
        "2",
        "--optimality",
        "quadratic",
        "--no-timestamp",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let recs = v["report"]["records"].as_array().unwrap();
    let monic: Vec<&Value> = recs
        .iter()
        .filter(|r| r["kind"] == "monic_degree_n1")
        .collect();
    assert_eq!(monic.len(), 10);
    assert!(monic
        .iter()
        .all(|r| r["optimality_lower"]["branch"] == "quadratic_xi"));
}

#[test]
fn sweep_csv_and_single_point() {
    let out = run(&[
        "sweep",
        "--xi",
        "cf:1,(1)",
        "--n",
        "4",
        "--grid",
        "1e2..1e10x9",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 10);
    assert!(csv.starts_with("X,q,H,max_dist_lo,max_dist_hi,c_obs,window_lo,window_hi\n"));
    let err = String::from_utf8(out.stderr).unwrap();
    let slope: f64 = err.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((slope + 0.5).abs() <= 0.15);

    let one = run(&[
        "sweep",
        "--xi",
        "sqrt:2",
        "--n",
        "2",
        "--grid",
        "1e3..1e3x1",
    ]);
    assert_eq!(one.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&one.stderr).contains("insufficient points"));
}

#[test]
fn minima_caps_and_cases() {
    let out = run(&[
        "minima",
        "--xi",
        "sqrt:2",
        "--n",
        "2",
        "--q",
        "2",
        "--no-timestamp",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["report"]["first_minimum_bound_ok"], true);
    assert_eq!(v["report"]["basis_within"], true);
    let deg = run(&[
        "minima",
        "--xi",
        "sqrt:2",
        "--n",
        "1",
        "--q",
        "1",
        "--no-timestamp",
    ]);
    assert_eq!(json(&deg)["report"]["index"], 0);
    assert_eq!(
        run(&["minima", "--xi", "sqrt:2", "--n", "4", "--q", "2"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        run(&["minima", "--xi", "sqrt:2", "--n", "2", "--q", "9"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn csv_and_json_are_deterministic() {
    for fmt in ["json", "csv"] {
        let args = [
            "construct",
            "--xi",
            "sqrt:5",
            "--n",
            "3",
            "--count",
            "6",
            "--no-timestamp",
            "--format",
            fmt,
        ];
        assert_eq!(run(&args).stdout, run(&args).stdout);
    }
}
