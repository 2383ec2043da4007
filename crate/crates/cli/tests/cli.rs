use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_jackmoment"))
        .args(args)
        .env_remove("JACKMOMENT_THREADS")
        .output()
        .expect("binary runs");
    let stdout = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 1, "expected one JSON line, got {stdout:?}");
    (out.status.code().unwrap(), serde_json::from_str(lines[0]).unwrap())
}

fn value(v: &Value) -> f64 {
    v["result"]["value"].as_f64().unwrap()
}

#[test]
fn hyp_closed_form() {
    let (code, v) = run(&["hyp", "--a", "1", "--b", "1", "--c", "2", "--alpha", "1", "--n", "1", "--t", "0.5"]);
    assert_eq!(code, 0);
    assert!((value(&v) - 4.0 * std::f64::consts::LN_2 / 2.0).abs() < 1e-10);
    assert_eq!(v["convergence"]["converged"], true);
    assert_eq!(v["inputs"]["a"], "1/1");
    assert!(v["version"].is_string());
}

#[test]
fn hyp_at_zero_and_outside_disc() {
    let (code, v) = run(&["hyp", "--a", "1", "--b", "1", "--c", "2", "--alpha", "1", "--n", "1", "--t", "0"]);
    assert_eq!(code, 0);
    assert_eq!(value(&v), 1.0);
    let (code, v) = run(&["hyp", "--a", "1", "--b", "1", "--c", "2", "--alpha", "1", "--n", "1", "--t", "1.2"]);
    assert_eq!(code, 2);
    assert!(v["error"].as_str().unwrap().contains("|t| < 1"));
}

#[test]
fn hyp_budget_exhaustion_is_exit_3_with_partial_value() {
    let (code, v) = run(&[
        "hyp", "--a", "1", "--b", "1", "--c", "2", "--alpha", "1", "--n", "1", "--t", "0.99", "--max-weight", "5",
    ]);
    assert_eq!(code, 3);
    assert_eq!(v["convergence"]["converged"], false);
    assert!(value(&v) > 1.0);
}

#[test]
fn moment_examples() {
    let (code, v) = run(&["moment", "circular", "--beta", "2", "--mu", "-1", "--absz", "0", "--n", "5"]);
    assert_eq!(code, 0);
    assert_eq!(value(&v), 1.0);
    let (_, v) = run(&["moment", "jacobi", "--a", "0", "--b", "0", "--beta", "2", "--mu", "-1", "--x", "2", "--n", "1"]);
    assert!((value(&v) - 0.5).abs() < 1e-10);
}

#[test]
fn moment_eps_matches_absz_and_toeplitz() {
    let (_, a) = run(&["moment", "circular", "--beta", "2", "--mu", "-1/2", "--eps", "1/10", "--n", "4"]);
    let (_, b) = run(&["moment", "circular", "--beta", "2", "--mu", "-1/2", "--absz", "9/10", "--n", "4"]);
    let (_, c) = run(&[
        "moment", "circular", "--beta", "2", "--mu", "-1/2", "--absz", "9/10", "--n", "4", "--method", "toeplitz",
    ]);
    assert_eq!(value(&a), value(&b));
    assert!((value(&a) - value(&c)).abs() < 1e-10 * value(&c));
}

#[test]
fn moment_reflection_reports_prefactor() {
    let (code, v) = run(&["moment", "circular", "--beta", "2", "--mu", "-1", "--absz", "2", "--n", "3"]);
    assert_eq!(code, 0);
    let r = &v["result"];
    assert_eq!(r["reflected"], true);
    let (pref, inner) = (r["prefactor"].as_f64().unwrap(), r["inner_value"].as_f64().unwrap());
    assert!((pref * inner - value(&v)).abs() < 1e-14);
    assert!((pref - 2f64.powi(-6)).abs() < 1e-15);
}

#[test]
fn group_series_matches_quadrature() {
    let base = ["moment", "group", "--family", "sp", "--n", "2", "--mu", "-0.6", "--eps", "0.5"];
    let (_, s) = run(&base);
    let mut q = base.to_vec();
    q.extend(["--method", "quadrature"]);
    let (code, q) = run(&q);
    assert_eq!(code, 0);
    assert!((value(&s) - value(&q)).abs() < 1e-8 * value(&q));
}

#[test]
fn exponent_examples() {
    let (code, v) = run(&["exponent", "circular", "--beta", "2", "--mu", "-3/2", "--n", "30"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["log_flag"], true);
    assert_eq!(v["result"]["delta"], 2.0);
    assert_eq!(v["result"]["j"], 2);
    let (_, v) = run(&["exponent", "bk", "--k", "2", "--beta", "2"]);
    assert_eq!(v["result"]["delta"], 1.0);
    let (_, v) = run(&["exponent", "circular", "--beta", "2", "--mu", "-1/4", "--n", "30"]);
    assert_eq!(v["result"]["regime"], "bounded");
    assert_eq!(v["result"]["delta"], 0.0);
}

#[test]
fn decimal_input_warns() {
    let (_, v) = run(&["exponent", "circular", "--beta", "2", "--mu", "-1.5", "--n", "30"]);
    assert_eq!(v["result"]["log_flag"], true);
    assert_eq!(v["warnings"].as_array().unwrap().len(), 1);
}

#[test]
fn limit_examples() {
    let (_, v) = run(&["limit", "--beta", "2", "--mu", "1", "--absz", "0.6"]);
    assert!((v["result"]["limit"].as_f64().unwrap() - 1.5625).abs() < 1e-12);
    let (_, v) = run(&["limit", "--beta", "2", "--mu", "0", "--absz", "0.6"]);
    assert_eq!(v["result"]["limit"], 1.0);
    let (code, v) = run(&["limit", "--beta", "2", "--mu", "-1", "--absz", "0.6", "--n", "32"]);
    assert_eq!(code, 0);
    assert!(v["result"]["gap"].as_f64().unwrap() < 0.02);
    let (code, _) = run(&["limit", "--beta", "2", "--mu", "1", "--absz", "1"]);
    assert_eq!(code, 2);
}

#[test]
fn fit_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let p = path.to_str().unwrap();
    let (code, v) = run(&["fit", "circular", "--beta", "2", "--mu", "-1", "--n", "30", "--out", p]);
    assert_eq!(code, 0);
    let d = v["result"]["fitted_delta"].as_f64().unwrap();
    assert!((d - 1.0).abs() < 0.03, "{d}");
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("eps,value,trunc_weight,converged"));
    assert_eq!(lines.count(), 10);

    let (_, v) = run(&["fit", "circular", "--beta", "2", "--mu", "-3/2", "--n", "30", "--out", p]);
    assert_eq!(v["result"]["model"], "log");
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("eps,value,trunc_weight,converged,log_coeff"));
}

#[test]
fn fit_rejects_short_grid_and_missing_flags() {
    let (code, _) = run(&["fit", "circular", "--beta", "2", "--mu", "-1", "--n", "30", "--points", "3"]);
    assert_eq!(code, 3);
    let (code, _) = run(&["fit", "jacobi", "--beta", "2", "--mu", "-1", "--n", "3"]);
    assert_eq!(code, 2);
}

#[test]
fn verify_exit_codes() {
    let (code, v) = run(&["verify", "jack"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["passed"], true);
    let (code, _) = run(&["verify", "exponents"]);
    assert_eq!(code, 0);
}

#[test]
fn sample_dump_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for p in [&a, &b] {
        let (code, v) = run(&[
            "sample", "jacobi", "--beta", "2", "--a", "1/2", "--b", "0", "--n", "3", "--samples", "50", "--seed", "11",
            "--out", p.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        assert_eq!(v["result"]["rows"], 50);
    }
    let (ta, tb) = (std::fs::read_to_string(a).unwrap(), std::fs::read_to_string(b).unwrap());
    assert_eq!(ta, tb);
    assert!(ta.starts_with("x0,x1,x2\n"));
}

#[test]
fn command_echo_reruns_identically() {
    let (_, v) = run(&["moment", "circular", "--beta", "4", "--mu", "1/3", "--absz", "1/2", "--n", "3"]);
    let cmd = v["command"].as_str().unwrap();
    let args: Vec<&str> = cmd.split_whitespace().skip(1).collect();
    let (_, w) = run(&args);
    assert_eq!(v["result"], w["result"]);
}
