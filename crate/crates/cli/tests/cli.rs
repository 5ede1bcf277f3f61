use std::path::PathBuf;
use std::process::{Command, Output};

use ellbeta::verify::VerificationReport;

fn ellbeta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ellbeta"))
        .args(args)
        .env_remove("ELLBETA_REPORT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("ellbeta-cli-{}-{name}", std::process::id()))
}

#[test]
fn list_suites_names_every_suite() {
    let o = ellbeta(&["list-suites"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 13);
    for name in ["GAMMA_RELATIONS", "F4_ORBIT", "LIMIT_B0", "W8_7", "GROUP_FACTS"] {
        assert!(out.contains(name), "{out}");
    }
}

#[test]
fn passing_suite_exits_zero() {
    let o = ellbeta(&["verify", "group-facts"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("pass 17/17"), "{}", stdout(&o));
}

#[test]
fn tolerance_failure_exits_one() {
    let o = ellbeta(&["verify", "gamma_relations", "--points", "3", "--tol", "0"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
}

#[test]
fn configuration_errors_exit_two() {
    for args in [
        &["verify", "no_such_suite"][..],
        &["verify", "e0_eval", "--points", "0"],
        &["verify", "e0_eval", "--p", "0.2"],
        &["verify", "e0_eval", "--p", "1.5", "--q", "0.2"],
        &["eval", "gamma", "--x", "a,b", "--p", "0.1", "--q", "0.2"],
        &["eval", "e0", "--t", "0.5", "--p", "0.1", "--q", "0.2"],
    ] {
        assert_eq!(ellbeta(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn json_report_is_written_and_parses() {
    let path = scratch("report.json");
    let o = ellbeta(&["verify", "theta_addition", "--points", "4", "--seed", "7", "--json", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = VerificationReport::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!((r.suite.as_str(), r.seed, r.cases.len()), ("THETA_ADDITION", 7, 4));
    std::fs::remove_file(path).unwrap();
}

#[test]
fn report_directory_comes_from_the_environment() {
    let dir = scratch("reports");
    let o = Command::new(env!("CARGO_BIN_EXE_ellbeta"))
        .args(["verify", "w8_7", "--points", "1"])
        .env("ELLBETA_REPORT_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.join("W8_7.json").is_file());
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn fixed_nomes_are_used_for_every_case() {
    let path = scratch("fixed.json");
    let o = ellbeta(&["verify", "gamma_relations", "--points", "2", "--p", "0.1,0.05", "--q", "-0.2", "--json", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = VerificationReport::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    for c in &r.cases {
        assert_eq!((c.inputs[0].value.re, c.inputs[0].value.im), (0.1, 0.05));
        assert_eq!((c.inputs[1].value.re, c.inputs[1].value.im), (-0.2, 0.0));
    }
    std::fs::remove_file(path).unwrap();
}

#[test]
fn eval_prints_value_and_error_estimate() {
    // Γ(x)Γ(pq/x) = 1 at x = sqrt(pq)
    let o = ellbeta(&["eval", "gamma", "--x", &0.06f64.sqrt().to_string(), "--p", "0.2", "--q", "0.3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("value = 1.0000000000000"), "{out}");
    assert!(out.contains("error_estimate = "), "{out}");

    // (q^-1, b; c; q, z) terminates after two terms
    let o = ellbeta(&["eval", "phi", "--num", "2", "--num", "0.3", "--den", "0.4", "--q", "0.5", "--z", "0.1"]);
    let out = stdout(&o);
    assert!(out.contains("terminated = true"), "{out}");
    let want = 1.0 + (1.0 - 2.0) * (1.0 - 0.3) / ((1.0 - 0.4) * (1.0 - 0.5)) * 0.1;
    let value: f64 = out.lines().next().unwrap()["value = ".len()..].split(['+', 'i']).next().unwrap().parse().unwrap();
    assert!((value - want).abs() < 1e-14, "{value} vs {want}");
}

#[test]
fn eval_ef4_reports_quadrature_nodes() {
    let o = ellbeta(&["eval", "ef4", "--b", "0.3", "--t", "0.4", "--t", "0.4,0.1", "--t", "-0.3", "--t", "0.5", "--p", "0.2", "--q", "0.3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("n_used = "));
}
