//! Report determinism, serialisation and file output.

use ellbeta::verify::{emit_report, run_suite, CaseStatus, Destination, ReportFormat, Suite, SuiteSpec, VerificationReport};
use ellbeta::Error;

fn spec(suite: Suite, n: usize, seed: u64) -> SuiteSpec {
    SuiteSpec::new(suite).with_points(n).unwrap().with_seed(seed)
}

#[test]
fn same_spec_gives_byte_identical_json() {
    for suite in [Suite::GammaRelations, Suite::E0Eval, Suite::F4Orbit, Suite::SeriesReps] {
        let s = spec(suite, 4, 99);
        let a = run_suite(&s).unwrap().without_timing().to_json().unwrap();
        let b = run_suite(&s).unwrap().without_timing().to_json().unwrap();
        assert_eq!(a, b, "{suite}");
    }
}

#[test]
fn seed_changes_the_points() {
    let a = run_suite(&spec(Suite::ThetaAddition, 3, 1)).unwrap();
    let b = run_suite(&spec(Suite::ThetaAddition, 3, 2)).unwrap();
    assert_ne!(a.cases[0].inputs, b.cases[0].inputs);
}

#[test]
fn json_round_trips() {
    let r = run_suite(&spec(Suite::Duplication, 3, 5)).unwrap();
    let back = VerificationReport::from_json(&r.to_json().unwrap()).unwrap();
    assert_eq!(back, r);
}

#[test]
fn summary_is_consistent_with_records() {
    let r = run_suite(&spec(Suite::E7Move, 2, 11)).unwrap();
    let s = &r.summary;
    assert_eq!(s.n_cases, r.cases.len());
    assert_eq!(s.n_pass, r.cases.iter().filter(|c| c.pass).count());
    assert_eq!(s.n_pass + s.n_tolerance_fail + s.n_error_fail, s.n_cases);
    for (i, c) in r.cases.iter().enumerate() {
        assert_eq!(c.index, i);
        assert_eq!(c.pass, c.status == CaseStatus::Pass);
        if let Some(e) = c.rel_err {
            assert_eq!(c.pass, e <= c.tolerance);
        }
    }
}

#[test]
fn tightened_tolerance_fails_without_aborting() {
    let s = spec(Suite::GammaRelations, 5, 3).with_tolerance("gamma_reflection", 0.0).unwrap();
    let r = run_suite(&s).unwrap();
    assert_eq!(r.cases.len(), 15);
    let reflection = r.cases.iter().filter(|c| c.identity == "gamma_reflection");
    assert!(reflection.clone().any(|c| c.status == CaseStatus::ToleranceFail));
    assert!(r.cases.iter().filter(|c| c.identity != "gamma_reflection").all(|c| c.pass));
    assert_eq!(r.summary.n_error_fail, 0);
}

#[test]
fn text_report_has_a_pass_count() {
    let r = run_suite(&SuiteSpec::new(Suite::GroupFacts)).unwrap();
    let text = r.to_text();
    assert_eq!(text.lines().count(), r.cases.len() + 1);
    let n = r.cases.len();
    assert!(text.lines().last().unwrap().contains(&format!("pass {n}/{n}")), "{text}");
}

#[test]
fn zero_points_is_rejected() {
    assert!(matches!(SuiteSpec::new(Suite::E0Eval).with_points(0), Err(Error::InvalidConfig(_))));
}

#[test]
fn reports_are_written_with_their_directories() {
    let dir = std::env::temp_dir().join(format!("ellbeta-report-{}", std::process::id()));
    let path = dir.join("nested").join("W8_7.json");
    let r = run_suite(&spec(Suite::W87, 1, 1)).unwrap();
    emit_report(&r, ReportFormat::Json, &Destination::File(path.clone())).unwrap();
    let back = VerificationReport::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(back, r);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn io_errors_name_the_path() {
    let blocker = std::env::temp_dir().join(format!("ellbeta-blocker-{}", std::process::id()));
    std::fs::write(&blocker, "").unwrap();
    let path = blocker.join("r.json");
    let r = run_suite(&spec(Suite::W87, 1, 1)).unwrap();
    let err = emit_report(&r, ReportFormat::Json, &Destination::File(path)).unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    assert!(err.to_string().contains(blocker.to_str().unwrap()), "{err}");
    std::fs::remove_file(&blocker).unwrap();
}
