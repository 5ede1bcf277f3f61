//! Seeded identity suites and their reports.
//!
//! A suite turns a [`SuiteSpec`] into a list of cases, each a pair of
//! independently computed sides of one identity. Parameters are drawn
//! sequentially from one seeded generator before any evaluation starts, so the
//! cases can then run in parallel without affecting the report, which is
//! assembled in case order.

mod report;
mod sampling;
mod suites;

pub use report::*;
pub use sampling::*;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::special::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    GammaRelations,
    Duplication,
    E0Eval,
    E7Move,
    F4Main,
    F4Orbit,
    LimitB1,
    LimitMid,
    LimitB0,
    SeriesReps,
    W87,
    ThetaAddition,
    GroupFacts,
}

impl Suite {
    pub const ALL: [Suite; 13] = [
        Suite::GammaRelations,
        Suite::Duplication,
        Suite::E0Eval,
        Suite::E7Move,
        Suite::F4Main,
        Suite::F4Orbit,
        Suite::LimitB1,
        Suite::LimitMid,
        Suite::LimitB0,
        Suite::SeriesReps,
        Suite::W87,
        Suite::ThetaAddition,
        Suite::GroupFacts,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::GammaRelations => "GAMMA_RELATIONS",
            Suite::Duplication => "DUPLICATION",
            Suite::E0Eval => "E0_EVAL",
            Suite::E7Move => "E7_MOVE",
            Suite::F4Main => "F4_MAIN",
            Suite::F4Orbit => "F4_ORBIT",
            Suite::LimitB1 => "LIMIT_B1",
            Suite::LimitMid => "LIMIT_MID",
            Suite::LimitB0 => "LIMIT_B0",
            Suite::SeriesReps => "SERIES_REPS",
            Suite::W87 => "W8_7",
            Suite::ThetaAddition => "THETA_ADDITION",
            Suite::GroupFacts => "GROUP_FACTS",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Suite::GammaRelations => "elliptic gamma reflection and p/q difference equations",
            Suite::Duplication => "duplication formulas for (x;q)_k, (x;q), (x;p,q) and the elliptic gamma function",
            Suite::E0Eval => "E^0 by quadrature against its closed-form product",
            Suite::E7Move => "E^1 transformation with v^2 = pq/(t0 t1 t2 t3)",
            Suite::F4Main => "E(b;t) = E(b;tv), v^2 = p^2q^2/(b^2 t1 t2 t3 t4)",
            Suite::F4Orbit => "E(b;w(t)) = E(b;t) along generator words, A = pq/b",
            Suite::LimitB1 => "E(pb;t) -> B1(b;t) as p -> 0",
            Suite::LimitMid => "closed-form limits for 0 < beta < 1",
            Suite::LimitB0 => "beta = 0 limits: interior and both edge integrals",
            Suite::SeriesReps => "integral = series: 14W13, 4phi3, 2phi1, (qb^2;q), k+1phik, terminating 14W13",
            Suite::W87 => "8W7 evaluation and its explicit term form",
            Suite::ThetaAddition => "three-term theta function addition identity",
            Suite::GroupFacts => "F4 root and Weyl group counts and Coxeter orders",
        }
    }

    /// Number of parameter points drawn when none is given.
    pub fn default_points(self) -> usize {
        match self {
            Suite::GammaRelations | Suite::Duplication => 100,
            Suite::E0Eval | Suite::F4Main => 20,
            Suite::E7Move => 10,
            Suite::F4Orbit => 54,
            Suite::LimitB1 => 4,
            Suite::LimitMid => 10,
            Suite::LimitB0 => 9,
            Suite::SeriesReps | Suite::W87 => 5,
            Suite::ThetaAddition => 50,
            Suite::GroupFacts => 1,
        }
    }

    /// Nome envelope `(|p|max, |q|max)` when none is given.
    pub fn default_envelope(self) -> (f64, f64) {
        match self {
            Suite::GammaRelations | Suite::Duplication | Suite::ThetaAddition => (0.5, 0.5),
            // `p` is swept, not sampled; the limit error constant grows with `|q|`
            Suite::LimitB1 | Suite::LimitMid | Suite::LimitB0 => (0.3, 0.15),
            _ => (0.3, 0.3),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace('-', "_");
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == key)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

/// Nome bounds and the minimum distance of pole families from the contour.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BaseEnvelope {
    pub p_max: f64,
    pub q_max: f64,
    pub pole_margin: f64,
}

/// Key in [`SuiteSpec::tolerances`] that overrides every identity.
pub const ALL_IDENTITIES: &str = "*";

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteSpec {
    suite: Suite,
    n_points: usize,
    seed: u64,
    envelope: BaseEnvelope,
    tolerances: BTreeMap<String, f64>,
    fixed_base: Option<(C64, C64)>,
}

impl SuiteSpec {
    pub const DEFAULT_SEED: u64 = 20_240_917;
    pub const DEFAULT_POLE_MARGIN: f64 = 0.05;

    /// The suite with its default point count, envelope and tolerances.
    pub fn new(suite: Suite) -> Self {
        let (p_max, q_max) = suite.default_envelope();
        Self {
            suite,
            n_points: suite.default_points(),
            seed: Self::DEFAULT_SEED,
            envelope: BaseEnvelope {
                p_max,
                q_max,
                pole_margin: Self::DEFAULT_POLE_MARGIN,
            },
            tolerances: BTreeMap::new(),
            fixed_base: None,
        }
    }

    pub fn with_points(mut self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("a suite needs at least one point".into()));
        }
        self.n_points = n;
        Ok(self)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_envelope(mut self, envelope: BaseEnvelope) -> Result<Self> {
        let BaseEnvelope { p_max, q_max, pole_margin } = envelope;
        if !(p_max > 0.0 && p_max < 1.0 && q_max > 0.0 && q_max < 1.0) {
            return Err(Error::InvalidConfig(format!("nome bounds must lie in (0, 1), got {p_max}, {q_max}")));
        }
        if !(pole_margin > 0.0 && pole_margin < 1.0) {
            return Err(Error::InvalidConfig(format!("pole margin must lie in (0, 1), got {pole_margin}")));
        }
        self.envelope = envelope;
        Ok(self)
    }

    /// Overrides the tolerance of one identity, or of all with [`ALL_IDENTITIES`].
    pub fn with_tolerance(mut self, identity: &str, tol: f64) -> Result<Self> {
        if !(tol >= 0.0) || !tol.is_finite() {
            return Err(Error::InvalidConfig(format!("tolerance must be finite and non-negative, got {tol}")));
        }
        self.tolerances.insert(identity.to_string(), tol);
        Ok(self)
    }

    /// Evaluates every case at these nomes instead of sampling them.
    pub fn with_fixed_base(mut self, p: C64, q: C64) -> Result<Self> {
        crate::special::EllipticBase::new(p, q)?;
        self.fixed_base = Some((p, q));
        Ok(self)
    }

    pub fn suite(&self) -> Suite {
        self.suite
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn envelope(&self) -> BaseEnvelope {
        self.envelope
    }

    pub fn fixed_base(&self) -> Option<(C64, C64)> {
        self.fixed_base
    }

    pub fn tolerance_for(&self, identity: &str, default: f64) -> f64 {
        self.tolerances
            .get(identity)
            .or_else(|| self.tolerances.get(ALL_IDENTITIES))
            .copied()
            .unwrap_or(default)
    }
}

/// An evaluation failure as recorded in a report.
#[derive(Clone, Debug, PartialEq)]
pub struct CaseError {
    pub code: &'static str,
    pub message: String,
}

impl From<Error> for CaseError {
    fn from(e: Error) -> Self {
        Self {
            code: e.code(),
            message: e.to_string(),
        }
    }
}

/// The two sides of one identity.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Outcome {
    pub lhs: C64,
    pub rhs: C64,
    pub n_used: Option<usize>,
    /// Errors along a `p -> 0` sequence; must decrease strictly to pass.
    pub trend: Vec<f64>,
    /// Replaces `|lhs - rhs| / max(|lhs|, |rhs|)` when the identity is judged
    /// on something finer than the two totals.
    pub residual: Option<f64>,
}

impl Outcome {
    pub fn sides(lhs: C64, rhs: C64) -> Self {
        Self {
            lhs,
            rhs,
            ..Self::default()
        }
    }

    pub fn with_n_used(mut self, n: usize) -> Self {
        self.n_used = Some(n);
        self
    }
}

pub type CaseResult = std::result::Result<Outcome, CaseError>;

type Eval = Box<dyn Fn() -> CaseResult + Send + Sync>;

/// One pending case: identity name, recorded inputs, tolerance and evaluator.
pub struct Job {
    pub identity: &'static str,
    pub inputs: Vec<NamedValue>,
    pub tolerance: f64,
    eval: Eval,
}

impl Job {
    pub fn new<F>(identity: &'static str, inputs: Vec<NamedValue>, tolerance: f64, eval: F) -> Self
    where
        F: Fn() -> CaseResult + Send + Sync + 'static,
    {
        Self {
            identity,
            inputs,
            tolerance,
            eval: Box::new(eval),
        }
    }
}

pub fn relative_error(lhs: C64, rhs: C64) -> f64 {
    let scale = lhs.norm().max(rhs.norm());
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs).norm() / scale
    }
}

fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

fn record(index: usize, job: &Job, result: CaseResult) -> CaseRecord {
    let mut rec = CaseRecord {
        index,
        identity: job.identity.to_string(),
        inputs: job.inputs.clone(),
        lhs: None,
        rhs: None,
        abs_err: None,
        rel_err: None,
        tolerance: job.tolerance,
        n_used: None,
        trend: Vec::new(),
        pass: false,
        status: CaseStatus::ErrorFail,
        error_code: None,
        error_message: None,
    };
    let result = result.and_then(|o| {
        let finite = o.lhs.is_finite()
            && o.rhs.is_finite()
            && o.trend.iter().all(|x| x.is_finite())
            && o.residual.is_none_or(f64::is_finite);
        if finite {
            Ok(o)
        } else {
            Err(CaseError {
                code: "NON_FINITE",
                message: format!("non-finite value: lhs {}, rhs {}", o.lhs, o.rhs),
            })
        }
    });
    match result {
        Ok(o) => {
            let rel = o.residual.unwrap_or_else(|| relative_error(o.lhs, o.rhs));
            rec.lhs = Some(o.lhs.into());
            rec.rhs = Some(o.rhs.into());
            rec.abs_err = Some((o.lhs - o.rhs).norm());
            rec.rel_err = Some(rel);
            rec.n_used = o.n_used;
            rec.pass = rel <= job.tolerance && strictly_decreasing(&o.trend);
            rec.status = if rec.pass { CaseStatus::Pass } else { CaseStatus::ToleranceFail };
            rec.trend = o.trend;
        }
        Err(e) => {
            rec.error_code = Some(e.code.to_string());
            rec.error_message = Some(e.message);
        }
    }
    rec
}

/// Generates and evaluates every case of `spec`. Evaluation errors become
/// failed cases; only sampling and configuration problems are returned as `Err`.
pub fn run_suite(spec: &SuiteSpec) -> Result<VerificationReport> {
    let start = Instant::now();
    let jobs = suites::build(spec)?;
    let cases: Vec<CaseRecord> = jobs
        .par_iter()
        .enumerate()
        .map(|(i, job)| record(i, job, (job.eval)()))
        .collect();
    let n_pass = cases.iter().filter(|c| c.pass).count();
    let n_error_fail = cases.iter().filter(|c| c.status == CaseStatus::ErrorFail).count();
    let max_rel_err = cases.iter().filter_map(|c| c.rel_err).fold(None, |m: Option<f64>, e| Some(m.map_or(e, |m| m.max(e))));
    Ok(VerificationReport {
        schema_version: SCHEMA_VERSION,
        suite: spec.suite.name().to_string(),
        seed: spec.seed,
        n_points: spec.n_points,
        summary: Summary {
            n_cases: cases.len(),
            n_pass,
            n_tolerance_fail: cases.len() - n_pass - n_error_fail,
            n_error_fail,
            max_rel_err,
            wall_time_s: start.elapsed().as_secs_f64(),
        },
        cases,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert_eq!("f4-main".parse::<Suite>().unwrap(), Suite::F4Main);
        assert_eq!("NOPE".parse::<Suite>().unwrap_err().code(), "UNKNOWN_SUITE");
    }

    #[test]
    fn spec_validation() {
        let spec = SuiteSpec::new(Suite::E0Eval);
        assert_eq!(spec.clone().with_points(0).unwrap_err().code(), "INVALID_CONFIG");
        let bad = BaseEnvelope {
            p_max: 0.3,
            q_max: 0.3,
            pole_margin: 0.0,
        };
        assert!(spec.clone().with_envelope(bad).is_err());
        let spec = spec.with_tolerance("e0_evaluation", 1e-6).unwrap();
        assert_eq!(spec.tolerance_for("e0_evaluation", 1e-8), 1e-6);
        assert_eq!(spec.tolerance_for("other", 1e-8), 1e-8);
        let spec = spec.with_tolerance(ALL_IDENTITIES, 1e-3).unwrap();
        assert_eq!(spec.tolerance_for("other", 1e-8), 1e-3);
    }

    #[test]
    fn failures_are_recorded_not_raised() {
        let job = Job::new("x", vec![], 1e-8, || Err(Error::Pole { re: 1.0, im: 0.0 }.into()));
        let rec = record(0, &job, (job.eval)());
        assert_eq!(rec.status, CaseStatus::ErrorFail);
        assert_eq!(rec.error_code.as_deref(), Some("POLE"));
        let job = Job::new("y", vec![], 1e-8, || {
            Ok(Outcome {
                trend: vec![1e-2, 1e-3, 2e-3],
                ..Outcome::sides(C64::new(1.0, 0.0), C64::new(1.0, 0.0))
            })
        });
        let rec = record(1, &job, (job.eval)());
        assert_eq!(rec.status, CaseStatus::ToleranceFail);
        let job = Job::new("z", vec![], 1e-8, || Ok(Outcome::sides(C64::new(f64::NAN, 0.0), C64::new(1.0, 0.0))));
        assert_eq!(record(2, &job, (job.eval)()).error_code.as_deref(), Some("NON_FINITE"));
    }
}
