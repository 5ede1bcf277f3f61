//! Case builders, one per suite. Every random draw happens here, in order,
//! before any case is evaluated.

use std::f64::consts::PI;

use super::{admissible, orbit_admissible, CaseError, Job, NamedValue, Outcome, Sampler, Suite, SuiteSpec};
use crate::beta::{
    b0_integral, b1_integral, b2_integral, e0_product, e1_transform_pair, e7_v, e_f4, e_m, edge_integral, edge_kphi_rep,
    edge_w14_13_rep, elliptic_at_exponents, f4_move, f4_pole_factors, lim2_integral, limit_object, octahedron_integral,
    series_rep_edge_4phi3, series_rep_octahedron_2phi1, terminating_b2_pair, w8_7_closed_form, w8_7_explicit_terms,
    w8_7_series, w8_7_vwp_terms, BetaParams, EdgeLimitShape, F4IntegralParams, LimitExponents,
};
use crate::error::Result;
use crate::quadrature::{CrossingPolicy, PoleFactor, QuadratureConfig};
use crate::series::w14_13_value;
use crate::special::{
    elliptic_gamma, elliptic_gamma_prod, pq_poch, pq_poch_prod, qpoch_finite, qpoch_inf, qpoch_prod,
    riemann_theta_addition_sides, theta, EllipticBase, TruncationPolicy, C64, ONE, ZERO,
};
use crate::weyl::{b4_subgroup, mult_action, roots, simple_reflections, weyl_group, F4Point, GroupElement};

/// The nomes `p` along which limit cases are followed.
pub const P_SEQUENCE: [f64; 3] = [1e-2, 1e-3, 1e-4];

const LIMIT_TOL: f64 = 1e-2;
const INTEGRAL_TOL: f64 = 1e-8;

/// The error of a limit case decays like `p^γ / |b|` with `γ <= min(β, 1-β)`,
/// so limit suites sample `b` near the unit circle and `β` near one half.
const LIMIT_B_MODULUS: (f64, f64) = (0.6, 0.95);
const MID_BETA: (f64, f64) = (0.45, 0.55);
/// Small `t_r` inflate the same constant, as `1/|t_r|`.
const LIMIT_T_MODULUS: (f64, f64) = (0.5, 0.9);

fn limit_t(s: &mut Sampler) -> [C64; 4] {
    [0; 4].map(|_| s.complex(LIMIT_T_MODULUS.0, LIMIT_T_MODULUS.1, PI))
}

/// Perturbation of `t_4` used to approach the pinched terminating contour.
const TERMINATING_EPS: f64 = 1e-3;

pub(super) fn build(spec: &SuiteSpec) -> Result<Vec<Job>> {
    let mut s = Sampler::new(spec.seed());
    match spec.suite() {
        Suite::GammaRelations => gamma_relations(spec, &mut s),
        Suite::Duplication => duplication(spec, &mut s),
        Suite::E0Eval => e0_eval(spec, &mut s),
        Suite::E7Move => e7_move(spec, &mut s),
        Suite::F4Main => f4_main(spec, &mut s),
        Suite::F4Orbit => f4_orbit(spec, &mut s),
        Suite::LimitB1 => limit_b1(spec, &mut s),
        Suite::LimitMid => limit_mid(spec, &mut s),
        Suite::LimitB0 => limit_b0(spec, &mut s),
        Suite::SeriesReps => series_reps(spec, &mut s),
        Suite::W87 => w8_7(spec, &mut s),
        Suite::ThetaAddition => theta_addition(spec, &mut s),
        Suite::GroupFacts => Ok(group_facts(spec)),
    }
}

fn nv(name: &str, v: C64) -> NamedValue {
    NamedValue::new(name, v)
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn base_inputs(base: &EllipticBase) -> Vec<NamedValue> {
    vec![nv("p", base.p()), nv("q", base.q())]
}

fn indexed(prefix: &str, xs: &[C64]) -> Vec<NamedValue> {
    xs.iter().enumerate().map(|(i, &x)| nv(&format!("{prefix}{}", i + 1), x)).collect()
}

fn draw_base(spec: &SuiteSpec, s: &mut Sampler) -> Result<EllipticBase> {
    match spec.fixed_base() {
        Some((p, q)) => EllipticBase::new(p, q),
        None => {
            let e = spec.envelope();
            s.base(e.p_max, e.q_max)
        }
    }
}

/// `q` alone, for the `p -> 0` suites and the q-series suites.
fn draw_q(spec: &SuiteSpec, s: &mut Sampler) -> C64 {
    match spec.fixed_base() {
        Some((_, q)) => q,
        None => s.complex(super::MIN_NOME, spec.envelope().q_max, PI),
    }
}

fn margin(spec: &SuiteSpec) -> f64 {
    spec.envelope().pole_margin
}

fn residue_cfg() -> QuadratureConfig {
    QuadratureConfig::default().with_crossing(CrossingPolicy::ResidueCorrect)
}

fn gamma_relations(spec: &SuiteSpec, s: &mut Sampler) -> Result<Vec<Job>> {
    let mut jobs = Vec::new();
    for _ in 0..spec.n_points() {
        let base = draw_base(spec, s)?;
        let x = s.complex(0.2, 1.5, PI);
        let mut inputs = base_inputs(&base);
        inputs.push(nv("x", x));
        let (p, q) = (base.p(), base.q());
        jobs.push(Job::new(
            "gamma_reflection",
            inputs.clone(),
            spec.tolerance_for("gamma_reflection", 1e-10),
            move || Ok(Outcome::sides(elliptic_gamma(x, &base)? * elliptic_gamma(base.pq() / x, &base)?, ONE)),
        ));
        jobs.push(Job::new(
            "gamma_difference_p",
            inputs.clone(),
            spec.tolerance_for("gamma_difference_p", 1e-10),
            move || {
                let rhs = theta(x, q, base.policy())? * elliptic_gamma(x, &base)?;
                Ok(Outcome::sides(elliptic_gamma(p * x, &base)?, rhs))
            },
        ));
        jobs.push(Job::new(
            "gamma_difference_q",
            inputs,
            spec.tolerance_for("gamma_difference_q", 1e-10),
            move || {
                let rhs = theta(x, p, base.policy())? * elliptic_gamma(x, &base)?;
                Ok(Outcome::sides(elliptic_gamma(q * x, &base)?, rhs))
            },
        ));
    }
    Ok(jobs)
}

/// `±sqrt(z), ±sqrt(qz)`.
fn halves(z: C64, q: C64) -> [C64; 4] {
    let (a, b) = (z.sqrt(), (q * z).sqrt());
    [a, -a, b, -b]
}

/// `±sqrt(z), ±sqrt(pz), ±sqrt(qz), ±sqrt(pqz)`.
fn quarters(z: C64, base: &EllipticBase) -> [C64; 8] {
    let [a, b, c, d] = [z, base.p() * z, base.q() * z, base.pq() * z].map(|x| x.sqrt());
    [a, -a, b, -b, c, -c, d, -d]
}

fn duplication(spec: &SuiteSpec, s: &mut Sampler) -> Result<Vec<Job>> {
    let mut jobs = Vec::new();
    for _ in 0..spec.n_points() {
        let base = draw_base(spec, s)?;
        let z = s.complex(0.2, 1.5, PI);
        let k = s.index(9);
        let q = base.q();
        let mut inputs = base_inputs(&base);
        inputs.push(nv("z", z));
        let mut finite_inputs = inputs.clone();
        finite_inputs.push(nv("k", real(k as f64)));
        jobs.push(Job::new(
            "duplication_finite",
            finite_inputs,
            spec.tolerance_for("duplication_finite", 1e-10),
            move || {
                let lhs = halves(z, q).iter().map(|&x| qpoch_finite(x, q, k)).product();
                Ok(Outcome::sides(lhs, qpoch_finite(z, q, 2 * k)))
            },
        ));
        jobs.push(Job::new(
            "duplication_q",
            inputs.clone(),
            spec.tolerance_for("duplication_q", 1e-10),
            move || Ok(Outcome::sides(qpoch_prod(&halves(z, q), q, base.policy())?, qpoch_inf(z, q, base.policy())?)),
        ));
        jobs.push(Job::new(
            "duplication_pq",
            inputs.clone(),
            spec.tolerance_for("duplication_pq", 1e-10),
            move || Ok(Outcome::sides(pq_poch_prod(&quarters(z, &base), &base)?, pq_poch(z, &base)?)),
        ));
        jobs.push(Job::new(
            "duplication_gamma",
            inputs,
            spec.tolerance_for("duplication_gamma", 1e-10),
            move || Ok(Outcome::sides(elliptic_gamma_prod(&quarters(z, &base), &base)?, elliptic_gamma(z, &base)?)),
        ));
    }
    Ok(jobs)
}

fn gamma_factors(t: &[C64]) -> Vec<PoleFactor> {
    t.iter().flat_map(|&x| PoleFactor::gamma_pair(x)).collect()
}

fn e0_eval(spec: &SuiteSpec, s: &mut Sampler) -> Result<Vec<Job>> {
    let m = margin(spec);
    let mut jobs = Vec::new();
    for _ in 0..spec.n_points() {
        let (base, params) = s.rejection(
            |s| {
                let base = draw_base(spec, s)?;
                let free: Vec<C64> = (0..5).map(|_| s.param()).collect();
                Ok((base, BetaParams::balanced(0, &free, &base)?))
            },
            |(base, bp)| admissible(&gamma_factors(bp.t()), base, m),
        )?;
        let mut inputs = base_inputs(&base);
        inputs.extend(indexed("t", params.t()));
        jobs.push(Job::new(
            "e0_evaluation",
            inputs,
            spec.tolerance_for("e0_evaluation", INTEGRAL_TOL),
            move || {
                let quad = e_m(&params, &base, &QuadratureConfig::default())?;
                Ok(Outcome::sides(quad.value, e0_product(params.t(), &base)?).with_n_used(quad.n_used))
            },
        ));
    }
    Ok(jobs)
}

fn e7_move(spec: &SuiteSpec, s: &mut Sampler) -> Result<Vec<Job>> {
    let m = margin(spec);
    let mut jobs = Vec::new();
    for _ in 0..spec.n_points() {
        let (base, params, _) = s.rejection(
            |s| {
                let base = draw_base(spec, s)?;
                let free: Vec<C64> = (0..7).map(|_| s.param()).collect();
                let bp = BetaParams::balanced(1, &free, &base)?;
                let v = e7_v(bp.t(), &base)?;
                let moved: Vec<C64> = bp.t().iter().enumerate().map(|(i, &x)| if i < 4 { x * v } else { x / v }).collect();
                Ok((base, bp, moved))
            },
            |(base, bp, moved)| admissible(&gamma_factors(bp.t()), base, m) && admissible(&gamma_factors(moved), base, m),
        )?;
        let mut inputs = base_inputs(&base);
        inputs.extend(indexed("t", params.t()));
        jobs.push(Job::new(
            "e7_move",
            inputs,
            spec.tolerance_for("e7_move", INTEGRAL_TOL),
            move || {
                let (l, r) = e1_transform_pair(params.t(), &base, &QuadratureConfig::default())?;
                Ok(Outcome::sides(l.value, r.value).with_n_used(l.n_used + r.n_used))
            },
        ));
    }
    Ok(jobs)
}

fn f4_inputs(params: &F4IntegralParams) -> Vec<NamedValue> {
    let mut inputs = base_inputs(&params.base);
    inputs.push(nv("b", params.b));
    inputs.extend(indexed("t", &params.t));
    inputs
}

fn f4_main_job(identity: &'static str, params: F4IntegralParams, tol: f64) -> Job {
    Job::new(identity, f4_inputs(&params), tol, move || {
        let cfg = QuadratureConfig::default();
        let l = e_f4(&params, &cfg)?;
        let r = e_f4(&f4_move(&params)?, &cfg)?;
        Ok(Outcome::sides(l.value, r.value).with_n_used(l.n_used + r.n_used))
    })
}

/// `p = q = 0.3`, `b = t_1 = t_2 = q^{3/4}`, `t_3 = t_4 = q^{1/2}`, where `v = 1`.
pub fn f4_proof_point() -> Result<F4IntegralParams> {
    let q = 0.3f64;
    let (a, h) = (real(q.powf(0.75)), real(q.sqrt()));
    F4IntegralParams::new(a, [a, a, h, h], EllipticBase::real(q, q)?)
}

fn f4_main(spec: &SuiteSpec, s: &mut Sampler) -> Result<Vec<Job>> {
    let m = margin(spec);
    let tol = spec.tolerance_for("f4_main", INTEGRAL_TOL);
    let mut jobs = vec![f4_main_job("f4_main_proof_point", f4_proof_point()?, tol)];
    for _ in 0..spec.n_points() {
        let params = s.rejection(
            |s| {
                let base = draw_base(spec, s)?;
                let b = s.param();
                let t = [s.param(), s.param(), s.param(), s.param()];
                F4IntegralParams::new(b, t, base)
            },
            |p| {
                admissible(&f4_pole_factors(p), &p.base, m)
                    && f4_move(p).is_ok_and(|mv| admissible(&f4_pole_factors(&mv), &mv.base, m))
            },
        )?;
        jobs.push(f4_main_job("f4_main", params, tol));
    }
    Ok(jobs)
}

fn word_element(word: &[usize]) -> GroupElement {
    let gens = simple_reflections();
    word.iter().fold(GroupElement::identity(), |acc, &i| acc * gens[i].clone())
}

fn f4_orbit(spec: &SuiteSpec, s: &mut Sampler) -> Result<Vec<Job>> {
    let m = margin(spec);
    let slack = -(1.0 - m).ln();
    let params = s.rejection(
        |s| {
            let base = draw_base(spec, s)?;
            let b = s.complex(0.2, (1.0 - m) * (1.0 - m), PI);
            let a = base.pq() / b;
            let c = -0.5 * a.norm().ln();
            let sa = a.sqrt();
            let t = [0; 4].map(|_| {
                let u = s.uniform(-c, c);
                sa * C64::from_polar(u.exp(), s.uniform(-PI, PI))
            });
            F4IntegralParams::new(b, t, base)
        },
        |p| orbit_admissible(&p.t, p.action_scale(), slack),
    )?;
    let cfg = QuadratureConfig::default();
    let reference: std::result::Result<(C64, usize), CaseError> =
        e_f4(&params, &cfg).map(|q| (q.value, q.n_used)).map_err(CaseError::from);
    let point = F4Point::new(params.t, params.action_scale())?;
    let tol = spec.tolerance_for("f4_orbit", INTEGRAL_TOL);
    let mut jobs = Vec::new();
    for i in 0..spec.n_points() {
        let word: Vec<usize> = if i < 4 {
            vec![i]
        } else {
            let len = 2 + s.index(11);
            (0..len).map(|_| s.index(4)).collect()
        };
        let g = word_element(&word);
        let image = mult_action(&g, &point)?;
        let mut inputs = f4_inputs(&params);
        let digits: Vec<String> = word.iter().map(|d| (d + 1).to_string()).collect();
        inputs.push(nv(&format!("word s{}", digits.join(".s")), real(word.len() as f64)));
        inputs.extend(indexed("w(t)", &image.z));
        let reference = reference.clone();
        jobs.push(Job::new("f4_orbit", inputs, tol, move || {
            let (r, n0) = reference.clone()?;
            let moved = params.with_t(image.z)?;
            let l = e_f4(&moved, &QuadratureConfig::default())?;
            Ok(Outcome::sides(l.value, r).with_n_used(l.n_used + n0))
        }));
    }
    Ok(jobs)
}

/// Follows `E(b p^β; t p^τ)` along [`P_SEQUENCE`] towards `limit`.
fn limit_outcome(b: C64, t: [C64; 4], q: C64, e: LimitExponents, limit: C64) -> Result<Outcome> {
    let cfg = residue_cfg();
    let mut trend = Vec::with_capacity(P_SEQUENCE.len());
    let mut last = ZERO;
    let mut n_used = 0;
    for p in P_SEQUENCE {
        let base = EllipticBase::new(real(p), q)?;
        let quad = elliptic_at_exponents(b, &t, &e, &base, &cfg)?;
        trend.push(super::relative_error(quad.value, limit));
        last = quad.value;
        n_used += quad.n_used;
    }
    Ok(Outcome {
        lhs: last,
        rhs: limit,
        n_used: Some(n_used),
        trend,
        residual: None,
    })
}

fn limit_inputs(q: C64, b: C64, t: &[C64; 4], e: &LimitExponents) -> Vec<NamedValue> {
    let mut inputs = vec![nv("q", q), nv("b", b)];
    inputs.extend(indexed("t", t));
    inputs.push(nv("beta", real(e.beta)));
    inputs.extend(e.tau.iter().enumerate().map(|(i, &x)| nv(&format!("tau{}", i + 1), real(x))));
    inputs
}

fn limit_b1(spec: &SuiteSpec, s: &mut Sampler) -> Result<Vec<Job>> {
    let m = margin(spec);
    let tol = spec.tolerance_for("limit_b1", LIMIT_TOL);
    let mut jobs = Vec::new();
    for _ in 0..spec.n_points() {
        let (q, b, t) = s.rejection(
            |s| {
                let q = draw_q(spec, s);
                let b = s.complex(0.5, 0.9, PI);
                let t = [s.param(), s.param(), s.param(), s.param()];
                Ok((q, b, t))
            },
            |&(q, b, t)| {
                let factors: Vec<PoleFactor> = t
                    .iter()
                    .flat_map(|&x| PoleFactor::inv_poch_pair(x).into_iter().chain(PoleFactor::inv_poch_pair(q / (b * x))))
                    .collect();
                EllipticBase::new(ZERO, q).is_ok_and(|base| admissible(&factors, &base, m))
            },
        )?;
        let e = LimitExponents::new(1.0, [0.0; 4]);
        jobs.push(Job::new("limit_b1", limit_inputs(q, b, &t, &e), tol, move || {
            let limit = b1_integral(b, &t, q, &QuadratureConfig::default())?;
            Ok(limit_outcome(b, t, q, e, limit.value)?)
        }));
    }
    Ok(jobs)
}

/// Exponent patterns for `0 < β < 1`, one per closed-form case plus a
/// mixed vertex; `c = (1-β)/2`.
fn mid_pattern(i: usize, beta: f64) -> [f64; 4] {
    let top = 1.0 - beta;
    let c = top / 2.0;
    match i % 5 {
        0 => [0.0; 4],
        1 => [0.0, top, 0.0, top],
        2 => [c, c, c, 3.0 * c],
        3 => [c, c, c, -c],
        _ => [0.6 * c, c, 1.4 * c, c],
    }
}

fn limit_mid(spec: &SuiteSpec, s: &mut Sampler) -> Result<Vec<Job>> {
    let tol = spec.tolerance_for("limit_mid", LIMIT_TOL);
    let mut jobs = Vec::new();
    for i in 0..spec.n_points() {
        let q = draw_q(spec, s);
        let b = s.complex(LIMIT_B_MODULUS.0, LIMIT_B_MODULUS.1, PI);
        let t = limit_t(s);
        let beta = s.uniform(MID_BETA.0, MID_BETA.1);
        let mut tau = mid_pattern(i, beta);
        tau.rotate_left(s.index(4));
        let e = LimitExponents::new(beta, tau);
        jobs.push(Job::new("limit_mid", limit_inputs(q, b, &t, &e), tol, move || {
            let limit = limit_object(b, &t, q, &e, &QuadratureConfig::default())?;
            Ok(limit_outcome(b, t, q, e, limit)?)
        }));
    }
    Ok(jobs)
}

/// `β = 0` exponent patterns: vertex, edge, square, mixed interior points,
/// then `τ_1 < 0` and `τ_1 > 1` with and without the boundary factor.
pub const B0_PATTERNS: [[f64; 4]; 9] = [
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.5],
    [0.0, 0.0, 0.45, 0.55],
    [0.0, 1.0, 0.5, 0.5],
    [0.0, 0.0, 1.0, 1.0],
    [-0.25, 0.25, 0.25, 0.75],
    [-0.5, 0.5, 0.5, 0.5],
    [1.25, 0.25, 0.75, 0.75],
    [1.5, 0.5, 0.5, 0.5],
];

fn limit_b0(spec: &SuiteSpec, s: &mut Sampler) -> Result<Vec<Job>> {
    let tol = spec.tolerance_for("limit_b0", LIMIT_TOL);
    let mut jobs = Vec::new();
    for i in 0..spec.n_points() {
        let q = draw_q(spec, s);
        let b = s.complex(LIMIT_B_MODULUS.0, LIMIT_B_MODULUS.1, PI);
        let t = limit_t(s);
        let e = LimitExponents::new(0.0, B0_PATTERNS[i % B0_PATTERNS.len()]);
        jobs.push(Job::new("limit_b0", limit_inputs(q, b, &t, &e), tol, move || {
            let limit = limit_object(b, &t, q, &e, &residue_cfg())?;
            Ok(limit_outcome(b, t, q, e, limit)?)
        }));
    }
    Ok(jobs)
}

fn series_reps(spec: &SuiteSpec, s: &mut Sampler) -> Result<Vec<Job>> {
    let tol = |id: &str| spec.tolerance_for(id, INTEGRAL_TOL);
    let pol = TruncationPolicy::default();
    let mut jobs = Vec::new();
    for i in 0..spec.n_points() {
        let q = draw_q(spec, s);
        let b = s.complex(0.1, 0.5, PI);
        let t = [s.param(), s.param(), s.param(), s.param()];
        let k = s.index(4);
        let u: Vec<C64> = (0..k).map(|_| s.param()).collect();
        let n_term = 1 + (i % 2) as u32;
        let mut inputs = vec![nv("q", q), nv("b", b)];
        inputs.extend(indexed("t", &t));
        let cfg = residue_cfg();

        jobs.push(Job::new("b2_w14_13", inputs.clone(), tol("b2_w14_13"), move || {
            let l = b2_integral(b, &t, q, &cfg)?;
            Ok(Outcome::sides(l.value, w14_13_value(b, &t, q, &pol)?).with_n_used(l.n_used))
        }));
        let t3 = [t[0], t[1], t[2]];
        jobs.push(Job::new("edge_4phi3", inputs.clone(), tol("edge_4phi3"), move || {
            let l = edge_integral(b, &t3, q, &cfg)?;
            Ok(Outcome::sides(l.value, series_rep_edge_4phi3(b, &t3, q)?).with_n_used(l.n_used))
        }));
        jobs.push(Job::new("octahedron_2phi1", inputs.clone(), tol("octahedron_2phi1"), move || {
            let l = octahedron_integral(b, t[0], t[1], q, &cfg)?;
            Ok(Outcome::sides(l.value, series_rep_octahedron_2phi1(b, t[0], t[1], q)?).with_n_used(l.n_used))
        }));
        jobs.push(Job::new("interior_qb2", inputs.clone(), tol("interior_qb2"), move || {
            let l = b0_integral(b, &[t[0]], &[], q, &cfg)?;
            Ok(Outcome::sides(l.value, qpoch_inf(q * b * b, q, &pol)?).with_n_used(l.n_used))
        }));
        let ts = [t[1], t[2], t[3]];
        jobs.push(Job::new("edge_w14_13", inputs.clone(), tol("edge_w14_13"), move || {
            let shape = EdgeLimitShape {
                minus: ts.to_vec(),
                plus: ts.to_vec(),
                boundary: true,
            };
            let l = lim2_integral(b, t[0], &shape, q, &cfg)?;
            Ok(Outcome::sides(l.value, edge_w14_13_rep(b, t[0], &ts, q)?).with_n_used(l.n_used))
        }));
        let mut kphi_inputs = inputs.clone();
        kphi_inputs.extend(indexed("u", &u));
        jobs.push(Job::new("edge_kphi", kphi_inputs, tol("edge_kphi"), move || {
            let shape = EdgeLimitShape {
                minus: u.clone(),
                plus: vec![],
                boundary: false,
            };
            let l = lim2_integral(b, t[0], &shape, q, &cfg)?;
            Ok(Outcome::sides(l.value, edge_kphi_rep(b, t[0], &u, q)?).with_n_used(l.n_used))
        }));
        let mut term_inputs = vec![nv("q", q), nv("b", b)];
        term_inputs.extend(indexed("t", &t3));
        term_inputs.push(nv("n", real(n_term as f64)));
        jobs.push(Job::new("b2_terminating", term_inputs, spec.tolerance_for("b2_terminating", 1e-6), move || {
            let (l, r) = terminating_b2_pair(b, &t3, n_term, q, TERMINATING_EPS, &cfg)?;
            Ok(Outcome::sides(l, r))
        }));
    }
    Ok(jobs)
}

/// Terms compared one by one in the explicit `8W7` form.
const W87_TERMS: usize = 7;

fn w8_7(spec: &SuiteSpec, s: &mut Sampler) -> Result<Vec<Job>> {
    let pol = TruncationPolicy::default();
    let mut jobs = Vec::new();
    for _ in 0..spec.n_points() {
        let q = draw_q(spec, s);
        let b = s.complex(0.1, 0.5, PI);
        let t = s.param();
        let inputs = vec![nv("q", q), nv("b", b), nv("t", t)];
        jobs.push(Job::new(
            "w8_7_evaluation",
            inputs.clone(),
            spec.tolerance_for("w8_7_evaluation", INTEGRAL_TOL),
            move || Ok(Outcome::sides(w8_7_series(b, t, q, &pol)?, w8_7_closed_form(b, t, q)?)),
        ));
        jobs.push(Job::new("w8_7_terms", inputs, spec.tolerance_for("w8_7_terms", 1e-12), move || {
            let x = w8_7_explicit_terms(b, t, q, W87_TERMS);
            let y = w8_7_vwp_terms(b, t, q, W87_TERMS)?;
            let worst = x.iter().zip(y.iter()).map(|(&a, &c)| super::relative_error(a, c)).fold(0.0, f64::max);
            Ok(Outcome {
                residual: Some(worst),
                ..Outcome::sides(x.iter().sum(), y.iter().sum())
            })
        }));
    }
    Ok(jobs)
}

fn theta_addition(spec: &SuiteSpec, s: &mut Sampler) -> Result<Vec<Job>> {
    let pol = TruncationPolicy::default();
    let mut jobs = Vec::new();
    for _ in 0..spec.n_points() {
        let q = draw_q(spec, s);
        let [b, w, z] = [0; 3].map(|_| s.complex(0.3, 1.2, PI));
        let inputs = vec![nv("q", q), nv("b", b), nv("w", w), nv("z", z)];
        jobs.push(Job::new(
            "theta_addition",
            inputs,
            spec.tolerance_for("theta_addition", 1e-12),
            move || {
                let (l, r) = riemann_theta_addition_sides(b, w, z, q, &pol)?;
                Ok(Outcome::sides(l, r))
            },
        ));
    }
    Ok(jobs)
}

fn count_job(identity: &'static str, observed: impl Fn() -> usize + Send + Sync + 'static, expected: usize) -> Job {
    Job::new(identity, vec![], 0.0, move || Ok(Outcome::sides(real(observed() as f64), real(expected as f64))))
}

fn group_facts(_spec: &SuiteSpec) -> Vec<Job> {
    let mut jobs = vec![
        count_job("root_count", || roots().len(), 48),
        count_job("long_roots", || roots().iter().filter(|r| r.is_long()).count(), 24),
        count_job("short_roots", || roots().iter().filter(|r| !r.is_long()).count(), 24),
        count_job("group_order", || weyl_group().len(), 1152),
        count_job("b4_order", || b4_subgroup().len(), 384),
        count_job("b4_index", || weyl_group().len() / b4_subgroup().len(), 3),
        count_job("b4_signed_permutations", || weyl_group().iter().filter(|g| g.is_signed_permutation()).count(), 384),
    ];
    // Coxeter matrix of the chain s1 - s2 = s3 - s4
    let coxeter = [[1, 3, 2, 2], [3, 1, 4, 2], [2, 4, 1, 3], [2, 2, 3, 1]];
    const NAMES: [[&str; 4]; 4] = [
        ["", "coxeter_order_12", "coxeter_order_13", "coxeter_order_14"],
        ["", "", "coxeter_order_23", "coxeter_order_24"],
        ["", "", "", "coxeter_order_34"],
        ["", "", "", ""],
    ];
    for i in 0..4 {
        jobs.push(count_job(["generator_order_1", "generator_order_2", "generator_order_3", "generator_order_4"][i], move || simple_reflections()[i].order(), 2));
        for j in i + 1..4 {
            jobs.push(count_job(
                NAMES[i][j],
                move || {
                    let g = simple_reflections();
                    (g[i].clone() * g[j].clone()).order()
                },
                coxeter[i][j],
            ));
        }
    }
    jobs
}
