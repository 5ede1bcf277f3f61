//! Dispatch of `lim_{p->0} E(b p^β; t_r p^{τ_r}; p, q)` to its closed form or
//! q-integral, read literally from the exponents (no canonicalisation), so
//! boundary values of `τ` select the boundary factors exactly.

use super::basic::{b0_integral, b1_integral, lim2_integral, lim3_integral, EdgeLimitShape};
use super::{e_f4, F4IntegralParams};
use crate::error::{Error, Result};
use crate::quadrature::{CrossingPolicy, Quadrature, QuadratureConfig};
use crate::special::{qpoch_inf, EllipticBase, TruncationPolicy, C64, ONE};
use crate::weyl::{LimitExponents, POLYTOPE_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LimitRegime {
    /// `β = 1`, `τ = 0`.
    B1Vertex,
    /// `0 < β < 1`, every `τ_r ∈ {0, 1-β}`.
    MidCaseA,
    /// `0 < β < 1`, three `τ_r = (1-β)/2` and `τ_idx = 3(1-β)/2`.
    MidCaseB { idx: usize },
    /// `0 < β < 1`, three `τ_r = (1-β)/2` and `τ_idx = (β-1)/2`.
    MidCaseC { idx: usize },
    /// Any other point with `0 < β < 1`.
    MidCaseD,
    /// `β = 0`, all `τ_r ∈ [0, 1]`.
    B0Interior,
    /// `β = 0`, `τ_idx < 0`.
    B0EdgeNeg { idx: usize },
    /// `β = 0`, `τ_idx > 1`.
    B0EdgePos { idx: usize },
    Outside,
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= POLYTOPE_TOL
}

/// The one coordinate equal to `odd` while the other three equal `common`.
fn three_and_one(tau: &[f64; 4], common: f64, odd: f64) -> Option<usize> {
    let idx = tau.iter().position(|&x| near(x, odd))?;
    let rest_ok = tau.iter().enumerate().all(|(i, &x)| i == idx || near(x, common));
    rest_ok.then_some(idx)
}

pub fn classify_limit(e: &LimitExponents) -> LimitRegime {
    if !e.in_polytope() {
        return LimitRegime::Outside;
    }
    let tau = &e.tau;
    if near(e.beta, 1.0) {
        return LimitRegime::B1Vertex;
    }
    if e.beta > POLYTOPE_TOL {
        let top = 1.0 - e.beta;
        let c = top / 2.0;
        if tau.iter().all(|&x| near(x, 0.0) || near(x, top)) {
            return LimitRegime::MidCaseA;
        }
        if let Some(idx) = three_and_one(tau, c, 3.0 * c) {
            return LimitRegime::MidCaseB { idx };
        }
        if let Some(idx) = three_and_one(tau, c, -c) {
            return LimitRegime::MidCaseC { idx };
        }
        return LimitRegime::MidCaseD;
    }
    // in the β = 0 slice at most one τ_r leaves [0, 1]
    if let Some(idx) = tau.iter().position(|&x| x < -POLYTOPE_TOL) {
        return LimitRegime::B0EdgeNeg { idx };
    }
    if let Some(idx) = tau.iter().position(|&x| x > 1.0 + POLYTOPE_TOL) {
        return LimitRegime::B0EdgePos { idx };
    }
    LimitRegime::B0Interior
}

/// Closed-form limit for `0 < β < 1`.
pub fn mid_beta_limit(b: C64, t: &[C64; 4], q: C64, e: &LimitExponents) -> Result<C64> {
    let pol = TruncationPolicy::default();
    let poch = |x: C64| qpoch_inf(x, q, &pol);
    match classify_limit(e) {
        LimitRegime::MidCaseA => {
            let top = 1.0 - e.beta;
            let arg = t
                .iter()
                .zip(e.tau.iter())
                .fold(ONE, |acc, (&x, &tr)| if near(tr, top) { acc * q / (b * x) } else { acc * x });
            poch(arg)
        }
        LimitRegime::MidCaseB { idx } => poch(q * q * q / (b * b * b * t[idx] * t[idx])),
        LimitRegime::MidCaseC { idx } => poch(q * t[idx] * t[idx] / b),
        LimitRegime::MidCaseD => Ok(ONE),
        _ => Err(Error::OutsidePolytope(format!(
            "closed-form limit needs 0 < β < 1 inside the polytope, got β = {}, τ = {:?}",
            e.beta, e.tau
        ))),
    }
}

/// The `β = 0`, `τ ∈ [0, 1]^4` limit integral.
pub fn limit_b0_interior(b: C64, t: &[C64; 4], q: C64, e: &LimitExponents, cfg: &QuadratureConfig) -> Result<Quadrature> {
    if classify_limit(e) != LimitRegime::B0Interior {
        return Err(Error::OutsidePolytope(format!("τ = {:?} at β = {} is not in [0, 1]^4", e.tau, e.beta)));
    }
    let pick = |level: f64| -> Vec<C64> {
        t.iter()
            .zip(e.tau.iter())
            .filter(|(_, &tr)| near(tr, level))
            .map(|(&x, _)| x)
            .collect()
    };
    b0_integral(b, &pick(0.0), &pick(1.0), q, cfg)
}

/// The `β = 0` limit with one `τ_idx` outside `[0, 1]`.
pub fn limit_b0_edge(b: C64, t: &[C64; 4], q: C64, e: &LimitExponents, cfg: &QuadratureConfig) -> Result<Quadrature> {
    let (idx, low_level, high_level, boundary_at, neg) = match classify_limit(e) {
        LimitRegime::B0EdgeNeg { idx } => {
            let x = e.tau[idx];
            (idx, -x, 1.0 + x, -0.5, true)
        }
        LimitRegime::B0EdgePos { idx } => {
            let x = e.tau[idx];
            (idx, x - 1.0, 2.0 - x, 1.5, false)
        }
        _ => {
            return Err(Error::OutsidePolytope(format!(
                "τ = {:?} at β = {} has no coordinate outside [0, 1]",
                e.tau, e.beta
            )))
        }
    };
    let others = || (0..4).filter(move |&r| r != idx);
    let shape = EdgeLimitShape {
        minus: others().filter(|&r| near(e.tau[r], low_level)).map(|r| t[r]).collect(),
        plus: others().filter(|&r| near(e.tau[r], high_level)).map(|r| t[r]).collect(),
        boundary: near(e.tau[idx], boundary_at),
    };
    if neg {
        lim2_integral(b, t[idx], &shape, q, cfg)
    } else {
        lim3_integral(b, t[idx], &shape, q, cfg)
    }
}

/// The limit value at `e`, by whichever representation applies.
pub fn limit_object(b: C64, t: &[C64; 4], q: C64, e: &LimitExponents, cfg: &QuadratureConfig) -> Result<C64> {
    match classify_limit(e) {
        LimitRegime::Outside => Err(Error::OutsidePolytope(format!("β = {}, τ = {:?}", e.beta, e.tau))),
        LimitRegime::B1Vertex => Ok(b1_integral(b, t, q, cfg)?.value),
        LimitRegime::B0Interior => Ok(limit_b0_interior(b, t, q, e, cfg)?.value),
        LimitRegime::B0EdgeNeg { .. } | LimitRegime::B0EdgePos { .. } => Ok(limit_b0_edge(b, t, q, e, cfg)?.value),
        _ => mid_beta_limit(b, t, q, e),
    }
}

/// `E(b p^β; t_r p^{τ_r}; p, q)` with residue-corrected contours, the
/// elliptic side of every limit check.
pub fn elliptic_at_exponents(
    b: C64,
    t: &[C64; 4],
    e: &LimitExponents,
    base: &EllipticBase,
    cfg: &QuadratureConfig,
) -> Result<Quadrature> {
    let p = base.p();
    let bp = b * p.powf(e.beta);
    let tp = [0, 1, 2, 3].map(|r| t[r] * p.powf(e.tau[r]));
    let params = F4IntegralParams::new(bp, tp, *base)?;
    e_f4(&params, &cfg.with_crossing(CrossingPolicy::ResidueCorrect))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn ex(beta: f64, tau: [f64; 4]) -> LimitExponents {
        LimitExponents::new(beta, tau)
    }

    #[test]
    fn classification() {
        assert_eq!(classify_limit(&ex(1.0, [0.0; 4])), LimitRegime::B1Vertex);
        assert_eq!(classify_limit(&ex(0.5, [0.0, 0.5, 0.0, 0.5])), LimitRegime::MidCaseA);
        assert_eq!(classify_limit(&ex(0.5, [0.25, 0.25, 0.75, 0.25])), LimitRegime::MidCaseB { idx: 2 });
        assert_eq!(classify_limit(&ex(0.5, [-0.25, 0.25, 0.25, 0.25])), LimitRegime::MidCaseC { idx: 0 });
        assert_eq!(classify_limit(&ex(0.4, [0.3; 4])), LimitRegime::MidCaseD);
        assert_eq!(classify_limit(&ex(0.0, [0.0, 1.0, 0.3, 0.5])), LimitRegime::B0Interior);
        assert_eq!(classify_limit(&ex(0.0, [0.2, -0.2, 0.5, 0.8])), LimitRegime::B0EdgeNeg { idx: 1 });
        assert_eq!(classify_limit(&ex(0.0, [0.5, 0.5, 1.25, 0.5])), LimitRegime::B0EdgePos { idx: 2 });
        // τ_4 = (3-β)/2 sits outside the polytope
        assert_eq!(classify_limit(&ex(0.5, [0.25, 0.25, 0.25, 1.25])), LimitRegime::Outside);
    }

    #[test]
    fn mid_beta_values() {
        let (b, q) = (r(0.5), r(0.2));
        let t = [r(0.6), r(0.55), r(0.5), r(0.45)];
        let pol = TruncationPolicy::default();
        assert_eq!(mid_beta_limit(b, &t, q, &ex(0.4, [0.3; 4])).unwrap(), ONE);
        let all_zero = mid_beta_limit(b, &t, q, &ex(0.5, [0.0; 4])).unwrap();
        let expected = qpoch_inf(t[0] * t[1] * t[2] * t[3], q, &pol).unwrap();
        assert!((all_zero - expected).norm() < 1e-15);
        let mixed = mid_beta_limit(b, &t, q, &ex(0.5, [0.0, 0.5, 0.0, 0.0])).unwrap();
        let expected = qpoch_inf(t[0] * q / (b * t[1]) * t[2] * t[3], q, &pol).unwrap();
        assert!((mixed - expected).norm() < 1e-15);
        let err = mid_beta_limit(b, &t, q, &ex(0.0, [0.0; 4])).unwrap_err();
        assert_eq!(err.code(), "OUTSIDE_POLYTOPE");
    }

    #[test]
    fn interior_dispatch_reduces_to_b2() {
        let (b, q) = (r(0.3), r(0.2));
        let t = [r(0.5), r(0.45), r(0.4), r(0.35)];
        let cfg = QuadratureConfig::default();
        let a = limit_object(b, &t, q, &ex(0.0, [0.0; 4]), &cfg).unwrap();
        let c = super::super::b2_integral(b, &t, q, &cfg).unwrap().value;
        assert!((a - c).norm() < 1e-15 * c.norm());
    }

    #[test]
    fn edge_dispatch_builds_the_shape() {
        let (b, q) = (r(0.3), r(0.2));
        let t = [r(0.5), r(0.4), r(0.45), r(0.35)];
        let cfg = QuadratureConfig::default();
        let e = ex(0.0, [-0.5, 0.5, 0.5, 0.5]);
        let a = limit_b0_edge(b, &t, q, &e, &cfg).unwrap().value;
        let rhs = super::super::edge_w14_13_rep(b, t[0], &[t[1], t[2], t[3]], q).unwrap();
        assert!((a - rhs).norm() < 1e-10 * rhs.norm(), "{a} vs {rhs}");
    }
}
