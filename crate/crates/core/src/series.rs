//! Basic hypergeometric series `r+1 phi r` and very-well-poised `r+1 W r`.
//!
//! Terms are generated by the ratio recurrence
//! `t_{k+1} = t_k * z * prod(1 - a_i q^k) / (prod(1 - b_j q^k) (1 - q^{k+1}))`
//! and accumulated with compensated summation.

use crate::compensated::CompensatedSum;
use crate::error::{Error, Result};
use crate::special::{qpoch_inf, qpoch_prod, TruncationPolicy, C64, ONE, ZERO};

/// Relative distance at which a parameter is treated as an exact `q^-n`.
pub const TERMINATION_TOL: f64 = 1e-12;

/// Consecutive negligible terms required before a non-terminating sum stops.
const QUIET_TERMS: usize = 3;

/// `r+1 phi r (a_1..a_{r+1}; b_1..b_r; q, z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiSeriesSpec {
    numerators: Vec<C64>,
    denominators: Vec<C64>,
    q: C64,
    z: C64,
}

impl PhiSeriesSpec {
    pub fn new(numerators: Vec<C64>, denominators: Vec<C64>, q: C64, z: C64) -> Result<Self> {
        if numerators.len() != denominators.len() + 1 {
            return Err(Error::InvalidConfig(format!(
                "phi series needs r+1 numerators over r denominators, got {} over {}",
                numerators.len(),
                denominators.len()
            )));
        }
        Ok(Self {
            numerators,
            denominators,
            q,
            z,
        })
    }

    pub fn numerators(&self) -> &[C64] {
        &self.numerators
    }

    pub fn denominators(&self) -> &[C64] {
        &self.denominators
    }

    pub fn q(&self) -> C64 {
        self.q
    }

    pub fn z(&self) -> C64 {
        self.z
    }

    /// The same series with an extra numerator/denominator pair.
    pub fn with_pair(mut self, num: C64, den: C64) -> Self {
        self.numerators.push(num);
        self.denominators.push(den);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesResult {
    pub value: C64,
    pub terms_used: usize,
    /// Set when a numerator `q^-n` cut the sum off.
    pub terminated: bool,
    /// Zero whenever `terminated` is set.
    pub tail_estimate: f64,
}

/// Smallest `n <= limit` with `x` within tolerance of `q^-n`.
pub fn inverse_power_index(x: C64, q: C64, limit: usize) -> Option<usize> {
    let aq = q.norm();
    let ax = x.norm();
    let mut qn = ONE;
    for n in 0..=limit {
        let scale = qn.norm();
        if n > 0 && (aq == 0.0 || scale > 2.0 * ax.max(1.0)) {
            break;
        }
        if (x - qn).norm() < TERMINATION_TOL * scale {
            return Some(n);
        }
        qn /= q;
    }
    None
}

/// Sums `spec` until it terminates or three consecutive terms are negligible.
pub fn sum_phi(spec: &PhiSeriesSpec, policy: &TruncationPolicy) -> Result<SeriesResult> {
    let q = spec.q;
    if !(q.norm() < 1.0) {
        return Err(Error::NonConvergent(format!("series needs |q| < 1, got {}", q.norm())));
    }
    let max_terms = policy.max_terms();
    let stop_at = spec
        .numerators
        .iter()
        .filter_map(|&a| inverse_power_index(a, q, max_terms))
        .min();

    let mut sum = CompensatedSum::new();
    let mut term = ONE;
    sum.add(term);
    let mut qk = ONE;
    let mut quiet = 0usize;
    let mut last_ratio = 0.0f64;
    let mut k = 0usize;
    loop {
        if let Some(n) = stop_at {
            if k == n {
                return Ok(SeriesResult {
                    value: sum.value(),
                    terms_used: n + 1,
                    terminated: true,
                    tail_estimate: 0.0,
                });
            }
        }
        if k + 1 >= max_terms {
            return Err(Error::NonConvergent(format!(
                "series did not settle within {max_terms} terms"
            )));
        }
        let mut den = ONE - qk * q;
        for &b in &spec.denominators {
            let f = ONE - b * qk;
            if f.norm() < TERMINATION_TOL {
                return Err(Error::DivergentDenominator { n: k });
            }
            den *= f;
        }
        let num = spec
            .numerators
            .iter()
            .fold(spec.z, |acc, &a| acc * (ONE - a * qk));
        let next = term * num / den;
        if term != ZERO {
            last_ratio = (next / term).norm();
        }
        term = next;
        sum.add(term);
        k += 1;
        qk *= q;

        let partial = sum.value().norm();
        if term.norm() <= policy.tol() * partial || term == ZERO {
            quiet += 1;
            if quiet >= QUIET_TERMS {
                let tail = if last_ratio < 1.0 {
                    term.norm() * last_ratio / (1.0 - last_ratio)
                } else {
                    term.norm()
                };
                return Ok(SeriesResult {
                    value: sum.value(),
                    terms_used: k + 1,
                    terminated: false,
                    tail_estimate: tail,
                });
            }
        } else {
            quiet = 0;
        }
    }
}

/// The first `n` terms `(a;q)_k/(q,b;q)_k z^k` of `spec`, by the same recurrence.
pub fn phi_terms(spec: &PhiSeriesSpec, n: usize) -> Vec<C64> {
    let q = spec.q;
    let mut out = Vec::with_capacity(n);
    let mut term = ONE;
    let mut qk = ONE;
    for _ in 0..n {
        out.push(term);
        let num = spec.numerators.iter().fold(spec.z, |acc, &a| acc * (ONE - a * qk));
        let den = spec
            .denominators
            .iter()
            .fold(ONE - qk * q, |acc, &b| acc * (ONE - b * qk));
        term = term * num / den;
        qk *= q;
    }
    out
}

/// The `phi` form of `r+1 W r (a; b_1..b_{r-2}; q, z)`: numerators
/// `a, +-q sqrt(a), b_i` over denominators `+-sqrt(a), aq/b_i`.
///
/// `sqrt(a)` is principal; both signs enter, so the branch does not matter.
pub fn vwp_expand(a: C64, b: &[C64], q: C64, z: C64) -> Result<PhiSeriesSpec> {
    let sa = a.sqrt();
    let mut num = vec![a, q * sa, -q * sa];
    let mut den = vec![sa, -sa];
    for &bi in b {
        if bi == ZERO {
            return Err(Error::Domain("very-well-poised parameter b_i = 0".into()));
        }
        num.push(bi);
        den.push(a * q / bi);
    }
    PhiSeriesSpec::new(num, den, q, z)
}

pub fn sum_vwp_w(
    a: C64,
    b: &[C64],
    q: C64,
    z: C64,
    policy: &TruncationPolicy,
) -> Result<SeriesResult> {
    sum_phi(&vwp_expand(a, b, q, z)?, policy)
}

/// The series side of the `B_2` representation:
///
/// `prod_{r<s}(b t_r t_s;q) (qb^2, b^2, T^2;q)/(qb, bT^2;q)
///  * 14W13(bT^2/q; t_r t_s, q/b, +-bT/sqrt(q), +-bT; q, b^2)` with
/// `T = sqrt(t_1 t_2 t_3 t_4)`.
pub fn w14_13_value(b: C64, t: &[C64; 4], q: C64, policy: &TruncationPolicy) -> Result<C64> {
    let tt = t[0] * t[1] * t[2] * t[3];
    if b == ZERO {
        // argument b^2 = 0: only the k = 0 term survives
        return qpoch_inf(tt, q, policy);
    }
    let big_t = tt.sqrt();
    let mut pairs = Vec::with_capacity(6);
    for r in 0..4 {
        for s in r + 1..4 {
            pairs.push(t[r] * t[s]);
        }
    }
    let bp: Vec<C64> = pairs.iter().map(|&x| b * x).collect();
    let pre = qpoch_prod(&bp, q, policy)?
        * qpoch_prod(&[q * b * b, b * b, tt], q, policy)?
        / qpoch_prod(&[q * b, b * tt], q, policy)?;
    let sq = q.sqrt();
    let mut params = pairs;
    params.extend([q / b, b * big_t / sq, -b * big_t / sq, b * big_t, -b * big_t]);
    let series = sum_vwp_w(b * tt / q, &params, q, b * b, policy)?;
    Ok(pre * series.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::qpoch_finite;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn pol() -> TruncationPolicy {
        TruncationPolicy::default()
    }

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn one_phi_zero_at_zero_argument() {
        let s = PhiSeriesSpec::new(vec![c(3.0, 1.0)], vec![], r(0.4), ZERO).unwrap();
        let res = sum_phi(&s, &pol()).unwrap();
        assert_eq!(res.value, ONE);
        assert!(!res.terminated);
    }

    #[test]
    fn q_binomial_theorem() {
        let (a, q, z) = (r(0.3), r(0.4), r(0.5));
        let s = PhiSeriesSpec::new(vec![a], vec![], q, z).unwrap();
        let res = sum_phi(&s, &pol()).unwrap();
        let closed = qpoch_inf(a * z, q, &pol()).unwrap() / qpoch_inf(z, q, &pol()).unwrap();
        assert!(rel(res.value, closed) < 1e-14);
        assert!(res.tail_estimate >= 0.0);
    }

    #[test]
    fn terminating_two_phi_one() {
        let q = r(0.5);
        let a1 = q.powi(-2);
        let (a2, b1, z) = (c(0.3, 0.1), c(0.2, -0.4), c(0.7, 0.2));
        let s = PhiSeriesSpec::new(vec![a1, a2], vec![b1], q, z).unwrap();
        let res = sum_phi(&s, &pol()).unwrap();
        assert!(res.terminated);
        assert_eq!(res.terms_used, 3);
        assert_eq!(res.tail_estimate, 0.0);
        let oracle: C64 = (0..3)
            .map(|k| {
                qpoch_finite(a1, q, k) * qpoch_finite(a2, q, k)
                    / (qpoch_finite(q, q, k) * qpoch_finite(b1, q, k))
                    * z.powu(k as u32)
            })
            .sum();
        assert!(rel(res.value, oracle) < 1e-14);
    }

    #[test]
    fn divergent_denominator_is_reported() {
        let q = r(0.5);
        let s = PhiSeriesSpec::new(vec![r(0.3), r(0.2)], vec![q.inv()], q, r(0.5)).unwrap();
        let err = sum_phi(&s, &pol()).unwrap_err();
        assert!(matches!(err, Error::DivergentDenominator { n: 1 }));
        // a numerator that terminates first shields the bad denominator
        let s = PhiSeriesSpec::new(vec![ONE, r(0.2)], vec![q.inv()], q, r(0.5)).unwrap();
        assert!(sum_phi(&s, &pol()).unwrap().terminated);
    }

    #[test]
    fn shape_is_checked() {
        assert!(PhiSeriesSpec::new(vec![ONE, ONE], vec![], r(0.3), r(0.1)).is_err());
    }

    #[test]
    fn cancelling_pair_is_harmless() {
        let s = PhiSeriesSpec::new(vec![r(0.3), c(0.1, 0.2)], vec![r(0.6)], r(0.4), r(0.5)).unwrap();
        let a = sum_phi(&s, &pol()).unwrap().value;
        let b = sum_phi(&s.clone().with_pair(c(0.45, -0.3), c(0.45, -0.3)), &pol())
            .unwrap()
            .value;
        assert!(rel(a, b) < 1e-14);
    }

    #[test]
    fn very_well_poised_factor() {
        let (a, q) = (r(0.3), r(0.5));
        let sa = a.sqrt();
        for k in 0..=6 {
            let dup = qpoch_finite(q * sa, q, k) * qpoch_finite(-q * sa, q, k)
                / (qpoch_finite(sa, q, k) * qpoch_finite(-sa, q, k));
            let direct = (ONE - a * q.powi(2 * k as i32)) / (ONE - a);
            assert!(rel(dup, direct) < 1e-14, "k = {k}");
        }
        let w = sum_vwp_w(a, &[r(0.2)], q, ZERO, &pol()).unwrap();
        assert_eq!(w.value, ONE);
    }

    #[test]
    fn eight_w_seven_summation() {
        let (b, t, q) = (r(0.35), r(0.6), r(0.25));
        let sb = b.sqrt();
        let sbq = (b / q).sqrt();
        let params = [t * sb, -t * sb, t * sbq, -t * sbq, b];
        let w = sum_vwp_w(b * b * t * t / q, &params, q, q * b, &pol()).unwrap();
        let closed = qpoch_prod(&[q * b * b, b * b * t * t], q, &pol()).unwrap()
            / qpoch_prod(&[b * b * b * t * t, q * b], q, &pol()).unwrap();
        assert!(rel(w.value, closed) < 1e-12);
    }

    #[test]
    fn w14_13_degenerates_at_b_zero() {
        let t = [r(0.5), r(0.4), r(0.45), r(0.35)];
        let v = w14_13_value(ZERO, &t, r(0.2), &pol()).unwrap();
        let tt = t.iter().product::<C64>();
        assert_eq!(v, qpoch_inf(tt, r(0.2), &pol()).unwrap());
    }

    #[test]
    fn w14_13_reflection_symmetry() {
        let (b, q) = (r(0.3), r(0.2));
        let t = [r(0.5), r(0.4), r(0.45), r(0.35)];
        let big_t = t.iter().product::<C64>().sqrt();
        let tr = t.map(|x| big_t / x);
        let a = w14_13_value(b, &t, q, &pol()).unwrap();
        let bb = w14_13_value(b, &tr, q, &pol()).unwrap();
        assert!(rel(a, bb) < 1e-12);
    }
}
