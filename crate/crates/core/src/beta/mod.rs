//! Elliptic beta integrals, the `F4`-symmetric integral `E(b;t;p,q)` and its
//! basic hypergeometric limits.
//!
//! Every integral is returned as a [`Quadrature`] whose `value` already
//! includes the normalising prefactor; `err_estimate` is scaled accordingly.

mod basic;
mod elliptic;
mod limits;

pub use basic::*;
pub use elliptic::*;
pub use limits::*;

pub use crate::weyl::LimitExponents;

use crate::error::{Error, Result};
use crate::quadrature::Quadrature;
use crate::special::{lattice_point_near, EllipticBase, C64};

/// Relative tolerance of the balancing check `prod t_i = (pq)^{m+1}`.
pub const BALANCING_TOL: f64 = 1e-12;

/// `2m + 6` parameters with `prod t_i = (pq)^{m+1}`, modulo `t -> -t`.
#[derive(Clone, Debug, PartialEq)]
pub struct BetaParams {
    m: usize,
    t: Vec<C64>,
}

impl BetaParams {
    /// Builds the tuple from its first `2m + 5` entries, solving the
    /// balancing condition for the last one.
    pub fn balanced(m: usize, free: &[C64], base: &EllipticBase) -> Result<Self> {
        if free.len() != 2 * m + 5 {
            return Err(Error::InvalidConfig(format!(
                "E^{m} needs {} free parameters, got {}",
                2 * m + 5,
                free.len()
            )));
        }
        let prod: C64 = free.iter().product();
        if prod.norm() == 0.0 {
            return Err(Error::Domain("beta integral parameters must be nonzero".into()));
        }
        let mut t = free.to_vec();
        t.push(base.pq().powu(m as u32 + 1) / prod);
        Ok(Self { m, t })
    }

    /// Accepts a full tuple after checking the balancing condition.
    pub fn from_tuple(m: usize, t: Vec<C64>, base: &EllipticBase) -> Result<Self> {
        if t.len() != 2 * m + 6 {
            return Err(Error::InvalidConfig(format!(
                "E^{m} needs {} parameters, got {}",
                2 * m + 6,
                t.len()
            )));
        }
        let prod: C64 = t.iter().product();
        let target = base.pq().powu(m as u32 + 1);
        if (prod - target).norm() > BALANCING_TOL * target.norm() {
            return Err(Error::Domain(format!(
                "parameters are not balanced: product {prod} vs (pq)^{} = {target}",
                m + 1
            )));
        }
        Ok(Self { m, t })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn t(&self) -> &[C64] {
        &self.t
    }

    /// Equality up to the simultaneous sign flip of all parameters.
    pub fn eq_mod_sign(&self, other: &BetaParams, rel_tol: f64) -> bool {
        if self.m != other.m {
            return false;
        }
        let close = |s: f64| {
            self.t
                .iter()
                .zip(other.t.iter())
                .all(|(a, b)| (a - b * s).norm() <= rel_tol * a.norm().max(b.norm()))
        };
        close(1.0) || close(-1.0)
    }
}

/// `(b, t_1..t_4)` for `E(b;t;p,q)`, away from the zeros of the
/// normalising denominator `prod (b t_r^2, p^2 q^2/(b t_r^2); p, q)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct F4IntegralParams {
    pub b: C64,
    pub t: [C64; 4],
    pub base: EllipticBase,
}

impl F4IntegralParams {
    pub fn new(b: C64, t: [C64; 4], base: EllipticBase) -> Result<Self> {
        if b.norm() == 0.0 || t.iter().any(|x| x.norm() == 0.0) {
            return Err(Error::Domain("b and t_r must be nonzero".into()));
        }
        let pq2 = base.pq() * base.pq();
        for (r, &tr) in t.iter().enumerate() {
            for x in [b * tr * tr, pq2 / (b * tr * tr)] {
                if lattice_point_near(x, base.p(), base.q()).is_some() {
                    return Err(Error::DenominatorZero(format!(
                        "t_{} makes the factor at {x} vanish",
                        r + 1
                    )));
                }
            }
        }
        Ok(Self { b, t, base })
    }

    /// The same `b` and base with new `t`.
    pub fn with_t(&self, t: [C64; 4]) -> Result<Self> {
        Self::new(self.b, t, self.base)
    }

    /// The scale `A = pq/b` of the multiplicative `W(F4)` action.
    pub fn action_scale(&self) -> C64 {
        self.base.pq() / self.b
    }
}

pub(crate) fn scaled(q: Quadrature, pre: C64) -> Quadrature {
    Quadrature {
        value: q.value * pre,
        err_estimate: q.err_estimate * pre.norm(),
        n_used: q.n_used,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn balancing_is_solved_and_checked() {
        let base = EllipticBase::real(0.1, 0.15).unwrap();
        let bp = BetaParams::balanced(0, &[r(0.5), r(0.4), r(0.6), r(0.3), r(0.45)], &base).unwrap();
        let prod: C64 = bp.t().iter().product();
        assert!((prod - base.pq()).norm() < 1e-16);
        assert!(BetaParams::from_tuple(0, bp.t().to_vec(), &base).is_ok());
        let mut bad = bp.t().to_vec();
        bad[0] *= 1.001;
        assert_eq!(BetaParams::from_tuple(0, bad, &base).unwrap_err().code(), "DOMAIN");
        assert!(BetaParams::balanced(1, &[r(0.5)], &base).is_err());
        let neg = BetaParams::from_tuple(0, bp.t().iter().map(|x| -x).collect(), &base).unwrap();
        assert!(bp.eq_mod_sign(&neg, 1e-15));
    }

    #[test]
    fn denominator_zero_is_refused() {
        let base = EllipticBase::real(0.1, 0.2).unwrap();
        let b = r(0.5);
        let t = [r(2f64.sqrt()), r(0.5), r(0.6), r(0.7)];
        assert_eq!(F4IntegralParams::new(b, t, base).unwrap_err().code(), "DENOMINATOR_ZERO");
        assert!(F4IntegralParams::new(b, [r(0.6); 4], base).is_ok());
    }
}
