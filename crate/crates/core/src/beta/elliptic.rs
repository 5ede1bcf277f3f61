use super::{scaled, BetaParams, F4IntegralParams};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_auto, PoleFactor, PoleKind, Quadrature, QuadratureConfig};
use crate::special::{
    elliptic_gamma, inverse_gamma_z2, pq_poch, pq_poch_prod, qpoch_inf, EllipticBase, C64, ONE,
};

fn pair_products(t: &[C64]) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
    (0..t.len()).flat_map(move |r| (r + 1..t.len()).map(move |s| (r, s, t[r] * t[s])))
}

/// `(p;p)(q;q)/2`.
fn half_kappa(base: &EllipticBase) -> Result<C64> {
    let pol = base.policy();
    Ok(qpoch_inf(base.p(), base.p(), pol)? * qpoch_inf(base.q(), base.q(), pol)? / 2.0)
}

/// `E^m(t) = prod_{r<s}(t_r t_s;p,q) (p;p)(q;q)/2 ∮ prod_r Γ(t_r z^{±1}) / Γ(z^{±2}) dz/(2πiz)`.
pub fn e_m(params: &BetaParams, base: &EllipticBase, cfg: &QuadratureConfig) -> Result<Quadrature> {
    let t = params.t();
    let mut pre = half_kappa(base)?;
    for (_, _, x) in pair_products(t) {
        pre *= pq_poch(x, base)?;
    }
    let factors: Vec<PoleFactor> = t.iter().flat_map(|&x| PoleFactor::gamma_pair(x)).collect();
    let f = |z: C64| {
        let zi = z.inv();
        t.iter().try_fold(inverse_gamma_z2(z, base)?, |acc, &x| {
            Ok(acc * elliptic_gamma(x * z, base)? * elliptic_gamma(x * zi, base)?)
        })
    };
    Ok(scaled(integrate_auto(f, &factors, base, cfg)?, pre))
}

/// `prod_{0<=r<s<=5} (pq/(t_r t_s); p, q)`, the closed form of `E^0`.
pub fn e0_product(t: &[C64], base: &EllipticBase) -> Result<C64> {
    if t.len() != 6 {
        return Err(Error::InvalidConfig(format!("E^0 takes 6 parameters, got {}", t.len())));
    }
    let pq = base.pq();
    pair_products(t).try_fold(ONE, |acc, (_, _, x)| Ok(acc * pq_poch(pq / x, base)?))
}

/// Both sides of `E^1(t) = E^1(t_0 v, .., t_3 v, t_4/v, .., t_7/v)`,
/// `v^2 = pq/(t_0 t_1 t_2 t_3)`. The sign of `v` is immaterial.
pub fn e1_transform_pair(
    t: &[C64],
    base: &EllipticBase,
    cfg: &QuadratureConfig,
) -> Result<(Quadrature, Quadrature)> {
    let lhs_params = BetaParams::from_tuple(1, t.to_vec(), base)?;
    let v = e7_v(t, base)?;
    let moved: Vec<C64> = t
        .iter()
        .enumerate()
        .map(|(i, &x)| if i < 4 { x * v } else { x / v })
        .collect();
    let rhs_params = BetaParams::from_tuple(1, moved, base)?;
    Ok((e_m(&lhs_params, base, cfg)?, e_m(&rhs_params, base, cfg)?))
}

/// `v = sqrt(pq/(t_0 t_1 t_2 t_3))`, principal branch.
pub fn e7_v(t: &[C64], base: &EllipticBase) -> Result<C64> {
    if t.len() != 8 {
        return Err(Error::InvalidConfig(format!("E^1 takes 8 parameters, got {}", t.len())));
    }
    let d = t[0] * t[1] * t[2] * t[3];
    if d.norm() == 0.0 {
        return Err(Error::Domain("E^1 parameters must be nonzero".into()));
    }
    Ok((base.pq() / d).sqrt())
}

/// The 16 parameters `t_r, pq/(b t_r), ±sqrt(b), ±sqrt(bq), ±sqrt(bp), ±sqrt(bpq)`
/// of the `E^5` defining `E(b;t)`; they are balanced for any `b, t`.
pub fn e5_arguments(params: &F4IntegralParams) -> Vec<C64> {
    let F4IntegralParams { b, t, base } = *params;
    let (p, q) = (base.p(), base.q());
    let mut args = Vec::with_capacity(16);
    for &tr in &t {
        args.push(tr);
        args.push(base.pq() / (b * tr));
    }
    for s in [b.sqrt(), (b * q).sqrt(), (b * p).sqrt(), (b * p * q).sqrt()] {
        args.push(s);
        args.push(-s);
    }
    args
}

/// `E(b;t;p,q)` through its defining `E^5` divided by
/// `prod_r (b t_r^2, p^2 q^2/(b t_r^2); p, q)`. Kept as a cross-check of
/// [`e_f4_explicit`]; it costs about four times as much.
pub fn e_f4_def(params: &F4IntegralParams, cfg: &QuadratureConfig) -> Result<Quadrature> {
    let base = &params.base;
    let e5 = BetaParams::from_tuple(5, e5_arguments(params), base)?;
    let pq2 = base.pq() * base.pq();
    let mut den = ONE;
    for &tr in &params.t {
        let x = params.b * tr * tr;
        den *= pq_poch_prod(&[x, pq2 / x], base)?;
    }
    if den.norm() == 0.0 {
        return Err(Error::DenominatorZero("normalising product vanishes".into()));
    }
    Ok(scaled(e_m(&e5, base, cfg)?, den.inv()))
}

/// Prefactor of the explicit single-integral form of `E(b;t)`.
fn f4_prefactor(params: &F4IntegralParams) -> Result<C64> {
    let F4IntegralParams { b, t, base } = *params;
    let (p, q, pq) = (base.p(), base.q(), base.pq());
    let mut pre = half_kappa(&base)?;
    for (r, s, x) in pair_products(&t) {
        pre *= pq_poch_prod(
            &[x, pq * t[r] / (b * t[s]), pq * t[s] / (b * t[r]), pq * pq / (b * b * x)],
            &base,
        )?;
    }
    pre *= pq_poch(pq / b, &base)?.powu(4);
    let b2 = b * b;
    pre *= pq_poch_prod(&[b2, p * b2, q * b2, pq * b2], &base)?;
    pre /= pq_poch_prod(&[b, p * b, q * b, pq * b], &base)?;
    Ok(pre)
}

/// Pole families of `Γ(b z^{±2}) prod_r Γ(t_r z^{±1}) / Γ(b t_r z^{±1})`.
pub fn f4_pole_factors(params: &F4IntegralParams) -> Vec<PoleFactor> {
    let pq = params.base.pq();
    let mut factors = vec![
        PoleFactor::squared(params.b, PoleKind::GammaOfCZ),
        PoleFactor::squared(params.b, PoleKind::GammaOfCOverZ),
    ];
    for &tr in &params.t {
        factors.extend(PoleFactor::gamma_pair(tr));
        // 1/Γ(b t z^{±1}) = Γ(pq/(b t) z^{∓1})
        factors.extend(PoleFactor::gamma_pair(pq / (params.b * tr)));
    }
    factors
}

/// `E(b;t;p,q)` as the prefactor times
/// `∮ Γ(b z^{±2})/Γ(z^{±2}) prod_r Γ(t_r z^{±1})/Γ(b t_r z^{±1}) dz/(2πiz)`.
pub fn e_f4_explicit(params: &F4IntegralParams, cfg: &QuadratureConfig) -> Result<Quadrature> {
    let F4IntegralParams { b, t, base } = *params;
    let base = &base;
    let pre = f4_prefactor(params)?;
    let f = |z: C64| {
        let zi = z.inv();
        let z2 = z * z;
        let mut acc = inverse_gamma_z2(z, base)? * elliptic_gamma(b * z2, base)? * elliptic_gamma(b / z2, base)?;
        for &tr in &t {
            acc *= elliptic_gamma(tr * z, base)? * elliptic_gamma(tr * zi, base)?;
            acc /= elliptic_gamma(b * tr * z, base)? * elliptic_gamma(b * tr * zi, base)?;
        }
        Ok(acc)
    };
    Ok(scaled(integrate_auto(f, &f4_pole_factors(params), base, cfg)?, pre))
}

/// `E(b;t;p,q)` by the default route.
pub fn e_f4(params: &F4IntegralParams, cfg: &QuadratureConfig) -> Result<Quadrature> {
    e_f4_explicit(params, cfg)
}

/// `v = sqrt(p^2 q^2/(b^2 t_1 t_2 t_3 t_4))`, principal branch; `E(b;t) = E(b;tv)`
/// for either sign.
pub fn v_parameter(params: &F4IntegralParams) -> Result<C64> {
    let F4IntegralParams { b, t, base } = *params;
    let d = b * b * t[0] * t[1] * t[2] * t[3];
    if d.norm() == 0.0 {
        return Err(Error::Domain("v needs nonzero b and t".into()));
    }
    Ok((base.pq() * base.pq() / d).sqrt())
}

/// The parameters `t v` of the main transformation.
pub fn f4_move(params: &F4IntegralParams) -> Result<F4IntegralParams> {
    let v = v_parameter(params)?;
    params.with_t(params.t.map(|x| x * v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm()
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn e0_fixture() -> (EllipticBase, BetaParams) {
        let base = EllipticBase::real(0.1, 0.15).unwrap();
        let free = [r(0.5), C64::new(0.4, 0.1), r(0.6), r(0.3), r(0.45)];
        (base, BetaParams::balanced(0, &free, &base).unwrap())
    }

    #[test]
    fn evaluation_formula() {
        let (base, t) = e0_fixture();
        let quad = e_m(&t, &base, &cfg()).unwrap();
        let closed = e0_product(t.t(), &base).unwrap();
        assert!(rel(quad.value, closed) < 1e-10, "{} vs {}", quad.value, closed);
    }

    #[test]
    fn e_m_sign_and_permutation() {
        let (base, t) = e0_fixture();
        let v = e_m(&t, &base, &cfg()).unwrap().value;
        let neg = BetaParams::from_tuple(0, t.t().iter().map(|x| -x).collect(), &base).unwrap();
        assert!(rel(e_m(&neg, &base, &cfg()).unwrap().value, v) < 1e-11);
        let mut shuffled = t.t().to_vec();
        shuffled.rotate_left(2);
        shuffled.swap(0, 3);
        let sh = BetaParams::from_tuple(0, shuffled, &base).unwrap();
        assert!(rel(e_m(&sh, &base, &cfg()).unwrap().value, v) < 1e-11);
    }

    #[test]
    fn e0_vanishes_on_a_pair_at_pq() {
        let base = EllipticBase::real(0.1, 0.15).unwrap();
        let pq = base.pq();
        let t = [r(0.5), pq / 0.5, r(0.7), r(0.6), r(0.4), r(1.0 / (0.7 * 0.6 * 0.4))];
        assert!(e0_product(&t, &base).unwrap().norm() < 1e-14);
        let (a, b) = (
            e0_product(&[r(0.5), r(0.4), r(0.6), r(0.3), r(0.45), pq / (0.5 * 0.4 * 0.6 * 0.3 * 0.45)], &base).unwrap(),
            e0_product(&[r(0.45), r(0.3), r(0.5), r(0.6), r(0.4), pq / (0.5 * 0.4 * 0.6 * 0.3 * 0.45)], &base).unwrap(),
        );
        assert!(rel(a, b) < 1e-14);
    }

    #[test]
    fn e7_move_with_v_one_is_trivial() {
        let base = EllipticBase::real(0.1, 0.15).unwrap();
        let pq = base.pq();
        let head = [r(0.5), r(0.6), r(0.55), pq / (0.5 * 0.6 * 0.55)];
        let tail_free = [r(0.4), r(0.45), r(0.35)];
        let last = pq / (0.4 * 0.45 * 0.35);
        let t: Vec<C64> = head.iter().chain(tail_free.iter()).copied().chain([last]).collect();
        assert!((e7_v(&t, &base).unwrap() - 1.0).norm() < 1e-15);
    }

    #[test]
    fn route_equivalence_and_f4_move() {
        let base = EllipticBase::real(0.1, 0.15).unwrap();
        let params = F4IntegralParams::new(r(0.5), [r(0.6), r(0.55), r(0.5), r(0.45)], base).unwrap();
        let explicit = e_f4_explicit(&params, &cfg()).unwrap();
        let def = e_f4_def(&params, &cfg()).unwrap();
        assert!(rel(def.value, explicit.value) < 1e-10, "{} vs {}", def.value, explicit.value);
        let moved = e_f4(&f4_move(&params).unwrap(), &cfg()).unwrap();
        assert!(rel(moved.value, explicit.value) < 1e-10);
        let neg = params.with_t(params.t.map(|x| -x)).unwrap();
        assert!(rel(e_f4(&neg, &cfg()).unwrap().value, explicit.value) < 1e-11);
    }

    #[test]
    fn definition_reflection_symmetry() {
        let base = EllipticBase::real(0.1, 0.15).unwrap();
        let b = r(0.5);
        let params = F4IntegralParams::new(b, [r(0.6), r(0.55), r(0.5), r(0.45)], base).unwrap();
        let mut t = params.t;
        t[2] = base.pq() / (b * t[2]);
        let refl = params.with_t(t).unwrap();
        let a = e_f4_def(&params, &cfg()).unwrap().value;
        let c = e_f4_def(&refl, &cfg()).unwrap().value;
        assert!(rel(a, c) < 1e-10);
    }

    #[test]
    fn proof_point_is_fixed() {
        let q = 0.3f64;
        let base = EllipticBase::real(q, q).unwrap();
        let (a, h) = (q.powf(0.75), q.sqrt());
        let params = F4IntegralParams::new(r(a), [r(a), r(a), r(h), r(h)], base).unwrap();
        let v = v_parameter(&params).unwrap();
        assert!((v - 1.0).norm() < 1e-15);
        let moved = f4_move(&params).unwrap();
        assert!(moved.t.iter().zip(params.t.iter()).all(|(x, y)| (x - y).norm() < 1e-15));
    }

    #[test]
    fn v_is_an_involution() {
        let base = EllipticBase::new(C64::new(0.1, 0.05), r(0.2)).unwrap();
        let params = F4IntegralParams::new(C64::new(0.4, 0.2), [r(0.6), C64::new(0.3, 0.5), r(0.45), r(0.7)], base).unwrap();
        let v = v_parameter(&params).unwrap();
        let moved = f4_move(&params).unwrap();
        let w = v_parameter(&moved).unwrap();
        assert!((v * w - 1.0).norm() < 1e-14 || (v * w + 1.0).norm() < 1e-14);
    }
}
