//! The `p -> 0` limits at `β = 0, 1` as q-integrals, and their series sides.

use super::scaled;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_auto, PoleFactor, PoleKind, Quadrature, QuadratureConfig};
use crate::series::{phi_terms, sum_phi, sum_vwp_w, vwp_expand, w14_13_value, PhiSeriesSpec};
use crate::special::{qpoch_finite, qpoch_inf, qpoch_prod, theta, EllipticBase, TruncationPolicy, C64, ONE, ZERO};

/// Nome `q` with the default truncation policy; `p = 0` so only q-families
/// enter the pole catalogue.
#[derive(Clone, Copy)]
struct QCtx {
    q: C64,
    pol: TruncationPolicy,
    base: EllipticBase,
}

impl QCtx {
    fn new(q: C64) -> Result<Self> {
        let base = EllipticBase::new(ZERO, q)?;
        Ok(Self { q, pol: *base.policy(), base })
    }

    fn poch(&self, x: C64) -> Result<C64> {
        qpoch_inf(x, self.q, &self.pol)
    }

    fn prod(&self, xs: &[C64]) -> Result<C64> {
        qpoch_prod(xs, self.q, &self.pol)
    }

    /// `(x z, x/z; q)`.
    fn pair(&self, x: C64, z: C64) -> Result<C64> {
        Ok(self.poch(x * z)? * self.poch(x / z)?)
    }
}

fn check_nonzero(xs: &[C64]) -> Result<()> {
    if xs.iter().any(|x| *x == ZERO) {
        return Err(Error::Domain("parameters of the limit integrals must be nonzero".into()));
    }
    Ok(())
}

/// `(b^2, qb^2; q)/(b, qb; q)`, the `b`-only constant of the `β = 0` integrals.
fn b_ratio(ctx: &QCtx, b: C64) -> Result<C64> {
    let b2 = b * b;
    Ok(ctx.prod(&[b2, ctx.q * b2])? / ctx.prod(&[b, ctx.q * b])?)
}

/// `B_1(b;t;q)`, the `β = 1` vertex limit:
/// `prod_{r<s}(t_r t_s, q t_r/(b t_s), q t_s/(b t_r), q^2/(b^2 t_r t_s); q) (q/b;q)^4 (q;q)/2`
/// times `∮ (z^{±2}, q z^{±2}/b; q) / prod_r (t_r z^{±1}, q/(b t_r) z^{±1}; q) dz/(2πiz)`.
pub fn b1_integral(b: C64, t: &[C64; 4], q: C64, cfg: &QuadratureConfig) -> Result<Quadrature> {
    check_nonzero(&[b, t[0], t[1], t[2], t[3]])?;
    let ctx = QCtx::new(q)?;
    let mut pre = ctx.poch(q / b)?.powu(4) * ctx.poch(q)? / 2.0;
    for r in 0..4 {
        for s in r + 1..4 {
            let x = t[r] * t[s];
            pre *= ctx.prod(&[x, q * t[r] / (b * t[s]), q * t[s] / (b * t[r]), q * q / (b * b * x)])?;
        }
    }
    let duals = t.map(|x| q / (b * x));
    let factors: Vec<PoleFactor> = t
        .iter()
        .chain(duals.iter())
        .flat_map(|&x| PoleFactor::inv_poch_pair(x))
        .collect();
    let f = |z: C64| {
        let z2 = z * z;
        let mut acc = ctx.pair(ONE, z2)? * ctx.pair(q / b, z2)?;
        for &x in t.iter().chain(duals.iter()) {
            acc /= ctx.pair(x, z)?;
        }
        Ok(acc)
    };
    Ok(scaled(integrate_auto(f, &factors, &ctx.base, cfg)?, pre))
}

/// The `β = 0` limit for `τ_r ∈ [0, 1]`: `zeros` are the `t_r` with `τ_r = 0`,
/// `ones` those with `τ_r = 1`; parameters with interior `τ_r` drop out.
///
/// Prefactor `prod (t_r t_s) prod (q t_r/(b t_s)) prod (q^2/(b^2 t_r t_s)) (b^2, qb^2;q)/(b, qb;q) (q;q)/2`
/// over zero pairs, zero-one pairs and one pairs; integrand
/// `(z^{±2})/(b z^{±2}) prod_zeros (b t z^{±1})/(t z^{±1}) prod_ones (q/t z^{±1})/(q/(bt) z^{±1})`.
pub fn b0_integral(b: C64, zeros: &[C64], ones: &[C64], q: C64, cfg: &QuadratureConfig) -> Result<Quadrature> {
    check_nonzero(&[b])?;
    check_nonzero(zeros)?;
    check_nonzero(ones)?;
    let ctx = QCtx::new(q)?;
    let mut pre = b_ratio(&ctx, b)? * ctx.poch(q)? / 2.0;
    for (i, &x) in zeros.iter().enumerate() {
        for &y in &zeros[i + 1..] {
            pre *= ctx.poch(x * y)?;
        }
        for &y in ones {
            pre *= ctx.poch(q * x / (b * y))?;
        }
    }
    for (i, &x) in ones.iter().enumerate() {
        for &y in &ones[i + 1..] {
            pre *= ctx.poch(q * q / (b * b * x * y))?;
        }
    }
    let mut factors = vec![
        PoleFactor::squared(b, PoleKind::InvPochOfCZ),
        PoleFactor::squared(b, PoleKind::InvPochOfCOverZ),
    ];
    factors.extend(zeros.iter().flat_map(|&x| PoleFactor::inv_poch_pair(x)));
    factors.extend(ones.iter().flat_map(|&x| PoleFactor::inv_poch_pair(q / (b * x))));
    let f = |z: C64| {
        let z2 = z * z;
        let mut acc = ctx.pair(ONE, z2)? / ctx.pair(b, z2)?;
        for &x in zeros {
            acc *= ctx.pair(b * x, z)? / ctx.pair(x, z)?;
        }
        for &x in ones {
            acc *= ctx.pair(q / x, z)? / ctx.pair(q / (b * x), z)?;
        }
        Ok(acc)
    };
    Ok(scaled(integrate_auto(f, &factors, &ctx.base, cfg)?, pre))
}

/// `B_2(b;t;q)`, the integral at `τ = 0`.
pub fn b2_integral(b: C64, t: &[C64; 4], q: C64, cfg: &QuadratureConfig) -> Result<Quadrature> {
    b0_integral(b, t, &[], q, cfg)
}

/// The three-parameter integral on the edge `τ = (0, 0, 0, x)`.
pub fn edge_integral(b: C64, t: &[C64; 3], q: C64, cfg: &QuadratureConfig) -> Result<Quadrature> {
    b0_integral(b, t, &[], q, cfg)
}

/// The two-parameter integral on the octahedron square `τ = (0, 0, x, y)`.
pub fn octahedron_integral(b: C64, t: C64, v: C64, q: C64, cfg: &QuadratureConfig) -> Result<Quadrature> {
    b0_integral(b, &[t, v], &[], q, cfg)
}

/// `prod_{r<s}(b t_r t_s;q) (qb^2, b^2;q)/(qb;q) 4phi3(t_1t_2, t_1t_3, t_2t_3, q/b; b t_1t_2, b t_1t_3, b t_2t_3; q, b^2)`.
pub fn series_rep_edge_4phi3(b: C64, t: &[C64; 3], q: C64) -> Result<C64> {
    check_nonzero(&[b])?;
    let ctx = QCtx::new(q)?;
    let pairs = [t[0] * t[1], t[0] * t[2], t[1] * t[2]];
    let bp = pairs.map(|x| b * x);
    let pre = ctx.prod(&bp)? * ctx.prod(&[q * b * b, b * b])? / ctx.poch(q * b)?;
    let mut num = pairs.to_vec();
    num.push(q / b);
    let spec = PhiSeriesSpec::new(num, bp.to_vec(), q, b * b)?;
    Ok(pre * sum_phi(&spec, &ctx.pol)?.value)
}

/// `(btv, qb^2, b^2;q)/(qb;q) 2phi1(tv, q/b; btv; q, b^2)`.
pub fn series_rep_octahedron_2phi1(b: C64, t: C64, v: C64, q: C64) -> Result<C64> {
    check_nonzero(&[b])?;
    let ctx = QCtx::new(q)?;
    let tv = t * v;
    let pre = ctx.prod(&[b * tv, q * b * b, b * b])? / ctx.poch(q * b)?;
    let spec = PhiSeriesSpec::new(vec![tv, q / b], vec![b * tv], q, b * b)?;
    Ok(pre * sum_phi(&spec, &ctx.pol)?.value)
}

fn rel_residual(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

/// Relative residual of `(qb^2;q)` against the one-parameter interior integral.
pub fn interior_identity_check(b: C64, t: C64, q: C64, cfg: &QuadratureConfig) -> Result<f64> {
    let ctx = QCtx::new(q)?;
    let lhs = ctx.poch(q * b * b)?;
    let rhs = b0_integral(b, &[t], &[], q, cfg)?.value;
    Ok(rel_residual(lhs, rhs))
}

/// `(qb^2, b^2 t^2;q)/(b^3 t^2, qb;q)`.
pub fn w8_7_closed_form(b: C64, t: C64, q: C64) -> Result<C64> {
    let ctx = QCtx::new(q)?;
    let (b2, t2) = (b * b, t * t);
    Ok(ctx.prod(&[q * b2, b2 * t2])? / ctx.prod(&[b * b2 * t2, q * b])?)
}

/// The very-well-poised side `8W7(b^2t^2/q; ±t sqrt(b), ±t sqrt(b/q), b; q, qb)`.
///
/// At `t = 0` the well-poised pairs cancel and the series is `1phi0(b;;q,qb)`.
pub fn w8_7_series(b: C64, t: C64, q: C64, policy: &TruncationPolicy) -> Result<C64> {
    if t == ZERO {
        let spec = PhiSeriesSpec::new(vec![b], vec![], q, q * b)?;
        return Ok(sum_phi(&spec, policy)?.value);
    }
    let (sb, sbq) = (b.sqrt(), (b / q).sqrt());
    let params = [t * sb, -t * sb, t * sbq, -t * sbq, b];
    Ok(sum_vwp_w(b * b * t * t / q, &params, q, q * b, policy)?.value)
}

/// Relative residual of [`w8_7_series`] against [`w8_7_closed_form`].
pub fn w8_7_evaluation_check(b: C64, t: C64, q: C64, policy: &TruncationPolicy) -> Result<f64> {
    Ok(rel_residual(w8_7_closed_form(b, t, q)?, w8_7_series(b, t, q, policy)?))
}

/// Terms `k < n` of the same sum written with `(bt^2/q;q)_{2k}/(b^3t^2;q)_{2k}`:
/// `(1 - b^2t^2 q^{2k-1})/(1 - b^2t^2/q) (b^2t^2/q, b;q)_k (bt^2/q;q)_{2k} / ((q, bt^2;q)_k (b^3t^2;q)_{2k}) (bq)^k`.
pub fn w8_7_explicit_terms(b: C64, t: C64, q: C64, n: usize) -> Vec<C64> {
    let a = b * b * t * t / q;
    let bt2 = b * t * t;
    (0..n)
        .map(|k| {
            let qk = q.powu(k as u32);
            let wp = (ONE - a * qk * qk) / (ONE - a);
            let num = qpoch_finite(a, q, k) * qpoch_finite(b, q, k) * qpoch_finite(bt2 / q, q, 2 * k);
            let den = qpoch_finite(q, q, k) * qpoch_finite(bt2, q, k) * qpoch_finite(b * b * bt2, q, 2 * k);
            wp * num / den * (b * q).powu(k as u32)
        })
        .collect()
}

/// Terms `k < n` of the `8W7` through the generic very-well-poised expansion.
pub fn w8_7_vwp_terms(b: C64, t: C64, q: C64, n: usize) -> Result<Vec<C64>> {
    let (sb, sbq) = (b.sqrt(), (b / q).sqrt());
    let params = [t * sb, -t * sb, t * sbq, -t * sbq, b];
    Ok(phi_terms(&vwp_expand(b * b * t * t / q, &params, q, q * b)?, n))
}

/// Shape of the `τ_1 < 0` limit integral: `minus` holds the `t_r` with
/// `τ_r = -τ_1`, `plus` those with `τ_r = 1 + τ_1`, and `boundary` is set
/// exactly when `τ_1 = -1/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeLimitShape {
    pub minus: Vec<C64>,
    pub plus: Vec<C64>,
    pub boundary: bool,
}

/// The `τ_1 < 0` limit:
/// `prod_minus (t_r t_1;q) prod_plus (q t_1/(b t_r);q) (q/b, qb^2;q)/(q/b^2, qb;q) (q;q)` times
/// `∮ [bd] θ(b^2 t_1 z;q)/(t_1 z, q/(b t_1 z);q) prod_minus (b t_r/z)/(t_r/z) prod_plus (q/(t_r z))/(q/(b t_r z)) dz/(2πiz)`
/// with `bd = (1 - z^-2)(q/(b z^2), b t_1/z;q)/(b/z^2, t_1/z;q)` on the boundary.
///
/// The integrand is not even; the `(t_1 z;q)` zeros lie outside the contour
/// and every other denominator family inside.
pub fn lim2_integral(b: C64, t1: C64, shape: &EdgeLimitShape, q: C64, cfg: &QuadratureConfig) -> Result<Quadrature> {
    check_nonzero(&[b, t1])?;
    check_nonzero(&shape.minus)?;
    check_nonzero(&shape.plus)?;
    let ctx = QCtx::new(q)?;
    let mut pre = ctx.prod(&[q / b, q * b * b])? / ctx.prod(&[q / (b * b), q * b])? * ctx.poch(q)?;
    for &x in &shape.minus {
        pre *= ctx.poch(x * t1)?;
    }
    for &x in &shape.plus {
        pre *= ctx.poch(q * t1 / (b * x))?;
    }
    let mut factors = vec![
        PoleFactor::new(t1, PoleKind::InvPochOfCZ),
        PoleFactor::new(q / (b * t1), PoleKind::InvPochOfCOverZ),
    ];
    if shape.boundary {
        factors.push(PoleFactor::squared(b, PoleKind::InvPochOfCOverZ));
        factors.push(PoleFactor::new(t1, PoleKind::InvPochOfCOverZ));
    }
    factors.extend(shape.minus.iter().map(|&x| PoleFactor::new(x, PoleKind::InvPochOfCOverZ)));
    factors.extend(shape.plus.iter().map(|&x| PoleFactor::new(q / (b * x), PoleKind::InvPochOfCOverZ)));
    let f = |z: C64| {
        let zi = z.inv();
        let mut acc = theta(b * b * t1 * z, q, &ctx.pol)? / (ctx.poch(t1 * z)? * ctx.poch(q * zi / (b * t1))?);
        if shape.boundary {
            let zi2 = zi * zi;
            acc *= (ONE - zi2) * ctx.poch(q * zi2 / b)? * ctx.poch(b * t1 * zi)?;
            acc /= ctx.poch(b * zi2)? * ctx.poch(t1 * zi)?;
        }
        for &x in &shape.minus {
            acc *= ctx.poch(b * x * zi)? / ctx.poch(x * zi)?;
        }
        for &x in &shape.plus {
            acc *= ctx.poch(q * zi / x)? / ctx.poch(q * zi / (b * x))?;
        }
        Ok(acc)
    };
    Ok(scaled(integrate_auto(f, &factors, &ctx.base, cfg)?, pre))
}

/// The `τ_1 > 1` limit. Its prefactor and integrand are those of
/// [`lim2_integral`] with `t_1 -> q/(b t_1)`; `minus` now holds the `t_r`
/// with `τ_r = τ_1 - 1`, `plus` those with `τ_r = 2 - τ_1`, and `boundary`
/// marks `τ_1 = 3/2`. The contour is the image of the `τ_1 < 0` contour.
pub fn lim3_integral(b: C64, t1: C64, shape: &EdgeLimitShape, q: C64, cfg: &QuadratureConfig) -> Result<Quadrature> {
    check_nonzero(&[b, t1])?;
    lim2_integral(b, q / (b * t1), shape, q, cfg)
}

/// `prod_{r}(b t_1 t_r, q t_1/t_r;q) (qb^2, b^2, q t_1^2/b;q)/(qb, q t_1^2;q)`
/// `* 14W13(t_1^2; t_1 t_r, q t_1/(b t_r), q/b, ±sqrt(b) t_1, ±sqrt(bq) t_1; q, b^2)`, `r = 2, 3, 4`.
pub fn edge_w14_13_rep(b: C64, t1: C64, ts: &[C64; 3], q: C64) -> Result<C64> {
    check_nonzero(&[b, t1, ts[0], ts[1], ts[2]])?;
    let ctx = QCtx::new(q)?;
    let b2 = b * b;
    let mut pre = ctx.prod(&[q * b2, b2, q * t1 * t1 / b])? / ctx.prod(&[q * b, q * t1 * t1])?;
    let mut params = Vec::with_capacity(11);
    for &x in ts {
        pre *= ctx.prod(&[b * t1 * x, q * t1 / x])?;
        params.push(t1 * x);
        params.push(q * t1 / (b * x));
    }
    params.push(q / b);
    let (sb, sbq) = (b.sqrt() * t1, (b * q).sqrt() * t1);
    params.extend([sb, -sb, sbq, -sbq]);
    Ok(pre * sum_vwp_w(t1 * t1, &params, q, b2, &ctx.pol)?.value)
}

/// `prod_r (b u_r t_1;q) (qb^2, b^2;q)/(qb;q) (k+1)phi(k)(t_1 u_r, q/b; b u_r t_1; q, b^2)`.
pub fn edge_kphi_rep(b: C64, t1: C64, u: &[C64], q: C64) -> Result<C64> {
    check_nonzero(&[b, t1])?;
    let ctx = QCtx::new(q)?;
    let bu: Vec<C64> = u.iter().map(|&x| b * x * t1).collect();
    let pre = ctx.prod(&bu)? * ctx.prod(&[q * b * b, b * b])? / ctx.poch(q * b)?;
    let mut num: Vec<C64> = u.iter().map(|&x| t1 * x).collect();
    num.push(q / b);
    let spec = PhiSeriesSpec::new(num, bu, q, b * b)?;
    Ok(pre * sum_phi(&spec, &ctx.pol)?.value)
}

/// Both sides of `B_2 = 14W13` at `t_3 t_4 = q^-n`, where the series terminates.
///
/// The prefactor `(t_3 t_4;q)` vanishes while the contour is pinched, so the
/// integral side is the limit of `B_2(t_4 (1 ± h))`: the two signs are
/// averaged (cancelling the odd part) at `h = eps` and `h = 2 eps`, then
/// Richardson-extrapolated to `h = 0`.
pub fn terminating_b2_pair(
    b: C64,
    t: &[C64; 3],
    n: u32,
    q: C64,
    eps: f64,
    cfg: &QuadratureConfig,
) -> Result<(C64, C64)> {
    check_nonzero(&[b, t[0], t[1], t[2]])?;
    let t4 = q.powi(-(n as i32)) / t[2];
    let ctx = QCtx::new(q)?;
    let rhs = w14_13_value(b, &[t[0], t[1], t[2], t4], q, &ctx.pol)?;
    let sym = |h: f64| -> Result<C64> {
        let at = |s: f64| b2_integral(b, &[t[0], t[1], t[2], t4 * (1.0 + s)], q, cfg).map(|x| x.value);
        Ok((at(h)? + at(-h)?) / 2.0)
    };
    let (a1, a2) = (sym(eps)?, sym(2.0 * eps)?);
    Ok(((4.0 * a1 - a2) / 3.0, rhs))
}
