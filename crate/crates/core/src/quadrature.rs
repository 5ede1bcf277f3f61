//! Contour integrals `∮ f(z) dz/(2πiz)` over origin-centred circles.
//!
//! The trapezoid rule is spectrally accurate for periodic analytic integrands,
//! so the sample count is doubled (reusing every previous sample) until two
//! successive estimates agree. Samples are evaluated in parallel and summed in
//! index order with compensated summation, so results do not depend on the
//! thread schedule.
//!
//! Pole bookkeeping is by families: a factor `Γ(c z^s)` or `1/(c z^s; q)` with
//! `s = ±1, ±2` contributes a lattice of poles that must be kept on one side
//! of the contour. When no circle separates the families, a circle plus
//! residue corrections at the poles that ended up on the wrong side can be
//! used instead (opt-in via [`CrossingPolicy::ResidueCorrect`]).

use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::compensated::CompensatedSum;
use crate::error::{Error, Result};
use crate::special::{EllipticBase, C64, ZERO};

/// Origin-centred circle traversed once counterclockwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircleContour {
    radius: f64,
}

impl CircleContour {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidConfig(format!("contour radius must be positive, got {radius}")));
        }
        Ok(Self { radius })
    }

    pub fn unit() -> Self {
        Self { radius: 1.0 }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// What to do when no circle separates the inward and outward pole families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CrossingPolicy {
    #[default]
    Reject,
    /// Integrate over a circle and add/subtract residues at misplaced poles.
    ResidueCorrect,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureConfig {
    n_start: usize,
    n_max: usize,
    rel_tol: f64,
    crossing: CrossingPolicy,
}

impl QuadratureConfig {
    pub fn new(n_start: usize, n_max: usize, rel_tol: f64) -> Result<Self> {
        if n_start < 16 || !n_start.is_power_of_two() {
            return Err(Error::InvalidConfig(format!(
                "n_start must be a power of two >= 16, got {n_start}"
            )));
        }
        if n_max < n_start {
            return Err(Error::InvalidConfig(format!("n_max {n_max} is below n_start {n_start}")));
        }
        if !(rel_tol > 0.0) || !rel_tol.is_finite() {
            return Err(Error::InvalidConfig(format!("rel_tol must be positive, got {rel_tol}")));
        }
        Ok(Self {
            n_start,
            n_max,
            rel_tol,
            crossing: CrossingPolicy::Reject,
        })
    }

    pub fn with_crossing(mut self, crossing: CrossingPolicy) -> Self {
        self.crossing = crossing;
        self
    }

    pub fn with_rel_tol(self, rel_tol: f64) -> Result<Self> {
        Self::new(self.n_start, self.n_max, rel_tol).map(|c| c.with_crossing(self.crossing))
    }

    pub fn n_start(&self) -> usize {
        self.n_start
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn crossing(&self) -> CrossingPolicy {
        self.crossing
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            n_start: 32,
            n_max: 1 << 17,
            rel_tol: 1e-12,
            crossing: CrossingPolicy::Reject,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: C64,
    pub err_estimate: f64,
    /// Samples on the main circle plus those spent on residue circles.
    pub n_used: usize,
}

fn sample_sums<F>(f: &F, n: usize, offset: usize, stride: usize, point: impl Fn(usize) -> C64 + Sync) -> Result<(CompensatedSum, f64)>
where
    F: Fn(C64) -> Result<C64> + Sync,
{
    let count = n / stride;
    let vals: Vec<C64> = (0..count)
        .into_par_iter()
        .map(|i| f(point(offset + i * stride)))
        .collect::<Result<_>>()?;
    let mut s = CompensatedSum::new();
    let mut abs = 0.0;
    for v in vals {
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::Domain("integrand is not finite on the contour".into()));
        }
        s.add(v);
        abs += v.norm();
    }
    Ok((s, abs))
}

/// Trapezoid mean of `g` over the circle `center + r e^{iφ}`, refined by doubling.
fn trapezoid<F>(g: &F, center: C64, radius: f64, cfg: &QuadratureConfig) -> Result<Quadrature>
where
    F: Fn(C64) -> Result<C64> + Sync,
{
    let mut n = cfg.n_start;
    let at = |n: usize| move |j: usize| center + C64::from_polar(radius, TAU * j as f64 / n as f64);
    let (mut sum, mut abs) = sample_sums(g, n, 0, 1, at(n))?;
    let mut value = sum.value() / n as f64;
    loop {
        let n2 = 2 * n;
        if n2 > cfg.n_max {
            return Err(Error::NoConvergence {
                n_used: n,
                err: f64::INFINITY,
            });
        }
        // new samples sit at the odd indices of the doubled grid
        let (odd, odd_abs) = sample_sums(g, n2, 1, 2, at(n2))?;
        let mut merged = sum;
        merged.add(odd.value());
        let next = merged.value() / n2 as f64;
        let diff = (next - value).norm();
        let scale = next.norm().max((abs + odd_abs) / n2 as f64);
        sum = merged;
        abs += odd_abs;
        value = next;
        n = n2;
        if diff <= cfg.rel_tol * scale {
            return Ok(Quadrature {
                value,
                err_estimate: diff,
                n_used: n,
            });
        }
        if 2 * n > cfg.n_max {
            return Err(Error::NoConvergence { n_used: n, err: diff / scale.max(f64::MIN_POSITIVE) });
        }
    }
}

/// `∮ f(z) dz/(2πiz)` over `contour`, i.e. the mean of `f` on the circle.
pub fn integrate_circle<F>(f: F, contour: CircleContour, cfg: &QuadratureConfig) -> Result<Quadrature>
where
    F: Fn(C64) -> Result<C64> + Sync,
{
    trapezoid(&f, ZERO, contour.radius, cfg)
}

/// `(1/2πi) ∮ f(z) dz` over a small circle around `pole`, i.e. the residue
/// of `f` there when `pole` is the only singularity inside.
pub fn residue_numeric<F>(f: F, pole: C64, small_radius: f64, cfg: &QuadratureConfig) -> Result<Quadrature>
where
    F: Fn(C64) -> Result<C64> + Sync,
{
    if !(small_radius > 0.0) {
        return Err(Error::InvalidConfig(format!("residue radius must be positive, got {small_radius}")));
    }
    let g = |z: C64| Ok(f(z)? * (z - pole));
    trapezoid(&g, pole, small_radius, cfg)
}

/// Which argument a pole-carrying factor depends on and how.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PoleKind {
    /// `Γ(c z^s; p, q)`: poles at `c z^s = p^-j q^-k`, outside the contour.
    GammaOfCZ,
    /// `Γ(c z^-s; p, q)`: poles at `z^s = c p^j q^k`, inside the contour.
    GammaOfCOverZ,
    /// `1/(c z^s; q)`: poles at `c z^s = q^-k`, outside the contour.
    InvPochOfCZ,
    /// `1/(c z^-s; q)`: poles at `z^s = c q^k`, inside the contour.
    InvPochOfCOverZ,
}

impl PoleKind {
    fn inward(self) -> bool {
        matches!(self, PoleKind::GammaOfCOverZ | PoleKind::InvPochOfCOverZ)
    }

    fn uses_p(self) -> bool {
        matches!(self, PoleKind::GammaOfCZ | PoleKind::GammaOfCOverZ)
    }
}

/// A factor `Γ(c z^{±s})` or `1/(c z^{±s}; q)` with `s` = `power` ∈ {1, 2}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoleFactor {
    pub coeff: C64,
    pub kind: PoleKind,
    pub power: u32,
}

impl PoleFactor {
    pub fn new(coeff: C64, kind: PoleKind) -> Self {
        Self { coeff, kind, power: 1 }
    }

    pub fn squared(coeff: C64, kind: PoleKind) -> Self {
        Self { coeff, kind, power: 2 }
    }

    /// Both `c z` and `c/z` factors of a symmetric `Γ(c z^{±1})`.
    pub fn gamma_pair(coeff: C64) -> [Self; 2] {
        [Self::new(coeff, PoleKind::GammaOfCZ), Self::new(coeff, PoleKind::GammaOfCOverZ)]
    }

    /// Both factors of a symmetric `1/(c z^{±1}; q)`.
    pub fn inv_poch_pair(coeff: C64) -> [Self; 2] {
        [Self::new(coeff, PoleKind::InvPochOfCZ), Self::new(coeff, PoleKind::InvPochOfCOverZ)]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pole {
    pub location: C64,
    /// Index of the generating factor.
    pub source: usize,
    /// Lattice generation `(j, k)` of `p^j q^k`.
    pub generation: (usize, usize),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PoleCatalog {
    pub inward: Vec<Pole>,
    pub outward: Vec<Pole>,
}

impl PoleCatalog {
    pub fn inward_max(&self) -> f64 {
        self.inward.iter().map(|p| p.location.norm()).fold(0.0, f64::max)
    }

    pub fn outward_min(&self) -> f64 {
        self.outward
            .iter()
            .map(|p| p.location.norm())
            .fold(f64::INFINITY, f64::min)
    }

    fn all(&self) -> impl Iterator<Item = &Pole> {
        self.inward.iter().chain(self.outward.iter())
    }
}

const MAX_POLES_PER_FACTOR: usize = 4096;

/// Pole families of `factors` with moduli in `[lo, hi]`; the generation-0
/// poles of every factor are always kept.
pub fn pole_catalog_window(factors: &[PoleFactor], base: &EllipticBase, lo: f64, hi: f64) -> PoleCatalog {
    let mut cat = PoleCatalog::default();
    for (idx, fac) in factors.iter().enumerate() {
        if fac.coeff == ZERO {
            continue;
        }
        let inward = fac.kind.inward();
        let p = if fac.kind.uses_p() { base.p() } else { ZERO };
        let q = base.q();
        // inward: z^s = c m, outward: z^s = m^-1 / c, with m = p^j q^k
        let target = |m: C64| if inward { fac.coeff * m } else { (fac.coeff * m).inv() };
        let modulus = |w: C64| w.norm().powf(1.0 / fac.power as f64);
        let keep = |r: f64, gen0: bool| gen0 || if inward { r >= lo } else { r <= hi };
        let list = if inward { &mut cat.inward } else { &mut cat.outward };
        let mut count = 0;
        let mut pj = C64::new(1.0, 0.0);
        for j in 0.. {
            if (j > 0 && p == ZERO) || !keep(modulus(target(pj)), j == 0) {
                break;
            }
            let mut m = pj;
            for k in 0.. {
                if (k > 0 && q == ZERO) || count >= MAX_POLES_PER_FACTOR {
                    break;
                }
                let w = target(m);
                if !keep(modulus(w), j == 0 && k == 0) {
                    break;
                }
                let roots: &[C64] = if fac.power == 1 { &[w] } else { &[w.sqrt(), -w.sqrt()] };
                for &location in roots {
                    list.push(Pole {
                        location,
                        source: idx,
                        generation: (j, k),
                    });
                }
                count += 1;
                m *= q;
            }
            pj *= p;
        }
    }
    cat
}

/// Pole families retained for a contour of the given radius: moduli within
/// `[radius/4, 4 radius]` plus the generation-0 poles.
pub fn gamma_pole_catalog(factors: &[PoleFactor], base: &EllipticBase, radius: f64) -> PoleCatalog {
    pole_catalog_window(factors, base, radius / 4.0, radius * 4.0)
}

/// Geometric mean of the bounding moduli, or the crossing that prevents it.
pub fn separating_radius(catalog: &PoleCatalog) -> Result<f64> {
    let (lo, hi) = (catalog.inward_max(), catalog.outward_min());
    match (lo > 0.0, hi.is_finite()) {
        _ if lo >= hi => Err(Error::NoSeparatingCircle {
            inward_max: lo,
            outward_min: hi,
        }),
        (true, true) => Ok((lo * hi).sqrt()),
        (true, false) => Ok(2.0 * lo),
        (false, true) => Ok(hi / 2.0),
        (false, false) => Ok(1.0),
    }
}

/// Chooses a separating radius, rebuilding the catalogue until the retention
/// window around the chosen radius is self-consistent.
pub fn select_radius<B>(catalog_builder: B) -> Result<f64>
where
    B: Fn(f64) -> PoleCatalog,
{
    let mut radius = separating_radius(&catalog_builder(1.0))?;
    for _ in 0..8 {
        let next = separating_radius(&catalog_builder(radius))?;
        if (next - radius).abs() <= 1e-14 * radius {
            break;
        }
        radius = next;
    }
    Ok(radius)
}

/// Integrates over a separating circle when one exists; otherwise, if the
/// config allows it, over a circle in the widest gap between pole moduli with
/// residue corrections at every misplaced pole.
pub fn integrate_auto<F>(f: F, factors: &[PoleFactor], base: &EllipticBase, cfg: &QuadratureConfig) -> Result<Quadrature>
where
    F: Fn(C64) -> Result<C64> + Sync,
{
    match select_radius(|r| gamma_pole_catalog(factors, base, r)) {
        Ok(radius) => integrate_circle(&f, CircleContour::new(radius)?, cfg),
        Err(e @ Error::NoSeparatingCircle { .. }) if cfg.crossing != CrossingPolicy::ResidueCorrect => Err(e),
        Err(Error::NoSeparatingCircle { .. }) => integrate_residue_corrected(&f, factors, base, cfg),
        Err(e) => Err(e),
    }
}

/// Same poles closer than this (relative) are merged into one correction.
const COINCIDENT_REL: f64 = 1e-9;

fn widest_gap_radius(catalog: &PoleCatalog) -> f64 {
    let mut logs: Vec<f64> = catalog.all().map(|p| p.location.norm().ln()).collect();
    logs.sort_by(f64::total_cmp);
    // gaps whose midpoint lies within a factor 4 of the unit circle
    let (lo, hi) = (-(4f64.ln()), 4f64.ln());
    let mut best = (f64::NEG_INFINITY, 0.0);
    for w in logs.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let width = w[1] - w[0];
        if mid >= lo && mid <= hi && width > best.0 {
            best = (width, mid);
        }
    }
    if best.0.is_finite() {
        best.1.exp()
    } else {
        1.0
    }
}

fn integrate_residue_corrected<F>(f: &F, factors: &[PoleFactor], base: &EllipticBase, cfg: &QuadratureConfig) -> Result<Quadrature>
where
    F: Fn(C64) -> Result<C64> + Sync,
{
    let radius = widest_gap_radius(&pole_catalog_window(factors, base, 1.0 / 64.0, 64.0));
    let cat = gamma_pole_catalog(factors, base, radius);
    let escaped: Vec<C64> = cat
        .inward
        .iter()
        .map(|p| p.location)
        .filter(|z| z.norm() > radius)
        .collect();
    let trapped: Vec<C64> = cat
        .outward
        .iter()
        .map(|p| p.location)
        .filter(|z| z.norm() < radius)
        .collect();
    let lo = trapped.iter().map(|z| z.norm()).fold(radius, f64::min) / 4.0;
    let hi = escaped.iter().map(|z| z.norm()).fold(radius, f64::max) * 4.0;
    let neighbours: Vec<C64> = pole_catalog_window(factors, base, lo, hi)
        .all()
        .map(|p| p.location)
        .collect();

    let main = integrate_circle(f, CircleContour::new(radius)?, cfg)?;
    let g = |z: C64| Ok(f(z)? / z);
    let mut total = CompensatedSum::new();
    total.add(main.value);
    let mut err = main.err_estimate;
    let mut n_used = main.n_used;
    let mut done: Vec<C64> = Vec::new();
    for (sign, pole) in escaped
        .iter()
        .map(|&z| (1.0, z))
        .chain(trapped.iter().map(|&z| (-1.0, z)))
    {
        if done.iter().any(|d| (d - pole).norm() <= COINCIDENT_REL * pole.norm()) {
            continue;
        }
        done.push(pole);
        let nearest = neighbours
            .iter()
            .map(|&w| (w - pole).norm())
            .filter(|&d| d > COINCIDENT_REL * pole.norm())
            .fold(pole.norm(), f64::min);
        let res = residue_numeric(g, pole, 0.5 * nearest, cfg)?;
        total.add(res.value * sign);
        err += res.err_estimate;
        n_used += res.n_used;
    }
    Ok(Quadrature {
        value: total.value(),
        err_estimate: err,
        n_used,
    })
}
