//! The `F4` root system, its Weyl group in exact rational arithmetic, and the
//! two parameter actions built from it.
//!
//! Group elements are `4x4` rational orthogonal matrices. Every element is
//! either a signed permutation (the `B4` subgroup) or has all entries `±1/2`;
//! the multiplicative action relies on that dichotomy to need at most one
//! square root of `z1 z2 z3 z4` and one of `A`.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::ops::Mul;
use std::sync::OnceLock;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::special::C64;

pub type Rat = Rational64;
pub type RatVec = [Rat; 4];

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

fn dot(a: &RatVec, b: &RatVec) -> Rat {
    (0..4).map(|i| a[i] * b[i]).fold(Rat::zero(), |acc, x| acc + x)
}

/// A vector of `R(F4)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Root {
    coords: RatVec,
}

impl Root {
    /// Accepts only the 48 vectors `±e_j`, `±e_j ± e_k`, `(±1 ±1 ±1 ±1)/2`.
    pub fn new(coords: RatVec) -> Result<Self> {
        let half = rat(1, 2);
        let nz = coords.iter().filter(|c| !c.is_zero()).count();
        let ok = match nz {
            1 | 2 => coords.iter().all(|c| c.is_zero() || c.abs() == Rat::one()),
            4 => coords.iter().all(|c| c.abs() == half),
            _ => false,
        };
        if ok {
            Ok(Self { coords })
        } else {
            Err(Error::Domain(format!("{coords:?} is not an F4 root")))
        }
    }

    pub fn coords(&self) -> &RatVec {
        &self.coords
    }

    pub fn norm2(&self) -> Rat {
        dot(&self.coords, &self.coords)
    }

    pub fn is_long(&self) -> bool {
        self.norm2() == rat(2, 1)
    }
}

/// All 48 roots: 24 long `±e_j ± e_k` and 24 short `±e_j`, `(±1,±1,±1,±1)/2`.
pub fn roots() -> Vec<Root> {
    let mut out = Vec::with_capacity(48);
    let one = Rat::one();
    for j in 0..4 {
        for s in [one, -one] {
            let mut c = [Rat::zero(); 4];
            c[j] = s;
            out.push(Root { coords: c });
        }
    }
    for j in 0..4 {
        for k in j + 1..4 {
            for sj in [one, -one] {
                for sk in [one, -one] {
                    let mut c = [Rat::zero(); 4];
                    c[j] = sj;
                    c[k] = sk;
                    out.push(Root { coords: c });
                }
            }
        }
    }
    for mask in 0..16u32 {
        let c = std::array::from_fn(|i| if mask >> i & 1 == 1 { rat(-1, 2) } else { rat(1, 2) });
        out.push(Root { coords: c });
    }
    out
}

/// `s_α(β) = β - 2 <α,β>/<α,α> α`.
pub fn reflect(alpha: &Root, beta: &RatVec) -> RatVec {
    let f = rat(2, 1) * dot(&alpha.coords, beta) / alpha.norm2();
    std::array::from_fn(|i| beta[i] - f * alpha.coords[i])
}

/// The simple roots `e2 - e3`, `e1 - e2`, `-e1`, `(e1+e2+e3+e4)/2`, in
/// Dynkin order: nodes 2 and 3 share the double bond.
pub fn simple_roots() -> [Root; 4] {
    let (z, o, h) = (Rat::zero(), Rat::one(), rat(1, 2));
    [
        Root { coords: [z, o, -o, z] },
        Root { coords: [o, -o, z, z] },
        Root { coords: [-o, z, z, z] },
        Root { coords: [h, h, h, h] },
    ]
}

/// An element of `W(F4)` as an exact orthogonal matrix acting on column vectors.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    m: [[Rat; 4]; 4],
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .m
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

impl GroupElement {
    pub fn identity() -> Self {
        Self {
            m: std::array::from_fn(|i| std::array::from_fn(|j| if i == j { Rat::one() } else { Rat::zero() })),
        }
    }

    pub fn reflection(alpha: &Root) -> Self {
        // columns are the images of the unit vectors
        let cols: [RatVec; 4] = std::array::from_fn(|j| {
            let mut e = [Rat::zero(); 4];
            e[j] = Rat::one();
            reflect(alpha, &e)
        });
        Self {
            m: std::array::from_fn(|i| std::array::from_fn(|j| cols[j][i])),
        }
    }

    pub fn matrix(&self) -> &[[Rat; 4]; 4] {
        &self.m
    }

    pub fn transpose(&self) -> Self {
        Self {
            m: std::array::from_fn(|i| std::array::from_fn(|j| self.m[j][i])),
        }
    }

    /// Orthogonal, so the inverse is the transpose.
    pub fn inverse(&self) -> Self {
        self.transpose()
    }

    pub fn apply(&self, v: &RatVec) -> RatVec {
        std::array::from_fn(|i| dot(&self.m[i], v))
    }

    pub fn apply_f64(&self, v: &[f64; 4]) -> [f64; 4] {
        std::array::from_fn(|i| {
            (0..4)
                .map(|j| {
                    let e = self.m[i][j];
                    *e.numer() as f64 / *e.denom() as f64 * v[j]
                })
                .sum()
        })
    }

    pub fn is_orthogonal(&self) -> bool {
        *self * self.transpose() == Self::identity()
    }

    pub fn preserves_roots(&self) -> bool {
        let all: HashSet<Root> = roots().into_iter().collect();
        all.iter().all(|r| {
            Root::new(self.apply(&r.coords))
                .map(|img| all.contains(&img))
                .unwrap_or(false)
        })
    }

    pub fn order(&self) -> usize {
        let id = Self::identity();
        let mut acc = *self;
        let mut n = 1;
        while acc != id {
            acc = acc * *self;
            n += 1;
        }
        n
    }

    /// Signed permutation matrix, i.e. an element of `W(B4)`.
    pub fn is_signed_permutation(&self) -> bool {
        self.m.iter().all(|row| {
            row.iter().filter(|x| !x.is_zero()).count() == 1 && row.iter().all(|x| x.is_zero() || x.abs() == Rat::one())
        })
    }

    /// Every entry is `±1/2`.
    pub fn is_half_matrix(&self) -> bool {
        self.m.iter().flatten().all(|x| x.abs() == rat(1, 2))
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;

    fn mul(self, rhs: Self) -> Self {
        Self {
            m: std::array::from_fn(|i| {
                std::array::from_fn(|j| (0..4).fold(Rat::zero(), |acc, k| acc + self.m[i][k] * rhs.m[k][j]))
            }),
        }
    }
}

pub fn simple_reflections() -> [GroupElement; 4] {
    simple_roots().map(|r| GroupElement::reflection(&r))
}

/// Closure of `gens` under multiplication, in breadth-first order from the identity.
pub fn generate(gens: &[GroupElement]) -> Vec<GroupElement> {
    let id = GroupElement::identity();
    let mut seen: HashSet<GroupElement> = HashSet::from([id]);
    let mut order = vec![id];
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for s in gens {
            let h = *s * g;
            if seen.insert(h) {
                order.push(h);
                queue.push_back(h);
            }
        }
    }
    order
}

/// All 1152 elements of `W(F4)`, built once.
pub fn weyl_group() -> &'static [GroupElement] {
    static GROUP: OnceLock<Vec<GroupElement>> = OnceLock::new();
    GROUP.get_or_init(|| generate(&simple_reflections()))
}

/// The subgroup generated by reflections in the integer roots `±e_j`, `±e_j ± e_k`.
pub fn b4_subgroup() -> Vec<GroupElement> {
    let gens: Vec<GroupElement> = roots()
        .iter()
        .filter(|r| r.coords.iter().all(|c| c.is_integer()))
        .map(GroupElement::reflection)
        .collect();
    generate(&gens)
}

/// A 4-tuple modulo global sign, acted on multiplicatively with scale `A`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct F4Point {
    pub z: [C64; 4],
    pub a: C64,
}

impl F4Point {
    pub fn new(z: [C64; 4], a: C64) -> Result<Self> {
        if z.iter().any(|x| x.norm() == 0.0) {
            return Err(Error::Domain("F4 point coordinates must be nonzero".into()));
        }
        if a.norm() == 0.0 {
            return Err(Error::Domain("action scale A must be nonzero".into()));
        }
        Ok(Self { z, a })
    }

    /// Equality modulo the simultaneous sign flip `z -> -z`.
    pub fn eq_mod_sign(&self, other: &F4Point, rel_tol: f64) -> bool {
        let close = |s: f64| {
            self.z
                .iter()
                .zip(other.z.iter())
                .all(|(x, y)| (x - y * s).norm() <= rel_tol * x.norm().max(y.norm()))
        };
        close(1.0) || close(-1.0)
    }

    /// Representative of the sign class whose first coordinate has
    /// positive real part (or zero real part and positive imaginary part).
    pub fn sign_normalized(&self) -> F4Point {
        let z0 = self.z[0];
        let flip = z0.re < 0.0 || (z0.re == 0.0 && z0.im < 0.0);
        if flip {
            F4Point {
                z: self.z.map(|x| -x),
                a: self.a,
            }
        } else {
            *self
        }
    }
}

/// `w(z) = exp ∘ T_A^{-1} ∘ w ∘ T_A ∘ log (z)`, realized algebraically.
///
/// With `z_r = sqrt(A) y_r` the matrix acts on exponents of `y`. Signed
/// permutation rows give `z_j` or `A/z_j`. For half rows with `n` minus signs,
/// `prod y_j^{±1/2} = Y / prod_{minus} y_j` where `Y = sqrt(z1 z2 z3 z4)/A`,
/// so `z'_i = sqrt(A)^{n-1} sqrt(z1 z2 z3 z4) / prod_{minus} z_j`. Only the
/// global sign depends on the branches taken.
pub fn mult_action(g: &GroupElement, point: &F4Point) -> Result<F4Point> {
    let F4Point { z, a } = *point;
    if z.iter().any(|x| x.norm() == 0.0) {
        return Err(Error::Domain("F4 point coordinates must be nonzero".into()));
    }
    let m = g.matrix();
    let out: [C64; 4] = if g.is_signed_permutation() {
        std::array::from_fn(|i| {
            let j = (0..4).find(|&j| !m[i][j].is_zero()).expect("signed permutation row");
            if m[i][j].is_positive() {
                z[j]
            } else {
                a / z[j]
            }
        })
    } else if g.is_half_matrix() {
        let s = (z[0] * z[1] * z[2] * z[3]).sqrt();
        let sa = a.sqrt();
        std::array::from_fn(|i| {
            let minus: Vec<usize> = (0..4).filter(|&j| m[i][j].is_negative()).collect();
            let den = minus.iter().fold(C64::new(1.0, 0.0), |acc, &j| acc * z[j]);
            sa.powi(minus.len() as i32 - 1) * s / den
        })
    } else {
        return Err(Error::Domain(format!("{g:?} is neither a signed permutation nor a half matrix")));
    };
    Ok(F4Point { z: out, a })
}

/// Exponents `(β, τ)` attached to `b -> b p^β`, `t_r -> t_r p^{τ_r}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimitExponents {
    pub beta: f64,
    pub tau: [f64; 4],
}

/// Tolerance for polytope membership and facet saturation.
pub const POLYTOPE_TOL: f64 = 1e-12;

impl LimitExponents {
    pub fn new(beta: f64, tau: [f64; 4]) -> Self {
        Self { beta, tau }
    }

    /// The common shift `(1-β)/2` that centres the polytope.
    pub fn centre(&self) -> f64 {
        0.5 * (1.0 - self.beta)
    }

    /// `0 <= β <= 1`, `0 <= τ_r + τ_s <= 2 - 2β`, `τ_r - τ_s <= 1 - β`.
    pub fn in_polytope(&self) -> bool {
        let tol = POLYTOPE_TOL;
        let (b, t) = (self.beta, self.tau);
        if b < -tol || b > 1.0 + tol {
            return false;
        }
        for r in 0..4 {
            for s in 0..4 {
                if r == s {
                    continue;
                }
                if t[r] + t[s] < -tol || t[r] + t[s] > 2.0 - 2.0 * b + tol || t[r] - t[s] > 1.0 - b + tol {
                    return false;
                }
            }
        }
        true
    }

    /// Inside the cube `0 <= τ_r <= 1 - β`, where limits can be taken under
    /// the integral sign directly.
    pub fn in_cube(&self) -> bool {
        let top = 1.0 - self.beta;
        self.tau.iter().all(|&t| t >= -POLYTOPE_TOL && t <= top + POLYTOPE_TOL)
    }

    pub fn approx_eq(&self, other: &LimitExponents, tol: f64) -> bool {
        (self.beta - other.beta).abs() <= tol && self.tau.iter().zip(other.tau.iter()).all(|(a, b)| (a - b).abs() <= tol)
    }
}

/// `τ -> c + M(τ - c)` with `c = (1-β)/2`; `β` is unchanged.
pub fn additive_action(g: &GroupElement, e: &LimitExponents) -> LimitExponents {
    let c = e.centre();
    let u = e.tau.map(|t| t - c);
    let v = g.apply_f64(&u);
    LimitExponents {
        beta: e.beta,
        tau: v.map(|x| x + c),
    }
}

/// Distinct images of `e` under the whole group, in group order.
pub fn additive_orbit(e: &LimitExponents) -> Vec<LimitExponents> {
    let mut out: Vec<LimitExponents> = Vec::new();
    for g in weyl_group() {
        let img = additive_action(g, e);
        if !out.iter().any(|o| o.approx_eq(&img, 1e-12)) {
            out.push(img);
        }
    }
    out
}

/// Distinct images of `point` modulo sign, by breadth-first closure under
/// the simple reflections.
pub fn orbit(point: &F4Point, rel_tol: f64) -> Result<Vec<F4Point>> {
    let gens = simple_reflections();
    let mut out = vec![point.sign_normalized()];
    let mut queue = VecDeque::from([out[0]]);
    while let Some(x) = queue.pop_front() {
        for s in &gens {
            let y = mult_action(s, &x)?.sign_normalized();
            if !out.iter().any(|o| o.eq_mod_sign(&y, rel_tol)) {
                out.push(y);
                queue.push_back(y);
                if out.len() > weyl_group().len() {
                    return Err(Error::Domain("orbit exceeds the group order; tolerance too tight".into()));
                }
            }
        }
    }
    Ok(out)
}

/// A canonical orbit representative together with an element mapping `e` to
/// it (up to sorting `τ`). `None` outside the polytope.
///
/// Images inside the cube `[0, 1-β]^4` are preferred; among the candidates the
/// lexicographically largest descending-sorted `τ` wins. The cube's images do
/// not cover the whole polytope (points near an octahedral facet such as
/// `τ_1 + τ_2 = 0` with `τ_1 < 0` have none), hence the fallback. All group
/// elements are scanned; with 1152 of them this is cheap.
pub fn canonicalize(e: &LimitExponents) -> Option<(LimitExponents, GroupElement)> {
    if !e.in_polytope() {
        return None;
    }
    let key = |x: &LimitExponents| {
        let mut t = x.tau;
        t.sort_by(|a, b| b.total_cmp(a));
        t
    };
    let any_in_cube = weyl_group().iter().any(|g| additive_action(g, e).in_cube());
    let mut best: Option<(LimitExponents, GroupElement, [f64; 4])> = None;
    for g in weyl_group() {
        let img = additive_action(g, e);
        if any_in_cube && !img.in_cube() {
            continue;
        }
        let k = key(&img);
        let better = match &best {
            None => true,
            Some((_, _, bk)) => {
                let mut ord = std::cmp::Ordering::Equal;
                for i in 0..4 {
                    if (k[i] - bk[i]).abs() > POLYTOPE_TOL {
                        ord = k[i].total_cmp(&bk[i]);
                        break;
                    }
                }
                ord == std::cmp::Ordering::Greater
            }
        };
        if better {
            best = Some((img, *g, k));
        }
    }
    best.map(|(mut img, g, k)| {
        img.tau = k;
        (img, g)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RegimeTag {
    Vertex,
    Edge,
    Triangle,
    OctahedronGeneric,
    OctahedronSquare,
    Interior,
    MidBeta,
    BetaOneApex,
    Outside,
}

fn rank(rows: &[[f64; 4]]) -> usize {
    let mut a: Vec<[f64; 4]> = rows.to_vec();
    let mut r = 0;
    for col in 0..4 {
        let Some(piv) = (r..a.len()).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())) else {
            break;
        };
        if a[piv][col].abs() < 1e-9 {
            continue;
        }
        a.swap(r, piv);
        for i in 0..a.len() {
            if i != r {
                let f = a[i][col] / a[r][col];
                for k in 0..4 {
                    a[i][k] -= f * a[r][k];
                }
            }
        }
        r += 1;
    }
    r
}

/// Dimension of the face of the `β`-slice of the polytope (a scaled 24-cell
/// `|u_r| + |u_s| <= 1 - β` in centred coordinates) whose relative interior
/// contains `e`.
pub fn face_dimension(e: &LimitExponents) -> usize {
    let c = e.centre();
    let u = e.tau.map(|t| t - c);
    let mut normals = Vec::new();
    for r in 0..4 {
        for s in r + 1..4 {
            for (sr, ss) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                if (sr * u[r] + ss * u[s] - 2.0 * c).abs() <= POLYTOPE_TOL {
                    let mut n = [0.0; 4];
                    n[r] = sr;
                    n[s] = ss;
                    normals.push(n);
                }
            }
        }
    }
    4 - rank(&normals)
}

/// Regime of the limit `p -> 0` at exponents `e`.
///
/// Face type at `β = 0` is invariant under the group; the square inside an
/// octahedron is not (different octahedra's squares are not images of each
/// other), so it is decided on `e` itself: a 3-face point inside the cube.
pub fn classify_regime(e: &LimitExponents) -> RegimeTag {
    if !e.in_polytope() {
        return RegimeTag::Outside;
    }
    if (e.beta - 1.0).abs() <= POLYTOPE_TOL {
        return RegimeTag::BetaOneApex;
    }
    if e.beta > POLYTOPE_TOL {
        return RegimeTag::MidBeta;
    }
    let canon = canonicalize(e).map(|(c, _)| c).unwrap_or(*e);
    match face_dimension(&canon) {
        0 => RegimeTag::Vertex,
        1 => RegimeTag::Edge,
        2 => RegimeTag::Triangle,
        3 if e.in_cube() => RegimeTag::OctahedronSquare,
        3 => RegimeTag::OctahedronGeneric,
        _ => RegimeTag::Interior,
    }
}

impl RegimeTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegimeTag::Vertex => "VERTEX",
            RegimeTag::Edge => "EDGE",
            RegimeTag::Triangle => "TRIANGLE",
            RegimeTag::OctahedronGeneric => "OCTAHEDRON_GENERIC",
            RegimeTag::OctahedronSquare => "OCTAHEDRON_SQUARE",
            RegimeTag::Interior => "INTERIOR",
            RegimeTag::MidBeta => "MID_BETA",
            RegimeTag::BetaOneApex => "BETA_ONE_APEX",
            RegimeTag::Outside => "OUTSIDE",
        }
    }
}
