//! Volume functions `V_{g,n}` and `Vol_{g,n}` on angle vectors whose last
//! coordinate is at most 2 and whose other coordinates are at most 1/2.
//!
//! A profile fixes the head `a₁..a_{n−1}` and tracks the last angle `t ∈ [0, 2]`:
//!
//! * `V¹(t) = P¹(a, t) − ∫₀ᵗ 𝒟⁴(a, u) du`
//! * `V⁰(t) = P(a, 0) + ∫₀ᵗ (u·V¹(a, u) − 𝒟³(a, u)) du`
//! * `V_{g,n} = (−1)^{g−1+n} V⁰`

pub mod generic;
mod kernels;
pub mod region;

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, OnceLock};

use num_traits::{One, Signed, Zero};
use parking_lot::RwLock;
use serde::Serialize;
use thiserror::Error;

use crate::exactmath::{fmt_rational, int, rat, to_f64, MathError, PiecewisePoly, Rational, UniPoly};
use crate::intersections::is_stable;
use crate::mirzakhani::mirzakhani_poly;

pub use generic::graph_kernel;
pub use kernels::{d3_kernel, d4_kernel, d5_kernel};
use region::{substitute, Affine};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("negative coordinate {0}")]
    Negative(String),
    #[error("more than one coordinate exceeds 1/2: {0}")]
    TwoLarge(String),
    #[error("last coordinate {0} exceeds 2")]
    TooLarge(String),
    #[error("unstable type ({g},{n})")]
    Unstable { g: u32, n: usize },
    #[error(transparent)]
    Math(#[from] MathError),
}

/// How outer vertices of the four-valent kernel are weighted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OuterFactor {
    /// Plain Mirzakhani polynomial, no cut.
    Polynomial,
    /// Mirzakhani polynomial restricted to the vertex's domain.
    CappedPolynomial,
    /// Small-chamber volume with the domain cut.
    Volume,
    /// Mirzakhani polynomial, cut only on trivalent genus-0 vertices.
    TriangleCut,
    /// Small-chamber volume, cut only on trivalent genus-0 vertices.
    TriangleCutVolume,
    /// The outer vertex's own profile on single-edge graphs; `Volume` elsewhere.
    Recursive,
}

impl OuterFactor {
    pub const ALL: [OuterFactor; 6] = [
        OuterFactor::Polynomial,
        OuterFactor::CappedPolynomial,
        OuterFactor::Volume,
        OuterFactor::TriangleCut,
        OuterFactor::TriangleCutVolume,
        OuterFactor::Recursive,
    ];

    pub(crate) fn cuts(self, g: u32, n: usize) -> bool {
        match self {
            OuterFactor::Polynomial => false,
            OuterFactor::CappedPolynomial | OuterFactor::Volume | OuterFactor::Recursive => true,
            OuterFactor::TriangleCut | OuterFactor::TriangleCutVolume => (g, n) == (0, 3),
        }
    }

    pub(crate) fn corrects(self) -> bool {
        matches!(self, OuterFactor::Volume | OuterFactor::TriangleCutVolume | OuterFactor::Recursive)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct KernelOptions {
    pub d4_outer: OuterFactor,
    pub d3_outer: OuterFactor,
}

impl Default for KernelOptions {
    fn default() -> Self {
        KernelOptions { d4_outer: OuterFactor::Recursive, d3_outer: OuterFactor::Volume }
    }
}

pub fn euler(g: u32, n: usize) -> i64 {
    2 * g as i64 - 2 + n as i64
}

/// Degree bound for profile pieces.
pub fn degree_bound(g: u32, n: usize) -> usize {
    (6 * g as i64 - 6 + 2 * n as i64).max(0) as usize
}

pub fn sign(g: u32, n: usize) -> Rational {
    if (g as i64 - 1 + n as i64).rem_euclid(2) == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Angles sorted ascending so the distinguished coordinate is last.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AngleVector(Vec<Rational>);

impl AngleVector {
    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn head(&self) -> &[Rational] {
        &self.0[..self.0.len() - 1]
    }

    pub fn last(&self) -> &Rational {
        self.0.last().expect("nonempty")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> Rational {
        self.0.iter().sum()
    }
}

pub fn canonicalize(v: &[Rational]) -> Result<AngleVector, DomainError> {
    let mut c = v.to_vec();
    if let Some(x) = c.iter().find(|x| x.is_negative()) {
        return Err(DomainError::Negative(fmt_rational(x)));
    }
    c.sort();
    let half = rat(1, 2);
    if c.len() >= 2 && c[c.len() - 2] > half {
        return Err(DomainError::TwoLarge(crate::exactmath::fmt_vector(v)));
    }
    if let Some(x) = c.last().filter(|x| **x > int(2)) {
        return Err(DomainError::TooLarge(fmt_rational(x)));
    }
    Ok(AngleVector(c))
}

/// `V⁰`, `V¹`, `V²` and the kernels for one head.
#[derive(Clone, Debug)]
pub struct Profiles {
    pub g: u32,
    pub n: usize,
    pub head: Vec<Rational>,
    pub v0: PiecewisePoly,
    pub v1: PiecewisePoly,
    pub v2: PiecewisePoly,
    pub d3: PiecewisePoly,
    pub d4: PiecewisePoly,
    pub d5: PiecewisePoly,
}

impl Profiles {
    /// Largest t in `[0, 2]` still in the closure of the domain.
    pub fn domain_end(&self) -> Rational {
        let total: Rational = self.head.iter().sum();
        (int(euler(self.g, self.n)) - total).min(int(2))
    }

    /// `V⁰` restricted to the part of `[0, 2]` inside the domain.
    pub fn v0_on_domain(&self) -> PiecewisePoly {
        let end = self.domain_end();
        self.v0.restrict(&Rational::zero(), &end).expect("end inside [0, 2]")
    }
}

/// `t ↦ V^ℓ_{g,n}(head, t)` on `[0, 2]`.
#[derive(Clone, Debug)]
pub struct VolumeProfile {
    pub g: u32,
    pub n: usize,
    pub head: Vec<Rational>,
    pub level: u32,
    pub profile: PiecewisePoly,
}

type Key = (u32, usize, Vec<Rational>, KernelOptions);
type Memo = RwLock<HashMap<Key, Arc<Profiles>>>;

fn memo() -> &'static Memo {
    static M: OnceLock<Memo> = OnceLock::new();
    M.get_or_init(Default::default)
}

/// `P^ℓ_{g,n}(head, t)` as a polynomial in t.
pub fn p_along(g: u32, n: usize, head: &[Rational], level: u32) -> UniPoly {
    let p = mirzakhani_poly(g, n, level).expect("stable");
    let mut args: Vec<Affine> = head.iter().cloned().map(Affine::constant).collect();
    args.push(Affine::in_u(Rational::zero(), Rational::one()));
    substitute(&p.poly, &args).in_u()
}

pub fn profiles(g: u32, n: usize, head: &[Rational]) -> Arc<Profiles> {
    profile_with(g, n, head, KernelOptions::default())
}

/// Memoized profiles; `head` is sorted internally.
pub fn profile_with(g: u32, n: usize, head: &[Rational], opts: KernelOptions) -> Arc<Profiles> {
    assert!(is_stable(g, n) && head.len() + 1 == n, "profile type");
    let mut head = head.to_vec();
    head.sort();
    let key = (g, n, head.clone(), opts);
    if let Some(p) = memo().read().get(&key) {
        return p.clone();
    }
    let p = Arc::new(build_profiles(g, n, head, opts));
    memo().write().insert(key, p.clone());
    p
}

fn build_profiles(g: u32, n: usize, head: Vec<Rational>, opts: KernelOptions) -> Profiles {
    let zero = Rational::zero();
    let two = int(2);
    let d5 = d5_kernel(g, n, &head, opts);
    let d4 = d4_kernel(g, n, &head, opts);
    let d3 = d3_kernel(g, n, &head, opts);
    let p2 = PiecewisePoly::single(zero.clone(), two.clone(), p_along(g, n, &head, 2));
    let lost2 = d5.cumulative(&zero);
    let v2 = p2.sub(&lost2).expect("same domain");
    let p1 = PiecewisePoly::single(zero.clone(), two.clone(), p_along(g, n, &head, 1));
    // V¹ = P¹ − ∫ (u·∫𝒟⁵ + 𝒟⁴)
    let lost1 = lost2.mul_poly(&UniPoly::x()).add(&d4).expect("same domain").cumulative(&zero);
    let v1 = p1.sub(&lost1).expect("same domain");
    let start = p_along(g, n, &head, 0).eval(&zero);
    let integrand = v1.mul_poly(&UniPoly::x()).sub(&d3).expect("same domain");
    let mut v0 = integrand.cumulative(&start);
    v0.merge_equal_pieces();
    Profiles { g, n, head, v0, v1, v2, d3, d4, d5 }
}

pub fn v_profile(g: u32, n: usize, head: &[Rational], level: u32) -> Result<VolumeProfile, DomainError> {
    if !is_stable(g, n) || n == 0 {
        return Err(DomainError::Unstable { g, n });
    }
    let mut full = head.to_vec();
    full.push(Rational::zero());
    let av = canonicalize(&full)?;
    let head = av.head().to_vec();
    let profile = match level {
        0 => profiles(g, n, &head).v0.clone(),
        1 => profiles(g, n, &head).v1.clone(),
        2 => profiles(g, n, &head).v2.clone(),
        l => PiecewisePoly::single(Rational::zero(), int(2), p_along(g, n, &head, l)),
    };
    Ok(VolumeProfile { g, n, head, level, profile })
}

/// `V_{g,n}(a)`; `V_{0,3}` is the indicator of `|a| ≤ 1`.
pub fn v_eval(g: u32, a: &[Rational]) -> Result<Rational, DomainError> {
    let n = a.len();
    if !is_stable(g, n) {
        return Err(DomainError::Unstable { g, n });
    }
    let av = canonicalize(a)?;
    if g == 0 && n == 3 {
        return Ok(if av.total() <= Rational::one() { Rational::one() } else { Rational::zero() });
    }
    let pr = profiles(g, n, av.head());
    Ok(sign(g, n) * pr.v0.eval(av.last())?)
}

/// `V⁰_{g,n}(a)` read off the profile.
pub fn v0_eval(g: u32, a: &[Rational]) -> Result<Rational, DomainError> {
    Ok(sign(g, a.len()) * v_eval(g, a)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct VolValue {
    /// Exact numerator `V_{g,n}(a)`.
    pub v_exact: String,
    pub vol: f64,
    /// True when a vanishing sine was resolved through the derivative.
    pub limit: bool,
}

/// `V / ∏_{a_i > 0} sin(π a_i)`, using the one-sided derivative where the last sine vanishes.
pub fn vol_eval(g: u32, a: &[Rational]) -> Result<VolValue, DomainError> {
    let v = v_eval(g, a)?;
    let av = canonicalize(a)?;
    let head_sines: f64 =
        av.head().iter().filter(|x| x.is_positive()).map(|x| (std::f64::consts::PI * to_f64(x)).sin()).product();
    let t = av.last();
    let v_exact = fmt_rational(&v);
    if t.is_zero() {
        return Ok(VolValue { v_exact, vol: to_f64(&v) * 1.0 / head_sines, limit: false });
    }
    if t.is_integer() {
        if !v.is_zero() {
            return Ok(VolValue { v_exact, vol: f64::INFINITY, limit: true });
        }
        let d = if g == 0 && av.len() == 3 {
            Rational::zero()
        } else {
            let pr = profiles(g, av.len(), av.head());
            sign(g, av.len()) * pr.v0.derivative().eval_left(t)?
        };
        let pi = std::f64::consts::PI;
        let dsin = pi * (pi * to_f64(t)).cos();
        return Ok(VolValue { v_exact, vol: to_f64(&d) / (dsin * head_sines), limit: true });
    }
    let s = (std::f64::consts::PI * to_f64(t)).sin() * head_sines;
    Ok(VolValue { v_exact, vol: to_f64(&v) / s, limit: false })
}

/// Candidate breakpoints: `k − Σ_S a_i` over subsets S of the head, inside `(0, 2)`, plus endpoints.
pub fn wall_candidates(g: u32, n: usize, head: &[Rational]) -> Vec<Rational> {
    let kmax = euler(g, n).max(0) + 2;
    let mut sums = BTreeSet::new();
    let m = head.len().min(20);
    for mask in 0u64..(1u64 << m) {
        let s: Rational = (0..m).filter(|k| mask >> k & 1 == 1).map(|k| head[k].clone()).sum();
        sums.insert(s);
    }
    let mut out = BTreeSet::new();
    out.insert(Rational::zero());
    out.insert(int(2));
    for k in 0..=kmax {
        for s in &sums {
            let c = int(k) - s;
            if c > Rational::zero() && c < int(2) {
                out.insert(c);
            }
        }
    }
    out.into_iter().collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Fig1Row {
    pub x: String,
    pub v_exact: String,
    pub v_float: f64,
    pub vol_float: f64,
}

/// Rows `x ↦ (V_{0,n}(0,…,0,x), Vol)` at `samples + 1` equally spaced points of `[0, 2]`.
pub fn fig1_table(n: usize, samples: usize) -> Result<Vec<Fig1Row>, DomainError> {
    let samples = samples.max(1);
    let mut rows = Vec::with_capacity(samples + 1);
    for k in 0..=samples {
        let x = rat(2 * k as i64, samples as i64);
        let mut a = vec![Rational::zero(); n - 1];
        a.push(x.clone());
        let v = v_eval(0, &a)?;
        let vol = if n == 3 {
            // Indicator: the quotient has no finite limit at x = 1 and is 0 beyond.
            if x.is_zero() {
                to_f64(&v)
            } else if x > Rational::one() {
                0.0
            } else if x == Rational::one() {
                f64::INFINITY
            } else {
                to_f64(&v) / (std::f64::consts::PI * to_f64(&x)).sin()
            }
        } else {
            vol_eval(0, &a)?.vol
        };
        rows.push(Fig1Row { x: fmt_rational(&x), v_exact: fmt_rational(&v), v_float: to_f64(&v), vol_float: vol });
    }
    Ok(rows)
}

pub fn fig1_csv(rows: &[Fig1Row]) -> String {
    let mut s = String::from("x,V_exact,V_float,Vol_float\n");
    for r in rows {
        s.push_str(&format!("{},{},{},{}\n", r.x, r.v_exact, r.v_float, r.vol_float));
    }
    s
}
