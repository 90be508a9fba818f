//! Boundary kernels `𝒟³(a, u)` and `𝒟⁴(a, u)` as piecewise polynomials in u.

use num_traits::{One, Zero};

use super::region::{integrate_terms, substitute, Affine, RegionTerm};
use super::{euler, profile_with, KernelOptions, OuterFactor};
use crate::exactmath::{int, rat, PiecewisePoly, Rational, UniPoly};
use crate::intersections::is_stable;
use crate::mirzakhani::{p, q_poly};

fn two() -> Rational {
    int(2)
}

fn sum(v: &[Rational]) -> Rational {
    v.iter().sum()
}

fn subset(head: &[Rational], mask: u64) -> (Vec<Rational>, Vec<Rational>) {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (k, x) in head.iter().enumerate() {
        if mask >> k & 1 == 1 {
            a.push(x.clone());
        } else {
            b.push(x.clone());
        }
    }
    (a, b)
}

fn without(head: &[Rational], skip: &[usize]) -> Vec<Rational> {
    head.iter().enumerate().filter(|(k, _)| !skip.contains(k)).map(|(_, x)| x.clone()).collect()
}

/// Terms whose sum is the outer-vertex factor for type (g, n) at the point
/// `fixed ∪ moving`, with `n = fixed.len() + moving.len()`.
///
/// `Volume` uses the small-chamber closed form `P − Σ [w_p + w_q > 1]·Q`
/// together with the domain cut `|w| < 2g−2+n`; it is valid when every
/// coordinate is at most 1 and at most one exceeds 1/2.
pub(crate) fn outer_factor(g: i64, fixed: &[Rational], moving: &[Affine], mode: OuterFactor) -> Vec<RegionTerm> {
    let n = fixed.len() + moving.len();
    if g < 0 || !is_stable(g as u32, n) {
        return Vec::new();
    }
    let g = g as u32;
    let mut args: Vec<Affine> = fixed.iter().cloned().map(Affine::constant).collect();
    args.extend(moving.iter().cloned());
    let total = args.iter().fold(Affine::constant(Rational::zero()), |acc, a| acc.add(a));
    let cut = total.neg().plus(&int(euler(g, n)));
    let base = p(g, n).expect("stable");
    let mut out = Vec::new();
    let cuts = if mode.cuts(g, n) { vec![cut] } else { vec![] };
    out.push(RegionTerm { integrand: substitute(&base.poly, &args), constraints: cuts.clone() });
    if !mode.corrects() || n < 2 || !is_stable(g, n - 1) {
        return out;
    }
    let q = q_poly(g, n - 1);
    for pi in 0..n {
        for qi in pi + 1..n {
            if pi < fixed.len() && qi < fixed.len() {
                // Both coordinates are at most 1/2.
                continue;
            }
            let s = args[pi].add(&args[qi]).plus(&int(-1));
            let mut qargs: Vec<Affine> =
                args.iter().enumerate().filter(|&(k, _)| k != pi && k != qi).map(|(_, a)| a.clone()).collect();
            qargs.push(s.clone());
            let mut constraints = cuts.clone();
            constraints.push(s);
            out.push(RegionTerm { integrand: substitute(&q, &qargs).scale(&int(-1)), constraints });
        }
    }
    out
}

fn product(a: &[RegionTerm], b: &[RegionTerm]) -> Vec<RegionTerm> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for s in a {
        for t in b {
            let mut constraints = s.constraints.clone();
            constraints.extend(t.constraints.iter().cloned());
            out.push(RegionTerm { integrand: s.integrand.mul(&t.integrand), constraints });
        }
    }
    out
}

/// Applies the weight `y(x − y)/2` and the range `0 ≤ y ≤ x`.
fn with_triangle(terms: Vec<RegionTerm>, x: &Affine) -> Vec<RegionTerm> {
    let y = Affine::y();
    let rest = x.sub(&y);
    let weight = y.to_bipoly().mul(&rest.to_bipoly()).scale(&rat(1, 2));
    terms
        .into_iter()
        .map(|mut t| {
            t.integrand = t.integrand.mul(&weight);
            t.constraints.push(y.clone());
            t.constraints.push(rest.clone());
            t
        })
        .collect()
}

/// Loop and separating contributions sharing the running edge sum `x`.
fn two_edge_terms(g: u32, others: &[Rational], x: &Affine, inner: OuterFactor) -> Vec<RegionTerm> {
    let y = Affine::y();
    let rest = x.sub(&y);
    let mut terms = outer_factor(g as i64 - 1, others, &[y.clone(), rest.clone()], inner);
    for mask in 0u64..(1u64 << others.len()) {
        let (i1, i2) = subset(others, mask);
        for g1 in 0..=g {
            let f1 = outer_factor(g1 as i64, &i1, std::slice::from_ref(&y), inner);
            if f1.is_empty() {
                continue;
            }
            let f2 = outer_factor((g - g1) as i64, &i2, std::slice::from_ref(&rest), inner);
            terms.extend(product(&f1, &f2));
        }
    }
    with_triangle(terms, x)
}

/// `𝒟⁴(a, u)` for the (g, n) profile with the given head (n−1 coordinates).
pub fn d4_kernel(g: u32, _n: usize, head: &[Rational], opts: KernelOptions) -> PiecewisePoly {
    let zero = Rational::zero();
    let mut flat = Vec::new();
    let mut tri = Vec::new();
    let mut single = Single::default();
    let m = head.len();
    for i in 0..m {
        for j in i + 1..m {
            let shift = &head[i] + &head[j] - two();
            let others = without(head, &[i, j]);
            if opts.d4_outer == OuterFactor::Recursive {
                single += &one_edge(g, &others, &shift, opts);
                continue;
            }
            let x = Affine::in_u(shift, Rational::one());
            for mut t in outer_factor(g as i64, &others, std::slice::from_ref(&x), opts.d4_outer) {
                t.integrand = t.integrand.mul(&x.to_bipoly());
                t.constraints.push(x.clone());
                flat.push(t);
            }
        }
        let x = Affine::in_u(&head[i] - two(), Rational::one());
        tri.extend(two_edge_terms(g, &without(head, &[i]), &x, opts.d4_outer));
    }
    integrate_terms(&flat, &zero, &two(), false)
        .add(&integrate_terms(&tri, &zero, &two(), true))
        .and_then(|f| f.add(&single.0))
        .expect("same domain")
}

/// `𝒟⁵(a, u)`: a five-valent central vertex carrying three head legs and a
/// single edge. It only switches on when three head angles sum past 1.
pub fn d5_kernel(g: u32, _n: usize, head: &[Rational], opts: KernelOptions) -> PiecewisePoly {
    let zero = Rational::zero();
    let mut flat = Vec::new();
    let mut single = Single::default();
    let m = head.len();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let shift = &head[i] + &head[j] + &head[k] - int(3);
                let others = without(head, &[i, j, k]);
                if opts.d4_outer == OuterFactor::Recursive {
                    single += &one_edge(g, &others, &shift, opts);
                    continue;
                }
                let x = Affine::in_u(shift, Rational::one());
                for mut t in outer_factor(g as i64, &others, std::slice::from_ref(&x), opts.d4_outer) {
                    t.integrand = t.integrand.mul(&x.to_bipoly());
                    t.constraints.push(x.clone());
                    flat.push(t);
                }
            }
        }
    }
    integrate_terms(&flat, &zero, &two(), false).add(&single.0).expect("same domain")
}

/// `𝒟³(a, u)` for the (g, n) profile with the given head.
pub fn d3_kernel(g: u32, _n: usize, head: &[Rational], opts: KernelOptions) -> PiecewisePoly {
    let zero = Rational::zero();
    let mut out = PiecewisePoly::zero_on(zero.clone(), two());
    // First sum: recursive profile of (g, n−1) along a_i + u − 1.
    let mut single = Single::default();
    for i in 0..head.len() {
        single += &one_edge(g, &without(head, &[i]), &(&head[i] - Rational::one()), opts);
    }
    out = out.add(&single.0).expect("same domain");
    let x = Affine::in_u(int(-1), Rational::one());
    let tri = two_edge_terms(g, head, &x, opts.d3_outer);
    out.add(&integrate_terms(&tri, &zero, &two(), true)).expect("same domain")
}

/// Accumulator for single-edge contributions on `[0, 2]`.
struct Single(PiecewisePoly);

impl Default for Single {
    fn default() -> Self {
        Single(PiecewisePoly::zero_on(Rational::zero(), two()))
    }
}

impl std::ops::AddAssign<&PiecewisePoly> for Single {
    fn add_assign(&mut self, f: &PiecewisePoly) {
        self.0 = self.0.add(f).expect("same domain");
    }
}

/// `u ↦ x·V⁰_{g,k+1}(others, x)` with `x = shift + u`, zero outside `0 < x < cap`.
fn one_edge(g: u32, others: &[Rational], shift: &Rational, opts: KernelOptions) -> PiecewisePoly {
    let zero = Rational::zero();
    let k = others.len() + 1;
    if !is_stable(g, k) {
        return PiecewisePoly::zero_on(zero, two());
    }
    let lo = (-shift).max(zero.clone());
    let hi = (int(euler(g, k)) - sum(others) - shift).min(two());
    if lo >= hi {
        return PiecewisePoly::zero_on(zero, two());
    }
    let inner = profile_with(g, k, others, opts);
    let composed = inner.v0.compose_affine(shift, &Rational::one(), &lo, &hi).expect("inside [0, 2]");
    let term = composed.mul_poly(&UniPoly::affine(shift.clone(), Rational::one()));
    extend_by_zero(&term, &zero, &two())
}

pub(crate) fn extend_by_zero(f: &PiecewisePoly, lo: &Rational, hi: &Rational) -> PiecewisePoly {
    let cuts: Vec<Rational> = f.breakpoints().to_vec();
    PiecewisePoly::build::<std::convert::Infallible, _>(lo, hi, cuts, |iv| {
        let m = iv.midpoint();
        Ok(if &m > f.lo() && &m < f.hi() { f.piece_at(&m).clone() } else { UniPoly::zero() })
    })
    .expect("infallible")
}
