//! Decorated-graph classes on the moduli space: the exponential class `e(a)`
//! and its corrected version `s(a)`, built as formal sums of κ₁/ψ monomials and
//! boundary pushforwards from rational graphs.
//!
//! This is a second route to the volume profiles: `V⁰(a) = ∫ s(a)` with no use
//! of the kernel machinery in [`crate::volumes`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_traits::{One, Zero};
use parking_lot::RwLock;

use crate::exactmath::{
    fmt_rational, int, interior_nodes, interpolate, rational_factorial, PiecewisePoly, Rational, UniPoly,
};
use crate::graphs::{enumerate_rational_graphs, OuterVertex, RationalGraph};
use crate::intersections::{dim, is_stable, kappa_psi_number, psi_number};
use crate::volumes::{canonicalize, degree_bound, wall_candidates, DomainError};

#[cfg(test)]
mod tests;

/// One generator of the class ring as used here.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// `κ₁^kappa ∏ ψ_i^{psi[i]}`.
    Smooth { kappa: u32, psi: Vec<u32> },
    /// Pushforward from `graph` with `ψ_n^central_psi` on the central vertex
    /// and top-degree classes on the outer vertices (their integrals sit in
    /// the coefficient).
    Boundary { graph: RationalGraph, central_psi: u32 },
}

impl Term {
    pub fn degree(&self) -> i64 {
        match self {
            Term::Smooth { kappa, psi } => *kappa as i64 + psi.iter().map(|&e| e as i64).sum::<i64>(),
            Term::Boundary { graph, central_psi } => {
                let outer: i64 = graph.outer.iter().map(|v| dim(v.genus, v.valence())).sum();
                graph.num_edges() as i64 + *central_psi as i64 + outer
            }
        }
    }

    /// Multiplication by ψ_n.
    fn times_psi_last(&self, n: usize) -> Term {
        match self {
            Term::Smooth { kappa, psi } => {
                let mut psi = psi.clone();
                psi[n - 1] += 1;
                Term::Smooth { kappa: *kappa, psi }
            }
            Term::Boundary { graph, central_psi } => {
                Term::Boundary { graph: graph.clone(), central_psi: central_psi + 1 }
            }
        }
    }

    /// `∫ term · ψ_n^ell` over the moduli space of type (g, n).
    pub fn pair_psi(&self, g: u32, n: usize, ell: u32) -> Rational {
        match self {
            Term::Smooth { kappa, psi } => {
                let mut psi = psi.clone();
                psi[n - 1] += ell;
                kappa_psi_number(g, &psi, *kappa).expect("stable type")
            }
            Term::Boundary { graph, central_psi } => {
                let mut ex = vec![0u32; graph.central_valence()];
                ex[0] = central_psi + ell;
                psi_number(0, &ex).expect("stable central vertex")
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Smooth { kappa, psi } => {
                let mut parts = Vec::new();
                if *kappa > 0 {
                    parts.push(if *kappa == 1 { "κ1".to_string() } else { format!("κ1^{kappa}") });
                }
                for (i, &e) in psi.iter().enumerate() {
                    if e > 0 {
                        parts.push(if e == 1 { format!("ψ{}", i + 1) } else { format!("ψ{}^{e}", i + 1) });
                    }
                }
                if parts.is_empty() {
                    write!(f, "1")
                } else {
                    write!(f, "{}", parts.join("·"))
                }
            }
            Term::Boundary { graph, central_psi } => {
                write!(f, "[{graph}]")?;
                if *central_psi > 0 {
                    write!(f, " * ψ{}^{central_psi}", graph.n)?;
                }
                Ok(())
            }
        }
    }
}

/// A class with rational coefficients on the moduli space of type (g, n).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecoratedClass {
    pub g: u32,
    pub n: usize,
    pub terms: BTreeMap<Term, Rational>,
}

impl DecoratedClass {
    pub fn zero(g: u32, n: usize) -> Self {
        DecoratedClass { g, n, terms: BTreeMap::new() }
    }

    fn add_term(&mut self, t: Term, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(t.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&t);
        }
    }

    pub fn psi_multiply(&self) -> DecoratedClass {
        let top = dim(self.g, self.n);
        let mut out = DecoratedClass::zero(self.g, self.n);
        for (t, c) in &self.terms {
            let t = t.times_psi_last(self.n);
            if t.degree() <= top {
                out.add_term(t, c.clone());
            }
        }
        out
    }

    /// `∫ class · ψ_n^ell`.
    pub fn pair_psi(&self, ell: u32) -> Rational {
        let want = dim(self.g, self.n) - ell as i64;
        self.terms.iter().filter(|(t, _)| t.degree() == want).map(|(t, c)| c * t.pair_psi(self.g, self.n, ell)).sum()
    }

    pub fn integrate_top(&self) -> Rational {
        self.pair_psi(0)
    }

    /// One line per term: `coeff * [graph] * monomial`.
    pub fn dump(&self) -> String {
        let mut lines = Vec::new();
        for (t, c) in &self.terms {
            lines.push(format!("{} * {}", fmt_rational(c), t));
        }
        lines.join("\n")
    }
}

/// `exp(−κ₁/2 + Σ a_i² ψ_i/2)` truncated at the top degree.
pub fn e_class(g: u32, a: &[Rational]) -> Result<DecoratedClass, DomainError> {
    let n = a.len();
    if !is_stable(g, n) {
        return Err(DomainError::Unstable { g, n });
    }
    Ok(e_class_raw(g, a))
}

fn e_class_raw(g: u32, a: &[Rational]) -> DecoratedClass {
    let n = a.len();
    let top = dim(g, n).max(0) as u32;
    let mut out = DecoratedClass::zero(g, n);
    let mut psi = vec![0u32; n];
    let half = Rational::new(1.into(), 2.into());
    for kappa in 0..=top {
        let c = pow(&-half.clone(), kappa) / rational_factorial(kappa);
        monomials(a, 0, top - kappa, &mut psi, &mut |psi| {
            let mut coeff = c.clone();
            for (x, &e) in a.iter().zip(psi.iter()) {
                coeff *= pow(&(x * x * &half), e) / rational_factorial(e);
            }
            out.add_term(Term::Smooth { kappa, psi: psi.to_vec() }, coeff);
        });
    }
    out
}

fn pow(x: &Rational, e: u32) -> Rational {
    (0..e).fold(Rational::one(), |acc, _| acc * x)
}

fn monomials(a: &[Rational], i: usize, budget: u32, psi: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
    if i == a.len() {
        f(psi);
        return;
    }
    // ψ_i^e with a_i = 0 carries a zero coefficient for e > 0.
    let max = if a[i].is_zero() { 0 } else { budget };
    for e in 0..=max {
        psi[i] = e;
        monomials(a, i + 1, budget - e, psi, f);
    }
    psi[i] = 0;
}

/// `t ↦ s(head, t)` on `[0, 2]`: each coefficient is a piecewise polynomial in t.
#[derive(Clone, Debug)]
pub struct ClassProfile {
    pub g: u32,
    pub n: usize,
    pub head: Vec<Rational>,
    pub terms: BTreeMap<Term, PiecewisePoly>,
}

impl ClassProfile {
    pub fn at(&self, t: &Rational) -> DecoratedClass {
        let mut out = DecoratedClass::zero(self.g, self.n);
        for (term, c) in &self.terms {
            out.add_term(term.clone(), c.eval(t).expect("t inside [0, 2]"));
        }
        out
    }

    /// `t ↦ ∫ s(head, t) · ψ_n^ell`.
    pub fn pair_psi(&self, ell: u32) -> PiecewisePoly {
        let want = dim(self.g, self.n) - ell as i64;
        let mut acc = zero_profile();
        for (term, c) in &self.terms {
            if term.degree() != want {
                continue;
            }
            let k = term.pair_psi(self.g, self.n, ell);
            if !k.is_zero() {
                acc = acc.add(&c.scale(&k)).expect("same domain");
            }
        }
        acc.merge_equal_pieces();
        acc
    }

    /// `t ↦ V⁰(head, t)`.
    pub fn v0(&self) -> PiecewisePoly {
        self.pair_psi(0)
    }
}

fn zero_profile() -> PiecewisePoly {
    PiecewisePoly::zero_on(Rational::zero(), int(2))
}

type Memo = RwLock<HashMap<(u32, usize, Vec<Rational>), Arc<ClassProfile>>>;

fn memo() -> &'static Memo {
    static M: OnceLock<Memo> = OnceLock::new();
    M.get_or_init(Default::default)
}

/// Memoized class profile; `head` holds the first n−1 angles and is sorted internally.
pub fn class_profile(g: u32, n: usize, head: &[Rational]) -> Arc<ClassProfile> {
    assert!(is_stable(g, n) && head.len() + 1 == n, "profile type");
    let mut head = head.to_vec();
    head.sort();
    let key = (g, n, head.clone());
    if let Some(p) = memo().read().get(&key) {
        return p.clone();
    }
    let p = Arc::new(build_class_profile(g, n, head));
    memo().write().insert(key, p.clone());
    p
}

/// `s(a)` at a point of the domain.
pub fn s_class(g: u32, a: &[Rational]) -> Result<DecoratedClass, DomainError> {
    let n = a.len();
    if !is_stable(g, n) {
        return Err(DomainError::Unstable { g, n });
    }
    let av = canonicalize(a)?;
    let pr = class_profile(g, n, av.head());
    let mut c = pr.at(av.last());
    // Restore the caller's labelling of the smooth ψ exponents.
    if av.coords() != a {
        c = relabel(&c, av.coords(), a);
    }
    Ok(c)
}

/// Moves smooth ψ exponents from canonical positions back to the original order.
/// Boundary terms are left in canonical labels.
fn relabel(c: &DecoratedClass, canonical: &[Rational], original: &[Rational]) -> DecoratedClass {
    let mut used = vec![false; original.len()];
    let mut perm = vec![0usize; canonical.len()];
    for (k, x) in canonical.iter().enumerate() {
        let j = (0..original.len()).find(|&j| !used[j] && &original[j] == x).expect("same multiset");
        used[j] = true;
        perm[k] = j;
    }
    let mut out = DecoratedClass::zero(c.g, c.n);
    for (t, v) in &c.terms {
        let t = match t {
            Term::Smooth { kappa, psi } => {
                let mut p = vec![0u32; psi.len()];
                for (k, &e) in psi.iter().enumerate() {
                    p[perm[k]] = e;
                }
                Term::Smooth { kappa: *kappa, psi: p }
            }
            other => other.clone(),
        };
        out.add_term(t, v.clone());
    }
    out
}

fn build_class_profile(g: u32, n: usize, head: Vec<Rational>) -> ClassProfile {
    let zero = Rational::zero();
    let top = dim(g, n);
    let mut start = head.clone();
    start.push(zero.clone());
    let mut current: BTreeMap<Term, PiecewisePoly> = BTreeMap::new();
    for (t, c) in e_class_raw(g, &start).terms {
        current.insert(t, PiecewisePoly::single(zero.clone(), int(2), UniPoly::constant(c)));
    }
    for graph in enumerate_rational_graphs(g, n) {
        let term = Term::Boundary { graph: graph.clone(), central_psi: 0 };
        if term.degree() > top {
            continue;
        }
        if let Some(beta) = boundary_density(&graph, &head) {
            current.insert(term, beta.cumulative(&zero).scale(&-Rational::one()));
        }
    }
    let mut total = current.clone();
    // s(t) = C₀(t) + ∫₀ᵗ u ψ_n s(u) du, solved by iteration; ψ_n is nilpotent.
    while !current.is_empty() {
        let mut next = BTreeMap::new();
        for (t, c) in &current {
            let t = t.times_psi_last(n);
            if t.degree() > top {
                continue;
            }
            next.insert(t, c.mul_poly(&UniPoly::x()).cumulative(&zero));
        }
        for (t, c) in &next {
            let e = total.entry(t.clone()).or_insert_with(zero_profile);
            *e = e.add(c).expect("same domain");
        }
        current = next;
    }
    let terms = total
        .into_iter()
        .filter_map(|(t, mut c)| {
            c.merge_equal_pieces();
            (!c.pieces().iter().all(|p| p.is_zero())).then_some((t, c))
        })
        .collect();
    ClassProfile { g, n, head, terms }
}

fn leg_values(v: &OuterVertex, head: &[Rational]) -> Vec<Rational> {
    v.legs.iter().map(|&l| head[l - 1].clone()).collect()
}

fn cap(v: &OuterVertex, legs: &[Rational]) -> Rational {
    int(v.euler()) - legs.iter().sum::<Rational>()
}

/// `V⁰` of an outer vertex along its last coordinate, from its own class profile.
fn outer_v0(v: &OuterVertex, legs: &[Rational]) -> PiecewisePoly {
    class_profile(v.genus, v.valence(), legs).v0()
}

/// `β_Γ(u)` on `[0, 2]`: the twist-simplex integral of the multiplicity times
/// the outer volumes, divided by the automorphism order. `None` when it vanishes.
pub fn boundary_density(graph: &RationalGraph, head: &[Rational]) -> Option<PiecewisePoly> {
    let zero = Rational::zero();
    let two = int(2);
    let central: Rational = graph.central_legs.iter().map(|&l| head[l - 1].clone()).sum();
    // X(u) = c0 + u is the total edge twist.
    let c0 = central - int(graph.central_valence() as i64 - 2);
    let x_top = &c0 + &two;
    if x_top <= zero {
        return None;
    }
    let in_x = match graph.outer.as_slice() {
        [v] if v.edges == 1 => {
            let legs = leg_values(v, head);
            let hi = cap(v, &legs).min(x_top.clone());
            if hi <= zero {
                return None;
            }
            let f = outer_v0(v, &legs).restrict(&zero, &hi).expect("inside [0, 2]");
            (f.mul_poly(&UniPoly::x()), hi)
        }
        [v] if v.edges == 2 => {
            let legs = leg_values(v, head);
            let hi = cap(v, &legs).min(x_top.clone()).min(two.clone());
            if hi <= zero {
                return None;
            }
            (loop_density(v, &legs, &hi), hi)
        }
        [v, w] if v.edges == 1 && w.edges == 1 => {
            let (l1, l2) = (leg_values(v, head), leg_values(w, head));
            let (c1, c2) = (cap(v, &l1).min(two.clone()), cap(w, &l2).min(two.clone()));
            let hi = (&c1 + &c2).min(x_top.clone());
            if hi <= zero || c1 <= zero || c2 <= zero {
                return None;
            }
            let f1 = outer_v0(v, &l1).restrict(&zero, &c1).expect("inside [0, 2]");
            let f2 = outer_v0(w, &l2).restrict(&zero, &c2).expect("inside [0, 2]");
            (convolution(&f1, &f2, &hi), hi)
        }
        _ => panic!("graph {graph} has three or more edges but a nonempty twist simplex"),
    };
    let (f, hi) = in_x;
    let f = f.scale(&(Rational::one() / int(graph.automorphism_order() as i64)));
    let ulo = (-&c0).max(zero.clone());
    let uhi = &hi - &c0;
    if ulo >= uhi {
        return None;
    }
    let composed = f.compose_affine(&c0, &Rational::one(), &ulo, &uhi).expect("X inside its range");
    let cuts = composed.breakpoints().to_vec();
    let out = PiecewisePoly::build::<std::convert::Infallible, _>(&zero, &two, cuts, |iv| {
        let m = iv.midpoint();
        Ok(if m > ulo && m < uhi { composed.piece_at(&m).clone() } else { UniPoly::zero() })
    })
    .expect("infallible");
    (!out.pieces().iter().all(|p| p.is_zero())).then_some(out)
}

/// Piecewise polynomial on `[lo, hi]` recovered from exact samples of `f`,
/// cut at `cuts`; two spare samples per piece guard against missed walls.
fn sampled(
    lo: &Rational,
    hi: &Rational,
    cuts: &BTreeSet<Rational>,
    degree: usize,
    f: impl Fn(&Rational) -> Rational,
) -> PiecewisePoly {
    PiecewisePoly::build(lo, hi, cuts.iter().cloned(), |iv| {
        let samples: Vec<(Rational, Rational)> = interior_nodes(&iv.lo, &iv.hi, degree + 3)
            .into_iter()
            .map(|x| {
                let y = f(&x);
                (x, y)
            })
            .collect();
        interpolate(&samples, degree)
    })
    .unwrap_or_else(|e| panic!("sampled piece on [{}, {}]: {e}", fmt_rational(lo), fmt_rational(hi)))
}

fn degree_of(f: &PiecewisePoly) -> usize {
    f.max_degree().unwrap_or(0)
}

/// `X ↦ ∫ y(X−y) f1(y) f2(X−y) dy` over `0 ≤ y ≤ X` inside both domains.
fn convolution(f1: &PiecewisePoly, f2: &PiecewisePoly, hi: &Rational) -> PiecewisePoly {
    let zero = Rational::zero();
    let mut cuts = BTreeSet::new();
    for b1 in f1.breakpoints() {
        for b2 in f2.breakpoints() {
            cuts.insert(b1 + b2);
        }
    }
    let degree = degree_of(f1) + degree_of(f2) + 3;
    sampled(&zero, hi, &cuts, degree, |x| {
        let lo = (x - f2.hi()).max(zero.clone());
        let up = x.clone().min(f1.hi().clone());
        if lo >= up {
            return Rational::zero();
        }
        let g2 = f2.compose_affine(x, &-Rational::one(), &lo, &up).expect("inside");
        let g1 = f1.restrict(&lo, &up).expect("inside");
        let weight = &UniPoly::x() * &UniPoly::affine(x.clone(), -Rational::one());
        g1.mul(&g2).expect("same domain").mul_poly(&weight).integrate(&lo, &up).expect("inside")
    })
}

/// `X ↦ ∫₀^X y(X−y) V⁰_v(legs, y, X−y) dy`, by symmetry twice the integral over `y ≤ X/2`.
/// The automorphism factor is applied by the caller.
fn loop_density(v: &OuterVertex, legs: &[Rational], hi: &Rational) -> PiecewisePoly {
    let zero = Rational::zero();
    let walls: Vec<Rational> = wall_candidates(v.genus, v.valence(), legs);
    let mut xcuts: BTreeSet<Rational> = walls.iter().cloned().collect();
    for w in &walls {
        for w2 in &walls {
            xcuts.insert(w + w2);
        }
    }
    let db = degree_bound(v.genus, v.valence());
    sampled(&zero, hi, &xcuts, db + 3, |x| {
        let half = x / int(2);
        let mut ycuts = BTreeSet::new();
        for w in &walls {
            ycuts.insert(w.clone());
            ycuts.insert(x - w);
        }
        let integrand = sampled(&zero, &half, &ycuts, db + 2, |y| {
            let mut h = legs.to_vec();
            h.push(y.clone());
            let prof = class_profile(v.genus, v.valence(), &h).v0();
            y * (x - y) * prof.eval(&(x - y)).expect("inside [0, 2]")
        });
        int(2) * integrand.integrate(&zero, &half).expect("inside")
    })
}
