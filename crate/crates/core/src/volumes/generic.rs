//! Boundary kernels assembled graph by graph from `m(Γ,b)/|Aut Γ|` and the
//! outer volumes, independently of the closed forms in `kernels`.

use std::collections::BTreeSet;

use num_traits::Zero;

use super::{degree_bound, v0_eval};
use crate::exactmath::{int, interior_nodes, interpolate, rat, Rational};
use crate::graphs::{enumerate_rational_graphs, multiplicity, RationalGraph};

/// `Σ_Γ |Aut Γ|⁻¹ ∫_{Δ_Γ(a)} m(Γ,b) ∏_v V⁰_v db` over rational graphs whose central
/// vertex has `valence` half-edges, at `a = (head, u)`.
///
/// On the domain only graphs with one or two edges contribute; a nonempty simplex
/// with more edges is reported as a panic.
pub fn graph_kernel(g: u32, n: usize, head: &[Rational], u: &Rational, valence: usize) -> Rational {
    let mut a = head.to_vec();
    a.push(u.clone());
    enumerate_rational_graphs(g, n)
        .iter()
        .filter(|gr| gr.central_valence() == valence)
        .map(|gr| graph_term(gr, &a))
        .sum()
}

/// One graph's contribution at `a`.
pub fn graph_term(gr: &RationalGraph, a: &[Rational]) -> Rational {
    let simplex = gr.twist_simplex(a);
    if !simplex.is_nonempty() {
        return Rational::zero();
    }
    let aut = int(gr.automorphism_order() as i64);
    let owner = gr.edge_owner();
    // Product of outer volumes for edge twists `b`, zero outside the simplex.
    let weight = |b: &[Rational]| -> Rational {
        if !simplex.contains(b) {
            return Rational::zero();
        }
        let mut w = multiplicity(b);
        for (v, vert) in gr.outer.iter().enumerate() {
            let mut args: Vec<Rational> = vert.legs.iter().map(|&l| a[l - 1].clone()).collect();
            args.extend(owner.iter().zip(b).filter(|(&o, _)| o == v).map(|(_, x)| x.clone()));
            w *= v0_eval(vert.genus, &args).expect("outer arguments in the domain");
        }
        w
    };
    match simplex.num_edges() {
        1 => weight(std::slice::from_ref(&simplex.total)) / aut,
        2 => {
            let s = simplex.total.clone();
            let cuts = segment_cuts(gr, a, &owner, &s);
            let degree = 2 + gr.outer.iter().map(|v| degree_bound(v.genus, v.valence())).sum::<usize>();
            let mut total = Rational::zero();
            let pts: Vec<Rational> = cuts.into_iter().collect();
            for w in pts.windows(2) {
                let nodes = interior_nodes(&w[0], &w[1], degree + 3);
                let samples: Vec<(Rational, Rational)> = nodes
                    .into_iter()
                    .map(|y| {
                        let v = weight(&[y.clone(), &s - &y]);
                        (y, v)
                    })
                    .collect();
                let p = interpolate(&samples, degree).unwrap_or_else(|e| panic!("graph {gr}: {e}"));
                total += p.integrate(&w[0], &w[1]);
            }
            total / aut
        }
        k => panic!("graph {gr} with {k} edges contributes at the given angles"),
    }
}

/// Breakpoints in `y ∈ [0, s]` for twists `(y, s − y)`: every integer crossing of a
/// partial sum of an outer vertex's arguments, plus the points where a twist is 1/2.
fn segment_cuts(gr: &RationalGraph, a: &[Rational], owner: &[usize], s: &Rational) -> BTreeSet<Rational> {
    let zero = Rational::zero();
    let mut cuts = BTreeSet::new();
    cuts.insert(zero.clone());
    cuts.insert(s.clone());
    let mut add = |y: Rational| {
        if y > zero && &y < s {
            cuts.insert(y);
        }
    };
    add(rat(1, 2));
    add(s - rat(1, 2));
    for (v, vert) in gr.outer.iter().enumerate() {
        // Arguments as c + α·y.
        let mut args: Vec<(Rational, i64)> = vert.legs.iter().map(|&l| (a[l - 1].clone(), 0)).collect();
        for (k, &o) in owner.iter().enumerate() {
            if o == v {
                args.push(if k == 0 { (zero.clone(), 1) } else { (s.clone(), -1) });
            }
        }
        for mask in 1u64..(1u64 << args.len()) {
            let (mut c, mut alpha) = (zero.clone(), 0i64);
            for (j, (cj, aj)) in args.iter().enumerate() {
                if mask >> j & 1 == 1 {
                    c += cj;
                    alpha += aj;
                }
            }
            if alpha == 0 {
                continue;
            }
            for k in 0..=vert.euler().max(0) + 1 {
                add((int(k) - &c) / int(alpha));
            }
        }
    }
    cuts
}
