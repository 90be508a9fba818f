//! Rational stable graphs: a genus-0 central vertex carrying the last leg,
//! joined by edges to outer vertices, plus their twist simplices.

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::exactmath::{int, MultiPoly, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Vertex {
    pub genus: u32,
    /// 1-based leg labels, ascending.
    pub legs: Vec<usize>,
}

/// Connected stable graph; edges are unordered vertex pairs (parallel edges repeat).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct StableGraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<(usize, usize)>,
}

impl StableGraph {
    pub fn valence(&self, v: usize) -> usize {
        let e: usize = self.edges.iter().map(|&(a, b)| (a == v) as usize + (b == v) as usize).sum();
        self.vertices[v].legs.len() + e
    }

    pub fn h1(&self) -> usize {
        self.edges.len() + 1 - self.vertices.len()
    }

    pub fn total_genus(&self) -> u32 {
        self.vertices.iter().map(|v| v.genus).sum::<u32>() + self.h1() as u32
    }

    pub fn is_stable(&self) -> bool {
        (0..self.vertices.len()).all(|v| 2 * self.vertices[v].genus as i64 - 2 + self.valence(v) as i64 > 0)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            for &(a, b) in &self.edges {
                if a == v && !seen[b] {
                    stack.push(b);
                }
                if b == v && !seen[a] {
                    stack.push(a);
                }
            }
        }
        n == 0 || seen.iter().all(|&s| s)
    }
}

/// Central vertex plus outer vertices, each joined to the centre by `edges` parallel edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RationalGraph {
    pub g: u32,
    pub n: usize,
    pub central_legs: Vec<usize>,
    pub outer: Vec<OuterVertex>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OuterVertex {
    pub genus: u32,
    pub legs: Vec<usize>,
    pub edges: usize,
}

impl OuterVertex {
    pub fn valence(&self) -> usize {
        self.legs.len() + self.edges
    }

    pub fn euler(&self) -> i64 {
        2 * self.genus as i64 - 2 + self.valence() as i64
    }
}

impl RationalGraph {
    pub fn num_edges(&self) -> usize {
        self.outer.iter().map(|v| v.edges).sum()
    }

    /// Includes leg n.
    pub fn central_valence(&self) -> usize {
        self.central_legs.len() + 1 + self.num_edges()
    }

    pub fn h1(&self) -> usize {
        self.num_edges() - self.outer.len()
    }

    /// Edge `k` joins the centre to `outer[edge_owner()[k]]`.
    pub fn edge_owner(&self) -> Vec<usize> {
        self.outer.iter().enumerate().flat_map(|(i, v)| std::iter::repeat_n(i, v.edges)).collect()
    }

    pub fn to_stable_graph(&self) -> StableGraph {
        let mut legs = self.central_legs.clone();
        legs.push(self.n);
        let mut vertices = vec![Vertex { genus: 0, legs }];
        vertices.extend(self.outer.iter().map(|v| Vertex { genus: v.genus, legs: v.legs.clone() }));
        let edges = self.edge_owner().into_iter().map(|i| (0, i + 1)).collect();
        StableGraph { vertices, edges }
    }

    /// Order of the leg-fixing automorphism group.
    pub fn automorphism_order(&self) -> u64 {
        let mut order: u64 = 1;
        for v in &self.outer {
            order *= (1..=v.edges as u64).product::<u64>();
        }
        // Legless outer vertices of equal type can be permuted.
        let mut legless: Vec<(u32, usize)> =
            self.outer.iter().filter(|v| v.legs.is_empty()).map(|v| (v.genus, v.edges)).collect();
        legless.sort();
        let mut i = 0;
        while i < legless.len() {
            let j = (i..legless.len()).find(|&j| legless[j] != legless[i]).unwrap_or(legless.len());
            order *= (1..=(j - i) as u64).product::<u64>();
            i = j;
        }
        order
    }

    pub fn twist_simplex(&self, a: &[Rational]) -> TwistSimplex {
        assert_eq!(a.len(), self.n, "angle vector length");
        let sum = |legs: &[usize]| legs.iter().map(|&l| a[l - 1].clone()).sum::<Rational>();
        let central_sum = sum(&self.central_legs) + &a[self.n - 1];
        let total = central_sum - int(self.central_valence() as i64 - 2);
        let caps = self.outer.iter().map(|v| int(v.euler()) - sum(&v.legs)).collect();
        TwistSimplex { total, caps, edges_per_vertex: self.outer.iter().map(|v| v.edges).collect() }
    }
}

impl fmt::Display for RationalGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.to_stable_graph();
        let mut first = true;
        for v in &g.vertices {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            let legs: Vec<String> = v.legs.iter().map(|l| l.to_string()).collect();
            write!(f, "v:({}|{})", v.genus, legs.join(","))?;
        }
        for (a, b) in &g.edges {
            write!(f, " e:({a}-{b})")?;
        }
        Ok(())
    }
}

/// Positive edge twists `b(e)` with `Σ_e b(e) = total` and, for each outer
/// vertex, the sum over its edges strictly below its cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistSimplex {
    pub total: Rational,
    pub caps: Vec<Rational>,
    pub edges_per_vertex: Vec<usize>,
}

impl TwistSimplex {
    pub fn num_edges(&self) -> usize {
        self.edges_per_vertex.iter().sum()
    }

    /// Nonempty (as an open polytope) iff `0 < total < Σ caps` with every cap positive.
    pub fn is_nonempty(&self) -> bool {
        if self.total <= Rational::zero() || self.caps.iter().any(|c| *c <= Rational::zero()) {
            return false;
        }
        self.total < self.caps.iter().sum::<Rational>()
    }

    pub fn dimension(&self) -> Option<usize> {
        self.is_nonempty().then(|| self.num_edges() - 1)
    }

    /// Checks a concrete edge-twist vector against the constraints.
    pub fn contains(&self, b: &[Rational]) -> bool {
        if b.len() != self.num_edges() || b.iter().any(|x| *x <= Rational::zero()) {
            return false;
        }
        if b.iter().sum::<Rational>() != self.total {
            return false;
        }
        let mut k = 0;
        for (v, &m) in self.edges_per_vertex.iter().enumerate() {
            let s: Rational = b[k..k + m].iter().sum();
            if s >= self.caps[v] {
                return false;
            }
            k += m;
        }
        true
    }

    /// The unique twist when there is a single edge.
    pub fn unique_twist(&self) -> Option<Rational> {
        (self.num_edges() == 1 && self.is_nonempty()).then(|| self.total.clone())
    }
}

pub fn multiplicity(b: &[Rational]) -> Rational {
    b.iter().fold(Rational::one(), |acc, x| acc * x)
}

/// Product of the given edge-twist polynomials.
pub fn multiplicity_poly(b: &[MultiPoly]) -> Option<MultiPoly> {
    let mut it = b.iter();
    let first = it.next()?.clone();
    Some(it.fold(first, |acc, x| &acc * x))
}

/// All rational graphs of type (g, n) in canonical order.
pub fn enumerate_rational_graphs(g: u32, n: usize) -> Vec<RationalGraph> {
    let mut out = Vec::new();
    if n == 0 || 2 * g as i64 - 2 + n as i64 <= 0 {
        return out;
    }
    let legs: Vec<usize> = (1..n).collect();
    // Restricted growth labelling: 0 = central, j ≥ 1 = j-th legged outer vertex.
    let mut label = vec![0usize; legs.len()];
    assign_legs(0, 0, &mut label, &mut |label, nblocks| {
        let central_legs: Vec<usize> = legs.iter().zip(label).filter(|(_, &l)| l == 0).map(|(&x, _)| x).collect();
        let blocks: Vec<Vec<usize>> =
            (1..=nblocks).map(|b| legs.iter().zip(label).filter(|(_, &l)| l == b).map(|(&x, _)| x).collect()).collect();
        let mut chosen = Vec::new();
        choose_legged(g, n, &central_legs, &blocks, 0, g as i64, &mut chosen, &mut out);
    });
    out
}

fn assign_legs(i: usize, nblocks: usize, label: &mut Vec<usize>, f: &mut dyn FnMut(&[usize], usize)) {
    if i == label.len() {
        f(label, nblocks);
        return;
    }
    for l in 0..=nblocks + 1 {
        label[i] = l;
        assign_legs(i + 1, nblocks.max(l), label, f);
    }
}

#[allow(clippy::too_many_arguments)]
fn choose_legged(
    g: u32,
    n: usize,
    central_legs: &[usize],
    blocks: &[Vec<usize>],
    idx: usize,
    budget: i64,
    chosen: &mut Vec<OuterVertex>,
    out: &mut Vec<RationalGraph>,
) {
    if idx == blocks.len() {
        let mut legless = Vec::new();
        choose_legless(g, n, central_legs, chosen, budget, (u32::MAX, usize::MAX), &mut legless, out);
        return;
    }
    // Each outer vertex uses genus + edges − 1 of the budget.
    for gv in 0..=budget.max(0) as u32 {
        for k in 1..=(budget - gv as i64 + 1).max(0) as usize {
            let v = OuterVertex { genus: gv, legs: blocks[idx].clone(), edges: k };
            if v.euler() <= 0 {
                continue;
            }
            chosen.push(v);
            choose_legged(g, n, central_legs, blocks, idx + 1, budget - gv as i64 - k as i64 + 1, chosen, out);
            chosen.pop();
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn choose_legless(
    g: u32,
    n: usize,
    central_legs: &[usize],
    legged: &[OuterVertex],
    budget: i64,
    bound: (u32, usize),
    legless: &mut Vec<OuterVertex>,
    out: &mut Vec<RationalGraph>,
) {
    if budget == 0 {
        let mut outer = legged.to_vec();
        outer.extend(legless.iter().cloned());
        if outer.is_empty() {
            return;
        }
        let graph = RationalGraph { g, n, central_legs: central_legs.to_vec(), outer };
        if graph.central_valence() >= 3 {
            out.push(graph);
        }
        return;
    }
    // Legless vertices in non-increasing (genus, edges) order.
    for gv in (0..=budget as u32).rev() {
        for k in (1..=(budget - gv as i64 + 1) as usize).rev() {
            if (gv, k) > bound {
                continue;
            }
            let v = OuterVertex { genus: gv, legs: Vec::new(), edges: k };
            if v.euler() <= 0 || gv as i64 + k as i64 - 1 == 0 {
                continue;
            }
            legless.push(v);
            choose_legless(g, n, central_legs, legged, budget - gv as i64 - k as i64 + 1, (gv, k), legless, out);
            legless.pop();
        }
    }
}

/// Graphs whose twist simplex at `a` is nonempty.
pub fn contributing_graphs(g: u32, n: usize, a: &[Rational]) -> Vec<RationalGraph> {
    enumerate_rational_graphs(g, n).into_iter().filter(|gr| gr.twist_simplex(a).is_nonempty()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat;

    #[test]
    fn small_enumerations() {
        let r04 = enumerate_rational_graphs(0, 4);
        assert_eq!(r04.len(), 3);
        for gr in &r04 {
            assert_eq!(gr.central_legs.len(), 1);
            assert_eq!(gr.outer.len(), 1);
            assert_eq!(gr.outer[0].legs.len(), 2);
            assert_eq!(gr.automorphism_order(), 1);
        }
        assert_eq!(r04[0].to_string(), "v:(0|1,4) v:(0|2,3) e:(0-1)");
        assert!(enumerate_rational_graphs(1, 1).is_empty());
        assert!(enumerate_rational_graphs(0, 3).is_empty());
    }

    #[test]
    fn graphs_are_stable_and_of_right_genus() {
        for (g, n) in [(0, 5), (0, 6), (1, 2), (1, 3), (2, 1), (2, 2)] {
            let all = enumerate_rational_graphs(g, n);
            assert!(!all.is_empty());
            let mut seen = std::collections::HashSet::new();
            for gr in &all {
                let sg = gr.to_stable_graph();
                assert!(sg.is_stable() && sg.is_connected(), "{gr}");
                assert_eq!(sg.total_genus(), g);
                assert!(seen.insert(gr.to_string()), "duplicate {gr}");
            }
        }
    }

    #[test]
    fn twist_simplex_examples() {
        let gr = enumerate_rational_graphs(0, 4).into_iter().find(|g| g.central_legs == vec![1]).unwrap();
        let s = gr.twist_simplex(&[rat(3, 10), rat(3, 10), rat(3, 10), rat(9, 10)]);
        assert_eq!(s.dimension(), Some(0));
        assert_eq!(s.unique_twist(), Some(rat(1, 5)));
        let s = gr.twist_simplex(&[rat(3, 10), rat(3, 10), rat(3, 10), rat(1, 2)]);
        assert!(!s.is_nonempty());
    }

    #[test]
    fn loop_graph() {
        // (1,1): none; (1,2): centre {2}, double edge to a genus-0 vertex carrying leg 1.
        let gr =
            enumerate_rational_graphs(1, 2).into_iter().find(|g| g.outer.len() == 1 && g.outer[0].edges == 2).unwrap();
        assert_eq!(gr.automorphism_order(), 2);
        assert_eq!(gr.h1(), 1);
        // a₁ + a₂ = 2 sits on the wall, so the open simplex is empty there.
        assert!(!gr.twist_simplex(&[rat(1, 4), rat(7, 4)]).is_nonempty());
        let s = gr.twist_simplex(&[rat(1, 4), rat(3, 2)]);
        assert_eq!(s.dimension(), Some(1));
        assert!(s.contains(&[rat(1, 4), rat(1, 4)]));
        assert!(!s.contains(&[rat(1, 4), rat(1, 2)]));
        assert_eq!(multiplicity(&[rat(1, 4), rat(1, 2)]), rat(1, 8));
        assert_eq!(multiplicity(&[]), rat(1, 1));
    }

    #[test]
    fn legless_symmetric_pair() {
        let gr = enumerate_rational_graphs(2, 1)
            .into_iter()
            .find(|g| g.outer.len() == 2 && g.outer.iter().all(|v| v.genus == 1))
            .unwrap();
        assert_eq!(gr.automorphism_order(), 2);
        assert_eq!(gr.h1(), 0);
    }
}
