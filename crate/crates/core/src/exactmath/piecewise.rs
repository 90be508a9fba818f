//! Univariate piecewise polynomials with rational breakpoints.

use std::fmt;

use num_traits::Zero;
use serde::Serialize;

use super::rational::{fmt_rational, int, Rational};
use super::unipoly::UniPoly;
use super::MathError;

/// Closed interval `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self, MathError> {
        if lo > hi {
            return Err(MathError::InvalidInterval);
        }
        Ok(Interval { lo, hi })
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn len(&self) -> Rational {
        &self.hi - &self.lo
    }
}

/// Piece `j` is valid on `[breakpoints[j], breakpoints[j+1]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewisePoly {
    breakpoints: Vec<Rational>,
    pieces: Vec<UniPoly>,
}

#[derive(Clone, Debug, Serialize)]
pub struct C1Failure {
    pub at: String,
    pub value_jump: String,
    pub derivative_jump: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct C1Report {
    pub holds: bool,
    pub interior_breakpoints: usize,
    pub failures: Vec<C1Failure>,
}

impl PiecewisePoly {
    pub fn new(breakpoints: Vec<Rational>, pieces: Vec<UniPoly>) -> Result<Self, MathError> {
        if breakpoints.len() != pieces.len() + 1 || pieces.is_empty() {
            return Err(MathError::MalformedPiecewise("breakpoint/piece count mismatch".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(MathError::MalformedPiecewise("breakpoints not strictly increasing".into()));
        }
        Ok(PiecewisePoly { breakpoints, pieces })
    }

    pub fn single(lo: Rational, hi: Rational, p: UniPoly) -> Self {
        assert!(lo < hi, "degenerate domain");
        PiecewisePoly { breakpoints: vec![lo, hi], pieces: vec![p] }
    }

    pub fn zero_on(lo: Rational, hi: Rational) -> Self {
        Self::single(lo, hi, UniPoly::zero())
    }

    /// Builds a piecewise polynomial on `[lo, hi]` cut at every `cuts` value inside,
    /// asking `piece` for the polynomial valid on each closed subinterval.
    pub fn build<E, F>(
        lo: &Rational,
        hi: &Rational,
        cuts: impl IntoIterator<Item = Rational>,
        mut piece: F,
    ) -> Result<Self, E>
    where
        F: FnMut(&Interval) -> Result<UniPoly, E>,
    {
        let mut pts: Vec<Rational> = cuts.into_iter().filter(|c| c > lo && c < hi).collect();
        pts.push(lo.clone());
        pts.push(hi.clone());
        pts.sort();
        pts.dedup();
        let mut pieces = Vec::with_capacity(pts.len() - 1);
        for w in pts.windows(2) {
            let iv = Interval { lo: w[0].clone(), hi: w[1].clone() };
            pieces.push(piece(&iv)?);
        }
        let mut out = PiecewisePoly { breakpoints: pts, pieces };
        out.merge_equal_pieces();
        Ok(out)
    }

    /// Joins neighbouring pieces carrying the same polynomial.
    pub fn merge_equal_pieces(&mut self) {
        let mut bps = vec![self.breakpoints[0].clone()];
        let mut pcs: Vec<UniPoly> = Vec::new();
        for (j, p) in self.pieces.iter().enumerate() {
            if pcs.last() == Some(p) {
                *bps.last_mut().unwrap() = self.breakpoints[j + 1].clone();
            } else {
                pcs.push(p.clone());
                bps.push(self.breakpoints[j + 1].clone());
            }
        }
        self.breakpoints = bps;
        self.pieces = pcs;
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[UniPoly] {
        &self.pieces
    }

    pub fn lo(&self) -> &Rational {
        &self.breakpoints[0]
    }

    pub fn hi(&self) -> &Rational {
        self.breakpoints.last().unwrap()
    }

    pub fn interior_breakpoints(&self) -> &[Rational] {
        &self.breakpoints[1..self.breakpoints.len() - 1]
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.pieces.iter().filter_map(|p| p.degree()).max()
    }

    fn check_domain(&self, x: &Rational) -> Result<(), MathError> {
        if x < self.lo() || x > self.hi() {
            return Err(MathError::OutOfDomain {
                value: fmt_rational(x),
                lo: fmt_rational(self.lo()),
                hi: fmt_rational(self.hi()),
            });
        }
        Ok(())
    }

    /// Index of the piece whose closed interval contains `x`, preferring the left one.
    fn piece_left(&self, x: &Rational) -> usize {
        let pos = self.breakpoints.partition_point(|b| b < x);
        pos.saturating_sub(1).min(self.pieces.len() - 1)
    }

    fn piece_right(&self, x: &Rational) -> usize {
        let pos = self.breakpoints.partition_point(|b| b <= x);
        pos.saturating_sub(1).min(self.pieces.len() - 1)
    }

    /// The piece valid on a neighbourhood to the right of `x` (or the last piece).
    pub fn piece_at(&self, x: &Rational) -> &UniPoly {
        &self.pieces[self.piece_right(x)]
    }

    pub fn eval_left(&self, x: &Rational) -> Result<Rational, MathError> {
        self.check_domain(x)?;
        Ok(self.pieces[self.piece_left(x)].eval(x))
    }

    pub fn eval_right(&self, x: &Rational) -> Result<Rational, MathError> {
        self.check_domain(x)?;
        Ok(self.pieces[self.piece_right(x)].eval(x))
    }

    /// Value at `x`; at a breakpoint both adjacent pieces must agree.
    pub fn eval(&self, x: &Rational) -> Result<Rational, MathError> {
        let l = self.eval_left(x)?;
        let r = self.eval_right(x)?;
        if l != r {
            return Err(MathError::Discontinuity {
                at: fmt_rational(x),
                left: fmt_rational(&l),
                right: fmt_rational(&r),
            });
        }
        Ok(l)
    }

    fn combine(&self, other: &PiecewisePoly, f: impl Fn(&UniPoly, &UniPoly) -> UniPoly) -> Result<Self, MathError> {
        if self.lo() != other.lo() || self.hi() != other.hi() {
            return Err(MathError::MalformedPiecewise("domains differ".into()));
        }
        let cuts = self.interior_breakpoints().iter().chain(other.interior_breakpoints()).cloned().collect::<Vec<_>>();
        Self::build(self.lo(), self.hi(), cuts, |iv| {
            let m = iv.midpoint();
            Ok(f(self.piece_at(&m), other.piece_at(&m)))
        })
    }

    pub fn add(&self, other: &PiecewisePoly) -> Result<Self, MathError> {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &PiecewisePoly) -> Result<Self, MathError> {
        self.combine(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &PiecewisePoly) -> Result<Self, MathError> {
        self.combine(other, |a, b| a * b)
    }

    pub fn mul_poly(&self, p: &UniPoly) -> Self {
        let mut out = PiecewisePoly {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(|q| q * p).collect(),
        };
        out.merge_equal_pieces();
        out
    }

    pub fn scale(&self, s: &Rational) -> Self {
        self.mul_poly(&UniPoly::constant(s.clone()))
    }

    pub fn derivative(&self) -> Self {
        PiecewisePoly {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(|p| p.derivative()).collect(),
        }
    }

    /// Exact integral over `[lo, hi]`, which must lie in the domain.
    pub fn integrate(&self, lo: &Rational, hi: &Rational) -> Result<Rational, MathError> {
        self.check_domain(lo)?;
        self.check_domain(hi)?;
        if lo > hi {
            return Ok(-self.integrate(hi, lo)?);
        }
        let mut acc = Rational::zero();
        for (j, p) in self.pieces.iter().enumerate() {
            let a = super::rational::max_rational(&self.breakpoints[j], lo);
            let b = super::rational::min_rational(&self.breakpoints[j + 1], hi);
            if a < b {
                acc += p.integrate(a, b);
            }
        }
        Ok(acc)
    }

    /// `x ↦ start + ∫_{lo}^{x} self`, a continuous piecewise polynomial on the same domain.
    pub fn cumulative(&self, start: &Rational) -> Self {
        let mut acc = start.clone();
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for (j, p) in self.pieces.iter().enumerate() {
            let anti = p.antiderivative();
            let offset = &acc - anti.eval(&self.breakpoints[j]);
            let piece = &anti + &UniPoly::constant(offset);
            acc = piece.eval(&self.breakpoints[j + 1]);
            pieces.push(piece);
        }
        PiecewisePoly { breakpoints: self.breakpoints.clone(), pieces }
    }

    /// `x ↦ self(c0 + c1·x)` on `[lo, hi]`; the image of `[lo, hi]` must lie in the domain.
    pub fn compose_affine(
        &self,
        c0: &Rational,
        c1: &Rational,
        lo: &Rational,
        hi: &Rational,
    ) -> Result<Self, MathError> {
        for x in [lo, hi] {
            self.check_domain(&(c0 + c1 * x))?;
        }
        if c1.is_zero() {
            let v = self.eval_right(c0)?;
            return Ok(Self::single(lo.clone(), hi.clone(), UniPoly::constant(v)));
        }
        let cuts: Vec<Rational> = self.interior_breakpoints().iter().map(|b| (b - c0) / c1).collect();
        Self::build(lo, hi, cuts, |iv| {
            let m = c0 + c1 * iv.midpoint();
            Ok(self.piece_at(&m).compose_affine(c0, c1))
        })
    }

    /// Restriction to `[lo, hi]` inside the domain.
    pub fn restrict(&self, lo: &Rational, hi: &Rational) -> Result<Self, MathError> {
        self.compose_affine(&Rational::zero(), &int(1), lo, hi)
    }

    pub fn is_continuous(&self) -> bool {
        self.interior_breakpoints()
            .iter()
            .enumerate()
            .all(|(j, b)| self.pieces[j].eval(b) == self.pieces[j + 1].eval(b))
    }

    /// Exact C¹ test at every interior breakpoint.
    pub fn c1_report(&self) -> C1Report {
        let mut failures = Vec::new();
        for (j, b) in self.interior_breakpoints().iter().enumerate() {
            let (l, r) = (&self.pieces[j], &self.pieces[j + 1]);
            let dv = r.eval(b) - l.eval(b);
            let dd = r.derivative().eval(b) - l.derivative().eval(b);
            if !dv.is_zero() || !dd.is_zero() {
                failures.push(C1Failure {
                    at: fmt_rational(b),
                    value_jump: fmt_rational(&dv),
                    derivative_jump: fmt_rational(&dd),
                });
            }
        }
        C1Report { holds: failures.is_empty(), interior_breakpoints: self.breakpoints.len() - 2, failures }
    }

    pub fn is_c1(&self) -> bool {
        self.c1_report().holds
    }
}

impl fmt::Display for PiecewisePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, p) in self.pieces.iter().enumerate() {
            if j > 0 {
                writeln!(f)?;
            }
            write!(f, "[{}, {}]: {}", fmt_rational(&self.breakpoints[j]), fmt_rational(&self.breakpoints[j + 1]), p)?;
        }
        Ok(())
    }
}

/// Unique polynomial of degree `<= degree_bound` through the first `degree_bound + 1`
/// samples, checked against every remaining sample.
pub fn interpolate(samples: &[(Rational, Rational)], degree_bound: usize) -> Result<UniPoly, MathError> {
    let m = degree_bound + 1;
    if samples.len() < m {
        return Err(MathError::TooFewSamples { needed: m, got: samples.len() });
    }
    let xs: Vec<&Rational> = samples.iter().map(|s| &s.0).collect();
    for i in 0..samples.len() {
        for j in 0..i {
            if xs[i] == xs[j] {
                return Err(MathError::RepeatedAbscissa(fmt_rational(xs[i])));
            }
        }
    }
    // Newton divided differences.
    let mut dd: Vec<Rational> = samples[..m].iter().map(|s| s.1.clone()).collect();
    for level in 1..m {
        for i in (level..m).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (xs[i] - xs[i - level]);
        }
    }
    let mut poly = UniPoly::constant(dd[m - 1].clone());
    for i in (0..m - 1).rev() {
        poly = &(&poly * &UniPoly::affine(-xs[i].clone(), int(1))) + &UniPoly::constant(dd[i].clone());
    }
    for (x, y) in &samples[m..] {
        let v = poly.eval(x);
        if &v != y {
            return Err(MathError::InconsistentSamples {
                at: fmt_rational(x),
                expected: fmt_rational(&v),
                got: fmt_rational(y),
            });
        }
    }
    Ok(poly)
}

/// `count` equally spaced nodes strictly inside `[lo, hi]`.
pub fn interior_nodes(lo: &Rational, hi: &Rational, count: usize) -> Vec<Rational> {
    let step = (hi - lo) / int(count as i64 + 1);
    (1..=count).map(|k| lo + &step * int(k as i64)).collect()
}

/// Weights `w` with `∫_{lo}^{hi} p = Σ w_k p(nodes_k)` for every polynomial of degree `< nodes.len()`.
pub fn quadrature_weights(nodes: &[Rational], lo: &Rational, hi: &Rational) -> Result<Vec<Rational>, MathError> {
    let deg = nodes.len() - 1;
    (0..nodes.len())
        .map(|k| {
            let samples: Vec<_> = nodes
                .iter()
                .enumerate()
                .map(|(j, x)| (x.clone(), if j == k { int(1) } else { Rational::zero() }))
                .collect();
            Ok(interpolate(&samples, deg)?.integrate(lo, hi))
        })
        .collect()
}
