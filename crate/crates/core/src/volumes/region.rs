//! Polynomials in (y, u) integrated over polygons cut out by affine
//! constraints, yielding piecewise polynomials in u.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::exactmath::{MultiPoly, PiecewisePoly, Rational, UniPoly};

/// `c0 + cy·y + cu·u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Affine {
    pub c0: Rational,
    pub cy: Rational,
    pub cu: Rational,
}

impl Affine {
    pub fn new(c0: Rational, cy: Rational, cu: Rational) -> Self {
        Affine { c0, cy, cu }
    }

    pub fn constant(c: Rational) -> Self {
        Affine { c0: c, cy: Rational::zero(), cu: Rational::zero() }
    }

    pub fn y() -> Self {
        Affine { c0: Rational::zero(), cy: Rational::one(), cu: Rational::zero() }
    }

    /// `c0 + cu·u`.
    pub fn in_u(c0: Rational, cu: Rational) -> Self {
        Affine { c0, cy: Rational::zero(), cu }
    }

    pub fn add(&self, o: &Affine) -> Affine {
        Affine { c0: &self.c0 + &o.c0, cy: &self.cy + &o.cy, cu: &self.cu + &o.cu }
    }

    pub fn sub(&self, o: &Affine) -> Affine {
        Affine { c0: &self.c0 - &o.c0, cy: &self.cy - &o.cy, cu: &self.cu - &o.cu }
    }

    pub fn plus(&self, c: &Rational) -> Affine {
        Affine { c0: &self.c0 + c, cy: self.cy.clone(), cu: self.cu.clone() }
    }

    pub fn neg(&self) -> Affine {
        Affine { c0: -&self.c0, cy: -&self.cy, cu: -&self.cu }
    }

    pub fn eval(&self, y: &Rational, u: &Rational) -> Rational {
        &self.c0 + &self.cy * y + &self.cu * u
    }

    pub fn to_bipoly(&self) -> BiPoly {
        let mut b = BiPoly::constant(self.c0.clone());
        b.add_coeff(1, 0, self.cy.clone());
        b.add_coeff(0, 1, self.cu.clone());
        b
    }
}

/// Dense polynomial: `coeffs[i][j]` multiplies `y^i u^j`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BiPoly {
    coeffs: Vec<Vec<Rational>>,
}

impl BiPoly {
    pub fn zero() -> Self {
        BiPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        let mut b = Self::zero();
        b.add_coeff(0, 0, c);
        b
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|r| r.iter().all(|c| c.is_zero()))
    }

    pub fn add_coeff(&mut self, i: usize, j: usize, c: Rational) {
        if c.is_zero() {
            return;
        }
        if self.coeffs.len() <= i {
            self.coeffs.resize(i + 1, Vec::new());
        }
        let row = &mut self.coeffs[i];
        if row.len() <= j {
            row.resize(j + 1, Rational::zero());
        }
        row[j] += c;
    }

    pub fn add(&self, o: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (i, row) in o.coeffs.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                out.add_coeff(i, j, c.clone());
            }
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> BiPoly {
        let mut out = BiPoly::zero();
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                out.add_coeff(i, j, c * s);
            }
        }
        out
    }

    pub fn mul(&self, o: &BiPoly) -> BiPoly {
        let mut out = BiPoly::zero();
        for (i, r1) in self.coeffs.iter().enumerate() {
            for (j, c1) in r1.iter().enumerate() {
                if c1.is_zero() {
                    continue;
                }
                for (k, r2) in o.coeffs.iter().enumerate() {
                    for (l, c2) in r2.iter().enumerate() {
                        if !c2.is_zero() {
                            out.add_coeff(i + k, j + l, c1 * c2);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn eval(&self, y: &Rational, u: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for row in self.coeffs.iter().rev() {
            let mut r = Rational::zero();
            for c in row.iter().rev() {
                r = r * u + c;
            }
            acc = acc * y + r;
        }
        acc
    }

    /// Substitutes an affine form in `u` for `y`.
    pub fn at_y(&self, a: &Rational, b: &Rational) -> UniPoly {
        let yv = UniPoly::affine(a.clone(), b.clone());
        let mut acc = UniPoly::zero();
        for row in self.coeffs.iter().rev() {
            acc = &(&acc * &yv) + &UniPoly::new(row.clone());
        }
        acc
    }

    /// Antiderivative in `y` vanishing at `y = 0`.
    pub fn antiderivative_y(&self) -> BiPoly {
        let mut out = BiPoly::zero();
        for (i, row) in self.coeffs.iter().enumerate() {
            let d = Rational::from_integer((i as i64 + 1).into());
            for (j, c) in row.iter().enumerate() {
                out.add_coeff(i + 1, j, c / &d);
            }
        }
        out
    }

    /// Restriction to `y = 0`; meaningful when `y` does not occur.
    pub fn in_u(&self) -> UniPoly {
        UniPoly::new(self.coeffs.first().cloned().unwrap_or_default())
    }
}

/// Evaluates `p` at a point whose coordinates are affine forms in (y, u).
pub fn substitute(p: &MultiPoly, args: &[Affine]) -> BiPoly {
    assert_eq!(p.vars().len(), args.len(), "argument count");
    let max_deg: Vec<u32> = (0..args.len()).map(|k| p.terms().map(|(e, _)| e[k]).max().unwrap_or(0)).collect();
    // Fixed (constant) arguments are folded numerically.
    let powers: Vec<Vec<BiPoly>> = args
        .iter()
        .zip(&max_deg)
        .map(|(a, &d)| {
            let base = a.to_bipoly();
            let mut v = vec![BiPoly::constant(Rational::one())];
            for k in 1..=d as usize {
                let next = v[k - 1].mul(&base);
                v.push(next);
            }
            v
        })
        .collect();
    let is_const: Vec<bool> = args.iter().map(|a| a.cy.is_zero() && a.cu.is_zero()).collect();
    let mut out = BiPoly::zero();
    for (e, c) in p.terms() {
        let mut coeff = c.clone();
        let mut poly = BiPoly::constant(Rational::one());
        for (k, &ek) in e.iter().enumerate() {
            if ek == 0 {
                continue;
            }
            if is_const[k] {
                coeff *= num_traits::pow(args[k].c0.clone(), ek as usize);
            } else {
                poly = poly.mul(&powers[k][ek as usize]);
            }
        }
        if !coeff.is_zero() {
            out = out.add(&poly.scale(&coeff));
        }
    }
    out
}

/// Integrand with its region: all constraints are `≥ 0`.
#[derive(Clone, Debug)]
pub struct RegionTerm {
    pub integrand: BiPoly,
    pub constraints: Vec<Affine>,
}

/// `u ↦ ∫ integrand dy` over `{y : constraints hold}` (or, when `integrate_y`
/// is false, the integrand times the indicator of the u-only constraints),
/// as a piecewise polynomial on `[lo, hi]`.
pub fn integrate_terms(terms: &[RegionTerm], lo: &Rational, hi: &Rational, integrate_y: bool) -> PiecewisePoly {
    let mut cuts = BTreeSet::new();
    for t in terms {
        collect_cuts(&t.constraints, &mut cuts);
    }
    let cuts: Vec<Rational> = cuts.into_iter().filter(|c| c > lo && c < hi).collect();
    PiecewisePoly::build::<std::convert::Infallible, _>(lo, hi, cuts, |iv| {
        let mid = iv.midpoint();
        let mut acc = UniPoly::zero();
        for t in terms {
            if let Some(p) = piece_on(t, &mid, integrate_y) {
                acc = &acc + &p;
            }
        }
        Ok(acc)
    })
    .expect("infallible")
}

fn collect_cuts(cs: &[Affine], cuts: &mut BTreeSet<Rational>) {
    for (k, c) in cs.iter().enumerate() {
        if c.cy.is_zero() {
            if !c.cu.is_zero() {
                cuts.insert(-&c.c0 / &c.cu);
            }
            continue;
        }
        // y-bound: y = −(c0 + cu u)/cy.
        for d in &cs[k + 1..] {
            if d.cy.is_zero() {
                continue;
            }
            // −(c0 + cu u)/cy = −(d0 + du u)/dy  ⇔  (c0 dy − d0 cy) + (cu dy − du cy) u = 0.
            let a0 = &c.c0 * &d.cy - &d.c0 * &c.cy;
            let a1 = &c.cu * &d.cy - &d.cu * &c.cy;
            if !a1.is_zero() {
                cuts.insert(-a0 / a1);
            }
        }
    }
}

/// Bound `y = a + b u` from constraint `c`.
fn bound(c: &Affine) -> (Rational, Rational) {
    (-&c.c0 / &c.cy, -&c.cu / &c.cy)
}

fn piece_on(t: &RegionTerm, mid: &Rational, integrate_y: bool) -> Option<UniPoly> {
    let mut lower: Option<(Rational, Rational)> = None;
    let mut upper: Option<(Rational, Rational)> = None;
    for c in &t.constraints {
        if c.cy.is_zero() {
            if &c.c0 + &c.cu * mid <= Rational::zero() {
                return None;
            }
            continue;
        }
        let (a, b) = bound(c);
        let v = &a + &b * mid;
        if c.cy > Rational::zero() {
            if lower.as_ref().is_none_or(|(la, lb)| v > la + lb * mid) {
                lower = Some((a, b));
            }
        } else if upper.as_ref().is_none_or(|(ua, ub)| v < ua + ub * mid) {
            upper = Some((a, b));
        }
    }
    if !integrate_y {
        assert!(lower.is_none() && upper.is_none(), "y-constraint without y-integration");
        return Some(t.integrand.in_u());
    }
    let (la, lb) = lower.expect("region bounded below in y");
    let (ua, ub) = upper.expect("region bounded above in y");
    if &la + &lb * mid >= &ua + &ub * mid {
        return None;
    }
    let anti = t.integrand.antiderivative_y();
    Some(&anti.at_y(&ua, &ub) - &anti.at_y(&la, &lb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{int, rat};

    #[test]
    fn triangle_kernel() {
        // ∫_0^{u−1} y(u−1−y)/2 dy = (u−1)³/12 for u > 1.
        let x = Affine::in_u(int(-1), int(1));
        let integrand = Affine::y().to_bipoly().mul(&x.sub(&Affine::y()).to_bipoly()).scale(&rat(1, 2));
        let term = RegionTerm { integrand, constraints: vec![Affine::y(), x.sub(&Affine::y())] };
        let f = integrate_terms(&[term], &int(0), &int(2), true);
        assert_eq!(f.eval(&rat(1, 2)).unwrap(), int(0));
        assert_eq!(f.eval(&int(2)).unwrap(), rat(1, 12));
        assert_eq!(f.eval(&rat(3, 2)).unwrap(), rat(1, 96));
        assert_eq!(f.interior_breakpoints(), &[int(1)]);
    }

    #[test]
    fn capped_region() {
        // y ∈ [0, u], y ≤ 1/2: area is u on [0,1/2], 1/2 after.
        let term = RegionTerm {
            integrand: BiPoly::constant(int(1)),
            constraints: vec![
                Affine::y(),
                Affine::new(int(0), int(-1), int(1)),
                Affine::new(rat(1, 2), int(-1), int(0)),
            ],
        };
        let f = integrate_terms(&[term], &int(0), &int(1), true);
        assert_eq!(f.eval(&rat(1, 4)).unwrap(), rat(1, 4));
        assert_eq!(f.eval(&rat(3, 4)).unwrap(), rat(1, 2));
    }

    #[test]
    fn substitution_matches_pointwise() {
        let vars = vec!["a1".to_string(), "a2".to_string(), "a3".to_string()];
        let p = MultiPoly::from_terms(
            vars,
            [(vec![2, 1, 0], int(3)), (vec![0, 0, 2], rat(1, 2)), (vec![0, 0, 0], int(-1))],
        );
        let args = [Affine::constant(rat(1, 3)), Affine::y(), Affine::new(int(-1), int(-1), int(1))];
        let b = substitute(&p, &args);
        let (y, u) = (rat(2, 7), rat(5, 3));
        let direct = p.eval(&[rat(1, 3), y.clone(), &u - int(1) - &y]).unwrap();
        assert_eq!(b.eval(&y, &u), direct);
    }
}
