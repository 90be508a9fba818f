//! Sparse multivariate polynomials with exact rational coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use super::rational::{fmt_rational_pq, int, Rational};
use super::unipoly::UniPoly;
use super::MathError;

pub type Exponents = Vec<u32>;

/// Sparse polynomial over a fixed, ordered list of variables.
///
/// Terms are keyed by exponent vectors; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    vars: Arc<Vec<String>>,
    terms: BTreeMap<Exponents, Rational>,
}

/// Sort key realizing `a1 < a2 < ... < t < u < y`, other names last.
fn var_rank(name: &str) -> (u8, u64, String) {
    if let Some(idx) = name.strip_prefix('a').and_then(|s| s.parse::<u64>().ok()) {
        return (0, idx, String::new());
    }
    match name {
        "t" => (1, 0, String::new()),
        "u" => (2, 0, String::new()),
        "y" => (3, 0, String::new()),
        other => (4, 0, other.to_string()),
    }
}

/// Orders variable names canonically.
pub fn canonical_var_order<S: AsRef<str>>(names: &[S]) -> Vec<String> {
    let mut v: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
    v.sort_by_key(|a| var_rank(a));
    v.dedup();
    v
}

/// Names `a1..an`.
pub fn angle_vars(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("a{i}")).collect()
}

fn grlex_desc(a: &Exponents, b: &Exponents) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    db.cmp(&da).then_with(|| b.cmp(a))
}

#[derive(Clone, Debug, Serialize)]
pub struct TermRecord {
    pub exponents: Vec<u32>,
    pub coeff: String,
}

impl MultiPoly {
    pub fn zero(vars: Vec<String>) -> Self {
        MultiPoly { vars: Arc::new(vars), terms: BTreeMap::new() }
    }

    fn zero_like(&self) -> Self {
        MultiPoly { vars: self.vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: Vec<String>, c: Rational) -> Self {
        let mut p = Self::zero(vars);
        let e = vec![0; p.vars.len()];
        p.insert(e, c);
        p
    }

    fn constant_like(&self, c: Rational) -> Self {
        let mut p = self.zero_like();
        p.insert(vec![0; self.vars.len()], c);
        p
    }

    pub fn var(vars: Vec<String>, name: &str) -> Result<Self, MathError> {
        let mut p = Self::zero(vars);
        let idx = p.index_of(name)?;
        let mut e = vec![0; p.vars.len()];
        e[idx] = 1;
        p.insert(e, Rational::one());
        Ok(p)
    }

    pub fn from_terms<I>(vars: Vec<String>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponents, Rational)>,
    {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), p.vars.len(), "exponent vector length mismatch");
            p.insert(e, c);
        }
        p
    }

    /// Embeds a univariate polynomial as a polynomial in `name`.
    pub fn from_unipoly(vars: Vec<String>, name: &str, u: &UniPoly) -> Result<Self, MathError> {
        let mut p = Self::zero(vars);
        let idx = p.index_of(name)?;
        for (k, c) in u.coeffs().iter().enumerate() {
            let mut e = vec![0; p.vars.len()];
            e[idx] = k as u32;
            p.insert(e, c.clone());
        }
        Ok(p)
    }

    fn insert(&mut self, e: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn index_of(&self, name: &str) -> Result<usize, MathError> {
        self.vars.iter().position(|v| v == name).ok_or_else(|| MathError::UnknownVariable(name.to_string()))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &[u32]) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&vec![0; self.vars.len()])
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, name: &str) -> Result<u32, MathError> {
        let idx = self.index_of(name)?;
        Ok(self.terms.keys().map(|e| e[idx]).max().unwrap_or(0))
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let mut p = self.zero_like();
        if s.is_zero() {
            return p;
        }
        for (e, c) in &self.terms {
            p.terms.insert(e.clone(), c * s);
        }
        p
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = self.constant_like(Rational::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Re-expresses the polynomial over a larger (or reordered) variable list.
    pub fn embed(&self, vars: &[String]) -> Result<Self, MathError> {
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| vars.iter().position(|w| w == v).ok_or_else(|| MathError::UnknownVariable(v.clone())))
            .collect::<Result<_, _>>()?;
        let mut p = Self::zero(vars.to_vec());
        for (e, c) in &self.terms {
            let mut ne = vec![0; vars.len()];
            for (i, &k) in e.iter().enumerate() {
                ne[map[i]] = k;
            }
            p.insert(ne, c.clone());
        }
        Ok(p)
    }

    /// Renames variables position-wise.
    pub fn rename(&self, vars: Vec<String>) -> Self {
        assert_eq!(vars.len(), self.vars.len());
        MultiPoly { vars: Arc::new(vars), terms: self.terms.clone() }
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational, MathError> {
        if point.len() != self.vars.len() {
            return Err(MathError::ArityMismatch { expected: self.vars.len(), got: point.len() });
        }
        let max_deg = self.terms.keys().flat_map(|e| e.iter().copied()).max().unwrap_or(0);
        let powers: Vec<Vec<Rational>> = point
            .iter()
            .map(|x| {
                let mut v = Vec::with_capacity(max_deg as usize + 1);
                v.push(Rational::one());
                for k in 1..=max_deg as usize {
                    let next = &v[k - 1] * x;
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= &powers[i][k as usize];
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Replaces `name` by `value` (a polynomial over the same variables).
    pub fn substitute(&self, name: &str, value: &MultiPoly) -> Result<Self, MathError> {
        assert_eq!(self.vars, value.vars, "substitution across different rings");
        let idx = self.index_of(name)?;
        let max_k = self.terms.keys().map(|e| e[idx]).max().unwrap_or(0);
        let mut powers = vec![self.constant_like(Rational::one())];
        for k in 1..=max_k as usize {
            let next = &powers[k - 1] * value;
            powers.push(next);
        }
        let mut out = self.zero_like();
        for (e, c) in &self.terms {
            let k = e[idx] as usize;
            let mut rest = e.clone();
            rest[idx] = 0;
            for (pe, pc) in &powers[k].terms {
                let ne: Exponents = rest.iter().zip(pe).map(|(a, b)| a + b).collect();
                out.insert(ne, c * pc);
            }
        }
        Ok(out)
    }

    /// Replaces `name` by a rational number.
    pub fn specialize(&self, name: &str, value: &Rational) -> Result<Self, MathError> {
        let idx = self.index_of(name)?;
        let mut out = self.zero_like();
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            let k = ne[idx];
            ne[idx] = 0;
            out.insert(ne, c * num_traits::pow(value.clone(), k as usize));
        }
        Ok(out)
    }

    /// Drops the listed variables, which must not occur.
    pub fn drop_vars(&self, names: &[&str]) -> Result<Self, MathError> {
        let idxs: Vec<usize> = names.iter().map(|n| self.index_of(n)).collect::<Result<_, _>>()?;
        let keep: Vec<usize> = (0..self.vars.len()).filter(|i| !idxs.contains(i)).collect();
        let vars: Vec<String> = keep.iter().map(|&i| self.vars[i].clone()).collect();
        let mut out = Self::zero(vars);
        for (e, c) in &self.terms {
            if idxs.iter().any(|&i| e[i] != 0) {
                return Err(MathError::UnknownVariable(format!("cannot drop variables still in use: {names:?}")));
            }
            out.insert(keep.iter().map(|&i| e[i]).collect(), c.clone());
        }
        Ok(out)
    }

    /// Univariate view; every other variable must be absent.
    pub fn to_unipoly(&self, name: &str) -> Result<UniPoly, MathError> {
        let idx = self.index_of(name)?;
        let deg = self.terms.keys().map(|e| e[idx]).max().unwrap_or(0) as usize;
        let mut coeffs = vec![Rational::zero(); deg + 1];
        for (e, c) in &self.terms {
            if e.iter().enumerate().any(|(i, &k)| i != idx && k != 0) {
                return Err(MathError::NotUnivariate(name.to_string()));
            }
            coeffs[e[idx] as usize] += c;
        }
        Ok(UniPoly::new(coeffs))
    }

    pub fn derivative(&self, name: &str) -> Result<Self, MathError> {
        let idx = self.index_of(name)?;
        let mut out = self.zero_like();
        for (e, c) in &self.terms {
            if e[idx] == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[idx] -= 1;
            out.insert(ne, c * int(e[idx] as i64));
        }
        Ok(out)
    }

    /// Antiderivative in `name` vanishing at `name = 0`.
    pub fn antiderivative(&self, name: &str) -> Result<Self, MathError> {
        let idx = self.index_of(name)?;
        let mut out = self.zero_like();
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            ne[idx] += 1;
            let k = ne[idx];
            out.insert(ne, c / int(k as i64));
        }
        Ok(out)
    }

    /// `∫_{lo}^{hi} self d(var)` where the bounds do not involve `var`.
    pub fn definite_integral(&self, var: &str, lo: &MultiPoly, hi: &MultiPoly) -> Result<Self, MathError> {
        let idx = self.index_of(var)?;
        for b in [lo, hi] {
            if b.terms.keys().any(|e| e[idx] != 0) {
                return Err(MathError::BoundInvolvesVariable(var.to_string()));
            }
        }
        let anti = self.antiderivative(var)?;
        Ok(&anti.substitute(var, hi)? - &anti.substitute(var, lo)?)
    }

    /// Projection onto monomials odd in `pivot` and even in all other variables:
    /// `(P(x,v) + P(x,-v) - P(-x,v) - P(-x,-v)) / 4`.
    pub fn odd_part(&self, pivot: &str) -> Result<Self, MathError> {
        let idx = self.index_of(pivot)?;
        let flip_all = |p: &MultiPoly, flip_pivot: bool, flip_rest: bool| {
            let mut out = p.zero_like();
            for (e, c) in &p.terms {
                let rest_deg: u32 = e.iter().enumerate().filter(|(i, _)| *i != idx).map(|(_, k)| k).sum();
                let mut sign = false;
                if flip_pivot && e[idx] % 2 == 1 {
                    sign = !sign;
                }
                if flip_rest && rest_deg % 2 == 1 {
                    sign = !sign;
                }
                out.insert(e.clone(), if sign { -c.clone() } else { c.clone() });
            }
            out
        };
        let sum =
            &(&(self + &flip_all(self, false, true)) - &flip_all(self, true, false)) - &flip_all(self, true, true);
        Ok(sum.scale(&Rational::new(1.into(), 4.into())))
    }

    pub fn is_even_in(&self, name: &str) -> Result<bool, MathError> {
        let idx = self.index_of(name)?;
        Ok(self.terms.keys().all(|e| e[idx] % 2 == 0))
    }

    /// Permutes variable values: the result's variable `i` carries `self`'s variable `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.vars.len());
        let mut out = self.zero_like();
        for (e, c) in &self.terms {
            let mut ne = vec![0; e.len()];
            for (i, &p) in perm.iter().enumerate() {
                ne[i] = e[p];
            }
            out.insert(ne, c.clone());
        }
        out
    }

    pub fn term_records(&self) -> Vec<TermRecord> {
        let mut ts: Vec<_> = self.terms.iter().collect();
        ts.sort_by(|a, b| grlex_desc(a.0, b.0));
        ts.into_iter().map(|(e, c)| TermRecord { exponents: e.clone(), coeff: fmt_rational_pq(c) }).collect()
    }
}

fn check_ring(a: &MultiPoly, b: &MultiPoly) {
    assert!(
        Arc::ptr_eq(&a.vars, &b.vars) || a.vars == b.vars,
        "arithmetic across different rings: {:?} vs {:?}",
        a.vars,
        b.vars
    );
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        check_ring(self, rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.insert(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        check_ring(self, rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.insert(e.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        check_ring(self, rhs);
        let mut out = self.zero_like();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.insert(e, ca * cb);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-Rational::one())
    }
}

impl fmt::Display for MultiPoly {
    /// Canonical text: graded-lex descending terms, `p/q` coefficients, ` + ` separators.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut ts: Vec<_> = self.terms.iter().collect();
        ts.sort_by(|a, b| grlex_desc(a.0, b.0));
        for (n, (e, c)) in ts.into_iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", fmt_rational_pq(c))?;
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*{}", self.vars[i])?,
                    _ => write!(f, "*{}^{}", self.vars[i], k)?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rational::rat;

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn canonical_order() {
        assert_eq!(canonical_var_order(&["y", "t", "a10", "a2", "u"]), vec!["a2", "a10", "t", "u", "y"]);
    }

    #[test]
    fn integral_with_polynomial_bounds() {
        let r = vars(&["a1", "ai", "t"]);
        let t = MultiPoly::var(r.clone(), "t").unwrap();
        let a1 = MultiPoly::var(r.clone(), "a1").unwrap();
        let ai = MultiPoly::var(r.clone(), "ai").unwrap();
        let got = t.definite_integral("t", &(&ai - &a1), &(&ai + &a1)).unwrap();
        assert_eq!(got, (&a1 * &ai).scale(&int(2)));
    }

    #[test]
    fn integral_power_rule_and_cubic() {
        let r = vars(&["t", "u", "y"]);
        let u = MultiPoly::var(r.clone(), "u").unwrap();
        let y = MultiPoly::var(r.clone(), "y").unwrap();
        let t = MultiPoly::var(r.clone(), "t").unwrap();
        let zero = MultiPoly::zero(r.clone());
        assert_eq!(u.definite_integral("u", &zero, &t).unwrap(), t.pow(2).scale(&rat(1, 2)));
        let integrand = (&y * &(&u - &y)).scale(&rat(1, 2));
        assert_eq!(integrand.definite_integral("y", &zero, &u).unwrap(), u.pow(3).scale(&rat(1, 12)));
        assert!(matches!(u.definite_integral("y", &zero, &y), Err(MathError::BoundInvolvesVariable(_))));
        assert!(matches!(u.definite_integral("w", &zero, &t), Err(MathError::UnknownVariable(_))));
    }

    #[test]
    fn odd_part_examples() {
        let r = vars(&["a1", "a2"]);
        let a1 = MultiPoly::var(r.clone(), "a1").unwrap();
        let a2 = MultiPoly::var(r.clone(), "a2").unwrap();
        let p = &a1.pow(3) + &(&a1 * &a2);
        assert_eq!(p.odd_part("a1").unwrap(), a1.pow(3));
        assert!(a1.pow(2).odd_part("a1").unwrap().is_zero());
        let q = &a1 * &a2.pow(2);
        assert_eq!(q.odd_part("a1").unwrap(), q);
    }

    #[test]
    fn display_is_graded_lex() {
        let r = vars(&["a1", "a2"]);
        let a1 = MultiPoly::var(r.clone(), "a1").unwrap();
        let a2 = MultiPoly::var(r.clone(), "a2").unwrap();
        let p = &(&a1.pow(2) + &a2.pow(2)) - &MultiPoly::constant(r, int(1));
        assert_eq!(p.scale(&rat(1, 2)).to_string(), "1/2*a1^2 + 1/2*a2^2 + -1/2");
    }

    #[test]
    fn substitution_and_embedding() {
        let r = vars(&["a1", "t"]);
        let a1 = MultiPoly::var(r.clone(), "a1").unwrap();
        let t = MultiPoly::var(r.clone(), "t").unwrap();
        let p = &a1.pow(2) + &t;
        let s = p.substitute("a1", &(&t + &t)).unwrap();
        assert_eq!(s.eval(&[int(0), int(1)]).unwrap(), int(5));
        let e = p.embed(&vars(&["a1", "a2", "t"])).unwrap();
        assert_eq!(e.eval(&[int(2), int(7), int(1)]).unwrap(), int(5));
        assert!(matches!(p.eval(&[int(1)]), Err(MathError::ArityMismatch { .. })));
    }
}
