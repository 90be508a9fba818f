//! Mirzakhani polynomials `P^ℓ_{g,n}(a) = ∫ ψ_n^ℓ exp(−κ₁/2 + Σ a_i²ψ_i/2)`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use num_traits::{One, Zero};
use parking_lot::RwLock;
use serde::Serialize;

use crate::exactmath::{angle_vars, rat, rational_factorial, MathError, MultiPoly, Rational};
use crate::intersections::{self, dim, is_stable, IntersectionError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MirzakhaniPoly {
    pub genus: u32,
    pub n: usize,
    pub level: u32,
    pub poly: MultiPoly,
}

#[derive(Clone, Debug, Serialize)]
pub struct MirzakhaniRecord {
    pub genus: u32,
    pub n: usize,
    pub level: u32,
    pub poly: String,
    pub terms: Vec<crate::exactmath::TermRecord>,
}

impl MirzakhaniPoly {
    pub fn eval(&self, point: &[Rational]) -> Result<Rational, MathError> {
        self.poly.eval(point)
    }

    pub fn record(&self) -> MirzakhaniRecord {
        MirzakhaniRecord {
            genus: self.genus,
            n: self.n,
            level: self.level,
            poly: self.poly.to_string(),
            terms: self.poly.term_records(),
        }
    }
}

type Memo = RwLock<HashMap<(u32, usize, u32), Arc<MirzakhaniPoly>>>;

fn memo() -> &'static Memo {
    static M: OnceLock<Memo> = OnceLock::new();
    M.get_or_init(Default::default)
}

/// `P^ℓ_{g,n}` with ψ^ℓ placed on the last marking. Memoized.
pub fn mirzakhani_poly(g: u32, n: usize, level: u32) -> Result<Arc<MirzakhaniPoly>, IntersectionError> {
    if !is_stable(g, n) {
        return Err(IntersectionError::Unstable { g, n });
    }
    if let Some(p) = memo().read().get(&(g, n, level)) {
        return Ok(p.clone());
    }
    let p = Arc::new(build(g, n, level)?);
    memo().write().insert((g, n, level), p.clone());
    Ok(p)
}

/// Plain `P_{g,n}`.
pub fn p(g: u32, n: usize) -> Result<Arc<MirzakhaniPoly>, IntersectionError> {
    mirzakhani_poly(g, n, 0)
}

/// `P_{g,n}` with unstable indices read as the zero polynomial.
pub fn p_or_zero(g: i64, n: usize) -> Option<Arc<MirzakhaniPoly>> {
    if g < 0 {
        return None;
    }
    p(g as u32, n).ok()
}

fn build(g: u32, n: usize, level: u32) -> Result<MirzakhaniPoly, IntersectionError> {
    let vars = angle_vars(n);
    let d = dim(g, n);
    let top = d - level as i64;
    let poly = MultiPoly::zero(vars.clone());
    if top < 0 || (level > 0 && n == 0) {
        return Ok(MirzakhaniPoly { genus: g, n, level, poly });
    }
    let top = top as u32;
    let table = intersections::global();
    let minus_half = rat(-1, 2);
    let half = rat(1, 2);
    // Distribute `top` among κ₁ (slot 0) and the n ψ's.
    let mut parts = vec![0u32; n + 1];
    let mut terms = Vec::new();
    distribute(top, 0, &mut parts, &mut |parts| {
        let m = parts[0];
        let ds = &parts[1..];
        let mut ex: Vec<u32> = ds.to_vec();
        if let Some(last) = ex.last_mut() {
            *last += level;
        }
        let bracket = match table.kappa_psi(g, &ex, m) {
            Ok(v) => v,
            Err(_) => return,
        };
        if bracket.is_zero() {
            return;
        }
        let mut c = bracket * num_traits::pow(minus_half.clone(), m as usize) / rational_factorial(m);
        for &di in ds {
            c *= num_traits::pow(half.clone(), di as usize) / rational_factorial(di);
        }
        terms.push((ds.iter().map(|&di| 2 * di).collect::<Vec<_>>(), c));
    });
    let poly = MultiPoly::from_terms(vars, terms);
    Ok(MirzakhaniPoly { genus: g, n, level, poly })
}

fn distribute(rem: u32, slot: usize, parts: &mut [u32], f: &mut dyn FnMut(&[u32])) {
    if slot + 1 == parts.len() {
        parts[slot] = rem;
        f(parts);
        return;
    }
    for k in 0..=rem {
        parts[slot] = k;
        distribute(rem - k, slot + 1, parts, f);
    }
    parts[slot] = 0;
}

/// `P_{g,n+1}(a, 1) − Σ_i ∫₀^{a_i} u·P_{g,n}(…, â_i, …, u) du`, a polynomial in `a₁..a_n`.
pub fn do_norbury_residual(g: u32, n: usize) -> Result<MultiPoly, IntersectionError> {
    let vars = angle_vars(n);
    let big = p(g, n + 1)?;
    let mut point_vars = vars.clone();
    point_vars.push("t".into());
    let lhs = big
        .poly
        .rename(point_vars)
        .specialize("t", &Rational::one())
        .and_then(|q| q.drop_vars(&["t"]))
        .expect("t present");
    let mut rhs = MultiPoly::zero(vars.clone());
    if let Some(small) = p_or_zero(g as i64, n).filter(|_| n >= 1) {
        for i in 0..n {
            // a_j (j ≠ i) in the first n−1 slots, u last.
            let mut names: Vec<String> =
                vars.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| v.clone()).collect();
            names.push("u".into());
            // The polynomial is symmetric, so slot order does not matter.
            let q = small.poly.rename(names);
            let mut ring = vars.clone();
            ring.push("u".into());
            let q = q.embed(&ring).expect("superset ring");
            let u = MultiPoly::var(ring.clone(), "u").expect("u");
            let integrand = &u * &q;
            let zero = MultiPoly::zero(ring.clone());
            let hi = MultiPoly::var(ring.clone(), &vars[i]).expect("a_i");
            let val = integrand.definite_integral("u", &zero, &hi).expect("bounds free of u");
            rhs = &rhs + &val.drop_vars(&["u"]).expect("u eliminated");
        }
    }
    Ok(&lhs - &rhs)
}

type QMemo = RwLock<HashMap<(u32, usize), Arc<MultiPoly>>>;

/// `Q(z, s) = ∫₀^s v·P_{g,n}(z, v) dv` over variables `a1..an`, with `s = an`.
pub fn q_poly(g: u32, n: usize) -> Arc<MultiPoly> {
    static M: OnceLock<QMemo> = OnceLock::new();
    let memo = M.get_or_init(Default::default);
    if let Some(q) = memo.read().get(&(g, n)) {
        return q.clone();
    }
    let base = p(g, n).expect("stable");
    let vars = angle_vars(n);
    let mut ring = vars.clone();
    ring.push("u".into());
    let mut renamed = vars[..n - 1].to_vec();
    renamed.push("u".into());
    let integrand =
        &MultiPoly::var(ring.clone(), "u").expect("u") * &base.poly.rename(renamed).embed(&ring).expect("subring");
    let zero = MultiPoly::zero(ring.clone());
    let hi = MultiPoly::var(ring, &vars[n - 1]).expect("an");
    let q = integrand.definite_integral("u", &zero, &hi).and_then(|r| r.drop_vars(&["u"])).expect("bounds free of u");
    let q = Arc::new(q);
    memo.write().insert((g, n), q.clone());
    q
}

/// Constant term of `P_{g,n}` computed directly from `⟨κ₁^D⟩`.
pub fn cusp_value(g: u32, n: usize) -> Result<Rational, IntersectionError> {
    let d = dim(g, n) as u32;
    let k = intersections::kappa_psi_number(g, &vec![0; n], d)?;
    Ok(k * num_traits::pow(rat(-1, 2), d as usize) / rational_factorial(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::int;

    #[test]
    fn small_cases() {
        assert_eq!(p(0, 3).unwrap().poly.to_string(), "1/1");
        assert_eq!(p(0, 4).unwrap().poly.to_string(), "1/2*a1^2 + 1/2*a2^2 + 1/2*a3^2 + 1/2*a4^2 + -1/2");
        assert_eq!(p(1, 1).unwrap().poly.to_string(), "1/48*a1^2 + -1/48");
        assert_eq!(mirzakhani_poly(0, 4, 1).unwrap().poly.to_string(), "1/1");
    }

    #[test]
    fn p05_matches_hand_expansion() {
        let q = p(0, 5).unwrap();
        let pt = [rat(1, 3), rat(1, 5), int(0), rat(1, 2), int(2)];
        let s2: Rational = pt.iter().map(|x| x * x).sum();
        let s4: Rational = pt.iter().map(|x| x * x * x * x).sum();
        let mut cross = Rational::zero();
        for i in 0..5 {
            for j in i + 1..5 {
                cross += &pt[i] * &pt[i] * &pt[j] * &pt[j];
            }
        }
        let expected = (int(5) - int(6) * s2 + s4 + int(4) * cross) / int(8);
        assert_eq!(q.eval(&pt).unwrap(), expected);
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(p(0, 4).unwrap().eval(&[int(0), int(0), int(0), int(1)]).unwrap(), int(0));
        assert_eq!(p(1, 1).unwrap().eval(&[int(1)]).unwrap(), int(0));
        assert!(p(0, 4).unwrap().eval(&[int(0)]).is_err());
    }

    #[test]
    fn degree_symmetry_and_cusp() {
        for (g, n) in [(0usize, 5usize), (1, 2), (1, 3), (2, 1), (0, 6)] {
            let q = p(g as u32, n).unwrap();
            assert_eq!(q.poly.total_degree(), Some(2 * dim(g as u32, n) as u32));
            assert_eq!(q.poly.constant_term(), cusp_value(g as u32, n).unwrap());
            for v in q.poly.vars() {
                assert!(q.poly.is_even_in(v).unwrap());
            }
        }
    }

    #[test]
    fn do_norbury_low_cases() {
        for (g, n) in [(0, 3), (0, 4), (1, 1), (1, 2), (0, 5)] {
            assert!(do_norbury_residual(g, n).unwrap().is_zero(), "({g},{n})");
        }
    }
}
