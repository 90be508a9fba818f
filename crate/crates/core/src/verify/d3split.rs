//! Point values of the Mirzakhani-polynomial form of `𝒟³`:
//! `𝒟̃³ − 𝒟′ − 𝒟″`, compared against the recursive kernel.

use num_traits::{One, Zero};

use super::ring::Ring;
use crate::exactmath::{int, rat, MultiPoly, Rational};

fn pos(x: Rational) -> Rational {
    x.max(Rational::zero())
}

struct Point<'a> {
    g: i64,
    head: &'a [Rational],
    t: Rational,
    r: Ring,
}

impl Point<'_> {
    fn c(&self, x: &Rational) -> MultiPoly {
        self.r.c(x.clone())
    }

    fn heads(&self, keep: impl Fn(usize) -> bool) -> Vec<MultiPoly> {
        (0..self.head.len()).filter(|&k| keep(k)).map(|k| self.c(&self.head[k])).collect()
    }

    fn value(&self, f: &MultiPoly) -> Rational {
        assert!(f.total_degree().unwrap_or(0) == 0, "leftover variable");
        f.constant_term()
    }

    /// `∫_{lo}^{hi} f dy` with numeric bounds; zero when `hi ≤ lo`.
    fn int1(&self, f: &MultiPoly, var: &str, lo: &Rational, hi: &Rational) -> Rational {
        if hi <= lo {
            return Rational::zero();
        }
        self.value(&self.r.integrate(f, var, &self.c(lo), &self.c(hi)))
    }

    /// `∫_{outer=lo}^{hi} ∫_{inner=0}^{(outer + shift)⁺} f`.
    fn int2(
        &self,
        f: &MultiPoly,
        outer: &str,
        lo: &Rational,
        hi: &Rational,
        inner: &str,
        shift: &Rational,
    ) -> Rational {
        let lo = lo.clone().max(-shift);
        if hi <= &lo {
            return Rational::zero();
        }
        let top = &self.r.var(outer) + &self.c(shift);
        let once = self.r.integrate(f, inner, &self.r.zero(), &top);
        self.int1(&once, outer, &lo, hi)
    }

    fn splits(&self, legs: &[usize]) -> Vec<(i64, Vec<usize>, Vec<usize>)> {
        let mut out = Vec::new();
        for g1 in 0..=self.g {
            for mask in 0u64..(1u64 << legs.len()) {
                let i1: Vec<usize> =
                    legs.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &l)| l).collect();
                let i2: Vec<usize> =
                    legs.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 0).map(|(_, &l)| l).collect();
                out.push((g1, i1, i2));
            }
        }
        out
    }

    fn pick(&self, legs: &[usize]) -> Vec<MultiPoly> {
        legs.iter().map(|&k| self.c(&self.head[k])).collect()
    }

    /// `𝒟³` with every volume factor replaced by its polynomial.
    fn tilde(&self) -> Rational {
        let (g, n, t) = (self.g, self.head.len(), &self.t);
        let r = &self.r;
        let y = r.var("y");
        let mut total = Rational::zero();
        for i in 0..n {
            let x = &self.head[i] + t - int(1);
            if x > Rational::zero() {
                let mut args = self.heads(|k| k != i);
                args.push(self.c(&x));
                total += &x * self.value(&r.p_at(g, &args));
            }
        }
        let s = t - int(1);
        if s > Rational::zero() {
            let rest = &self.c(&s) - &y;
            let weight = (&y * &rest).scale(&rat(1, 2));
            let mut args = self.heads(|_| true);
            args.push(y.clone());
            args.push(rest.clone());
            let mut f = r.p_at(g - 1, &args);
            let all: Vec<usize> = (0..n).collect();
            for (g1, i1, i2) in self.splits(&all) {
                let mut x1 = vec![y.clone()];
                x1.extend(self.pick(&i1));
                let mut x2 = vec![rest.clone()];
                x2.extend(self.pick(&i2));
                f = &f + &(&r.p_at(g1, &x1) * &r.p_at(g - g1, &x2));
            }
            total += self.int1(&(&weight * &f), "y", &Rational::zero(), &s);
        }
        total
    }

    /// Correction from the small-angle form of the volume factors.
    fn prime(&self) -> Rational {
        let (g, n, t) = (self.g, self.head.len(), &self.t);
        let r = &self.r;
        let (u, y) = (r.var("u"), r.var("y"));
        let zero = Rational::zero();
        let one = Rational::one();
        let mut total = Rational::zero();
        for i in 0..n {
            let lead = &self.head[i] + t - int(1);
            for j in 0..n {
                if j == i {
                    continue;
                }
                let mut args = self.heads(|k| k != i && k != j);
                args.push(u.clone());
                let f = (&u * &r.p_at(g, &args)).scale(&lead);
                total += self.int1(&f, "u", &zero, &pos(&self.head[i] + &self.head[j] + t - int(2)));
            }
            // Separating and loop corrections inside a four-valent vertex.
            let hi = pos(&self.head[i] + t - int(2));
            let weight = (&y * &(&u - &y)).scale(&(&lead / int(2)));
            let mut args = self.heads(|k| k != i);
            args.push(y.clone());
            args.push(&u - &y);
            let mut f = r.p_at(g - 1, &args);
            let legs: Vec<usize> = (0..n).filter(|&k| k != i).collect();
            for (g1, i1, i2) in self.splits(&legs) {
                let mut x1 = vec![y.clone()];
                x1.extend(self.pick(&i1));
                let mut x2 = vec![&u - &y];
                x2.extend(self.pick(&i2));
                f = &f + &(&r.p_at(g1, &x1) * &r.p_at(g - g1, &x2));
            }
            total += self.int2(&(&weight * &f), "u", &zero, &hi, "y", &-&one);
        }
        let s = pos(t - int(1));
        let rest = &self.c(&(t - int(1))) - &y;
        let weight = &(&y * &u) * &rest;
        for i in 0..n {
            let mut args = self.heads(|k| k != i);
            args.push(u.clone());
            args.push(rest.clone());
            let f = &weight * &r.p_at(g - 1, &args);
            total += self.int2(&f, "y", &zero, &s, "u", &(&self.head[i] - &one));
        }
        let all: Vec<usize> = (0..n).collect();
        for (g1, i1, i2) in self.splits(&all) {
            for &i in &i1 {
                let mut x1 = vec![u.clone()];
                x1.extend(self.pick(&i1.iter().copied().filter(|&k| k != i).collect::<Vec<_>>()));
                let mut x2 = vec![rest.clone()];
                x2.extend(self.pick(&i2));
                let f = &weight * &(&r.p_at(g1, &x1) * &r.p_at(g - g1, &x2));
                total += self.int2(&f, "y", &zero, &s, "u", &(&self.head[i] - &one));
            }
        }
        total
    }

    /// Integration over the part of a trivalent genus-0 vertex outside its domain.
    fn second(&self) -> Rational {
        let (g, n, t) = (self.g, self.head.len(), &self.t);
        let r = &self.r;
        let y = r.var("y");
        let s = t - int(1);
        let mut total = Rational::zero();
        for i in 0..n {
            for j in i + 1..n {
                let lo = int(1) - &self.head[i] - &self.head[j];
                let hi = s.clone().max(lo.clone());
                let rest = &self.c(&s) - &y;
                let mut args = self.heads(|k| k != i && k != j);
                args.push(rest.clone());
                let f = &(&y * &rest) * &r.p_at(g, &args);
                total += self.int1(&f, "y", &lo, &hi);
            }
        }
        total
    }
}

/// `(𝒟̃³, 𝒟′, 𝒟″)` at `(head, t)` for the type `(g, head.len() + 1)`.
pub fn d3_parts(g: u32, head: &[Rational], t: &Rational) -> (Rational, Rational, Rational) {
    let pt = Point { g: g as i64, head, t: t.clone(), r: Ring::new(0, &["u", "y"]) };
    (pt.tilde(), pt.prime(), pt.second())
}
