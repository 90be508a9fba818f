//! Polynomial plumbing: a fixed variable list and substitution of
//! Mirzakhani polynomials at polynomial arguments.

use num_traits::Zero;

use crate::exactmath::{MultiPoly, Rational};
use crate::mirzakhani::p_or_zero;

#[derive(Clone, Debug)]
pub(crate) struct Ring {
    pub vars: Vec<String>,
}

impl Ring {
    /// `a1..an` followed by the auxiliary variables.
    pub fn new(n: usize, aux: &[&str]) -> Self {
        let mut vars = crate::exactmath::angle_vars(n);
        vars.extend(aux.iter().map(|s| s.to_string()));
        Ring { vars }
    }

    pub fn var(&self, name: &str) -> MultiPoly {
        MultiPoly::var(self.vars.clone(), name).expect("variable in ring")
    }

    pub fn a(&self, i: usize) -> MultiPoly {
        self.var(&format!("a{i}"))
    }

    pub fn c(&self, c: Rational) -> MultiPoly {
        MultiPoly::constant(self.vars.clone(), c)
    }

    pub fn zero(&self) -> MultiPoly {
        MultiPoly::zero(self.vars.clone())
    }

    /// `P_{g,k}(args)`, or zero when the type is unstable.
    pub fn p_at(&self, g: i64, args: &[MultiPoly]) -> MultiPoly {
        match p_or_zero(g, args.len()) {
            Some(p) => place(&p.poly, args, self),
            None => self.zero(),
        }
    }

    /// `∫_{lo}^{hi} f d(var)`.
    pub fn integrate(&self, f: &MultiPoly, var: &str, lo: &MultiPoly, hi: &MultiPoly) -> MultiPoly {
        f.definite_integral(var, lo, hi).expect("bounds free of the variable")
    }

    /// Drops auxiliary variables that no longer occur.
    pub fn finish(&self, f: &MultiPoly, n: usize) -> MultiPoly {
        let aux: Vec<&str> = self.vars[n..].iter().map(|s| s.as_str()).collect();
        f.drop_vars(&aux).expect("auxiliary variables eliminated")
    }
}

/// `p(args)` with each variable of `p` replaced by the matching argument.
pub(crate) fn place(p: &MultiPoly, args: &[MultiPoly], ring: &Ring) -> MultiPoly {
    assert_eq!(p.vars().len(), args.len(), "arity");
    let mut powers: Vec<Vec<MultiPoly>> =
        args.iter().map(|a| vec![ring.c(Rational::from_integer(1.into())), a.clone()]).collect();
    let mut out = ring.zero();
    for (e, c) in p.terms() {
        if c.is_zero() {
            continue;
        }
        let mut term = ring.c(c.clone());
        for (i, &k) in e.iter().enumerate() {
            let k = k as usize;
            while powers[i].len() <= k {
                let next = &powers[i][powers[i].len() - 1] * &args[i];
                powers[i].push(next);
            }
            if k > 0 {
                term = &term * &powers[i][k];
            }
        }
        out = &out + &term;
    }
    out
}
