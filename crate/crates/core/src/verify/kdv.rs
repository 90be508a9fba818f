//! The KdV-type recursion for Mirzakhani polynomials, in integrated form
//! (asserted) and in differentiated form as usually displayed (diagnostic).

use num_traits::One;

use super::ring::Ring;
use crate::exactmath::{rat, MultiPoly, Rational};
use crate::mirzakhani::p;

fn half() -> Rational {
    rat(1, 2)
}

/// Splits of `{2..n}` into ordered pairs `(I₁, I₂)`.
fn splits(n: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let rest: Vec<usize> = (2..=n).collect();
    (0u64..(1u64 << rest.len()))
        .map(|mask| {
            let (mut i1, mut i2) = (Vec::new(), Vec::new());
            for (k, &i) in rest.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    i1.push(i);
                } else {
                    i2.push(i);
                }
            }
            (i1, i2)
        })
        .collect()
}

/// Left side minus right side of
/// `∫_{1−a₁}^{1+a₁} tP_{g,n}(t,a₂,…) dt = Σ_i ∫_{−a₁}^{a₁}∫₀^{a_i+t} uP_{g,n−1}(u,…â_i…) du dt
///   + ∫_{−a₁}^{a₁}∫₀^t∫₀^u y(u−y)/2 [P_{g−1,n+1}(…,y,u−y) + Σ P_{g₁}(y,a_{I₁})P_{g₂}(u−y,a_{I₂})] dy du dt`.
pub fn kdv_integral_residual(g: u32, n: usize) -> MultiPoly {
    let r = Ring::new(n, &["t", "u", "y"]);
    let (t, u, y) = (r.var("t"), r.var("u"), r.var("y"));
    let a1 = r.a(1);
    let one = r.c(Rational::one());
    let zero = r.zero();
    let others = |skip: &[usize]| -> Vec<MultiPoly> { (2..=n).filter(|i| !skip.contains(i)).map(|i| r.a(i)).collect() };

    let mut args = vec![t.clone()];
    args.extend(others(&[]));
    let lhs_integrand = &t * &r.p_at(g as i64, &args);
    let lhs = r.integrate(&lhs_integrand, "t", &(&one - &a1), &(&one + &a1));

    let mut rhs = r.zero();
    let minus_a1 = -&a1;
    for i in 2..=n {
        let mut args = vec![u.clone()];
        args.extend(others(&[i]));
        let inner = r.integrate(&(&u * &r.p_at(g as i64, &args)), "u", &zero, &(&r.a(i) + &t));
        rhs = &rhs + &r.integrate(&inner, "t", &minus_a1, &a1);
    }

    let weight = (&y * &(&u - &y)).scale(&half());
    let mut boundary = r.zero();
    let mut loop_args = others(&[]);
    loop_args.push(y.clone());
    loop_args.push(&u - &y);
    boundary = &boundary + &r.p_at(g as i64 - 1, &loop_args);
    for g1 in 0..=g {
        for (i1, i2) in splits(n) {
            let mut x1 = vec![y.clone()];
            x1.extend(i1.iter().map(|&i| r.a(i)));
            let mut x2 = vec![&u - &y];
            x2.extend(i2.iter().map(|&i| r.a(i)));
            let f1 = r.p_at(g1 as i64, &x1);
            if f1.is_zero() {
                continue;
            }
            boundary = &boundary + &(&f1 * &r.p_at((g - g1) as i64, &x2));
        }
    }
    let inner = r.integrate(&(&weight * &boundary), "y", &zero, &u);
    let mid = r.integrate(&inner, "u", &zero, &t);
    rhs = &rhs + &r.integrate(&mid, "t", &minus_a1, &a1);
    r.finish(&(&lhs - &rhs), n)
}

/// Left side minus right side of the differentiated display
/// `(1+a₁)P(1+a₁,…) − (1−a₁)P(1−a₁,…) = Σ_i ∫_{a_i−a₁}^{a_i+a₁} tP_{g,n−1} dt
///   + ∫_{−a₁}^{a₁}∫₀^t t(y−t)/2 [P_{g−1,n+1}(y,t−y,…) + Σ P_{g₁}(y,…)P_{g₂}(t−y,…)] dy dt`.
pub fn kdv_printed_residual(g: u32, n: usize) -> MultiPoly {
    let r = Ring::new(n, &["t", "y"]);
    let (t, y) = (r.var("t"), r.var("y"));
    let a1 = r.a(1);
    let one = r.c(Rational::one());
    let zero = r.zero();
    let others = |skip: &[usize]| -> Vec<MultiPoly> { (2..=n).filter(|i| !skip.contains(i)).map(|i| r.a(i)).collect() };

    let side = |x: MultiPoly| {
        let mut args = vec![x.clone()];
        args.extend(others(&[]));
        &x * &r.p_at(g as i64, &args)
    };
    let lhs = &side(&one + &a1) - &side(&one - &a1);

    let mut rhs = r.zero();
    for i in 2..=n {
        let mut args = vec![t.clone()];
        args.extend(others(&[i]));
        let f = &t * &r.p_at(g as i64, &args);
        rhs = &rhs + &r.integrate(&f, "t", &(&r.a(i) - &a1), &(&r.a(i) + &a1));
    }
    let weight = (&t * &(&y - &t)).scale(&half());
    let mut loop_args = vec![y.clone(), &t - &y];
    loop_args.extend(others(&[]));
    let mut boundary = r.p_at(g as i64 - 1, &loop_args);
    for g1 in 0..=g {
        for (i1, i2) in splits(n) {
            let mut x1 = vec![y.clone()];
            x1.extend(i1.iter().map(|&i| r.a(i)));
            let mut x2 = vec![&t - &y];
            x2.extend(i2.iter().map(|&i| r.a(i)));
            boundary = &boundary + &(&r.p_at(g1 as i64, &x1) * &r.p_at((g - g1) as i64, &x2));
        }
    }
    let inner = r.integrate(&(&weight * &boundary), "y", &zero, &t);
    rhs = &rhs + &r.integrate(&inner, "t", &-&a1, &a1);
    r.finish(&(&lhs - &rhs), n)
}

/// `P_{g,n}` exists and the pair is in the range where the integrated form is expected to close.
pub fn kdv_closes(g: u32, n: usize) -> bool {
    2 * g as i64 - 2 + n as i64 >= 2 && p(g, n).is_ok()
}
