use proptest::prelude::*;

use hypvol::exactmath::{fmt_rational, parse_rational, rat, PiecewisePoly};
use hypvol::intersections::{psi_number, IntersectionTable};
use hypvol::volumes::{canonicalize, v_eval};
use hypvol::{MultiPoly, Rational, UniPoly};

fn vars() -> Vec<String> {
    vec!["a1".into(), "a2".into()]
}

fn small_rat() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=7).prop_map(|(n, d)| rat(n, d))
}

fn poly() -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec(((0u32..4, 0u32..4), small_rat()), 0..6)
        .prop_map(|ts| MultiPoly::from_terms(vars(), ts.into_iter().map(|((i, j), c)| (vec![i, j], c))))
}

fn unipoly() -> impl Strategy<Value = UniPoly> {
    prop::collection::vec(small_rat(), 0..5).prop_map(UniPoly::new)
}

/// Angle vectors with at most one coordinate above 1/2.
fn angles(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    (prop::collection::vec(0i64..=20, n - 1), 0i64..=80)
        .prop_map(|(small, big)| small.into_iter().map(|k| rat(k, 40)).chain([rat(big, 40)]).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(p in poly(), q in poly(), r in poly()) {
        prop_assert_eq!(&p + &q, &q + &p);
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert!((&p - &p).is_zero());
    }

    #[test]
    fn eval_is_a_homomorphism(p in poly(), q in poly(), x in small_rat(), y in small_rat()) {
        let pt = [x, y];
        let (pv, qv) = (p.eval(&pt).unwrap(), q.eval(&pt).unwrap());
        prop_assert_eq!((&p * &q).eval(&pt).unwrap(), &pv * &qv);
        prop_assert_eq!((&p + &q).eval(&pt).unwrap(), pv + qv);
    }

    #[test]
    fn derivative_undoes_antiderivative(p in poly()) {
        prop_assert_eq!(p.antiderivative("a2").unwrap().derivative("a2").unwrap(), p);
    }

    #[test]
    fn rational_text_round_trip(x in small_rat()) {
        prop_assert_eq!(parse_rational(&fmt_rational(&x)).unwrap(), x);
    }

    #[test]
    fn piecewise_integral_is_additive(p in unipoly(), q in unipoly(), m in 1i64..8) {
        let mid = rat(m, 4);
        let f = PiecewisePoly::new(vec![rat(0, 1), mid.clone(), rat(2, 1)], vec![p, q]).unwrap();
        let whole = f.integrate(&rat(0, 1), &rat(2, 1)).unwrap();
        let split = f.integrate(&rat(0, 1), &mid).unwrap() + f.integrate(&mid, &rat(2, 1)).unwrap();
        prop_assert_eq!(whole, split);
    }

    #[test]
    fn canonicalize_is_idempotent_and_order_blind(a in angles(4), rot in 0usize..4) {
        let c = canonicalize(&a).unwrap();
        let again = canonicalize(c.coords()).unwrap();
        prop_assert_eq!(again.coords(), c.coords());
        let mut b = a.clone();
        b.rotate_left(rot);
        let moved = canonicalize(&b).unwrap();
        prop_assert_eq!(moved.coords(), c.coords());
    }

    #[test]
    fn volume_is_symmetric(a in angles(4), rot in 1usize..4) {
        let mut b = a.clone();
        b.rotate_left(rot);
        prop_assert_eq!(v_eval(0, &a).unwrap(), v_eval(0, &b).unwrap());
    }

    #[test]
    fn psi_is_symmetric(mut e in prop::collection::vec(0u32..4, 1..5), g in 0u32..3, rot in 0usize..4) {
        // Pad with zeros until the total degree is the dimension.
        let d = e.iter().map(|&x| x as i64).sum::<i64>() - (3 * g as i64 - 3 + e.len() as i64);
        prop_assume!(d >= 0 && (g > 0 || e.len() + (d as usize) >= 3));
        e.extend(std::iter::repeat_n(0, d as usize));
        let before = psi_number(g, &e).unwrap();
        let k = rot % e.len();
        e.rotate_left(k);
        prop_assert_eq!(psi_number(g, &e).unwrap(), before);
    }

    #[test]
    fn cache_round_trip(exps in prop::collection::vec(prop::collection::vec(0u32..3, 1..4), 1..4)) {
        let table = IntersectionTable::new();
        for e in &exps {
            let g = 1 + e.iter().sum::<u32>() / 3;
            let mut e = e.clone();
            let fill = (3 * g as usize - 3 + e.len()).saturating_sub(e.iter().sum::<u32>() as usize);
            e.extend(std::iter::repeat_n(0, fill));
            let _ = table.psi(g, &e);
        }
        let text = table.to_cache_string();
        let copy = IntersectionTable::new();
        copy.load_str(&text).unwrap();
        prop_assert_eq!(copy.to_cache_string(), text);
    }
}
