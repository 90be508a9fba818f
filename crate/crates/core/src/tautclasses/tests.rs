use super::*;
use crate::exactmath::rat;
use crate::volumes::{profiles, v0_eval};

fn r(n: i64, d: i64) -> Rational {
    rat(n, d)
}

#[test]
fn small_types() {
    let s = s_class(0, &[r(1, 5), r(1, 3), r(1, 2)]).unwrap();
    assert_eq!(s.integrate_top(), int(1));
    let s = s_class(1, &[r(3, 2)]).unwrap();
    assert_eq!(s.integrate_top(), (r(9, 4) - int(1)) / int(48));
}

#[test]
fn s_equals_e_below_half() {
    let a = [r(1, 7), r(1, 4), r(1, 3), r(2, 5)];
    assert_eq!(s_class(1, &a).unwrap(), e_class(1, &a).unwrap());
}

#[test]
fn profile_04_matches() {
    let pr = class_profile(0, 4, &vec![int(0); 3]);
    assert_eq!(pr.v0(), profiles(0, 4, &vec![int(0); 3]).v0);
}

#[test]
fn dump_format() {
    let s = s_class(0, &[int(0), int(0), int(0), r(3, 2)]).unwrap();
    let text = s.dump();
    assert!(text.contains("κ1"), "{text}");
    assert!(text.lines().any(|l| l.contains("[v:(0|")), "{text}");
}

fn heads(k: usize) -> Vec<Vec<Rational>> {
    let pool = [r(0, 1), r(1, 10), r(1, 5), r(1, 4), r(1, 3), r(2, 5), r(9, 20), r(1, 2)];
    (0..4)
        .map(|s| {
            let mut h: Vec<Rational> = (0..k).map(|j| pool[(s * 3 + 2 * j) % pool.len()].clone()).collect();
            h.sort();
            h
        })
        .collect()
}

#[test]
fn routes_agree_in_low_dimension() {
    for (g, n) in [(0u32, 4usize), (0, 5), (0, 6), (0, 7), (1, 1), (1, 2), (1, 3), (1, 4), (2, 1)] {
        for head in heads(n - 1) {
            let a = class_profile(g, n, &head).v0();
            let b = profiles(g, n, &head).v0_on_domain();
            let end = b.hi().clone();
            assert_eq!(a.restrict(&Rational::zero(), &end).unwrap(), b, "({g},{n}) {head:?}");
        }
    }
}

#[test]
fn psi_pairings_match_levels() {
    let head = [r(1, 10), r(1, 4), r(1, 3)];
    let cp = class_profile(1, 4, &head);
    let pr = profiles(1, 4, &head);
    let end = pr.domain_end();
    for (ell, expect) in [(1, &pr.v1), (2, &pr.v2)] {
        let a = cp.pair_psi(ell).restrict(&Rational::zero(), &end).unwrap();
        assert_eq!(a, expect.restrict(&Rational::zero(), &end).unwrap(), "level {ell}");
    }
}

#[test]
fn point_value_is_volume() {
    let a = [r(1, 5), r(1, 3), r(2, 5), r(7, 4)];
    assert_eq!(s_class(1, &a).unwrap().integrate_top(), v0_eval(1, &a).unwrap());
}
