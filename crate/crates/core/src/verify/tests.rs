use super::kdv::*;
use crate::exactmath::{rat, MultiPoly};

#[test]
fn kdv_integral_small() {
    for (g, n) in [(0u32, 4usize), (0, 5), (1, 2), (0, 6), (1, 3), (2, 1)] {
        assert!(kdv_integral_residual(g, n).is_zero(), "({g},{n}): {}", kdv_integral_residual(g, n));
    }
    let r = kdv_integral_residual(1, 1);
    let a = MultiPoly::var(vec!["a1".into()], "a1").unwrap();
    assert_eq!(r, a.pow(3).scale(&rat(1, 24)));
}

#[test]
fn kdv_printed_04() {
    let r = kdv_printed_residual(0, 4);
    println!("{r}");
    let r5 = kdv_printed_residual(0, 5);
    let v = r5.eval(&[rat(1, 2), rat(0, 1), rat(0, 1), rat(0, 1), rat(0, 1)]).unwrap();
    assert_eq!(v, rat(-111, 128));
}

use super::*;
use crate::exactmath::int;

fn small() -> VerifyConfig {
    VerifyConfig { max_dim: 3, samples: 2, seed: 7, timing: false }
}

#[test]
fn asserted_identities_hold_in_low_dimension() {
    let reports = verify_all(&small());
    for r in &reports {
        assert_ne!(r.verdict, Verdict::Fails, "{} ({},{}): {}", r.identity, r.g, r.n, r.residual_text);
    }
    assert!(all_hold(&reports));
    let names: Vec<&str> = reports.iter().map(|r| r.identity.as_str()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn reports_are_reproducible() {
    let a = to_json(&run_identity("sign", &small()).unwrap());
    let b = to_json(&run_identity("sign", &small()).unwrap());
    assert_eq!(a, b);
    assert!(a.contains("\"verdict\": \"holds\""));
}

#[test]
fn exclusions_are_reported() {
    let v = run_identity("vanishing", &small()).unwrap();
    let r = v.iter().find(|r| (r.g, r.n) == (1, 1)).unwrap();
    assert_eq!(r.verdict, Verdict::Excluded);
    assert!(r.residual_text.contains("-1/16"));
    let k = run_identity("kdv_integral", &small()).unwrap();
    assert_eq!(k.iter().find(|r| (r.g, r.n) == (1, 1)).unwrap().verdict, Verdict::Excluded);
}

#[test]
fn unknown_identity_is_an_error() {
    assert!(run_identity("nope", &small()).is_err());
}

#[test]
fn sine_sign() {
    assert_eq!(super::sin_sign(&rat(1, 2)), 1);
    assert_eq!(super::sin_sign(&rat(3, 2)), -1);
    assert_eq!(super::sin_sign(&int(1)), 0);
}

#[test]
fn profile_types_scope() {
    assert_eq!(profile_types(2), vec![(0, 4), (0, 5), (1, 2)]);
}
