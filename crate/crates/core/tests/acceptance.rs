//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines are never captured.
//! Criteria listed in `KNOWN_FAILING` are expected to print FAIL; the run
//! exits nonzero if any other criterion fails or a known failure starts
//! passing, so the list cannot go stale silently.

use std::collections::BTreeMap;
use std::time::Instant;

use hypvol::exactmath::{angle_vars, int, rat, Rational};
use hypvol::graphs::{contributing_graphs, enumerate_rational_graphs};
use hypvol::intersections::{dim, genus_zero_closed_form, kappa_psi_number, psi_number};
use hypvol::mirzakhani::p;
use hypvol::verify::{self, kdv, IdentityReport, Verdict, VerifyConfig};
use hypvol::volumes::{self, d3_kernel, d4_kernel, d5_kernel, graph_kernel, profiles, vol_eval, KernelOptions};
use hypvol::MultiPoly;
use num_traits::{One, Signed, Zero};

/// The central-valence clause of criterion 10 is false on Δ^{≤2}: three head
/// angles summing past 1 admit a graph with a 5-valent central vertex.
const KNOWN_FAILING: &[u32] = &[10];

struct Line {
    id: u32,
    pass: bool,
    detail: String,
}

fn line(id: u32, checks: &[(bool, String)]) -> Line {
    let pass = checks.iter().all(|c| c.0);
    let detail =
        checks.iter().map(|(ok, s)| format!("{}{s}", if *ok { "" } else { "FAILED " })).collect::<Vec<_>>().join("; ");
    Line { id, pass, detail }
}

/// Sorted exponent vectors of length `n` summing to `total`.
fn partitions(total: u32, n: usize, max: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=max.min(total)).rev() {
        for mut rest in partitions(total - first, n - 1, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn criterion_1() -> Line {
    let start = Instant::now();
    let mut string_ok = true;
    let mut dilaton_ok = true;
    let mut count = 0usize;
    for g in 0..=4u32 {
        for n in 1..=12usize {
            let d = dim(g, n);
            if !(2 * g as i64 - 2 + n as i64 > 0) || !(0..=9).contains(&d) {
                continue;
            }
            for e in partitions(d as u32, n, d as u32) {
                count += 1;
                let value = psi_number(g, &e).unwrap();
                let rest = &e[..n - 1];
                let stable_rest = 2 * g as i64 - 2 + (n as i64 - 1) > 0;
                if e[n - 1] == 0 && stable_rest {
                    let mut s = Rational::zero();
                    for j in 0..rest.len() {
                        if rest[j] > 0 {
                            let mut r = rest.to_vec();
                            r[j] -= 1;
                            s += psi_number(g, &r).unwrap();
                        }
                    }
                    string_ok &= s == value;
                }
                if e[n - 1] == 1 && stable_rest {
                    let expect = int(2 * g as i64 - 2 + n as i64 - 1) * psi_number(g, rest).unwrap();
                    dilaton_ok &= expect == value;
                }
            }
        }
    }
    let mut closed = true;
    for n in 3..=9usize {
        for e in partitions(n as u32 - 3, n, n as u32 - 3) {
            closed &= psi_number(0, &e).unwrap() == genus_zero_closed_form(&e);
        }
    }
    let values = psi_number(1, &[1]).unwrap() == rat(1, 24)
        && kappa_psi_number(0, &[0; 5], 2).unwrap() == int(5)
        && kappa_psi_number(0, &[0; 4], 1).unwrap() == int(1);
    let secs = start.elapsed().as_secs_f64();
    line(
        1,
        &[
            (string_ok, format!("string equation on {count} brackets")),
            (dilaton_ok, "dilaton equation".into()),
            (closed, "genus-0 closed form n<=9".into()),
            (values, "<tau1>_1, <k1^2>_{0,5}, <k1>_{0,4}".into()),
            (secs < 30.0, format!("{secs:.1}s")),
        ],
    )
}

fn a(i: usize, n: usize) -> MultiPoly {
    MultiPoly::var(angle_vars(n), &format!("a{i}")).unwrap()
}

fn c(x: Rational, n: usize) -> MultiPoly {
    MultiPoly::constant(angle_vars(n), x)
}

fn criterion_2() -> Line {
    let p03 = p(0, 3).unwrap().poly.to_string() == "1/1";
    let sq4: MultiPoly = (1..=4).fold(MultiPoly::zero(angle_vars(4)), |s, i| &s + &a(i, 4).pow(2));
    let p04 = p(0, 4).unwrap().poly.to_string() == (&sq4 - &c(int(1), 4)).scale(&rat(1, 2)).to_string();
    let p11 = p(1, 1).unwrap().poly.to_string() == (&a(1, 1).pow(2) - &c(int(1), 1)).scale(&rat(1, 48)).to_string();
    let n = 5;
    let mut sq = MultiPoly::zero(angle_vars(n));
    let mut quart = MultiPoly::zero(angle_vars(n));
    let mut mixed = MultiPoly::zero(angle_vars(n));
    for i in 1..=n {
        sq = &sq + &a(i, n).pow(2);
        quart = &quart + &a(i, n).pow(4);
        for j in i + 1..=n {
            mixed = &mixed + &(&a(i, n).pow(2) * &a(j, n).pow(2));
        }
    }
    let expect = (&(&(&c(int(5), n) - &sq.scale(&int(6))) + &quart) + &mixed.scale(&int(4))).scale(&rat(1, 8));
    let p05 = p(0, 5).unwrap().poly.to_string() == expect.to_string();
    line(2, &[(p03, "P_{0,3}".into()), (p04, "P_{0,4}".into()), (p11, "P_{1,1}".into()), (p05, "P_{0,5}".into())])
}

fn by_identity<'a>(reports: &'a [IdentityReport], name: &str) -> Vec<&'a IdentityReport> {
    reports.iter().filter(|r| r.identity == name).collect()
}

fn none_fail(rs: &[&IdentityReport]) -> bool {
    rs.iter().all(|r| r.verdict != Verdict::Fails)
}

fn failing(rs: &[&IdentityReport]) -> String {
    let bad: Vec<String> = rs
        .iter()
        .filter(|r| r.verdict == Verdict::Fails)
        .map(|r| format!("({},{}) {}", r.g, r.n, r.residual_text))
        .collect();
    if bad.is_empty() {
        String::new()
    } else {
        format!(" [{}]", bad.join(", "))
    }
}

fn criterion_3(reports: &[IdentityReport]) -> Line {
    let rs = by_identity(reports, "do_norbury");
    let all_zero = rs.iter().all(|r| r.verdict == Verdict::Holds);
    let complete = rs.iter().all(|r| dim(r.g, r.n + 1) <= 6)
        && rs.iter().any(|r| (r.g, r.n) == (2, 2))
        && rs.iter().any(|r| (r.g, r.n) == (0, 8));
    let ms: u64 = rs.iter().map(|r| r.runtime_ms).sum();
    line(
        3,
        &[
            (all_zero, format!("{} types with 3g-3+n+1<=6{}", rs.len(), failing(&rs))),
            (complete, "scope".into()),
            (ms < 60_000, format!("{ms}ms")),
        ],
    )
}

fn criterion_4(reports: &[IdentityReport]) -> Line {
    let rs: Vec<&IdentityReport> =
        by_identity(reports, "vanishing").into_iter().filter(|r| r.verdict != Verdict::Excluded).collect();
    let heads_ok = rs.iter().all(|r| {
        let heads: std::collections::BTreeSet<String> =
            r.samples.iter().map(|s| s.rsplit_once(',').map_or(s.clone(), |x| x.0.to_string())).collect();
        // With n = 1 the head is empty and there is a single one.
        heads.len() >= 10 || r.n == 1
    });
    let pr = profiles(0, 4, &[Rational::zero(), Rational::zero(), Rational::zero()]);
    let v04 = pr.v0.to_string() == "[0, 1]: 1/2*x^2 + -1/2\n[1, 2]: -1/1*x^2 + 3/1*x + -2/1";
    let types = rs.len();
    line(
        4,
        &[
            (
                none_fail(&rs) && rs.iter().all(|r| r.verdict == Verdict::Holds),
                format!("V(head,1)=V(head,2)=0 on {types} types{}", failing(&rs)),
            ),
            (heads_ok, ">=10 heads per type".into()),
            (types == 11, "all types 2g-2+n>=2, 3g-3+n<=5".into()),
            (v04, "V_{0,4} profile (t^2-1)/2 | (t^2-1)/2-3(t-1)^2/2".into()),
        ],
    )
}

fn criterion_5() -> Line {
    let types = [(0u32, 4usize), (0, 5), (1, 2), (0, 6), (1, 3), (2, 1)];
    let closes = types.iter().all(|&(g, n)| kdv::kdv_integral_residual(g, n).is_zero());
    let one_one = verify::verify_kdv_integral(1, 1);
    let a1 = MultiPoly::var(vec!["a1".into()], "a1").unwrap();
    let excluded =
        one_one.verdict == Verdict::Excluded && one_one.residual_text == a1.pow(3).scale(&rat(1, 24)).to_string();
    let n = 4;
    let sq: MultiPoly = (2..=n).fold(MultiPoly::zero(angle_vars(n)), |s, i| &s + &a(i, n).pow(2));
    let lin: MultiPoly = (2..=n).fold(MultiPoly::zero(angle_vars(n)), |s, i| &s + &a(i, n));
    let x = a(1, n);
    let expect = &(&(&x.pow(3) + &x.scale(&int(2))) + &(&x * &sq)) - &(&x * &lin).scale(&int(2));
    let printed = kdv::kdv_printed_residual(0, 4) == expect;
    line(
        5,
        &[
            (closes, "integrated form closes on (0,4),(0,5),(1,2),(0,6),(1,3),(2,1)".into()),
            (excluded, "(1,1) excluded with a1^3/24".into()),
            (printed, "printed form residual for (0,4) = a1^3+2a1+a1*S2-2a1*S1".into()),
        ],
    )
}

fn criterion_6(reports: &[IdentityReport]) -> Line {
    let rs = by_identity(reports, "vp2");
    // Where t = 2 is in the domain closure only for the zero head, that head is the whole scope.
    let counts = rs.iter().all(|r| r.samples.len() >= 10 || volumes::euler(r.g, r.n) == 2);
    line(
        6,
        &[
            (rs.iter().all(|r| r.verdict == Verdict::Holds), format!("{} types{}", rs.len(), failing(&rs))),
            (counts, ">=10 samples where the scope has more than one head".into()),
        ],
    )
}

fn criterion_7(reports: &[IdentityReport]) -> Line {
    let c1 = by_identity(reports, "c1");
    let sign = by_identity(reports, "sign");
    let sign_samples: usize = sign.iter().map(|r| r.samples.len()).sum();
    let zero = Rational::zero();
    let lim = vol_eval(0, &[zero.clone(), zero.clone(), zero.clone(), Rational::one()]).unwrap();
    let err = (lim.vol - std::f64::consts::FRAC_1_PI).abs();
    line(
        7,
        &[
            (
                c1.iter().all(|r| r.verdict == Verdict::Holds),
                format!("C1 on {} profile types{}", c1.len(), failing(&c1)),
            ),
            (none_fail(&sign) && sign_samples >= 200, format!("sign law at {sign_samples} samples{}", failing(&sign))),
            (lim.limit && err < 1e-12, format!("Vol_{{0,4}}(0,0,0,1) = {:.15}", lim.vol)),
        ],
    )
}

fn criterion_8(reports: &[IdentityReport]) -> Line {
    let rs = by_identity(reports, "route_agreement");
    let scope = rs.iter().all(|r| dim(r.g, r.n) <= 4) && rs.len() == 8;
    let samples: usize = rs.iter().map(|r| r.samples.len()).sum();
    line(
        8,
        &[
            (
                rs.iter().all(|r| r.verdict == Verdict::Holds),
                format!("{} types, {samples} heads{}", rs.len(), failing(&rs)),
            ),
            (scope, "all types with 3g-3+n<=4".into()),
        ],
    )
}

fn criterion_9(reports: &[IdentityReport]) -> Line {
    let ch = by_identity(reports, "chamber");
    let sym = by_identity(reports, "symmetry");
    let sym_samples: usize = sym.iter().map(|r| r.samples.len()).sum();
    line(
        9,
        &[
            (
                ch.iter().all(|r| r.verdict == Verdict::Holds),
                format!("V = sign*P when t+max(head)<=1 on {} types{}", ch.len(), failing(&ch)),
            ),
            (
                sym.iter().all(|r| r.verdict == Verdict::Holds) && sym_samples >= 50,
                format!("symmetry at {sym_samples} points of |a|<=1{}", failing(&sym)),
            ),
        ],
    )
}

fn criterion_10() -> Line {
    let counts = enumerate_rational_graphs(0, 4).len() == 3 && enumerate_rational_graphs(1, 1).is_empty();
    // Largest central valence over a grid of points in Δ^{≤2}.
    let grid = [rat(0, 1), rat(1, 5), rat(7, 20), rat(9, 20)];
    let lasts = [rat(1, 2), rat(3, 2), rat(199, 100)];
    let mut worst: Option<(usize, String)> = None;
    let mut checked = 0usize;
    for (g, n) in [(0u32, 4usize), (0, 5), (0, 6), (0, 7), (0, 8), (1, 2), (1, 3), (1, 4), (1, 5), (2, 1), (2, 2)] {
        let mut idx = vec![0usize; n - 1];
        loop {
            let mut head: Vec<Rational> = idx.iter().map(|&k| grid[k].clone()).collect();
            head.sort();
            if idx.windows(2).all(|w| w[0] <= w[1]) {
                for t in &lasts {
                    let mut pt = head.clone();
                    pt.push(t.clone());
                    if pt.iter().sum::<Rational>() >= int(volumes::euler(g, n)) {
                        continue;
                    }
                    checked += 1;
                    for gr in contributing_graphs(g, n, &pt) {
                        let v = gr.central_valence();
                        if worst.as_ref().is_none_or(|w| v > w.0) {
                            let text = pt.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
                            worst = Some((v, format!("({g},{n}) at ({text}): {gr}")));
                        }
                    }
                }
            }
            let mut k = 0;
            while k < idx.len() && idx[k] == grid.len() - 1 {
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
            idx[k] += 1;
        }
    }
    let (valence, example) = worst.unwrap();
    // Graph sums against the closed kernels.
    let opts = KernelOptions::default();
    let mut kernel_ok = true;
    let mut compared = 0usize;
    for (g, n, head) in [
        (0u32, 4usize, vec![rat(1, 10), rat(1, 4), rat(2, 5)]),
        (0, 5, vec![rat(1, 5), rat(7, 20), rat(7, 20), rat(9, 20)]),
        (1, 2, vec![rat(1, 4)]),
        (1, 3, vec![rat(1, 8), rat(9, 20)]),
        (1, 4, vec![rat(7, 20), rat(7, 20), rat(7, 20)]),
        (2, 1, vec![]),
    ] {
        let kernels =
            [(3, d3_kernel(g, n, &head, opts)), (4, d4_kernel(g, n, &head, opts)), (5, d5_kernel(g, n, &head, opts))];
        for k in 1..20 {
            let u = rat(2 * k, 20) - rat(1, 89);
            for (val, kern) in &kernels {
                if let Ok(closed) = kern.eval(&u) {
                    compared += 1;
                    kernel_ok &= graph_kernel(g, n, &head, &u, *val) == closed;
                }
            }
        }
    }
    line(
        10,
        &[
            (counts, "|Rat_{0,4}| = 3, Rat_{1,1} empty".into()),
            (valence <= 4, format!("max central valence {valence} over {checked} points; {example}")),
            (kernel_ok, format!("graph sums m/|Aut| = closed kernels at {compared} points")),
        ],
    )
}

fn criterion_11() -> Line {
    let mut checks = Vec::new();
    for n in 3..=5usize {
        let rows = volumes::fig1_table(n, 40).unwrap();
        let at = |x: &Rational| rows.iter().find(|r| r.x == x.to_string()).unwrap();
        let xs: Vec<Rational> = (0..=40).map(|k| rat(2 * k, 40)).collect();
        if n == 3 {
            let ind = xs.iter().all(|x| at(x).v_exact == if *x <= Rational::one() { "1" } else { "0" });
            checks.push((ind, "V_{0,3} is the indicator of x<=1".to_string()));
            continue;
        }
        let zeros = at(&int(1)).v_exact == "0" && at(&int(2)).v_exact == "0";
        let signs = xs.iter().all(|x| {
            let v: Rational = at(x).v_exact.parse().unwrap();
            if x.is_zero() || *x == int(1) || *x == int(2) {
                true
            } else if *x < int(1) {
                v.is_positive()
            } else {
                v.is_negative()
            }
        });
        let positive = rows.iter().all(|r| r.vol_float.is_finite() && r.vol_float > 0.0);
        // The normalized value at the zeros comes from the one-sided derivative; it
        // must match its neighbours.
        let eps = rat(1, 100_000);
        let mut head = vec![Rational::zero(); n - 1];
        head.push(Rational::zero());
        let vol = |x: Rational| {
            let mut a = head.clone();
            a[n - 1] = x;
            vol_eval(0, &a).unwrap().vol
        };
        let continuous = [(int(1), true), (int(2), false)].into_iter().all(|(x0, both)| {
            let mid = vol(x0.clone());
            let left = vol(&x0 - &eps);
            let right = if both { vol(&x0 + &eps) } else { left };
            (left - mid).abs() < 1e-3 * mid.abs() && (right - mid).abs() < 1e-3 * mid.abs()
        });
        checks.push((zeros && signs, format!("V_{{0,{n}}} zeros at 1,2 and signs +,-")));
        checks.push((positive && continuous, format!("Vol_{{0,{n}}} positive and continuous at 1,2")));
    }
    line(11, &checks)
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let cfg = VerifyConfig { max_dim: 5, samples: 10, seed: 0, timing: true };
    let start = Instant::now();
    let reports = verify::verify_all(&cfg);
    let verify_secs = start.elapsed().as_secs_f64();
    let lines = vec![
        criterion_1(),
        criterion_2(),
        criterion_3(&reports),
        criterion_4(&reports),
        criterion_5(),
        criterion_6(&reports),
        criterion_7(&reports),
        criterion_8(&reports),
        criterion_9(&reports),
        criterion_10(),
        criterion_11(),
    ];
    let mut summary: BTreeMap<u32, bool> = BTreeMap::new();
    for l in &lines {
        let known = if KNOWN_FAILING.contains(&l.id) { " (known)" } else { "" };
        println!("criterion {:>2}: {}{known}  {}", l.id, if l.pass { "PASS" } else { "FAIL" }, l.detail);
        summary.insert(l.id, l.pass);
    }
    println!(
        "identity checks: {} reports in {verify_secs:.0}s; total {:.0}s",
        reports.len(),
        start.elapsed().as_secs_f64()
    );
    let mut bad = Vec::new();
    for (id, pass) in summary {
        if KNOWN_FAILING.contains(&id) && pass {
            bad.push(format!("criterion {id} now passes; remove it from KNOWN_FAILING"));
        } else if !KNOWN_FAILING.contains(&id) && !pass {
            bad.push(format!("criterion {id} failed"));
        }
    }
    if !bad.is_empty() {
        eprintln!("acceptance: {}", bad.join("; "));
        std::process::exit(1);
    }
    println!("acceptance: ok");
}
