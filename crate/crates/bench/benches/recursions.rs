use std::sync::atomic::{AtomicI64, Ordering};

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use hypvol::exactmath::{int, rat};
use hypvol::intersections::IntersectionTable;
use hypvol::volumes::{profiles, v_eval};
use hypvol::Rational;

fn intersections(c: &mut Criterion) {
    c.bench_function("psi g=3 <τ4 τ3 τ2> cold", |b| {
        b.iter(|| IntersectionTable::new().psi(3, black_box(&[4, 3, 2])).unwrap())
    });
    c.bench_function("kappa g=2 <κ1^3 τ1 τ1> cold", |b| {
        b.iter(|| IntersectionTable::new().kappa_psi(2, black_box(&[1, 1]), 3).unwrap())
    });
}

/// A head never seen before, so the profile memo always misses.
fn fresh_head(len: usize) -> Vec<Rational> {
    static NEXT: AtomicI64 = AtomicI64::new(3);
    let k = NEXT.fetch_add(1, Ordering::Relaxed);
    (0..len).map(|j| rat(1, 4 * k + j as i64)).collect()
}

fn volumes(c: &mut Criterion) {
    let mut group = c.benchmark_group("profile build");
    group.sample_size(10);
    for (g, n) in [(0u32, 4usize), (0, 5), (1, 2), (1, 3)] {
        group.bench_function(format!("({g},{n})"), |b| b.iter(|| profiles(g, n, &fresh_head(n - 1))));
    }
    group.finish();
    let a = [rat(1, 5), rat(1, 3), rat(2, 5), int(1)];
    v_eval(0, &a).unwrap();
    c.bench_function("v_eval (0,4) memoized", |b| b.iter(|| v_eval(0, black_box(&a)).unwrap()));
}

criterion_group!(benches, intersections, volumes);
criterion_main!(benches);
