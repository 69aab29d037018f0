use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use qcanon_core::adapted::{bz_verify, cone};
use qcanon_core::cartan::{RootVec, Weight};
use qcanon_core::crystal::ModuleCrystal;
use qcanon_core::session::Session;

// Each iteration starts from a fresh session so memo tables do not hide the work.

fn slices(c: &mut Criterion) {
    let mut g = c.benchmark_group("dual_canonical_slice");
    for (t, w, beta) in [("A2", "121", vec![2, 2]), ("B2", "2121", vec![2, 3]), ("G2", "121212", vec![2, 3])] {
        let beta = RootVec(beta);
        g.bench_with_input(BenchmarkId::new(t, &beta), &beta, |b, beta| {
            b.iter(|| {
                let s = Session::parse(t, beta.height()).unwrap();
                s.basis_for(w).unwrap().dual_canonical_slice(beta).unwrap()
            })
        });
    }
    g.finish();
}

fn verification(c: &mut Criterion) {
    let mut g = c.benchmark_group("verification");
    g.sample_size(10);
    g.bench_function("bz A2 height 4", |b| {
        b.iter(|| {
            let s = Session::parse("A2", 4).unwrap();
            bz_verify(&s.basis_for("121").unwrap(), 4).unwrap()
        })
    });
    g.bench_function("cone B2 2121/1212", |b| {
        b.iter(|| {
            let s = Session::parse("B2", 8).unwrap();
            cone(&s.basis_for("2121").unwrap(), &s.basis_for("1212").unwrap()).unwrap()
        })
    });
    g.finish();
}

fn crystals(c: &mut Criterion) {
    let mut g = c.benchmark_group("crystal_graph");
    g.sample_size(10);
    for (t, w, hw) in [("A2", "121", vec![1, 1]), ("B2", "2121", vec![1, 1])] {
        let lambda = Weight(hw);
        g.bench_with_input(BenchmarkId::new(t, &lambda), &lambda, |b, lambda| {
            b.iter(|| {
                let s = Session::parse(t, 6).unwrap();
                let cb = s.basis_for(w).unwrap();
                ModuleCrystal::new(cb, lambda.clone(), 6).unwrap().graph().unwrap()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, slices, verification, crystals);
criterion_main!(benches);
