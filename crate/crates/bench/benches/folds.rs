use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use nestfold_bench::{bush1, schema, testdata};
use nestfold_core::analysis::IndexExpr;
use nestfold_core::derive::{derive, DeriveOptions};
use nestfold_core::emit::{emit_agda, EmitModule};
use nestfold_core::runtime::algebra;
use nestfold_core::runtime::direct::{h_catalogue, identity_continuation, sum_aux};
use nestfold_core::runtime::{
    enumerate_values, eval_hfold_direct, eval_hfold_via_nfold, eval_nfold, eval_nfold_prime, run_suite, SuiteConfig,
};
use nestfold_core::syntax::{parse_program, Payload};

fn front_end(c: &mut Criterion) {
    let text = std::fs::read_to_string(testdata("bobdylan.ndt")).unwrap();
    c.bench_function("parse bobdylan.ndt", |b| {
        b.iter(|| parse_program(black_box(&text), "bobdylan.ndt"))
    });
    for (file, nat) in [("bush.ndt", true), ("bobdylan.ndt", false)] {
        let s = schema(file);
        c.bench_function(&format!("derive and emit {file}"), |b| {
            b.iter(|| {
                let d = derive(black_box(&s), DeriveOptions { nat_index: nat }).unwrap();
                emit_agda(&EmitModule::from_derivation(&d, file)).unwrap()
            })
        });
    }
}

fn folds(c: &mut Criterion) {
    let s = schema("bush.ndt");
    let v = bush1();
    let idx = IndexExpr::iterate(0, 1);
    let sum = algebra::sum(&s);
    let mut g = c.benchmark_group("sum of bush1");
    g.bench_function("nfold", |b| {
        b.iter(|| eval_nfold(&s, &sum, &idx, black_box(&v)).unwrap())
    });
    g.bench_function("nfold'", |b| {
        b.iter(|| eval_nfold_prime(&s, &sum, &idx, black_box(&v)).unwrap())
    });
    g.bench_function("sumAux via nfold", |b| {
        b.iter(|| {
            eval_hfold_via_nfold(&s, &sum_aux(), black_box(&v))
                .and_then(|r| r.apply(identity_continuation()))
                .unwrap()
        })
    });
    let hsum = h_catalogue().remove(0);
    g.bench_function("literal hfold", |b| {
        b.iter(|| eval_hfold_direct(&s, &hsum, black_box(&v)).unwrap())
    });
    g.finish();
}

fn enumeration(c: &mut Criterion) {
    let s = schema("bush.ndt");
    let bases = vec![(0..3).map(Payload::Nat).collect::<Vec<_>>()];
    c.bench_function("enumerate bushes, size 9", |b| {
        b.iter(|| enumerate_values(&s, &IndexExpr::iterate(0, 1), &bases, black_box(9)))
    });
    let mut g = c.benchmark_group("suite");
    g.sample_size(10);
    g.bench_function("bush, size 7", |b| {
        b.iter(|| run_suite(&s, &SuiteConfig::new(&s, black_box(7))))
    });
    g.finish();
}

criterion_group!(benches, front_end, folds, enumeration);
criterion_main!(benches);
