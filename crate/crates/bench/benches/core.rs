use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use jd_core::diagram::enumerate::{enumerate, Constraints};
use jd_core::lab::{pairing_element, pairing_spec, TreeIndex};
use jd_core::maps::{chi, pbw_inverse};
use jd_core::{canonicalize, ContextSpec, DiagramVector, QuotientContext, Skeleton};

fn canonical_forms(c: &mut Criterion) {
    let gens = enumerate(Skeleton::Circles(3), 3, &Constraints::default(), None).unwrap();
    c.bench_function("canonicalize C3 degree 3", |b| {
        b.iter(|| {
            for g in &gens {
                black_box(canonicalize(g.diagram()));
            }
        })
    });
}

fn enumeration(c: &mut Criterion) {
    c.bench_function("enumerate C2 degree 3", |b| {
        b.iter(|| black_box(enumerate(Skeleton::Circles(2), 3, &Constraints::default(), None).unwrap()))
    });
}

fn quotients(c: &mut Criterion) {
    let mut g = c.benchmark_group("quotient");
    g.sample_size(10);
    g.bench_function("C2 degree 3", |b| {
        b.iter(|| black_box(QuotientContext::full(ContextSpec::standard(Skeleton::Circles(2), 3), None).unwrap().dimension()))
    });
    g.bench_function("C3 degree 4", |b| b.iter(|| black_box(QuotientContext::full(pairing_spec(2), None).unwrap().dimension())));
    g.finish();
}

fn pbw(c: &mut Criterion) {
    let gens = enumerate(Skeleton::Intervals(2), 3, &Constraints::default(), None).unwrap();
    c.bench_function("pbw inverse I2 degree 3", |b| {
        b.iter(|| {
            for g in &gens {
                black_box(pbw_inverse(&DiagramVector::basis(g)).unwrap());
            }
        })
    });
    let open = enumerate(Skeleton::Colors(3), 3, &Constraints::default(), None).unwrap();
    c.bench_function("chi O3 degree 3", |b| {
        b.iter(|| {
            for x in &open {
                black_box(chi(&DiagramVector::basis(x), 3).unwrap());
            }
        })
    });
}

fn pairing(c: &mut Criterion) {
    let i = TreeIndex::identity(3).unwrap();
    c.bench_function("pairing element n=3", |b| b.iter(|| black_box(pairing_element(&i, &i).unwrap())));
}

criterion_group!(benches, canonical_forms, enumeration, quotients, pbw, pairing);
criterion_main!(benches);
