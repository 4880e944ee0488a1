use criterion::{criterion_group, criterion_main, Criterion};

use ruled_bench::{bench_curve, bench_model};
use ruled_core::{
    chain_theorem_a, BundleSection, ChainCenters, CurvePoint, Divisor, DivisorClass, Fp,
    SurfaceDescriptor,
};

fn group_law(c: &mut Criterion) {
    let curve = bench_curve();
    let points = curve.points();
    c.bench_function("curve point addition sweep", |b| {
        b.iter(|| {
            let mut acc = CurvePoint::Infinity;
            for pt in &points {
                acc = curve.add_unchecked(acc, *pt);
            }
            acc
        })
    });
}

fn principal_divisor_round_trip(c: &mut Criterion) {
    let curve = bench_curve();
    let p1 = CurvePoint::Affine(Fp::new(4, 11), Fp::new(4, 11));
    let p2 = CurvePoint::Affine(Fp::new(0, 11), Fp::new(0, 11));
    let sum = curve.add_points(p1, p2).unwrap();
    let mut d = Divisor::single(p1, 1);
    d.add(p2, 1);
    d.add(sum, -1);
    d.add(CurvePoint::Infinity, -1);
    c.bench_function("function_with_divisor + divisor", |b| {
        b.iter(|| {
            let f = curve.function_with_divisor(&d).unwrap();
            f.divisor().unwrap()
        })
    });
}

fn self_intersection(c: &mut Criterion) {
    let model = bench_model();
    let s = BundleSection::constant(model.curve(), Fp::new(3, 11));
    c.bench_function("section self-intersection", |b| {
        b.iter(|| model.self_intersection(&s).unwrap())
    });
}

fn segre_search(c: &mut Criterion) {
    let model = bench_model();
    c.bench_function("segre search, degree-two split model", |b| {
        b.iter(|| model.segre_search().unwrap().segre)
    });
}

fn descent_chain(c: &mut Criterion) {
    let curve = bench_curve();
    let s = CurvePoint::Affine(Fp::new(4, 11), Fp::new(4, 11));
    let start = SurfaceDescriptor::decomposable(curve, DivisorClass { degree: 1, sum: s });
    c.bench_function("ten-step descent chain", |b| {
        b.iter(|| chain_theorem_a(&start, 10, &ChainCenters::Seeded(7)).unwrap())
    });
}

criterion_group!(
    benches,
    group_law,
    principal_divisor_round_trip,
    self_intersection,
    segre_search,
    descent_chain
);
criterion_main!(benches);
