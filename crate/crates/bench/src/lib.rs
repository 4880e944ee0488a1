//! Shared fixtures for the criterion benchmarks.

use ruled_core::{BundleModel, CurvePoint, DivisorClass, EllipticCurve, Fp};

pub fn bench_curve() -> EllipticCurve {
    EllipticCurve::new(11, -1, 0).expect("y^2 = x^3 - x is smooth over F_11")
}

/// A degree-two decomposable model over the bench curve.
pub fn bench_model() -> BundleModel {
    let curve = bench_curve();
    let s = CurvePoint::Affine(Fp::new(4, 11), Fp::new(4, 11));
    BundleModel::decomposable(curve, DivisorClass { degree: 2, sum: s })
        .expect("decomposable model of degree 2")
}
