//! Exact calculator for geometrically ruled surfaces over an elliptic
//! curve: one-chart bundle models with rational-function transitions,
//! self-intersection and Segre invariants, elementary transformations
//! on both models and isomorphism classes, descent chains, and the
//! atlas of connected automorphism groups.
//!
//! Everything is exact arithmetic over a prime field F_p, p > 3; no
//! floating point enters anywhere.

pub mod aut;
pub mod bundle;
pub mod curve;
pub mod descriptor;
pub mod divisor;
pub mod error;
pub mod field;
pub mod function;
pub mod matrix;
pub mod poly;
pub mod ratfn;
pub mod search;
pub mod text;
pub mod transform;

pub use aut::{
    aut_of_bundle, classify_theorem_d, delta_kernel_check, maximality_certificate,
    AutDescription, AutKernel, AutQuotient, DeltaKernelReport, RationalMinimalKind, Splits,
    SurfaceClass,
};
pub use bundle::{
    germ_power, BundleModel, BundleSection, FiberPoint, GaugeTransformation,
};
pub use curve::{CurveAutomorphism, CurvePoint, EllipticCurve, TwoTorsion};
pub use descriptor::{
    canonicalize, descriptor_of_model, descriptor_of_model_with_budget, ConjugacyVerdict,
    MinimalSectionCount, SurfaceDescriptor,
};
pub use divisor::{Divisor, DivisorClass};
pub use error::{
    ArithError, AutError, BundleError, CurveError, DescriptorError, ParseError, TransformError,
};
pub use field::Fp;
pub use function::{line_through, CurveFunction};
pub use matrix::FnMatrix;
pub use poly::{Degree, Poly};
pub use ratfn::RatFn;
pub use search::{SegreSearchResult, DEFAULT_SEARCH_BUDGET, MAX_CERTIFIED_PRIME};
pub use text::{
    curvefn_to_string, parse_curve, parse_curvefn, parse_divisor, parse_point, parse_ratfn,
    poly_to_string, ratfn_to_string,
};
pub use transform::{
    build_atiyah, chain_theorem_a, crosscheck_elm, elm_descriptor, parse_elm_point,
    ChainCenters, ChainCertificate, ChainStep, CrosscheckReport, ElmLocation, ElmOutcome,
    ElmPoint, ElmResult,
};
