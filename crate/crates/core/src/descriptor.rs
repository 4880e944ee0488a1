//! Classification descriptors for geometrically ruled surfaces.
//!
//! Over an elliptic base every ruled surface is the trivial bundle, a
//! decomposable bundle `P(O + M)`, or one of the two indecomposable bundles
//! (Atiyah's classification); over a rational base the Hirzebruch surfaces
//! play the same role.  A descriptor is the discrete classification datum,
//! with the Segre invariant and minimal-section census derivable from it,
//! and with isomorphism decidable by finite group-theoretic search.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bundle::BundleModel;
use crate::curve::{CurvePoint, EllipticCurve};
use crate::divisor::DivisorClass;
use crate::error::{BundleError, DescriptorError, ParseError};
use crate::search::DEFAULT_SEARCH_BUDGET;
use crate::text;

/// Canonical representative of the pair {M, -M}: the one of nonnegative
/// degree, and at degree zero the one with the lexicographically smaller
/// sum point.  `P(O + M)` and `P(O + (-M))` present the same surface, so
/// descriptors only ever store the canonical choice.
pub fn canonicalize(curve: &EllipticCurve, m: DivisorClass) -> DivisorClass {
    let neg = curve.class_scale(-1, m);
    if m.degree > 0 {
        m
    } else if m.degree < 0 {
        neg
    } else if neg.sum < m.sum {
        neg
    } else {
        m
    }
}

/// Number of sections realizing the Segre invariant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MinimalSectionCount {
    One,
    ExactlyTwo,
    InfinitelyMany,
    Undetermined,
}

impl fmt::Display for MinimalSectionCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MinimalSectionCount::One => "one",
            MinimalSectionCount::ExactlyTwo => "exactly two",
            MinimalSectionCount::InfinitelyMany => "infinitely many",
            MinimalSectionCount::Undetermined => "undetermined",
        };
        f.write_str(s)
    }
}

/// Discrete classification datum of a ruled surface.
///
/// Elliptic-base variants carry their curve; `Decomposable` additionally
/// carries the canonical class of `M` in `P(O + M)` (nonnegative degree,
/// never the trivial class — that collapses to `TrivialBundle`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SurfaceDescriptor {
    TrivialBundle(EllipticCurve),
    Decomposable(EllipticCurve, DivisorClass),
    Atiyah0(EllipticCurve),
    Atiyah1(EllipticCurve),
    Hirzebruch(u32),
    GenusAtLeastTwoTrivial(u32),
}

/// Conjugacy decision together with the warning raised when a compared
/// class is not among the maximal automorphism classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjugacyVerdict {
    pub conjugate: bool,
    pub non_maximal_warning: Option<String>,
}

impl SurfaceDescriptor {
    /// Decomposable descriptor in canonical form; the trivial class
    /// collapses to `TrivialBundle`.
    pub fn decomposable(curve: EllipticCurve, m: DivisorClass) -> SurfaceDescriptor {
        let canon = canonicalize(&curve, m);
        if canon.is_trivial() {
            SurfaceDescriptor::TrivialBundle(curve)
        } else {
            SurfaceDescriptor::Decomposable(curve, canon)
        }
    }

    pub fn base_curve(&self) -> Option<&EllipticCurve> {
        match self {
            SurfaceDescriptor::TrivialBundle(c)
            | SurfaceDescriptor::Decomposable(c, _)
            | SurfaceDescriptor::Atiyah0(c)
            | SurfaceDescriptor::Atiyah1(c) => Some(c),
            SurfaceDescriptor::Hirzebruch(_) | SurfaceDescriptor::GenusAtLeastTwoTrivial(_) => {
                None
            }
        }
    }

    /// Minimum self-intersection over all sections.
    pub fn segre(&self) -> i64 {
        match self {
            SurfaceDescriptor::TrivialBundle(_) => 0,
            SurfaceDescriptor::Decomposable(_, m) => -m.degree,
            SurfaceDescriptor::Atiyah0(_) => 0,
            SurfaceDescriptor::Atiyah1(_) => 1,
            SurfaceDescriptor::Hirzebruch(n) => -i64::from(*n),
            SurfaceDescriptor::GenusAtLeastTwoTrivial(_) => 0,
        }
    }

    pub fn minimal_section_count(&self) -> MinimalSectionCount {
        match self {
            SurfaceDescriptor::TrivialBundle(_) => MinimalSectionCount::InfinitelyMany,
            SurfaceDescriptor::Decomposable(_, m) => {
                if m.degree > 0 {
                    MinimalSectionCount::One
                } else {
                    MinimalSectionCount::ExactlyTwo
                }
            }
            SurfaceDescriptor::Atiyah0(_) => MinimalSectionCount::One,
            SurfaceDescriptor::Atiyah1(_) => MinimalSectionCount::Undetermined,
            SurfaceDescriptor::Hirzebruch(0) => MinimalSectionCount::InfinitelyMany,
            SurfaceDescriptor::Hirzebruch(_) => MinimalSectionCount::One,
            SurfaceDescriptor::GenusAtLeastTwoTrivial(_) => MinimalSectionCount::InfinitelyMany,
        }
    }

    /// Whether the identity component of the automorphism group is maximal
    /// among connected algebraic subgroups of the birational group.
    pub fn has_maximal_aut(&self) -> bool {
        match self {
            SurfaceDescriptor::TrivialBundle(_)
            | SurfaceDescriptor::Atiyah0(_)
            | SurfaceDescriptor::Atiyah1(_)
            | SurfaceDescriptor::GenusAtLeastTwoTrivial(_) => true,
            SurfaceDescriptor::Decomposable(_, m) => m.degree == 0,
            SurfaceDescriptor::Hirzebruch(n) => *n != 1,
        }
    }

    /// Isomorphism of the underlying surfaces.  Base isomorphisms are
    /// translations composed with origin-fixing automorphisms, under which
    /// the class of a degree-d decomposable moves by alpha(s) plus any
    /// point of the subgroup d*E; degree-0 classes therefore only move
    /// through alpha.
    pub fn is_isomorphic(&self, other: &SurfaceDescriptor) -> Result<bool, DescriptorError> {
        use SurfaceDescriptor::*;
        match (self, other) {
            (Hirzebruch(n), Hirzebruch(m)) => return Ok(n == m),
            (GenusAtLeastTwoTrivial(g), GenusAtLeastTwoTrivial(h)) => return Ok(g == h),
            _ => {}
        }
        let (c1, c2) = match (self.base_curve(), other.base_curve()) {
            (Some(c1), Some(c2)) => (c1, c2),
            // one side elliptic, the other rational/higher-genus
            _ => return Ok(false),
        };
        if c1 != c2 {
            return Err(DescriptorError::BaseMismatch);
        }
        match (self, other) {
            (TrivialBundle(_), TrivialBundle(_))
            | (Atiyah0(_), Atiyah0(_))
            | (Atiyah1(_), Atiyah1(_)) => Ok(true),
            (Decomposable(curve, m1), Decomposable(_, m2)) => {
                if m1.degree != m2.degree {
                    return Ok(false);
                }
                let reachable = translation_twists(curve, m1.degree)?;
                for alpha in curve.automorphisms() {
                    let img = alpha.apply(m1.sum);
                    let diff = curve.sub_points(m2.sum, img)?;
                    if reachable.contains(&diff) {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            _ => Ok(false),
        }
    }

    /// Conjugacy of the identity components inside the birational group.
    /// For the maximal classes this coincides with surface isomorphism;
    /// outside them the same answer is returned, flagged as non-maximal.
    pub fn is_conjugate_aut(
        &self,
        other: &SurfaceDescriptor,
    ) -> Result<ConjugacyVerdict, DescriptorError> {
        let conjugate = self.is_isomorphic(other)?;
        let offenders: Vec<String> = [self, other]
            .iter()
            .filter(|d| !d.has_maximal_aut())
            .map(|d| d.to_string())
            .collect();
        let non_maximal_warning = if offenders.is_empty() {
            None
        } else {
            Some(format!(
                "automorphism class is not maximal for: {}",
                offenders.join(", ")
            ))
        };
        Ok(ConjugacyVerdict { conjugate, non_maximal_warning })
    }

    /// Parse the textual form (`T`, `D(d; s=(x,y))`, `A0`, `A1`, `F<n>`,
    /// `G<g>`).  Elliptic tags need the ambient curve.
    pub fn parse(s: &str, curve: Option<&EllipticCurve>) -> Result<SurfaceDescriptor, ParseError> {
        let s = s.trim();
        let need_curve = || {
            curve.copied().ok_or_else(|| {
                ParseError::Syntax("descriptor needs a base curve declaration".into())
            })
        };
        match s {
            "T" => return Ok(SurfaceDescriptor::TrivialBundle(need_curve()?)),
            "A0" => return Ok(SurfaceDescriptor::Atiyah0(need_curve()?)),
            "A1" => return Ok(SurfaceDescriptor::Atiyah1(need_curve()?)),
            _ => {}
        }
        if let Some(num) = s.strip_prefix('F') {
            let n: u32 = num
                .parse()
                .map_err(|_| ParseError::Syntax(format!("bad Hirzebruch index: {num:?}")))?;
            return Ok(SurfaceDescriptor::Hirzebruch(n));
        }
        if let Some(num) = s.strip_prefix('G') {
            let g: u32 = num
                .parse()
                .map_err(|_| ParseError::Syntax(format!("bad genus tag: {num:?}")))?;
            if g < 2 {
                return Err(ParseError::Syntax(format!("genus tag must be >= 2, got {g}")));
            }
            return Ok(SurfaceDescriptor::GenusAtLeastTwoTrivial(g));
        }
        let inner = s
            .strip_prefix("D(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| ParseError::Syntax(format!("unrecognized descriptor: {s:?}")))?;
        let (deg_part, s_part) = inner
            .split_once(';')
            .ok_or_else(|| ParseError::Syntax("expected `D(d; s=<point>)`".into()))?;
        let degree: i64 = deg_part
            .trim()
            .parse()
            .map_err(|_| ParseError::Syntax(format!("bad degree: {:?}", deg_part.trim())))?;
        if degree < 0 {
            return Err(ParseError::Syntax("canonical degree must be >= 0".into()));
        }
        let pt_src = s_part
            .trim()
            .strip_prefix("s=")
            .ok_or_else(|| ParseError::Syntax("expected `s=<point>`".into()))?;
        let curve = need_curve()?;
        let sum = text::parse_point(pt_src, &curve)?;
        let class = DivisorClass { degree, sum };
        if class.is_trivial() {
            return Err(ParseError::Syntax(
                "trivial class: write the descriptor as `T`".into(),
            ));
        }
        Ok(SurfaceDescriptor::decomposable(curve, class))
    }
}

impl fmt::Display for SurfaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceDescriptor::TrivialBundle(_) => f.write_str("T"),
            SurfaceDescriptor::Decomposable(_, m) => {
                write!(f, "D({}; s={})", m.degree, m.sum)
            }
            SurfaceDescriptor::Atiyah0(_) => f.write_str("A0"),
            SurfaceDescriptor::Atiyah1(_) => f.write_str("A1"),
            SurfaceDescriptor::Hirzebruch(n) => write!(f, "F{n}"),
            SurfaceDescriptor::GenusAtLeastTwoTrivial(g) => write!(f, "G{g}"),
        }
    }
}

/// The subgroup of points reachable as d*c while c runs over the rational
/// points — the translation twists available to a degree-d class.
fn translation_twists(
    curve: &EllipticCurve,
    degree: i64,
) -> Result<BTreeSet<CurvePoint>, DescriptorError> {
    let mut out = BTreeSet::new();
    if degree == 0 {
        out.insert(CurvePoint::Infinity);
        return Ok(out);
    }
    for pt in curve.points() {
        out.insert(curve.scalar_mul(degree, pt)?);
    }
    Ok(out)
}

/// Classify a one-chart model by certified Segre search: the sign of the
/// invariant plus the minimal-section census pick out the descriptor, and
/// the subbundle classes of the witnesses recover the decomposable class
/// (as 2*L - det, which cancels any line-bundle twist of the presentation).
pub fn descriptor_of_model(m: &BundleModel) -> Result<SurfaceDescriptor, DescriptorError> {
    descriptor_of_model_with_budget(m, DEFAULT_SEARCH_BUDGET)
}

pub fn descriptor_of_model_with_budget(
    m: &BundleModel,
    budget: u64,
) -> Result<SurfaceDescriptor, DescriptorError> {
    let curve = m.curve();
    let res = match m.segre_search_with_budget(budget) {
        Ok(r) => r,
        Err(BundleError::BudgetExhausted(b)) => {
            return Err(DescriptorError::BudgetExceeded(format!(
                "Segre search exhausted its budget of {b} candidates"
            )))
        }
        Err(e) => return Err(e.into()),
    };
    match res.segre {
        s if s < 0 => {
            let witness = &res.minimal[0];
            let sub = m.line_subbundle_class(witness)?;
            let m_class = curve.class_sub(curve.class_add(sub, sub), m.det_class());
            debug_assert_eq!(m_class.degree, -s);
            Ok(SurfaceDescriptor::decomposable(curve, m_class))
        }
        0 => {
            if !res.count_certified {
                return Err(DescriptorError::BudgetExceeded(format!(
                    "minimal-section census not certified within budget {budget}"
                )));
            }
            match res.minimal.len() {
                1 => Ok(SurfaceDescriptor::Atiyah0(curve)),
                2 => {
                    let s1 = m.line_subbundle_class(&res.minimal[0])?;
                    let s2 = m.line_subbundle_class(&res.minimal[1])?;
                    let diff = curve.class_sub(s1, s2);
                    if diff.is_trivial() {
                        return Err(DescriptorError::Undetermined(
                            "two minimal sections with equal subbundle classes".into(),
                        ));
                    }
                    Ok(SurfaceDescriptor::decomposable(curve, diff))
                }
                _ => Ok(SurfaceDescriptor::TrivialBundle(curve)),
            }
        }
        1 => Ok(SurfaceDescriptor::Atiyah1(curve)),
        s => Err(DescriptorError::Undetermined(format!(
            "Segre invariant {s} is outside the classification range over an elliptic base"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn curve() -> EllipticCurve {
        EllipticCurve::new(11, -1, 0).unwrap()
    }

    fn pt(curve: &EllipticCurve, i: usize) -> CurvePoint {
        let pts = curve.points();
        pts[i % pts.len()]
    }

    #[test]
    fn segre_table() {
        let e = curve();
        let z = e.point(0, 0).unwrap();
        let s = e.point(4, 4).unwrap();
        assert_eq!(SurfaceDescriptor::TrivialBundle(e).segre(), 0);
        let d1 = SurfaceDescriptor::decomposable(e, DivisorClass { degree: 1, sum: z });
        assert_eq!(d1.segre(), -1);
        let d0 = SurfaceDescriptor::decomposable(e, DivisorClass { degree: 0, sum: s });
        assert_eq!(d0.segre(), 0);
        assert_eq!(SurfaceDescriptor::Atiyah0(e).segre(), 0);
        assert_eq!(SurfaceDescriptor::Atiyah1(e).segre(), 1);
        assert_eq!(SurfaceDescriptor::Hirzebruch(3).segre(), -3);
    }

    #[test]
    fn minimal_counts_follow_the_census_table() {
        let e = curve();
        let z = e.point(0, 0).unwrap();
        assert_eq!(
            SurfaceDescriptor::TrivialBundle(e).minimal_section_count(),
            MinimalSectionCount::InfinitelyMany
        );
        let d3 = SurfaceDescriptor::decomposable(e, DivisorClass { degree: 3, sum: z });
        assert_eq!(d3.minimal_section_count(), MinimalSectionCount::One);
        let d0 = SurfaceDescriptor::decomposable(e, DivisorClass { degree: 0, sum: z });
        assert_eq!(d0.minimal_section_count(), MinimalSectionCount::ExactlyTwo);
        assert_eq!(
            SurfaceDescriptor::Atiyah0(e).minimal_section_count(),
            MinimalSectionCount::One
        );
        assert_eq!(
            SurfaceDescriptor::Atiyah1(e).minimal_section_count(),
            MinimalSectionCount::Undetermined
        );
        assert_eq!(
            SurfaceDescriptor::Hirzebruch(0).minimal_section_count(),
            MinimalSectionCount::InfinitelyMany
        );
    }

    #[test]
    fn trivial_class_collapses() {
        let e = curve();
        let d = SurfaceDescriptor::decomposable(e, DivisorClass::trivial());
        assert_eq!(d, SurfaceDescriptor::TrivialBundle(e));
    }

    proptest! {
        #[test]
        fn canonicalize_is_idempotent_and_sign_blind(deg in -4i64..=4, idx in 0usize..40) {
            let e = curve();
            let m = DivisorClass { degree: deg, sum: pt(&e, idx) };
            let neg = e.class_scale(-1, m);
            let c1 = canonicalize(&e, m);
            prop_assert_eq!(canonicalize(&e, c1), c1);
            prop_assert_eq!(canonicalize(&e, neg), c1);
            prop_assert!(c1.degree >= 0);
        }

        #[test]
        fn is_isomorphic_is_reflexive_and_symmetric(deg in 0i64..=3, i in 0usize..40, j in 0usize..40) {
            let e = curve();
            let d1 = SurfaceDescriptor::decomposable(e, DivisorClass { degree: deg, sum: pt(&e, i) });
            let d2 = SurfaceDescriptor::decomposable(e, DivisorClass { degree: deg, sum: pt(&e, j) });
            prop_assert!(d1.is_isomorphic(&d1).unwrap());
            prop_assert_eq!(d1.is_isomorphic(&d2).unwrap(), d2.is_isomorphic(&d1).unwrap());
        }
    }

    #[test]
    fn isomorphism_decisions() {
        let e = curve();
        let s = e.point(4, 4).unwrap();
        let neg_s = e.negate(s);
        let m = DivisorClass { degree: 0, sum: s };
        let d = SurfaceDescriptor::decomposable(e, m);
        let d_neg = SurfaceDescriptor::decomposable(e, DivisorClass { degree: 0, sum: neg_s });
        assert!(d.is_isomorphic(&d_neg).unwrap());

        assert!(!SurfaceDescriptor::Atiyah0(e)
            .is_isomorphic(&SurfaceDescriptor::Atiyah1(e))
            .unwrap());

        // degree 1: every class is a translation twist of every other
        let z1 = e.point(0, 0).unwrap();
        let d1 = SurfaceDescriptor::decomposable(e, DivisorClass { degree: 1, sum: z1 });
        let d1b = SurfaceDescriptor::decomposable(e, DivisorClass { degree: 1, sum: s });
        assert!(d1.is_isomorphic(&d1b).unwrap());
        assert!(!d1.is_isomorphic(&d).unwrap());

        let other = EllipticCurve::new(13, -1, 0).unwrap();
        let err = SurfaceDescriptor::TrivialBundle(e)
            .is_isomorphic(&SurfaceDescriptor::TrivialBundle(other));
        assert_eq!(err, Err(DescriptorError::BaseMismatch));

        assert!(!SurfaceDescriptor::Hirzebruch(2)
            .is_isomorphic(&SurfaceDescriptor::TrivialBundle(e))
            .unwrap());
    }

    #[test]
    fn conjugacy_wraps_isomorphism_with_warnings() {
        let e = curve();
        let z = e.point(0, 0).unwrap();
        let a0 = SurfaceDescriptor::Atiyah0(e);
        let a1 = SurfaceDescriptor::Atiyah1(e);
        let v = a0.is_conjugate_aut(&a1).unwrap();
        assert!(!v.conjugate);
        assert!(v.non_maximal_warning.is_none());

        let d3 = SurfaceDescriptor::decomposable(e, DivisorClass { degree: 3, sum: z });
        let v = d3.is_conjugate_aut(&d3).unwrap();
        assert!(v.conjugate);
        assert!(v.non_maximal_warning.is_some());
    }

    #[test]
    fn display_parse_round_trip() {
        let e = curve();
        let z = e.point(0, 0).unwrap();
        let cases = [
            SurfaceDescriptor::TrivialBundle(e),
            SurfaceDescriptor::decomposable(e, DivisorClass { degree: 1, sum: z }),
            SurfaceDescriptor::decomposable(e, DivisorClass { degree: 2, sum: CurvePoint::Infinity }),
            SurfaceDescriptor::Atiyah0(e),
            SurfaceDescriptor::Atiyah1(e),
            SurfaceDescriptor::Hirzebruch(5),
            SurfaceDescriptor::GenusAtLeastTwoTrivial(2),
        ];
        for d in cases {
            let text = d.to_string();
            let back = SurfaceDescriptor::parse(&text, Some(&e)).unwrap();
            assert_eq!(back, d, "round trip failed for {text}");
        }
        assert!(SurfaceDescriptor::parse("D(1; s=(0,0))", None).is_err());
        assert!(SurfaceDescriptor::parse("D(0; s=O)", Some(&e)).is_err());
        assert!(SurfaceDescriptor::parse("Q7", Some(&e)).is_err());
    }

    #[test]
    fn models_classify_to_their_descriptors() {
        let e = curve();
        let z = e.point(0, 0).unwrap();
        let s = e.point(4, 4).unwrap();

        let m = BundleModel::trivial(e);
        assert_eq!(
            descriptor_of_model(&m).unwrap(),
            SurfaceDescriptor::TrivialBundle(e)
        );

        let c1 = DivisorClass { degree: 1, sum: z };
        let m1 = BundleModel::decomposable(e, c1).unwrap();
        assert_eq!(
            descriptor_of_model(&m1).unwrap(),
            SurfaceDescriptor::Decomposable(e, c1)
        );

        let c0 = DivisorClass { degree: 0, sum: s };
        let m0 = BundleModel::decomposable(e, c0).unwrap();
        assert_eq!(
            descriptor_of_model(&m0).unwrap(),
            SurfaceDescriptor::decomposable(e, c0)
        );
    }
}
