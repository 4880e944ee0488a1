//! One-chart models of geometrically ruled surfaces over an elliptic base.
//!
//! A model is a base chart (curve x P^1) together with finitely many special
//! points; at each special point z a transition matrix M_z translates base
//! chart fiber coordinates into the local chart at z. Only the germ of M_z
//! at z matters for the glued surface, so entries are global functions on
//! the curve and validity reduces to det(M_z) not vanishing identically.

use crate::curve::{CurvePoint, EllipticCurve};
use crate::divisor::{Divisor, DivisorClass};
use crate::error::{BundleError, ParseError};
use crate::field::Fp;
use crate::function::CurveFunction;
use crate::matrix::FnMatrix;
use crate::poly::Poly;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BundleModel {
    curve: EllipticCurve,
    special: Vec<CurvePoint>,
    transitions: Vec<FnMatrix>,
}

/// Fiber coordinate pair [u : v], normalized so the first nonzero entry is 1.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct FiberPoint {
    u: Fp,
    v: Fp,
}

impl FiberPoint {
    pub fn new(u: Fp, v: Fp) -> Result<Self, BundleError> {
        if u.is_zero() && v.is_zero() {
            return Err(BundleError::InvalidSection(
                "fiber point [0:0] is not projective".to_string(),
            ));
        }
        if !u.is_zero() {
            let ui = u.inv().unwrap();
            Ok(FiberPoint { u: Fp::one(u.modulus()), v: v * ui })
        } else {
            Ok(FiberPoint { u, v: Fp::one(v.modulus()) })
        }
    }

    pub fn infinity(p: u64) -> Self {
        FiberPoint { u: Fp::one(p), v: Fp::zero(p) }
    }

    pub fn u(&self) -> Fp {
        self.u
    }

    pub fn v(&self) -> Fp {
        self.v
    }
}

impl fmt::Display for FiberPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}]", self.u, self.v)
    }
}

/// Section of the bundle, as a fiber coordinate pair over the base chart.
/// Representatives are projective: (u, v) and (hu, hv) describe the same
/// section for any nonzero function h.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BundleSection {
    u: CurveFunction,
    v: CurveFunction,
}

impl BundleSection {
    pub fn new(u: CurveFunction, v: CurveFunction) -> Result<Self, BundleError> {
        if u.is_zero() && v.is_zero() {
            return Err(BundleError::InvalidSection(
                "both coordinates are the zero function".to_string(),
            ));
        }
        Ok(BundleSection { u, v })
    }

    /// The constant section [c : 1].
    pub fn constant(curve: EllipticCurve, c: Fp) -> Self {
        BundleSection {
            u: CurveFunction::constant(curve, c),
            v: CurveFunction::one(curve),
        }
    }

    /// The constant section [1 : 0].
    pub fn at_infinity(curve: EllipticCurve) -> Self {
        BundleSection {
            u: CurveFunction::one(curve),
            v: CurveFunction::zero(curve),
        }
    }

    pub fn u(&self) -> &CurveFunction {
        &self.u
    }

    pub fn v(&self) -> &CurveFunction {
        &self.v
    }

    pub fn is_projectively_equal(&self, other: &BundleSection) -> bool {
        (&(&self.u * &other.v) - &(&self.v * &other.u)).is_zero()
    }
}

/// Change of fiber coordinates: `base` acts on the base chart and each entry
/// of `locals` acts on the local chart at its point. Points missing from
/// `locals` reuse `base` (their chart is carved out of the base chart).
#[derive(Clone, Debug)]
pub struct GaugeTransformation {
    pub base: FnMatrix,
    pub locals: BTreeMap<CurvePoint, FnMatrix>,
}

impl GaugeTransformation {
    pub fn local_at(&self, z: &CurvePoint) -> &FnMatrix {
        self.locals.get(z).unwrap_or(&self.base)
    }

    /// second-after-first composition, with locals tabulated on `points`.
    pub fn compose(second: &Self, first: &Self, points: &[CurvePoint]) -> Self {
        let base = &second.base * &first.base;
        let mut locals = BTreeMap::new();
        for z in points {
            locals.insert(*z, second.local_at(z) * first.local_at(z));
        }
        GaugeTransformation { base, locals }
    }

    pub fn transform_section(&self, s: &BundleSection) -> Result<BundleSection, BundleError> {
        let (u, v) = self.base.apply(&s.u, &s.v);
        BundleSection::new(u, v)
    }
}

/// Smallest valuation among the two coordinates at pt; the zero function is
/// treated as having valuation +infinity.
fn min_valuation(f: &CurveFunction, g: &CurveFunction, pt: &CurvePoint) -> i64 {
    match (f.is_zero(), g.is_zero()) {
        (true, true) => unreachable!("projective pair cannot be (0, 0)"),
        (true, false) => g.valuation(pt).unwrap(),
        (false, true) => f.valuation(pt).unwrap(),
        (false, false) => f.valuation(pt).unwrap().min(g.valuation(pt).unwrap()),
    }
}

/// Rational x-coordinates where f could have a zero or pole. A superset of
/// the true support; callers evaluate valuations to filter.
fn support_x_candidates(f: &CurveFunction, out: &mut BTreeSet<u64>) {
    if f.is_zero() {
        return;
    }
    let n = f.norm();
    for poly in [f.a_part().den(), f.b_part().den(), n.num(), n.den()] {
        if poly.is_zero() {
            continue;
        }
        let (roots, _) = poly.roots();
        for (x0, _) in roots {
            out.insert(x0.value());
        }
    }
}

/// Rational-point support guard for the pair (u, v): errors when the pair
/// could have a pole or a common zero at an irrational point. Poles come
/// from component denominators; common zeros imply a common root of the two
/// norm numerators.
fn check_rational_pair_support(
    curve: &EllipticCurve,
    u: &CurveFunction,
    v: &CurveFunction,
) -> Result<(), BundleError> {
    let p = curve.modulus();
    let irrational_x_hits = |poly: &Poly| -> Result<(), BundleError> {
        if poly.is_zero() {
            return Ok(());
        }
        let (roots, cofactor) = poly.roots();
        if !cofactor.is_one() {
            return Err(crate::error::CurveError::NonRationalSupport.into());
        }
        for (x0, _) in roots {
            let rhs = curve.rhs_at(Fp::from_u64(x0.value(), p));
            if !rhs.is_zero() && rhs.sqrt().is_none() {
                return Err(crate::error::CurveError::NonRationalSupport.into());
            }
        }
        Ok(())
    };
    for f in [u, v] {
        if !f.is_zero() {
            irrational_x_hits(f.a_part().den())?;
            irrational_x_hits(f.b_part().den())?;
        }
    }
    if !u.is_zero() && !v.is_zero() {
        let g = u.norm().num().gcd(v.norm().num());
        irrational_x_hits(&g)?;
    } else {
        // a single-coordinate section: the full divisor must be rational
        let f = if u.is_zero() { v } else { u };
        f.divisor()?;
    }
    Ok(())
}

impl BundleModel {
    /// Builds a model; special points are sorted into canonical order with
    /// their transitions. Rejects shape mismatches, repeated points, points
    /// off the curve, and identically singular transitions.
    pub fn new(
        curve: EllipticCurve,
        special: Vec<CurvePoint>,
        transitions: Vec<FnMatrix>,
    ) -> Result<Self, BundleError> {
        if special.len() != transitions.len() {
            return Err(BundleError::ShapeMismatch(special.len(), transitions.len()));
        }
        let mut pairs: Vec<(CurvePoint, FnMatrix)> =
            special.into_iter().zip(transitions).collect();
        pairs.sort_by_key(|(pt, _)| *pt);
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(BundleError::DuplicateSpecial(format!("{}", w[0].0)));
            }
        }
        let mut special = Vec::with_capacity(pairs.len());
        let mut transitions = Vec::with_capacity(pairs.len());
        for (i, (pt, m)) in pairs.into_iter().enumerate() {
            curve.check(&pt)?;
            if m.det().is_zero() {
                return Err(BundleError::SingularTransition(i));
            }
            special.push(pt);
            transitions.push(m);
        }
        Ok(BundleModel { curve, special, transitions })
    }

    /// The trivial bundle: curve x P^1, no special points.
    pub fn trivial(curve: EllipticCurve) -> Self {
        BundleModel { curve, special: vec![], transitions: vec![] }
    }

    pub fn curve(&self) -> EllipticCurve {
        self.curve
    }

    pub fn special_points(&self) -> &[CurvePoint] {
        &self.special
    }

    pub fn transitions(&self) -> &[FnMatrix] {
        &self.transitions
    }

    pub fn special_index(&self, z: &CurvePoint) -> Option<usize> {
        self.special.iter().position(|p| p == z)
    }

    pub fn transition_at(&self, z: &CurvePoint) -> Option<&FnMatrix> {
        self.special_index(z).map(|i| &self.transitions[i])
    }

    /// Same bundle with z guaranteed to carry a chart (identity transition
    /// added when z was not special).
    pub fn with_chart_at(&self, z: CurvePoint) -> Result<BundleModel, BundleError> {
        if self.special_index(&z).is_some() {
            return Ok(self.clone());
        }
        self.curve.check(&z)?;
        let mut special = self.special.clone();
        let mut transitions = self.transitions.clone();
        special.push(z);
        transitions.push(FnMatrix::identity(self.curve));
        BundleModel::new(self.curve, special, transitions)
    }

    pub fn det_valuation_at(&self, i: usize) -> i64 {
        self.transitions[i].det().valuation(&self.special[i]).unwrap()
    }

    /// Divisor of the determinant line bundle in this model.
    pub fn det_divisor(&self) -> Divisor {
        let mut d = Divisor::new();
        for i in 0..self.special.len() {
            d.add(self.special[i], self.det_valuation_at(i));
        }
        d
    }

    pub fn det_degree(&self) -> i64 {
        self.det_divisor().degree()
    }

    pub fn det_class(&self) -> DivisorClass {
        self.curve.class_of(&self.det_divisor()).expect("special points lie on the curve")
    }

    /// Coordinates of the section in the chart at special index i.
    pub fn chart_rep(&self, s: &BundleSection, i: usize) -> (CurveFunction, CurveFunction) {
        self.transitions[i].apply(&s.u, &s.v)
    }

    /// Primitive fiber value of the section over pt, read in the local chart
    /// at pt when pt is special and in the base chart otherwise.
    pub fn section_value(&self, s: &BundleSection, pt: &CurvePoint) -> Result<FiberPoint, BundleError> {
        let (a, b) = match self.special_index(pt) {
            Some(i) => self.chart_rep(s, i),
            None => (s.u.clone(), s.v.clone()),
        };
        let m = min_valuation(&a, &b, pt);
        let a = a.mul_uniformizer_pow(pt, -m);
        let b = b.mul_uniformizer_pow(pt, -m);
        let av = a.eval(pt).expect("regular after shift");
        let bv = b.eval(pt).expect("regular after shift");
        FiberPoint::new(av, bv)
    }

    /// Divisor of the line subbundle generated by the section: pointwise
    /// minima of coordinate valuations, with local-chart coordinates used at
    /// special points. Depends on the representative only up to a principal
    /// divisor. Errors when the representative's support is irrational.
    pub fn line_subbundle_divisor(&self, s: &BundleSection) -> Result<Divisor, BundleError> {
        check_rational_pair_support(&self.curve, &s.u, &s.v)?;
        Ok(self.line_subbundle_divisor_rational(s))
    }

    /// Same as line_subbundle_divisor but silently restricted to rational
    /// points. Used by enumeration over pole-at-origin representatives, where
    /// skipped irrational contributions only ever overestimate sigma^2.
    pub(crate) fn line_subbundle_divisor_rational(&self, s: &BundleSection) -> Divisor {
        let p = self.curve.modulus();
        let mut xs = BTreeSet::new();
        support_x_candidates(&s.u, &mut xs);
        support_x_candidates(&s.v, &mut xs);
        let mut pts: BTreeSet<CurvePoint> = BTreeSet::new();
        pts.insert(CurvePoint::Infinity);
        for xv in xs {
            let x0 = Fp::from_u64(xv, p);
            let rhs = self.curve.rhs_at(x0);
            if rhs.is_zero() {
                pts.insert(CurvePoint::Affine(x0, Fp::zero(p)));
            } else if let Some(y0) = rhs.sqrt() {
                pts.insert(CurvePoint::Affine(x0, y0));
                pts.insert(CurvePoint::Affine(x0, -y0));
            }
        }
        let mut d = Divisor::new();
        for pt in pts {
            if self.special_index(&pt).is_some() {
                continue;
            }
            d.add(pt, min_valuation(&s.u, &s.v, &pt));
        }
        for (i, z) in self.special.iter().enumerate() {
            let (a, b) = self.chart_rep(s, i);
            d.add(*z, min_valuation(&a, &b, z));
        }
        d
    }

    pub fn line_subbundle_class(&self, s: &BundleSection) -> Result<DivisorClass, BundleError> {
        let d = self.line_subbundle_divisor(s)?;
        Ok(self.curve.class_of(&d)?)
    }

    /// Self-intersection by the valuation route:
    /// det degree minus twice the line subbundle degree.
    pub fn self_intersection_direct(&self, s: &BundleSection) -> Result<i64, BundleError> {
        let l = self.line_subbundle_divisor(s)?;
        Ok(self.det_degree() - 2 * l.degree())
    }

    pub(crate) fn self_intersection_rational(&self, s: &BundleSection) -> i64 {
        self.det_degree() - 2 * self.line_subbundle_divisor_rational(s).degree()
    }

    /// Self-intersection by the normalization route: move the section to
    /// [1:0], read off the diagonal valuations of the resulting triangular
    /// transitions, and sum their differences.
    pub fn self_intersection(&self, s: &BundleSection) -> Result<i64, BundleError> {
        let (model, _) = self.normalize_section_to_infinity(s)?;
        let mut total = 0;
        for (i, z) in model.special.iter().enumerate() {
            let alpha = model.transitions[i].at(0, 0);
            let beta = model.transitions[i].at(1, 1);
            total += beta.valuation(z).unwrap() - alpha.valuation(z).unwrap();
        }
        Ok(total)
    }

    /// Intersection number of two distinct sections. Computed from the
    /// numerical identity: det degree minus the two line subbundle degrees.
    pub fn intersection_number(
        &self,
        s1: &BundleSection,
        s2: &BundleSection,
    ) -> Result<i64, BundleError> {
        if s1.is_projectively_equal(s2) {
            return Err(BundleError::EqualSections);
        }
        let l1 = self.line_subbundle_divisor(s1)?;
        let l2 = self.line_subbundle_divisor(s2)?;
        Ok(self.det_degree() - l1.degree() - l2.degree())
    }

    /// Rational points where two sections meet, with local multiplicities.
    /// Errors when some intersection escapes to an irrational point (the
    /// local multiplicities then fail to account for the full number).
    pub fn intersection_points(
        &self,
        s1: &BundleSection,
        s2: &BundleSection,
    ) -> Result<Vec<(CurvePoint, i64)>, BundleError> {
        let total = self.intersection_number(s1, s2)?;
        let cross = &(&s1.u * &s2.v) - &(&s1.v * &s2.u);
        let mut xs = BTreeSet::new();
        support_x_candidates(&cross, &mut xs);
        support_x_candidates(&s1.u, &mut xs);
        support_x_candidates(&s1.v, &mut xs);
        support_x_candidates(&s2.u, &mut xs);
        support_x_candidates(&s2.v, &mut xs);
        let p = self.curve.modulus();
        let mut pts: BTreeSet<CurvePoint> = BTreeSet::new();
        pts.insert(CurvePoint::Infinity);
        for z in &self.special {
            pts.insert(*z);
        }
        for xv in xs {
            let x0 = Fp::from_u64(xv, p);
            let rhs = self.curve.rhs_at(x0);
            if rhs.is_zero() {
                pts.insert(CurvePoint::Affine(x0, Fp::zero(p)));
            } else if let Some(y0) = rhs.sqrt() {
                pts.insert(CurvePoint::Affine(x0, y0));
                pts.insert(CurvePoint::Affine(x0, -y0));
            }
        }
        let mut found = Vec::new();
        let mut sum = 0;
        for pt in pts {
            let mult = match self.special_index(&pt) {
                Some(i) => {
                    let (a1, b1) = self.chart_rep(s1, i);
                    let (a2, b2) = self.chart_rep(s2, i);
                    let cz = &(&a1 * &b2) - &(&b1 * &a2);
                    cz.valuation(&pt).unwrap()
                        - min_valuation(&a1, &b1, &pt)
                        - min_valuation(&a2, &b2, &pt)
                }
                None => {
                    cross.valuation(&pt).unwrap()
                        - min_valuation(&s1.u, &s1.v, &pt)
                        - min_valuation(&s2.u, &s2.v, &pt)
                }
            };
            debug_assert!(mult >= 0, "local intersection multiplicity at {pt}");
            if mult != 0 {
                found.push((pt, mult));
                sum += mult;
            }
        }
        if sum != total {
            return Err(crate::error::CurveError::NonRationalSupport.into());
        }
        Ok(found)
    }

    /// Equivalent model in which the given section reads [1:0] in every
    /// chart; all transitions become upper triangular. Charts are added at
    /// the zeros and poles of the section's coordinates.
    pub fn normalize_section_to_infinity(
        &self,
        s: &BundleSection,
    ) -> Result<(BundleModel, GaugeTransformation), BundleError> {
        check_rational_pair_support(&self.curve, &s.u, &s.v)?;
        let one = CurveFunction::one(self.curve);
        let zero = CurveFunction::zero(self.curve);
        let base = if !s.u.is_zero() {
            FnMatrix::new([
                [s.u.inv().unwrap(), zero.clone()],
                [-&s.v, s.u.clone()],
            ])
        } else {
            FnMatrix::new([
                [zero.clone(), s.v.inv().unwrap()],
                [s.v.clone(), zero.clone()],
            ])
        };

        let mut new_special: BTreeSet<CurvePoint> = self.special.iter().copied().collect();
        for f in [&s.u, &s.v] {
            if !f.is_zero() {
                for pt in f.divisor()?.support() {
                    new_special.insert(*pt);
                }
            }
        }

        let mut special = Vec::new();
        let mut transitions = Vec::new();
        let mut locals = BTreeMap::new();
        for z in new_special {
            let old = match self.special_index(&z) {
                Some(i) => self.transitions[i].clone(),
                None => FnMatrix::identity(self.curve),
            };
            let (a, b) = old.apply(&s.u, &s.v);
            let m = min_valuation(&a, &b, &z);
            let at = a.mul_uniformizer_pow(&z, -m);
            let bt = b.mul_uniformizer_pow(&z, -m);
            let a_unit = !at.is_zero() && !at.eval(&z).expect("regular after shift").is_zero();
            let local = if a_unit {
                FnMatrix::new([[one.clone(), zero.clone()], [-&bt, at.clone()]])
            } else {
                FnMatrix::new([[zero.clone(), one.clone()], [-&bt, at.clone()]])
            };
            let base_inv = base.inv().unwrap();
            transitions.push(&(&local * &old) * &base_inv);
            locals.insert(z, local);
            special.push(z);
        }
        let model = BundleModel::new(self.curve, special, transitions)?;
        Ok((model, GaugeTransformation { base, locals }))
    }

    /// Equivalent model in which s1 reads [1:0] and s2 reads [0:1]; all
    /// transitions become diagonal. The sections must be disjoint.
    pub fn normalize_two_sections(
        &self,
        s1: &BundleSection,
        s2: &BundleSection,
    ) -> Result<(BundleModel, GaugeTransformation), BundleError> {
        if s1.is_projectively_equal(s2) {
            return Err(BundleError::EqualSections);
        }
        let meet = self.intersection_number(s1, s2)?;
        if meet != 0 {
            return Err(BundleError::NotDisjoint(meet.unsigned_abs()));
        }
        let (mid, g1) = self.normalize_section_to_infinity(s1)?;
        let s2m = g1.transform_section(s2)?;
        if s2m.v.is_zero() {
            return Err(BundleError::EqualSections);
        }

        let one = CurveFunction::one(self.curve);
        let zero = CurveFunction::zero(self.curve);
        let slope = &s2m.u / &s2m.v;
        let base2 = FnMatrix::new([[one.clone(), -&slope], [zero.clone(), one.clone()]]);

        let mut new_special: BTreeSet<CurvePoint> = mid.special.iter().copied().collect();
        if !slope.is_zero() {
            for (pt, &mult) in slope.divisor()?.iter() {
                if mult < 0 {
                    new_special.insert(*pt);
                }
            }
        }

        let mut special = Vec::new();
        let mut transitions = Vec::new();
        let mut locals = BTreeMap::new();
        for z in new_special {
            let old = match mid.special_index(&z) {
                Some(i) => mid.transitions[i].clone(),
                None => FnMatrix::identity(self.curve),
            };
            let (a, b) = old.apply(&s2m.u, &s2m.v);
            let m = min_valuation(&a, &b, &z);
            let at = a.mul_uniformizer_pow(&z, -m);
            let bt = b.mul_uniformizer_pow(&z, -m);
            let bv = bt.eval(&z).expect("regular after shift");
            if bt.is_zero() || bv.is_zero() {
                // the second section passes through [1:0] over z
                return Err(BundleError::NotDisjoint(1));
            }
            let local = FnMatrix::new([
                [one.clone(), &(-&at) / &bt],
                [zero.clone(), one.clone()],
            ]);
            let base2_inv = base2.inv().unwrap();
            transitions.push(&(&local * &old) * &base2_inv);
            locals.insert(z, local);
            special.push(z);
        }
        let model = BundleModel::new(self.curve, special, transitions)?;
        let g2 = GaugeTransformation { base: base2, locals };
        let gauge = GaugeTransformation::compose(&g2, &g1, &model.special);
        Ok((model, gauge))
    }

    /// Applies a change of fiber coordinates, keeping the chart layout.
    pub fn apply_gauge(&self, g: &GaugeTransformation) -> Result<BundleModel, BundleError> {
        let base_inv = g
            .base
            .inv()
            .map_err(|_| BundleError::SingularTransition(usize::MAX))?;
        let mut transitions = Vec::with_capacity(self.transitions.len());
        for (i, z) in self.special.iter().enumerate() {
            transitions.push(&(g.local_at(z) * &self.transitions[i]) * &base_inv);
        }
        BundleModel::new(self.curve, self.special.clone(), transitions)
    }

    pub fn to_json(&self) -> String {
        let transitions: Vec<serde_json::Value> = self
            .transitions
            .iter()
            .map(|m| {
                serde_json::json!([
                    [
                        crate::text::curvefn_to_string(m.at(0, 0)),
                        crate::text::curvefn_to_string(m.at(0, 1))
                    ],
                    [
                        crate::text::curvefn_to_string(m.at(1, 0)),
                        crate::text::curvefn_to_string(m.at(1, 1))
                    ]
                ])
            })
            .collect();
        let special: Vec<String> = self.special.iter().map(|z| format!("{z}")).collect();
        serde_json::json!({
            "curve": format!("{}", self.curve),
            "special": special,
            "transitions": transitions,
        })
        .to_string()
    }

    pub fn from_json(s: &str) -> Result<BundleModel, ParseError> {
        let value: serde_json::Value =
            serde_json::from_str(s).map_err(|e| ParseError::Syntax(format!("bad json: {e}")))?;
        let curve_str = value
            .get("curve")
            .and_then(|v| v.as_str())
            .ok_or_else(|| ParseError::Syntax("missing 'curve'".to_string()))?;
        let curve = crate::text::parse_curve(curve_str)?;
        let special_vals = value
            .get("special")
            .and_then(|v| v.as_array())
            .ok_or_else(|| ParseError::Syntax("missing 'special'".to_string()))?;
        let transition_vals = value
            .get("transitions")
            .and_then(|v| v.as_array())
            .ok_or_else(|| ParseError::Syntax("missing 'transitions'".to_string()))?;
        let mut special = Vec::new();
        for sv in special_vals {
            let s = sv
                .as_str()
                .ok_or_else(|| ParseError::Syntax("special point must be a string".to_string()))?;
            special.push(crate::text::parse_point(s, &curve)?);
        }
        let mut transitions = Vec::new();
        for tv in transition_vals {
            let rows = tv
                .as_array()
                .filter(|r| r.len() == 2)
                .ok_or_else(|| ParseError::Syntax("transition must be a 2x2 array".to_string()))?;
            let mut entries: Vec<CurveFunction> = Vec::with_capacity(4);
            for row in rows {
                let cols = row
                    .as_array()
                    .filter(|c| c.len() == 2)
                    .ok_or_else(|| ParseError::Syntax("transition row must have 2 entries".to_string()))?;
                for cell in cols {
                    let s = cell.as_str().ok_or_else(|| {
                        ParseError::Syntax("transition entry must be a string".to_string())
                    })?;
                    entries.push(crate::text::parse_curvefn(s, &curve)?);
                }
            }
            let m11 = entries.pop().unwrap();
            let m10 = entries.pop().unwrap();
            let m01 = entries.pop().unwrap();
            let m00 = entries.pop().unwrap();
            transitions.push(FnMatrix::new([[m00, m01], [m10, m11]]));
        }
        BundleModel::new(curve, special, transitions)
            .map_err(|e| ParseError::Syntax(format!("invalid model: {e}")))
    }

    /// Decomposable bundle O + L for the line bundle class (d, s), presented
    /// with diagonal transitions over the canonical divisor representative:
    /// (d-1)(O) + (s) for d >= 1, and (s) - (O) for d = 0. The class (0, O)
    /// gives the trivial model.
    pub fn decomposable(curve: EllipticCurve, class: DivisorClass) -> Result<BundleModel, BundleError> {
        if class.degree < 0 {
            return Err(BundleError::InvalidSection(format!(
                "decomposable class must have degree >= 0, got {}",
                class.degree
            )));
        }
        curve.check(&class.sum)?;
        let mut d = Divisor::new();
        if class.degree == 0 {
            if class.sum.is_infinity() {
                return Ok(BundleModel::trivial(curve));
            }
            d.add(class.sum, 1);
            d.add(CurvePoint::Infinity, -1);
        } else {
            d.add(CurvePoint::Infinity, class.degree - 1);
            d.add(class.sum, 1);
        }
        let mut special = Vec::new();
        let mut transitions = Vec::new();
        for (&z, &mult) in d.iter() {
            let g = germ_power(&curve, &z, mult);
            special.push(z);
            transitions.push(FnMatrix::diagonal(g, CurveFunction::one(curve)));
        }
        BundleModel::new(curve, special, transitions)
    }
}

/// Global function with valuation exactly k at z (a power of the canonical
/// uniformizer choice: x - x0 generically, y at two-torsion, x/y at O).
pub fn germ_power(curve: &EllipticCurve, z: &CurvePoint, k: i64) -> CurveFunction {
    let one = CurveFunction::one(*curve);
    one.mul_uniformizer_pow(z, k)
}

impl fmt::Display for BundleModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ruled surface over {}", self.curve)?;
        if self.special.is_empty() {
            return write!(f, "  trivial (no special points)");
        }
        for (i, z) in self.special.iter().enumerate() {
            let m = &self.transitions[i];
            writeln!(
                f,
                "  chart at {z}: [[{}, {}], [{}, {}]]",
                crate::text::curvefn_to_string(m.at(0, 0)),
                crate::text::curvefn_to_string(m.at(0, 1)),
                crate::text::curvefn_to_string(m.at(1, 0)),
                crate::text::curvefn_to_string(m.at(1, 1)),
            )?;
        }
        Ok(())
    }
}
