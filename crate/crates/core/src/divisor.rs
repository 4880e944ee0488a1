use crate::curve::{CurvePoint, EllipticCurve};
use crate::error::CurveError;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Formal Z-combination of rational points. Zero multiplicities are never
/// stored, and the BTreeMap keeps the support in canonical point order.
#[derive(Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Divisor {
    coeffs: BTreeMap<CurvePoint, i64>,
}

impl Divisor {
    pub fn new() -> Self {
        Divisor { coeffs: BTreeMap::new() }
    }

    pub fn single(pt: CurvePoint, mult: i64) -> Self {
        let mut d = Divisor::new();
        d.add(pt, mult);
        d
    }

    pub fn add(&mut self, pt: CurvePoint, mult: i64) {
        if mult == 0 {
            return;
        }
        let entry = self.coeffs.entry(pt).or_insert(0);
        *entry += mult;
        if *entry == 0 {
            self.coeffs.remove(&pt);
        }
    }

    pub fn plus(&self, other: &Divisor) -> Divisor {
        let mut out = self.clone();
        for (&pt, &m) in &other.coeffs {
            out.add(pt, m);
        }
        out
    }

    pub fn minus(&self, other: &Divisor) -> Divisor {
        let mut out = self.clone();
        for (&pt, &m) in &other.coeffs {
            out.add(pt, -m);
        }
        out
    }

    pub fn negate(&self) -> Divisor {
        Divisor { coeffs: self.coeffs.iter().map(|(&p, &m)| (p, -m)).collect() }
    }

    pub fn degree(&self) -> i64 {
        self.coeffs.values().sum()
    }

    pub fn multiplicity(&self, pt: &CurvePoint) -> i64 {
        self.coeffs.get(pt).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CurvePoint, &i64)> {
        self.coeffs.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &CurvePoint> {
        self.coeffs.keys()
    }

    pub fn support_size(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_effective(&self) -> bool {
        self.coeffs.values().all(|&m| m > 0)
    }
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, (pt, &m)) in self.coeffs.iter().enumerate() {
            let mag = m.abs();
            if i == 0 {
                if m < 0 {
                    write!(f, "-")?;
                }
            } else if m < 0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if mag != 1 {
                write!(f, "{mag}*")?;
            }
            write!(f, "{pt}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Linear equivalence class of a divisor on an elliptic curve, recorded by
/// the complete invariant (degree, sum of points under the group law).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DivisorClass {
    pub degree: i64,
    pub sum: CurvePoint,
}

impl DivisorClass {
    pub fn trivial() -> Self {
        DivisorClass { degree: 0, sum: CurvePoint::Infinity }
    }

    pub fn is_trivial(&self) -> bool {
        self.degree == 0 && self.sum.is_infinity()
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.degree, self.sum)
    }
}

impl EllipticCurve {
    /// Class of a divisor: its degree and the group-law sum of its points.
    pub fn class_of(&self, d: &Divisor) -> Result<DivisorClass, CurveError> {
        let mut sum = CurvePoint::Infinity;
        for (pt, &m) in d.iter() {
            self.check(pt)?;
            let term = self.scalar_mul(m, *pt)?;
            sum = self.add_unchecked(sum, term);
        }
        Ok(DivisorClass { degree: d.degree(), sum })
    }

    pub fn class_add(&self, c1: DivisorClass, c2: DivisorClass) -> DivisorClass {
        DivisorClass { degree: c1.degree + c2.degree, sum: self.add_unchecked(c1.sum, c2.sum) }
    }

    pub fn class_sub(&self, c1: DivisorClass, c2: DivisorClass) -> DivisorClass {
        DivisorClass {
            degree: c1.degree - c2.degree,
            sum: self.add_unchecked(c1.sum, self.negate(c2.sum)),
        }
    }

    pub fn class_scale(&self, n: i64, c: DivisorClass) -> DivisorClass {
        DivisorClass { degree: n * c.degree, sum: self.scalar_mul(n, c.sum).unwrap() }
    }

    pub fn class_point(&self, pt: CurvePoint) -> DivisorClass {
        DivisorClass { degree: 1, sum: pt }
    }

    /// Principal exactly when degree 0 and the points sum to the origin.
    pub fn is_principal(&self, d: &Divisor) -> Result<bool, CurveError> {
        Ok(self.class_of(d)?.is_trivial())
    }

    /// Dimension of global sections for a class on a genus-1 base:
    /// 0 in negative degree, d in degree d >= 1, and in degree 0 it is 1
    /// exactly for the trivial class.
    pub fn h0(&self, c: DivisorClass) -> i64 {
        if c.degree < 0 {
            0
        } else if c.degree == 0 {
            i64::from(c.is_trivial())
        } else {
            c.degree
        }
    }

    /// First cohomology via duality on a genus-1 base: h1(c) = h0(-c).
    pub fn h1(&self, c: DivisorClass) -> i64 {
        self.h0(DivisorClass { degree: -c.degree, sum: self.negate(c.sum) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e11() -> EllipticCurve {
        EllipticCurve::new(11, -1, 0).unwrap()
    }

    #[test]
    fn class_of_translated_difference_is_trivial() {
        let e = e11();
        let pts = e.points();
        for &z1 in &pts {
            for &z2 in &pts {
                for &t in &pts {
                    // (z1) + (z2 + t) - (z1 + t) - (z2) sums to the origin
                    let mut d = Divisor::single(z1, 1);
                    d.add(e.add_unchecked(z2, t), 1);
                    d.add(e.add_unchecked(z1, t), -1);
                    d.add(z2, -1);
                    assert!(e.is_principal(&d).unwrap());
                }
            }
        }
    }

    #[test]
    fn degree_and_sum_are_additive() {
        let e = e11();
        let g = e.point(4, 4).unwrap();
        let h = e.point(6, 1).unwrap();
        let d1 = Divisor::single(g, 3);
        let d2 = {
            let mut d = Divisor::single(h, -2);
            d.add(CurvePoint::Infinity, 5);
            d
        };
        let c1 = e.class_of(&d1).unwrap();
        let c2 = e.class_of(&d2).unwrap();
        assert_eq!(e.class_of(&d1.plus(&d2)).unwrap(), e.class_add(c1, c2));
        assert_eq!(e.class_of(&d1.minus(&d2)).unwrap(), e.class_sub(c1, c2));
    }

    #[test]
    fn h0_values_by_degree() {
        let e = e11();
        let s = e.point(4, 4).unwrap();
        assert_eq!(e.h0(DivisorClass { degree: -2, sum: s }), 0);
        assert_eq!(e.h0(DivisorClass { degree: 0, sum: s }), 0);
        assert_eq!(e.h0(DivisorClass::trivial()), 1);
        assert_eq!(e.h0(DivisorClass { degree: 1, sum: s }), 1);
        assert_eq!(e.h0(DivisorClass { degree: 2, sum: s }), 2);
        assert_eq!(e.h0(DivisorClass { degree: 5, sum: CurvePoint::Infinity }), 5);
    }

    #[test]
    fn riemann_roch_difference_over_all_small_classes() {
        let e = e11();
        for deg in -4..=4 {
            for &s in &e.points() {
                let c = DivisorClass { degree: deg, sum: s };
                assert_eq!(e.h0(c) - e.h1(c), deg, "failed at {c}");
            }
        }
    }

    #[test]
    fn zero_multiplicities_are_dropped() {
        let e = e11();
        let g = e.point(4, 4).unwrap();
        let mut d = Divisor::single(g, 2);
        d.add(g, -2);
        assert!(d.is_zero());
        assert_eq!(d.support_size(), 0);
    }

    #[test]
    fn display_orders_origin_first() {
        let e = e11();
        let mut d = Divisor::single(e.point(0, 0).unwrap(), 2);
        d.add(CurvePoint::Infinity, -2);
        assert_eq!(d.to_string(), "-2*O + 2*(0,0)");
    }
}
