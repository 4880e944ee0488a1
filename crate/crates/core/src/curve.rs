use crate::error::CurveError;
use crate::field::{is_prime, Fp};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

/// Short Weierstrass curve y^2 = x^3 + a*x + b over F_p with p > 3 and
/// nonzero discriminant.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EllipticCurve {
    p: u64,
    a: Fp,
    b: Fp,
}

/// Rational point: the origin at infinity or an affine pair.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum CurvePoint {
    Infinity,
    Affine(Fp, Fp),
}

impl CurvePoint {
    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }

    pub fn x(&self) -> Option<Fp> {
        match self {
            CurvePoint::Infinity => None,
            CurvePoint::Affine(x, _) => Some(*x),
        }
    }

    pub fn y(&self) -> Option<Fp> {
        match self {
            CurvePoint::Infinity => None,
            CurvePoint::Affine(_, y) => Some(*y),
        }
    }
}

// Canonical point order: the origin sorts first, affine points by (x, y).
impl Ord for CurvePoint {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (CurvePoint::Infinity, CurvePoint::Infinity) => Ordering::Equal,
            (CurvePoint::Infinity, _) => Ordering::Less,
            (_, CurvePoint::Infinity) => Ordering::Greater,
            (CurvePoint::Affine(x1, y1), CurvePoint::Affine(x2, y2)) => {
                (x1.value(), y1.value()).cmp(&(x2.value(), y2.value()))
            }
        }
    }
}

impl PartialOrd for CurvePoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvePoint::Infinity => write!(f, "O"),
            CurvePoint::Affine(x, y) => write!(f, "({},{})", x, y),
        }
    }
}

/// Result of the two-torsion computation. `complete` is false when the cubic
/// does not split over F_p, i.e. part of the two-torsion is irrational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoTorsion {
    pub points: Vec<CurvePoint>,
    pub complete: bool,
}

/// Curve automorphism fixing the origin: (x, y) -> (u^2 x, u^3 y).
/// Generically u^2 = 1; j = 1728 curves admit u^4 = 1, j = 0 curves u^6 = 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CurveAutomorphism {
    pub u: Fp,
}

impl CurveAutomorphism {
    pub fn apply(&self, pt: CurvePoint) -> CurvePoint {
        match pt {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine(x, y) => {
                let u2 = self.u * self.u;
                CurvePoint::Affine(u2 * x, u2 * self.u * y)
            }
        }
    }
}

impl EllipticCurve {
    pub fn new(p: u64, a: i64, b: i64) -> Result<Self, CurveError> {
        if p <= 3 || !is_prime(p) {
            return Err(CurveError::InvalidCurve(format!("modulus {p} is not a prime > 3")));
        }
        let a = Fp::new(a, p);
        let b = Fp::new(b, p);
        let disc = Fp::new(4, p) * a * a * a + Fp::new(27, p) * b * b;
        if disc.is_zero() {
            return Err(CurveError::InvalidCurve("discriminant 4a^3 + 27b^2 vanishes".into()));
        }
        Ok(EllipticCurve { p, a, b })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn a(&self) -> Fp {
        self.a
    }

    pub fn b(&self) -> Fp {
        self.b
    }

    /// x^3 + a*x + b as a polynomial.
    pub fn rhs_poly(&self) -> crate::poly::Poly {
        use crate::poly::Poly;
        Poly::new(
            vec![self.b, self.a, Fp::zero(self.p), Fp::one(self.p)],
            self.p,
        )
    }

    pub fn rhs_at(&self, x: Fp) -> Fp {
        x * x * x + self.a * x + self.b
    }

    pub fn contains(&self, pt: &CurvePoint) -> bool {
        match pt {
            CurvePoint::Infinity => true,
            CurvePoint::Affine(x, y) => {
                x.modulus() == self.p && y.modulus() == self.p && *y * *y == self.rhs_at(*x)
            }
        }
    }

    pub fn point(&self, x: i64, y: i64) -> Result<CurvePoint, CurveError> {
        let pt = CurvePoint::Affine(Fp::new(x, self.p), Fp::new(y, self.p));
        self.check(&pt)?;
        Ok(pt)
    }

    pub fn check(&self, pt: &CurvePoint) -> Result<(), CurveError> {
        if self.contains(pt) {
            Ok(())
        } else {
            match pt {
                CurvePoint::Affine(x, y) => {
                    Err(CurveError::PointNotOnCurve { x: x.value(), y: y.value() })
                }
                CurvePoint::Infinity => unreachable!(),
            }
        }
    }

    pub fn negate(&self, pt: CurvePoint) -> CurvePoint {
        match pt {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine(x, y) => CurvePoint::Affine(x, -y),
        }
    }

    /// Chord-tangent addition.
    pub fn add_points(&self, p1: CurvePoint, p2: CurvePoint) -> Result<CurvePoint, CurveError> {
        self.check(&p1)?;
        self.check(&p2)?;
        Ok(self.add_unchecked(p1, p2))
    }

    pub fn add_unchecked(&self, p1: CurvePoint, p2: CurvePoint) -> CurvePoint {
        match (p1, p2) {
            (CurvePoint::Infinity, q) => q,
            (q, CurvePoint::Infinity) => q,
            (CurvePoint::Affine(x1, y1), CurvePoint::Affine(x2, y2)) => {
                if x1 == x2 && y1 == -y2 {
                    return CurvePoint::Infinity;
                }
                let lambda = if x1 == x2 {
                    let three = Fp::new(3, self.p);
                    let two = Fp::new(2, self.p);
                    (three * x1 * x1 + self.a) / (two * y1)
                } else {
                    (y2 - y1) / (x2 - x1)
                };
                let x3 = lambda * lambda - x1 - x2;
                let y3 = lambda * (x1 - x3) - y1;
                CurvePoint::Affine(x3, y3)
            }
        }
    }

    pub fn sub_points(&self, p1: CurvePoint, p2: CurvePoint) -> Result<CurvePoint, CurveError> {
        self.add_points(p1, self.negate(p2))
    }

    pub fn scalar_mul(&self, n: i64, pt: CurvePoint) -> Result<CurvePoint, CurveError> {
        self.check(&pt)?;
        let base = if n < 0 { self.negate(pt) } else { pt };
        let mut k = n.unsigned_abs();
        let mut acc = CurvePoint::Infinity;
        let mut cur = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add_unchecked(acc, cur);
            }
            cur = self.add_unchecked(cur, cur);
            k >>= 1;
        }
        Ok(acc)
    }

    /// All rational points, origin first, then in canonical order.
    pub fn points(&self) -> Vec<CurvePoint> {
        let mut pts = vec![CurvePoint::Infinity];
        for v in 0..self.p {
            let x = Fp::from_u64(v, self.p);
            let rhs = self.rhs_at(x);
            if rhs.is_zero() {
                pts.push(CurvePoint::Affine(x, Fp::zero(self.p)));
            } else if let Some(y) = rhs.sqrt() {
                pts.push(CurvePoint::Affine(x, y));
                pts.push(CurvePoint::Affine(x, -y));
            }
        }
        pts.sort();
        pts
    }

    /// Rational two-torsion: the origin plus (x0, 0) for each rational root
    /// of the cubic. Flags incompleteness instead of inventing extensions.
    pub fn two_torsion(&self) -> TwoTorsion {
        let (roots, cofactor) = self.rhs_poly().roots();
        let mut points = vec![CurvePoint::Infinity];
        for (x0, _) in roots {
            points.push(CurvePoint::Affine(x0, Fp::zero(self.p)));
        }
        points.sort();
        TwoTorsion { points, complete: cofactor.is_one() }
    }

    /// Automorphisms fixing the origin, as the list of admissible scalars u.
    pub fn automorphisms(&self) -> Vec<CurveAutomorphism> {
        let exponent: u64 = if self.b.is_zero() {
            4
        } else if self.a.is_zero() {
            6
        } else {
            2
        };
        let mut out = vec![];
        for v in 1..self.p {
            let u = Fp::from_u64(v, self.p);
            if u.pow(exponent).value() == 1 {
                out.push(CurveAutomorphism { u });
            }
        }
        out
    }
}

impl fmt::Display for EllipticCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E/F{}: y^2 = x^3", self.p)?;
        if !self.a.is_zero() {
            write!(f, " + {}*x", self.a)?;
        }
        if !self.b.is_zero() {
            write!(f, " + {}", self.b)?;
        }
        Ok(())
    }
}

impl fmt::Debug for EllipticCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e11() -> EllipticCurve {
        EllipticCurve::new(11, -1, 0).unwrap()
    }

    #[test]
    fn rejects_singular_and_bad_moduli() {
        assert!(EllipticCurve::new(11, 0, 0).is_err());
        assert!(EllipticCurve::new(12, -1, 0).is_err());
        assert!(EllipticCurve::new(3, 1, 1).is_err());
    }

    #[test]
    fn group_law_exhaustive_f11() {
        let e = e11();
        let pts = e.points();
        assert_eq!(pts.len(), 12);
        // closure, identity, inverses
        for &p in &pts {
            assert_eq!(e.add_unchecked(p, CurvePoint::Infinity), p);
            assert_eq!(e.add_unchecked(p, e.negate(p)), CurvePoint::Infinity);
            for &q in &pts {
                assert!(e.contains(&e.add_unchecked(p, q)));
                assert_eq!(e.add_unchecked(p, q), e.add_unchecked(q, p));
            }
        }
        // associativity over all triples
        for &p in &pts {
            for &q in &pts {
                let pq = e.add_unchecked(p, q);
                for &r in &pts {
                    assert_eq!(
                        e.add_unchecked(pq, r),
                        e.add_unchecked(p, e.add_unchecked(q, r))
                    );
                }
            }
        }
    }

    #[test]
    fn scalar_mul_matches_repeated_addition() {
        let e = e11();
        let g = e.point(4, 4).unwrap();
        let mut acc = CurvePoint::Infinity;
        for n in 0..=24 {
            assert_eq!(e.scalar_mul(n, g).unwrap(), acc);
            acc = e.add_unchecked(acc, g);
        }
        assert_eq!(e.scalar_mul(-3, g).unwrap(), e.negate(e.scalar_mul(3, g).unwrap()));
    }

    #[test]
    fn rejects_points_off_curve() {
        let e = e11();
        assert!(matches!(
            e.point(2, 1),
            Err(CurveError::PointNotOnCurve { x: 2, y: 1 })
        ));
    }

    #[test]
    fn two_torsion_split_cubic() {
        // x^3 - x = x(x-1)(x+1) splits over F_11
        let t = e11().two_torsion();
        assert!(t.complete);
        let e = e11();
        let expect = vec![
            CurvePoint::Infinity,
            e.point(0, 0).unwrap(),
            e.point(1, 0).unwrap(),
            e.point(10, 0).unwrap(),
        ];
        assert_eq!(t.points, expect);
        // Klein group: every element is its own inverse
        for &p in &t.points {
            assert_eq!(e.add_unchecked(p, p), CurvePoint::Infinity);
        }
    }

    #[test]
    fn two_torsion_incomplete_when_cubic_does_not_split() {
        // x^3 + x = x(x^2 + 1), and -1 is not a square mod 11
        let e = EllipticCurve::new(11, 1, 0).unwrap();
        let t = e.two_torsion();
        assert!(!t.complete);
        assert_eq!(t.points, vec![CurvePoint::Infinity, e.point(0, 0).unwrap()]);
    }

    #[test]
    fn automorphism_counts() {
        // generic curve: only +-1
        assert_eq!(EllipticCurve::new(11, 1, 1).unwrap().automorphisms().len(), 2);
        // j = 1728 with i in the field: u^4 = 1 has 4 solutions in F_13
        let e = EllipticCurve::new(13, 1, 0).unwrap();
        let autos = e.automorphisms();
        assert_eq!(autos.len(), 4);
        // j = 1728 but i irrational: still only +-1
        assert_eq!(EllipticCurve::new(11, 1, 0).unwrap().automorphisms().len(), 2);
        // each automorphism preserves the curve and the group law
        let pts = e.points();
        for auto in &autos {
            for &p in &pts {
                assert!(e.contains(&auto.apply(p)));
                for &q in &pts {
                    assert_eq!(
                        auto.apply(e.add_unchecked(p, q)),
                        e.add_unchecked(auto.apply(p), auto.apply(q))
                    );
                }
            }
        }
    }

    #[test]
    fn point_ordering_is_canonical() {
        let e = e11();
        let mut pts = e.points();
        pts.reverse();
        pts.sort();
        assert_eq!(pts[0], CurvePoint::Infinity);
        for w in pts.windows(2).skip(1) {
            let (a, b) = (w[0], w[1]);
            assert!(
                (a.x().unwrap().value(), a.y().unwrap().value())
                    < (b.x().unwrap().value(), b.y().unwrap().value())
            );
        }
    }
}
