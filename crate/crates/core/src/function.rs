use crate::curve::{CurvePoint, EllipticCurve};
use crate::divisor::Divisor;
use crate::error::{ArithError, CurveError};
use crate::field::Fp;
use crate::poly::Poly;
use crate::ratfn::RatFn;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Element of the function field of the curve, reduced to the canonical
/// shape a(x) + b(x)*y using the relation y^2 = x^3 + a*x + b.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveFunction {
    curve: EllipticCurve,
    a: RatFn,
    b: RatFn,
}

impl CurveFunction {
    pub fn new(curve: EllipticCurve, a: RatFn, b: RatFn) -> Self {
        CurveFunction { curve, a, b }
    }

    pub fn zero(curve: EllipticCurve) -> Self {
        let m = curve.modulus();
        CurveFunction { curve, a: RatFn::zero(m), b: RatFn::zero(m) }
    }

    pub fn one(curve: EllipticCurve) -> Self {
        let m = curve.modulus();
        CurveFunction { curve, a: RatFn::one(m), b: RatFn::zero(m) }
    }

    pub fn constant(curve: EllipticCurve, c: Fp) -> Self {
        let m = curve.modulus();
        CurveFunction { curve, a: RatFn::constant(c), b: RatFn::zero(m) }
    }

    pub fn x(curve: EllipticCurve) -> Self {
        let m = curve.modulus();
        CurveFunction { curve, a: RatFn::x(m), b: RatFn::zero(m) }
    }

    pub fn y(curve: EllipticCurve) -> Self {
        let m = curve.modulus();
        CurveFunction { curve, a: RatFn::zero(m), b: RatFn::one(m) }
    }

    pub fn from_ratfn(curve: EllipticCurve, a: RatFn) -> Self {
        let m = curve.modulus();
        CurveFunction { curve, a, b: RatFn::zero(m) }
    }

    pub fn curve(&self) -> EllipticCurve {
        self.curve
    }

    pub fn a_part(&self) -> &RatFn {
        &self.a
    }

    pub fn b_part(&self) -> &RatFn {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.b.is_zero() && self.a.is_constant()
    }

    /// x^3 + a*x + b as a rational function of x.
    fn rhs(&self) -> RatFn {
        RatFn::from_poly(self.curve.rhs_poly())
    }

    pub fn conj(&self) -> CurveFunction {
        CurveFunction { curve: self.curve, a: self.a.clone(), b: -&self.b }
    }

    /// Norm a^2 - b^2 (x^3 + ax + b), a pure function of x. Nonzero whenever
    /// self is nonzero.
    pub fn norm(&self) -> RatFn {
        let bb = &self.b * &self.b;
        &(&self.a * &self.a) - &(&bb * &self.rhs())
    }

    pub fn inv(&self) -> Result<CurveFunction, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        let n = self.norm();
        let conj = self.conj();
        Ok(CurveFunction {
            curve: self.curve,
            a: &conj.a / &n,
            b: &conj.b / &n,
        })
    }

    /// Direct evaluation at an affine point when both components are regular
    /// there; falls back to an exact valuation-driven search otherwise.
    /// None means a genuine pole.
    pub fn eval(&self, pt: &CurvePoint) -> Option<Fp> {
        let p = self.curve.modulus();
        if self.is_zero() {
            return Some(Fp::zero(p));
        }
        if let CurvePoint::Affine(x0, y0) = pt {
            if let (Some(av), Some(bv)) = (self.a.eval(*x0), self.b.eval(*x0)) {
                return Some(av + bv * *y0);
            }
        }
        match self.valuation(pt).unwrap() {
            v if v > 0 => Some(Fp::zero(p)),
            v if v < 0 => None,
            _ => {
                // order zero but with cancelling component poles: the value is
                // the unique residue v with val(self - v) > 0
                for cand in 0..p {
                    let c = Fp::from_u64(cand, p);
                    let shifted = self - &CurveFunction::constant(self.curve, c);
                    if shifted.is_zero() || shifted.valuation(pt).unwrap() > 0 {
                        return Some(c);
                    }
                }
                unreachable!("order-zero function with no rational value")
            }
        }
    }

    /// Multiply by t^k where t is the canonical uniformizer at pt:
    /// x - x0 at a generic affine point, y at affine two-torsion, x/y at the
    /// origin. Exact component formulas in every case.
    pub fn mul_uniformizer_pow(&self, pt: &CurvePoint, k: i64) -> CurveFunction {
        if k == 0 || self.is_zero() {
            return self.clone();
        }
        match pt {
            CurvePoint::Affine(x0, y0) if !y0.is_zero() => {
                let m = self.curve.modulus();
                let t = RatFn::new(
                    Poly::new(vec![-*x0, Fp::one(m)], m),
                    Poly::one(m),
                )
                .unwrap();
                let mut a = self.a.clone();
                let mut b = self.b.clone();
                for _ in 0..k.unsigned_abs() {
                    if k > 0 {
                        a = &a * &t;
                        b = &b * &t;
                    } else {
                        a = &a / &t;
                        b = &b / &t;
                    }
                }
                CurveFunction { curve: self.curve, a, b }
            }
            CurvePoint::Affine(_, _) => {
                // two-torsion: t = y; (a + b y) * y = b*c + a*y,
                // (a + b y) / y = b + (a/c) y
                let c = self.rhs();
                let mut f = self.clone();
                for _ in 0..k.unsigned_abs() {
                    f = if k > 0 {
                        CurveFunction { curve: self.curve, a: &f.b * &c, b: f.a }
                    } else {
                        CurveFunction { curve: self.curve, a: f.b, b: &f.a / &c }
                    };
                }
                f
            }
            CurvePoint::Infinity => {
                // t = x/y; (a + b y) * x/y = b*x + (a*x/c) y,
                // (a + b y) * y/x = b*c/x + (a/x) y
                let c = self.rhs();
                let m = self.curve.modulus();
                let x = RatFn::x(m);
                let mut f = self.clone();
                for _ in 0..k.unsigned_abs() {
                    f = if k > 0 {
                        CurveFunction {
                            curve: self.curve,
                            a: &f.b * &x,
                            b: &(&f.a * &x) / &c,
                        }
                    } else {
                        CurveFunction {
                            curve: self.curve,
                            a: &(&f.b * &c) / &x,
                            b: &f.a / &x,
                        }
                    };
                }
                f
            }
        }
    }

    /// Order of vanishing at a rational point of the curve (positive at
    /// zeros, negative at poles). Errors on the zero function.
    pub fn valuation(&self, pt: &CurvePoint) -> Result<i64, ArithError> {
        if self.is_zero() {
            return Err(ArithError::ZeroFunction);
        }
        match pt {
            CurvePoint::Infinity => {
                // val(x) = -2 and val(y) = -3; the two component orders have
                // opposite parity, so the minimum is exact.
                let mut v = i64::MAX;
                if let Some(d) = self.a.degree_diff() {
                    v = v.min(-2 * d);
                }
                if let Some(d) = self.b.degree_diff() {
                    v = v.min(-2 * d - 3);
                }
                Ok(v)
            }
            CurvePoint::Affine(x0, y0) if y0.is_zero() => {
                // two-torsion: val(x - x0) = 2, val(y) = 1; opposite parity
                let mut v = i64::MAX;
                if !self.a.is_zero() {
                    v = v.min(2 * self.a.order_at(*x0)?);
                }
                if !self.b.is_zero() {
                    v = v.min(2 * self.b.order_at(*x0)? + 1);
                }
                Ok(v)
            }
            CurvePoint::Affine(x0, y0) => {
                let mut k = i64::MAX;
                if !self.a.is_zero() {
                    k = k.min(self.a.order_at(*x0)?);
                }
                if !self.b.is_zero() {
                    k = k.min(self.b.order_at(*x0)?);
                }
                let shifted = self.mul_uniformizer_pow(pt, -k);
                let av = shifted.a.eval(*x0).expect("component regular after shift");
                let bv = shifted.b.eval(*x0).expect("component regular after shift");
                if !(av + bv * *y0).is_zero() {
                    return Ok(k);
                }
                // the shifted function vanishes at the point but its
                // conjugate does not, so the norm carries the full order
                let n = shifted.norm();
                Ok(k + n.order_at(*x0)?)
            }
        }
    }

    /// Zeros and poles over the rational points, with multiplicity. Errors
    /// with NonRationalSupport when any zero or pole sits at an irrational
    /// point, and with ZeroFunction on the zero function.
    pub fn divisor(&self) -> Result<Divisor, CurveError> {
        if self.is_zero() {
            return Err(CurveError::Arith(ArithError::ZeroFunction));
        }
        let p = self.curve.modulus();
        let n = self.norm();
        let mut candidates = std::collections::BTreeSet::new();
        let check_split = |poly: &Poly| -> Result<Vec<Fp>, CurveError> {
            if poly.is_zero() {
                return Ok(vec![]);
            }
            let (roots, cofactor) = poly.roots();
            if !cofactor.is_one() {
                return Err(CurveError::NonRationalSupport);
            }
            Ok(roots.into_iter().map(|(x0, _)| x0).collect())
        };
        for poly in [self.a.den(), self.b.den(), n.num(), n.den()] {
            for x0 in check_split(poly)? {
                candidates.insert(x0.value());
            }
        }
        let mut div = Divisor::new();
        let v_inf = self.valuation(&CurvePoint::Infinity)?;
        div.add(CurvePoint::Infinity, v_inf);
        for xv in candidates {
            let x0 = Fp::from_u64(xv, p);
            let rhs = self.curve.rhs_at(x0);
            if rhs.is_zero() {
                let pt = CurvePoint::Affine(x0, Fp::zero(p));
                div.add(pt, self.valuation(&pt)?);
            } else if let Some(y0) = rhs.sqrt() {
                for pt in [CurvePoint::Affine(x0, y0), CurvePoint::Affine(x0, -y0)] {
                    div.add(pt, self.valuation(&pt)?);
                }
            } else {
                // the fiber over x0 is irrational; any order here is
                // unreachable by rational points
                let affected = n.order_at(x0)? != 0
                    || self.a.den().eval(x0).is_zero()
                    || self.b.den().eval(x0).is_zero();
                if affected {
                    return Err(CurveError::NonRationalSupport);
                }
            }
        }
        debug_assert_eq!(div.degree(), 0, "principal divisor must have degree 0");
        Ok(div)
    }
}

/// Chord or tangent line through two affine points, as a curve function.
/// For p2 = -p1 this is the vertical line x - x0.
pub fn line_through(curve: &EllipticCurve, p1: CurvePoint, p2: CurvePoint) -> CurveFunction {
    let m = curve.modulus();
    let (x1, y1) = (p1.x().unwrap(), p1.y().unwrap());
    let (x2, y2) = (p2.x().unwrap(), p2.y().unwrap());
    if x1 == x2 && y1 == -y2 {
        return CurveFunction::from_ratfn(
            *curve,
            RatFn::new(Poly::new(vec![-x1, Fp::one(m)], m), Poly::one(m)).unwrap(),
        );
    }
    let lambda = if p1 == p2 {
        (Fp::new(3, m) * x1 * x1 + curve.a()) / (Fp::new(2, m) * y1)
    } else {
        (y2 - y1) / (x2 - x1)
    };
    let mu = y1 - lambda * x1;
    // y - (lambda x + mu)
    CurveFunction::new(
        *curve,
        RatFn::new(Poly::new(vec![-mu, -lambda], m), Poly::one(m)).unwrap(),
        RatFn::one(m),
    )
}

impl EllipticCurve {
    /// Function with the prescribed principal divisor, built by chord-tangent
    /// reduction. Deterministic in the divisor. Errors with NotPrincipal when
    /// the class is nontrivial.
    pub fn function_with_divisor(&self, d: &Divisor) -> Result<CurveFunction, CurveError> {
        let class = self.class_of(d)?;
        if !class.is_trivial() {
            return Err(CurveError::NotPrincipal(format!(
                "class is ({}, {})",
                class.degree, class.sum
            )));
        }
        let mut pos = vec![];
        let mut neg = vec![];
        for (&pt, &m) in d.iter() {
            if pt.is_infinity() {
                continue;
            }
            let bucket = if m > 0 { &mut pos } else { &mut neg };
            for _ in 0..m.unsigned_abs() {
                bucket.push(pt);
            }
        }
        let (fp_, _) = self.reduce_to_single(pos);
        let (fn_, _) = self.reduce_to_single(neg);
        Ok(&fp_ / &fn_)
    }

    /// Accumulates line quotients until at most one affine point remains.
    /// Returns f and the leftover point, with
    /// sum(input) = div(f) + (leftover) + k*(O) as divisors.
    fn reduce_to_single(&self, mut pts: Vec<CurvePoint>) -> (CurveFunction, CurvePoint) {
        pts.sort();
        let mut acc = CurveFunction::one(*self);
        while pts.len() >= 2 {
            let q = pts.pop().unwrap();
            let p = pts.pop().unwrap();
            let l = line_through(self, p, q);
            let r = self.add_unchecked(p, q);
            if r.is_infinity() {
                // vertical line: (p) + (q) ~ 2(O)
                acc = &acc * &l;
            } else {
                let v = line_through(self, r, self.negate(r));
                acc = &acc * &(&l / &v);
                pts.push(r);
                pts.sort();
            }
        }
        (acc, pts.pop().unwrap_or(CurvePoint::Infinity))
    }
}

impl Add for &CurveFunction {
    type Output = CurveFunction;
    fn add(self, other: &CurveFunction) -> CurveFunction {
        debug_assert_eq!(self.curve, other.curve);
        CurveFunction {
            curve: self.curve,
            a: &self.a + &other.a,
            b: &self.b + &other.b,
        }
    }
}

impl Sub for &CurveFunction {
    type Output = CurveFunction;
    fn sub(self, other: &CurveFunction) -> CurveFunction {
        debug_assert_eq!(self.curve, other.curve);
        CurveFunction {
            curve: self.curve,
            a: &self.a - &other.a,
            b: &self.b - &other.b,
        }
    }
}

impl Mul for &CurveFunction {
    type Output = CurveFunction;
    fn mul(self, other: &CurveFunction) -> CurveFunction {
        debug_assert_eq!(self.curve, other.curve);
        let c = self.rhs();
        let a = &(&self.a * &other.a) + &(&(&self.b * &other.b) * &c);
        let b = &(&self.a * &other.b) + &(&self.b * &other.a);
        CurveFunction { curve: self.curve, a, b }
    }
}

impl Div for &CurveFunction {
    type Output = CurveFunction;
    fn div(self, other: &CurveFunction) -> CurveFunction {
        self * &other.inv().expect("division by zero curve function")
    }
}

impl Neg for &CurveFunction {
    type Output = CurveFunction;
    fn neg(self) -> CurveFunction {
        CurveFunction { curve: self.curve, a: -&self.a, b: -&self.b }
    }
}

impl fmt::Debug for CurveFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::text::curvefn_to_string(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e11() -> EllipticCurve {
        EllipticCurve::new(11, -1, 0).unwrap()
    }

    #[test]
    fn coordinate_valuations_at_origin() {
        let e = e11();
        let x = CurveFunction::x(e);
        let y = CurveFunction::y(e);
        assert_eq!(x.valuation(&CurvePoint::Infinity).unwrap(), -2);
        assert_eq!(y.valuation(&CurvePoint::Infinity).unwrap(), -3);
        assert_eq!((&x / &y).valuation(&CurvePoint::Infinity).unwrap(), 1);
    }

    #[test]
    fn coordinate_valuation_at_two_torsion() {
        let e = e11();
        let x = CurveFunction::x(e);
        let y = CurveFunction::y(e);
        let t = e.point(0, 0).unwrap();
        assert_eq!(x.valuation(&t).unwrap(), 2);
        assert_eq!(y.valuation(&t).unwrap(), 1);
    }

    #[test]
    fn valuation_is_additive() {
        let e = e11();
        let pts = e.points();
        let x = CurveFunction::x(e);
        let y = CurveFunction::y(e);
        let g = &(&x - &CurveFunction::constant(e, Fp::new(4, 11))) * &y;
        let h = &y + &CurveFunction::constant(e, Fp::new(3, 11));
        for &pt in &pts {
            let sum = g.valuation(&pt).unwrap() + h.valuation(&pt).unwrap();
            assert_eq!((&g * &h).valuation(&pt).unwrap(), sum, "at {pt}");
        }
    }

    #[test]
    fn divisor_of_x_and_y() {
        let e = e11();
        let x = CurveFunction::x(e);
        let dx = x.divisor().unwrap();
        // x vanishes doubly at (0,0) and has a double pole at the origin
        assert_eq!(dx.multiplicity(&e.point(0, 0).unwrap()), 2);
        assert_eq!(dx.multiplicity(&CurvePoint::Infinity), -2);
        assert_eq!(dx.degree(), 0);
        let y = CurveFunction::y(e);
        let dy = y.divisor().unwrap();
        assert_eq!(dy.multiplicity(&e.point(0, 0).unwrap()), 1);
        assert_eq!(dy.multiplicity(&e.point(1, 0).unwrap()), 1);
        assert_eq!(dy.multiplicity(&e.point(10, 0).unwrap()), 1);
        assert_eq!(dy.multiplicity(&CurvePoint::Infinity), -3);
    }

    #[test]
    fn divisor_flags_irrational_support() {
        let e = e11();
        // x - 2 vanishes over x = 2, where 2^3 - 2 = 6 is a non-residue mod 11
        let f = &CurveFunction::x(e) - &CurveFunction::constant(e, Fp::new(2, 11));
        assert_eq!(f.divisor(), Err(CurveError::NonRationalSupport));
    }

    #[test]
    fn divisor_of_zero_function_errors() {
        let e = e11();
        assert_eq!(
            CurveFunction::zero(e).divisor(),
            Err(CurveError::Arith(ArithError::ZeroFunction))
        );
    }

    #[test]
    fn function_with_divisor_round_trip_simple() {
        let e = e11();
        let p1 = e.point(4, 4).unwrap();
        // (p1) + (-p1) - 2(O) is the divisor of the vertical line at x = 4
        let mut d = Divisor::single(p1, 1);
        d.add(e.negate(p1), 1);
        d.add(CurvePoint::Infinity, -2);
        let f = e.function_with_divisor(&d).unwrap();
        assert_eq!(f.divisor().unwrap(), d);
    }

    #[test]
    fn function_with_divisor_rejects_nonprincipal() {
        let e = e11();
        let p1 = e.point(4, 4).unwrap();
        let mut d = Divisor::single(p1, 1);
        d.add(CurvePoint::Infinity, -1);
        assert!(matches!(
            e.function_with_divisor(&d),
            Err(CurveError::NotPrincipal(_))
        ));
    }

    #[test]
    fn inverse_and_norm() {
        let e = e11();
        let x = CurveFunction::x(e);
        let y = CurveFunction::y(e);
        let f = &(&y + &x) + &CurveFunction::constant(e, Fp::new(5, 11));
        let g = f.inv().unwrap();
        assert_eq!(&f * &g, CurveFunction::one(e));
        // norm is multiplicative
        let h = &x - &CurveFunction::constant(e, Fp::new(3, 11));
        assert_eq!((&f * &h).norm(), &f.norm() * &h.norm());
    }

    #[test]
    fn eval_matches_components() {
        let e = e11();
        let x = CurveFunction::x(e);
        let y = CurveFunction::y(e);
        let f = &(&x * &y) + &CurveFunction::constant(e, Fp::new(7, 11));
        let pt = e.point(6, 1).unwrap();
        assert_eq!(f.eval(&pt), Some(Fp::new(6 * 1 + 7, 11)));
        // pole of x at the origin
        assert_eq!(x.eval(&CurvePoint::Infinity), None);
        // x/y vanishes at the origin
        let t = &x / &y;
        assert_eq!(t.eval(&CurvePoint::Infinity), Some(Fp::zero(11)));
    }

    #[test]
    fn eval_handles_cancelling_poles() {
        let e = e11();
        let x = CurveFunction::x(e);
        let y = CurveFunction::y(e);
        // (y/x) has valuation -1 + ... at (0,0); (y/x)^2 * x has valuation 0
        // there even though each factor is singular
        let t = &y / &x;
        let f = &(&t * &t) * &x;
        let tor = e.point(0, 0).unwrap();
        assert_eq!(f.valuation(&tor).unwrap(), 0);
        let v = f.eval(&tor).unwrap();
        // (y^2/x) at (0,0) equals (x^3 - x)/x = x^2 - 1 evaluated at 0 = -1
        assert_eq!(v, Fp::new(-1, 11));
    }
}
