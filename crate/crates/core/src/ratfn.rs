use crate::error::ArithError;
use crate::field::Fp;
use crate::poly::{Degree, Poly};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Rational function num/den over F_p in canonical form: den is monic and
/// gcd(num, den) = 1, so equal functions have byte-equal representations.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RatFn {
    num: Poly,
    den: Poly,
}

impl RatFn {
    pub fn new(num: Poly, den: Poly) -> Result<Self, ArithError> {
        if den.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() || g.is_zero() {
            (num, den)
        } else {
            (num.div_rem(&g)?.0, den.div_rem(&g)?.0)
        };
        let lead_inv = den.leading().inv()?;
        Ok(RatFn { num: num.scale(lead_inv), den: den.scale(lead_inv) })
    }

    pub fn from_poly(p: Poly) -> Self {
        let m = p.modulus();
        RatFn { num: p, den: Poly::one(m) }
    }

    pub fn zero(modulus: u64) -> Self {
        RatFn::from_poly(Poly::zero(modulus))
    }

    pub fn one(modulus: u64) -> Self {
        RatFn::from_poly(Poly::one(modulus))
    }

    pub fn constant(c: Fp) -> Self {
        RatFn::from_poly(Poly::constant(c))
    }

    pub fn x(modulus: u64) -> Self {
        RatFn::from_poly(Poly::x(modulus))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn modulus(&self) -> u64 {
        self.num.modulus()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.degree() <= Degree::Of(0) && self.den.is_one()
    }

    /// deg(num) - deg(den); the pole order at the place at infinity of the
    /// x-line. None for the zero function.
    pub fn degree_diff(&self) -> Option<i64> {
        let n = self.num.degree().as_usize()? as i64;
        Some(n - self.den.degree().as_usize().unwrap() as i64)
    }

    pub fn inv(&self) -> Result<RatFn, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        RatFn::new(self.den.clone(), self.num.clone())
    }

    /// Value at x0; None when x0 is a pole.
    pub fn eval(&self, x0: Fp) -> Option<Fp> {
        let d = self.den.eval(x0);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(x0) * d.inv().unwrap())
    }

    /// Order of vanishing at x = x0: positive at zeros, negative at poles,
    /// zero when the function is a unit there. Canonical form guarantees
    /// num and den never vanish simultaneously.
    pub fn order_at(&self, x0: Fp) -> Result<i64, ArithError> {
        if self.is_zero() {
            return Err(ArithError::ZeroFunction);
        }
        let up = self.num.root_multiplicity(x0) as i64;
        if up > 0 {
            return Ok(up);
        }
        Ok(-(self.den.root_multiplicity(x0) as i64))
    }
}

impl Add for &RatFn {
    type Output = RatFn;
    fn add(self, other: &RatFn) -> RatFn {
        let num = &(&self.num * &other.den) + &(&other.num * &self.den);
        RatFn::new(num, &self.den * &other.den).unwrap()
    }
}

impl Sub for &RatFn {
    type Output = RatFn;
    fn sub(self, other: &RatFn) -> RatFn {
        let num = &(&self.num * &other.den) - &(&other.num * &self.den);
        RatFn::new(num, &self.den * &other.den).unwrap()
    }
}

impl Mul for &RatFn {
    type Output = RatFn;
    fn mul(self, other: &RatFn) -> RatFn {
        RatFn::new(&self.num * &other.num, &self.den * &other.den).unwrap()
    }
}

impl Div for &RatFn {
    type Output = RatFn;
    fn div(self, other: &RatFn) -> RatFn {
        RatFn::new(&self.num * &other.den, &self.den * &other.num)
            .expect("division by zero rational function")
    }
}

impl Neg for &RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        RatFn { num: -&self.num, den: self.den.clone() }
    }
}

impl fmt::Debug for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::text::ratfn_to_string(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancellation_example() {
        // (x^2 - 9)/(x - 3) reduces to x + 3: the shared zero at x = 3
        // cancels away and only the zero at x = -3 survives.
        let f = RatFn::new(Poly::from_i64(&[-9, 0, 1], 11), Poly::from_i64(&[-3, 1], 11)).unwrap();
        assert_eq!(f.num(), &Poly::from_i64(&[3, 1], 11));
        assert!(f.den().is_one());
        assert_eq!(f.order_at(Fp::new(3, 11)).unwrap(), 0);
        assert_eq!(f.order_at(Fp::new(-3, 11)).unwrap(), 1);
    }

    #[test]
    fn order_of_zero_function_is_an_error() {
        assert_eq!(RatFn::zero(11).order_at(Fp::zero(11)), Err(ArithError::ZeroFunction));
    }

    #[test]
    fn order_against_synthetic_division_oracle() {
        // Oracle: count factors of (x - x0) stripped from numerator and
        // denominator separately, before any cancellation.
        let mut seed = 77u64;
        let mut next = |m: u64| {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            Fp::from_u64(seed >> 33, m)
        };
        for _ in 0..200 {
            let p = 11u64;
            let x0 = next(p);
            let mut num = Poly::one(p);
            let mut den = Poly::one(p);
            let lin = Poly::new(vec![-x0, Fp::one(p)], p);
            let (mut kn, mut kd) = (0i64, 0i64);
            for _ in 0..3 {
                if next(p).value() % 2 == 0 {
                    num = &num * &lin;
                    kn += 1;
                } else {
                    den = &den * &lin;
                    kd += 1;
                }
            }
            // ensure a nonvanishing extra factor on each side
            let mut c = next(p);
            while c == x0 {
                c = next(p);
            }
            num = &num * &Poly::new(vec![-c, Fp::one(p)], p);
            let f = RatFn::new(num, den).unwrap();
            assert_eq!(f.order_at(x0).unwrap(), kn - kd);
        }
    }

    #[test]
    fn order_additivity() {
        let p = 13u64;
        let f = RatFn::new(Poly::from_i64(&[-9, 0, 1], p), Poly::from_i64(&[-3, 1], p)).unwrap();
        let g = RatFn::new(Poly::from_i64(&[0, 1], p), Poly::from_i64(&[-3, 0, 1], p)).unwrap();
        for v in 0..p {
            let x0 = Fp::from_u64(v, p);
            let sum = f.order_at(x0).unwrap() + g.order_at(x0).unwrap();
            assert_eq!((&f * &g).order_at(x0).unwrap(), sum);
        }
    }

    #[test]
    fn canonical_form_is_stable_under_arithmetic() {
        let p = 11;
        let f = RatFn::new(Poly::from_i64(&[1, 2, 3], p), Poly::from_i64(&[5, 1], p)).unwrap();
        let g = RatFn::new(Poly::from_i64(&[4, 0, 2], p), Poly::from_i64(&[1, 1, 1], p)).unwrap();
        for h in [&f + &g, &f - &g, &f * &g, &f / &g] {
            assert!(h.den().leading().value() == 1);
            assert!(h.num().gcd(h.den()).is_one() || h.is_zero());
        }
        let back = &(&(&f + &g) - &g) * &RatFn::one(p);
        assert_eq!(back, f);
    }
}
