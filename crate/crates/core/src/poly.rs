use crate::error::ArithError;
use crate::field::Fp;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Degree of a polynomial, with a real sentinel for the zero polynomial so
/// degree arithmetic stays total: NegInfinity + anything = NegInfinity.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum Degree {
    NegInfinity,
    Of(usize),
}

impl Degree {
    pub fn plus(self, other: Degree) -> Degree {
        match (self, other) {
            (Degree::Of(a), Degree::Of(b)) => Degree::Of(a + b),
            _ => Degree::NegInfinity,
        }
    }

    pub fn as_usize(self) -> Option<usize> {
        match self {
            Degree::Of(n) => Some(n),
            Degree::NegInfinity => None,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => write!(f, "-inf"),
            Degree::Of(n) => write!(f, "{n}"),
        }
    }
}

/// Dense univariate polynomial over F_p. Coefficients are stored low to high
/// with no trailing zeros, so the representation of each polynomial is unique.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Poly {
    coeffs: Vec<Fp>,
    modulus: u64,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Fp>, modulus: u64) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs, modulus }
    }

    pub fn zero(modulus: u64) -> Self {
        Poly { coeffs: vec![], modulus }
    }

    pub fn one(modulus: u64) -> Self {
        Poly::constant(Fp::one(modulus))
    }

    pub fn constant(c: Fp) -> Self {
        Poly::new(vec![c], c.modulus())
    }

    /// The monomial `x`.
    pub fn x(modulus: u64) -> Self {
        Poly::new(vec![Fp::zero(modulus), Fp::one(modulus)], modulus)
    }

    pub fn from_i64(coeffs: &[i64], modulus: u64) -> Self {
        Poly::new(coeffs.iter().map(|&c| Fp::new(c, modulus)).collect(), modulus)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn coeffs(&self) -> &[Fp] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Fp {
        self.coeffs.get(i).copied().unwrap_or_else(|| Fp::zero(self.modulus))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Degree {
        if self.coeffs.is_empty() {
            Degree::NegInfinity
        } else {
            Degree::Of(self.coeffs.len() - 1)
        }
    }

    pub fn leading(&self) -> Fp {
        self.coeffs.last().copied().unwrap_or_else(|| Fp::zero(self.modulus))
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].value() == 1
    }

    pub fn scale(&self, c: Fp) -> Poly {
        Poly::new(self.coeffs.iter().map(|&a| a * c).collect(), self.modulus)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(self.leading().inv().unwrap())
    }

    pub fn eval(&self, x: Fp) -> Fp {
        let mut acc = Fp::zero(self.modulus);
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn mul_xk(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![Fp::zero(self.modulus); k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly::new(coeffs, self.modulus)
    }

    pub fn div_rem(&self, divisor: &Poly) -> Result<(Poly, Poly), ArithError> {
        if divisor.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        let m = self.modulus;
        let mut rem = self.coeffs.clone();
        let d = divisor.coeffs.len();
        if rem.len() < d {
            return Ok((Poly::zero(m), self.clone()));
        }
        let lead_inv = divisor.leading().inv()?;
        let mut quot = vec![Fp::zero(m); rem.len() - d + 1];
        for i in (0..quot.len()).rev() {
            let c = rem[i + d - 1] * lead_inv;
            if c.is_zero() {
                continue;
            }
            quot[i] = c;
            for (j, &dc) in divisor.coeffs.iter().enumerate() {
                rem[i + j] = rem[i + j] - c * dc;
            }
        }
        Ok((Poly::new(quot, m), Poly::new(rem, m)))
    }

    pub fn divides(&self, other: &Poly) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.div_rem(self).map(|(_, r)| r.is_zero()).unwrap_or(false)
    }

    /// Monic gcd by Euclid's algorithm; gcd(0,0) = 0 by convention.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).unwrap();
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    /// Multiplicity of x0 as a root, by repeated synthetic division.
    pub fn root_multiplicity(&self, x0: Fp) -> usize {
        debug_assert!(!self.is_zero());
        let mut f = self.clone();
        let lin = Poly::new(vec![-x0, Fp::one(self.modulus)], self.modulus);
        let mut k = 0;
        while f.eval(x0).is_zero() && !f.is_zero() {
            let (q, r) = f.div_rem(&lin).unwrap();
            debug_assert!(r.is_zero());
            f = q;
            k += 1;
        }
        k
    }

    /// All roots in F_p with multiplicity, plus the root-free cofactor,
    /// made monic so that a cofactor of one means the polynomial splits
    /// into rational linear factors.
    pub fn roots(&self) -> (Vec<(Fp, usize)>, Poly) {
        let mut f = self.clone();
        let mut out = vec![];
        if f.is_zero() {
            return (out, f);
        }
        for v in 0..self.modulus {
            let x0 = Fp::from_u64(v, self.modulus);
            let mut k = 0;
            let lin = Poly::new(vec![-x0, Fp::one(self.modulus)], self.modulus);
            while f.eval(x0).is_zero() && !f.is_zero() && f.degree() != Degree::Of(0) {
                let (q, _) = f.div_rem(&lin).unwrap();
                f = q;
                k += 1;
            }
            if k > 0 {
                out.push((x0, k));
            }
        }
        (out, f.monic())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect();
        Poly::new(coeffs, self.modulus)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) - other.coeff(i)).collect();
        Poly::new(coeffs, self.modulus)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.modulus);
        }
        let mut coeffs = vec![Fp::zero(self.modulus); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j] + a * b;
            }
        }
        Poly::new(coeffs, self.modulus)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| -c).collect(), self.modulus)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::text::poly_to_string(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rand_poly(seed: &mut u64, max_deg: usize, p: u64) -> Poly {
        let mut coeffs = vec![];
        let deg = {
            *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (*seed >> 33) as usize % (max_deg + 1)
        };
        for _ in 0..=deg {
            *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            coeffs.push(Fp::from_u64(*seed >> 33, p));
        }
        Poly::new(coeffs, p)
    }

    #[test]
    fn gcd_example_common_factor() {
        // gcd(x^2 - 1, x^2 - 2x + 1) = x - 1 over F_11
        let f = Poly::from_i64(&[-1, 0, 1], 11);
        let g = Poly::from_i64(&[1, -2, 1], 11);
        assert_eq!(f.gcd(&g), Poly::from_i64(&[-1, 1], 11));
    }

    #[test]
    fn gcd_of_zeros_is_zero() {
        let z = Poly::zero(11);
        assert!(z.gcd(&z).is_zero());
    }

    #[test]
    fn gcd_divides_both_and_cofactors_are_coprime() {
        let mut seed = 0xfeed_u64;
        for _ in 0..100 {
            for p in [11u64, 13] {
                let f = rand_poly(&mut seed, 6, p);
                let g = rand_poly(&mut seed, 6, p);
                let d = f.gcd(&g);
                if f.is_zero() && g.is_zero() {
                    assert!(d.is_zero());
                    continue;
                }
                assert!(d.divides(&f) && d.divides(&g));
                if !f.is_zero() && !g.is_zero() {
                    let (fq, _) = f.div_rem(&d).unwrap();
                    let (gq, _) = g.div_rem(&d).unwrap();
                    assert!(fq.gcd(&gq).is_one());
                }
                assert!(d.is_zero() || d.leading().value() == 1);
            }
        }
    }

    #[test]
    fn degree_sentinel_laws() {
        assert_eq!(Degree::NegInfinity.plus(Degree::Of(4)), Degree::NegInfinity);
        assert!(Degree::NegInfinity < Degree::Of(0));
        let z = Poly::zero(11);
        assert_eq!(z.degree(), Degree::NegInfinity);
        assert_eq!((&z * &Poly::x(11)).degree(), Degree::NegInfinity);
    }

    proptest! {
        #[test]
        fn div_rem_reconstructs(fa in prop::collection::vec(0u64..11, 0..7),
                                fb in prop::collection::vec(0u64..11, 1..5)) {
            let f = Poly::new(fa.iter().map(|&c| Fp::from_u64(c, 11)).collect(), 11);
            let g = Poly::new(fb.iter().map(|&c| Fp::from_u64(c, 11)).collect(), 11);
            prop_assume!(!g.is_zero());
            let (q, r) = f.div_rem(&g).unwrap();
            prop_assert_eq!(&(&q * &g) + &r, f);
            prop_assert!(r.degree() < g.degree());
        }

        #[test]
        fn mul_degree_adds(fa in prop::collection::vec(0u64..11, 0..6),
                           fb in prop::collection::vec(0u64..11, 0..6)) {
            let f = Poly::new(fa.iter().map(|&c| Fp::from_u64(c, 11)).collect(), 11);
            let g = Poly::new(fb.iter().map(|&c| Fp::from_u64(c, 11)).collect(), 11);
            prop_assert_eq!((&f * &g).degree(), f.degree().plus(g.degree()));
        }
    }
}
