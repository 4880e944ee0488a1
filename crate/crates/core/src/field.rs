use crate::error::ArithError;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Residue in a prime field F_p, p > 3. The modulus rides along so mixed-field
/// arithmetic can be rejected instead of silently wrapping. 64-bit residues
/// with 128-bit intermediates stay exact for any modulus this tool accepts.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fp {
    value: u64,
    modulus: u64,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl Fp {
    pub fn new(value: i64, modulus: u64) -> Self {
        debug_assert!(modulus > 3, "prime fields here require p > 3");
        let m = modulus as i64;
        let v = value.rem_euclid(m) as u64;
        Fp { value: v, modulus }
    }

    pub fn from_u64(value: u64, modulus: u64) -> Self {
        Fp { value: value % modulus, modulus }
    }

    pub fn zero(modulus: u64) -> Self {
        Fp { value: 0, modulus }
    }

    pub fn one(modulus: u64) -> Self {
        Fp { value: 1 % modulus, modulus }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same_field(&self, other: &Fp) -> Result<(), ArithError> {
        if self.modulus != other.modulus {
            return Err(ArithError::IncompatibleField(self.modulus, other.modulus));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Fp) -> Result<Fp, ArithError> {
        self.same_field(other)?;
        Ok(Fp::from_u64(self.value + other.value, self.modulus))
    }

    pub fn checked_sub(&self, other: &Fp) -> Result<Fp, ArithError> {
        self.same_field(other)?;
        Ok(Fp::from_u64(self.value + self.modulus - other.value, self.modulus))
    }

    pub fn checked_mul(&self, other: &Fp) -> Result<Fp, ArithError> {
        self.same_field(other)?;
        let prod = (self.value as u128 * other.value as u128) % self.modulus as u128;
        Ok(Fp { value: prod as u64, modulus: self.modulus })
    }

    /// Multiplicative inverse via Fermat; the modulus is prime by construction.
    pub fn inv(&self) -> Result<Fp, ArithError> {
        if self.value == 0 {
            return Err(ArithError::DivisionByZero);
        }
        Ok(self.pow(self.modulus - 2))
    }

    pub fn checked_div(&self, other: &Fp) -> Result<Fp, ArithError> {
        self.same_field(other)?;
        self.checked_mul(&other.inv()?)
    }

    pub fn pow(&self, mut e: u64) -> Fp {
        let mut base = *self;
        let mut acc = Fp::one(self.modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(&base).unwrap();
            }
            base = base.checked_mul(&base).unwrap();
            e >>= 1;
        }
        acc
    }

    /// Square root when the value is a quadratic residue, None otherwise.
    /// Trial search; moduli stay small enough that this is never hot.
    pub fn sqrt(&self) -> Option<Fp> {
        if self.value == 0 {
            return Some(*self);
        }
        for r in 1..self.modulus {
            if (r as u128 * r as u128) % self.modulus as u128 == self.value as u128 {
                return Some(Fp { value: r, modulus: self.modulus });
            }
        }
        None
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, other: Fp) -> Fp {
        self.checked_add(&other).expect("field mismatch in +")
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, other: Fp) -> Fp {
        self.checked_sub(&other).expect("field mismatch in -")
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, other: Fp) -> Fp {
        self.checked_mul(&other).expect("field mismatch in *")
    }
}

impl Div for Fp {
    type Output = Fp;
    fn div(self, other: Fp) -> Fp {
        self.checked_div(&other).expect("division error in /")
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp::from_u64(self.modulus - self.value, self.modulus)
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}
