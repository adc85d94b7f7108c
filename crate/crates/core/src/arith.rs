//! Exact scalars: arbitrary-precision rationals and the cyclotomic field Q(ζ_p).
//!
//! Cyclotomic values are stored with `p` coordinates against the basis
//! `1, ζ, …, ζ^{p-1}` where `ζ = e^{-2πi/p}`. Because `1 + ζ + … + ζ^{p-1} = 0`
//! the representation is redundant by one dimension; the canonical form has a
//! zero last coordinate, so equality and zero tests are coordinate-wise.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar. Always normalized (positive denominator, reduced).
pub type Rational = BigRational;

/// Builds `num/den` as an exact rational.
///
/// Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Parses the text form `"num/den"` or `"num"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

/// Text form used in every file format: `"num/den"`, or `"num"` when the
/// denominator is one.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Lossy conversion used by the floating-point transform path.
pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        // ratio of huge integers: scale down before dividing
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn is_prime(p: i64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn check_prime(p: i64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::CompositeDilation(p))
    }
}

/// An element of Q(ζ_p), ζ_p = e^{-2πi/p}, in canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cyclotomic {
    p: u32,
    coeffs: Vec<Rational>,
}

impl Cyclotomic {
    /// Builds from `p` coordinates (coefficient of `ζ^j` at index `j`) and
    /// canonicalizes.
    pub fn from_coeffs(p: u32, coeffs: Vec<Rational>) -> Result<Self> {
        check_prime(p as i64)?;
        if coeffs.len() != p as usize {
            return Err(Error::DimensionMismatch(format!(
                "Q(zeta_{p}) needs {p} coordinates, got {}",
                coeffs.len()
            )));
        }
        let mut c = Cyclotomic { p, coeffs };
        c.canonicalize();
        Ok(c)
    }

    pub fn zero(p: u32) -> Self {
        Cyclotomic {
            p,
            coeffs: vec![Rational::zero(); p as usize],
        }
    }

    pub fn one(p: u32) -> Self {
        Self::from_rational(p, Rational::one())
    }

    pub fn from_rational(p: u32, r: Rational) -> Self {
        let mut c = Self::zero(p);
        c.coeffs[0] = r;
        c
    }

    /// ζ_p^e, with `e` reduced modulo `p`.
    pub fn root(p: u32, e: i64) -> Result<Self> {
        check_prime(p as i64)?;
        let mut c = Self::zero(p);
        let j = e.rem_euclid(p as i64) as usize;
        c.coeffs[j] = Rational::one();
        c.canonicalize();
        Ok(c)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Canonical coordinates; the last one is always zero.
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    fn canonicalize(&mut self) {
        let last = self.coeffs[self.p as usize - 1].clone();
        if !last.is_zero() {
            for c in &mut self.coeffs {
                *c -= &last;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Returns the value as a rational when it lies in Q.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    fn check_field(&self, other: &Self) -> Result<()> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.p, other.p))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        let mut c = Cyclotomic { p: self.p, coeffs };
        c.canonicalize();
        Ok(c)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        let p = self.p as usize;
        let mut out = vec![Rational::zero(); p];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[(i + j) % p] += a * b;
            }
        }
        let mut c = Cyclotomic { p: self.p, coeffs: out };
        c.canonicalize();
        Ok(c)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Cyclotomic {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Adds `r · ζ^e` in place.
    pub fn add_term(&mut self, r: &Rational, e: i64) {
        let p = self.p as i64;
        let j = e.rem_euclid(p) as usize;
        if j == self.p as usize - 1 {
            for c in &mut self.coeffs[..j] {
                *c -= r;
            }
        } else {
            self.coeffs[j] += r;
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Cyclotomic::one(self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match j {
                0 => write!(f, "{mag}")?,
                _ if mag.is_one() => write!(f, "z{}^{j}", self.p)?,
                _ => write!(f, "{mag}*z{}^{j}", self.p)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

// Operator forms panic on mismatched fields; use the `checked_*` methods when
// operands may come from different `p`.

impl Add for &Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.checked_add(rhs).expect("cyclotomic field mismatch")
    }
}

impl Sub for &Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.checked_add(&-rhs).expect("cyclotomic field mismatch")
    }
}

impl Mul for &Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.checked_mul(rhs).expect("cyclotomic field mismatch")
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Add for Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: Cyclotomic) -> Cyclotomic {
        &self + &rhs
    }
}

impl Sub for Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: Cyclotomic) -> Cyclotomic {
        &self - &rhs
    }
}

impl Mul for Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: Cyclotomic) -> Cyclotomic {
        &self * &rhs
    }
}

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        -&self
    }
}
