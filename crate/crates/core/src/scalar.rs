//! Exact Gaussian-rational scalars.
//!
//! A `GaussianRational` is a complex number `re + im·i` with arbitrary-precision
//! rational real and imaginary parts. All arithmetic is exact; equality is
//! decidable. Values serialize to decimal-free strings such as `"1/2-3/4 i"`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{Error, Result};

/// An element of ℚ(i), kept in lowest terms with positive denominators
/// (`BigRational` maintains both under every operation).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GaussianRational {
    re: BigRational,
    im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Self::new(BigRational::one(), BigRational::zero())
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    /// The rational `num/den` as a real scalar.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// |z|² = z·z̄, a nonnegative rational.
    pub fn norm_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sq();
        Some(Self::new(&self.re / &n, -&self.im / &n))
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Div for &GaussianRational {
    type Output = GaussianRational;
    fn div(self, rhs: &GaussianRational) -> GaussianRational {
        let inv = rhs.inv().expect("division by zero GaussianRational");
        self * &inv
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);
forward_owned_binop!(Div, div);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for GaussianRational {
    /// Canonical decimal-free form: `"0"`, `"-2/3"`, `"1 i"`, `"1/2-3/4 i"`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", fmt_rational(&self.re))
        } else if self.re.is_zero() {
            write!(f, "{} i", fmt_rational(&self.im))
        } else if self.im.is_positive() {
            write!(f, "{}+{} i", fmt_rational(&self.re), fmt_rational(&self.im))
        } else {
            write!(f, "{}-{} i", fmt_rational(&self.re), fmt_rational(&self.im.abs()))
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    BigRational::from_str(s).map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))
}

impl FromStr for GaussianRational {
    type Err = Error;

    /// Parses the canonical forms produced by `Display`. Numerators carry the
    /// sign, so any `+`/`-` past the first character separates the imaginary part.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty scalar".into()));
        }
        if let Some(body) = s.strip_suffix('i') {
            let body = body.trim_end();
            let split = body
                .char_indices()
                .skip(1)
                .find(|(_, c)| *c == '+' || *c == '-')
                .map(|(idx, _)| idx);
            match split {
                Some(idx) => {
                    let re = parse_rational(&body[..idx])?;
                    let sign = if body.as_bytes()[idx] == b'+' { 1 } else { -1 };
                    let im = parse_rational(&body[idx + 1..])?;
                    Ok(Self::new(re, im * BigRational::from_integer(BigInt::from(sign))))
                }
                None => {
                    // Pure imaginary, accepting "i" and "-i" shorthands.
                    let body = body.trim();
                    let im = match body {
                        "" => BigRational::one(),
                        "-" => -BigRational::one(),
                        "+" => BigRational::one(),
                        _ => parse_rational(body)?,
                    };
                    Ok(Self::new(BigRational::zero(), im))
                }
            }
        } else {
            Ok(Self::new(parse_rational(s)?, BigRational::zero()))
        }
    }
}

impl serde::Serialize for GaussianRational {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for GaussianRational {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    #[test]
    fn display_roundtrip() {
        for s in ["0", "1", "-2/3", "1 i", "-1/2 i", "1/2+3/4 i", "1/2-3/4 i", "-5+1 i"] {
            assert_eq!(q(s).to_string(), s);
        }
    }

    #[test]
    fn parse_shorthands() {
        assert_eq!(q("i"), GaussianRational::i());
        assert_eq!(q("-i"), -GaussianRational::i());
        assert_eq!(q("2/4"), GaussianRational::from_ratio(1, 2));
        assert_eq!(q("3-2 i"), q("3") - q("2 i"));
    }

    #[test]
    fn arithmetic_is_exact() {
        let a = q("1/3+1/7 i");
        let b = q("2/5-3/11 i");
        assert_eq!(&(&a + &b) - &b, a);
        assert_eq!(&(&a * &b) / &b, a);
        assert_eq!(&a * &a.conj(), GaussianRational::new(a.norm_sq(), BigRational::zero()));
    }

    #[test]
    fn i_squared_is_minus_one() {
        let i = GaussianRational::i();
        assert_eq!(&i * &i, GaussianRational::from_int(-1));
    }

    #[test]
    fn inverse_of_zero_is_none() {
        assert!(GaussianRational::zero().inv().is_none());
    }
}
