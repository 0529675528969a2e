//! Scalars: exact rationals by default, binary floats opt-in.
//!
//! All periodicity and commutation checks compare rationals exactly; floats
//! exist for rendering and large sweeps. A complex pair type is provided
//! solely as input to phase normalization.

use alloc::borrow::ToOwned;
use alloc::string::{String, ToString};
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ScalarError {
    DivisionByZero,
    IrrationalSqrt(String),
    NonPositiveWeight(String),
    ZeroInput,
    ParseError(String),
}

impl fmt::Display for ScalarError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarError::DivisionByZero => write!(f, "division by zero"),
            ScalarError::IrrationalSqrt(s) => {
                write!(f, "square root of {} is not rational; use float scalars", s)
            }
            ScalarError::NonPositiveWeight(s) => write!(f, "weight {} is not positive", s),
            ScalarError::ZeroInput => write!(f, "complex input must be nonzero"),
            ScalarError::ParseError(s) => write!(f, "cannot parse scalar: {}", s),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ScalarError {}

/// Exact rational or binary float scalar. Mixed arithmetic promotes to float.
#[derive(Clone, Debug)]
pub enum Scalar {
    Rational(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar::Rational(BigRational::zero())
    }

    pub fn one() -> Scalar {
        Scalar::Rational(BigRational::one())
    }

    pub fn from_integer(n: i64) -> Scalar {
        Scalar::Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Scalar {
        Scalar::Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_positive(),
            Scalar::Float(x) => *x > 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_negative(),
            Scalar::Float(x) => *x < 0.0,
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(r.abs()),
            Scalar::Float(x) => Scalar::Float(libm::fabs(*x)),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Float(x) => *x,
        }
    }

    /// Exact square root for rationals (error when irrational); plain sqrt
    /// for floats.
    pub fn sqrt(&self) -> Result<Scalar, ScalarError> {
        match self {
            Scalar::Rational(r) => {
                if r.is_negative() {
                    return Err(ScalarError::IrrationalSqrt(self.to_string()));
                }
                let num = r.numer().sqrt();
                let den = r.denom().sqrt();
                if &(&num * &num) == r.numer() && &(&den * &den) == r.denom() {
                    Ok(Scalar::Rational(BigRational::new(num, den)))
                } else {
                    Err(ScalarError::IrrationalSqrt(self.to_string()))
                }
            }
            Scalar::Float(x) => Ok(Scalar::Float(libm::sqrt(*x))),
        }
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar, ScalarError> {
        if rhs.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(self.clone() / rhs.clone())
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a == b,
            _ => self.to_f64() == other.to_f64(),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a.partial_cmp(b),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Rational(a), Scalar::Rational(b)) => {
                        Scalar::Rational(a.$method(b))
                    }
                    (a, b) => Scalar::Float(a.to_f64().$method(b.to_f64())),
                }
            }
        }

        impl<'a> $trait<&'a Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                self.clone().$method(rhs.clone())
            }
        }
    };
}

scalar_binop!(Add, add);
scalar_binop!(Sub, sub);
scalar_binop!(Mul, mul);
scalar_binop!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(-r),
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Float(x) => write!(f, "{}", x),
        }
    }
}

impl FromStr for Scalar {
    type Err = ScalarError;

    /// Parses "p/q" or "p" as an exact rational; "x.y"/"1e-3" as a float.
    fn from_str(s: &str) -> Result<Scalar, ScalarError> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let num = BigInt::from_str(p.trim())
                .map_err(|_| ScalarError::ParseError(s.to_owned()))?;
            let den = BigInt::from_str(q.trim())
                .map_err(|_| ScalarError::ParseError(s.to_owned()))?;
            if den.is_zero() {
                return Err(ScalarError::DivisionByZero);
            }
            return Ok(Scalar::Rational(BigRational::new(num, den)));
        }
        if let Ok(n) = BigInt::from_str(s) {
            return Ok(Scalar::Rational(BigRational::from_integer(n)));
        }
        s.parse::<f64>()
            .map(Scalar::Float)
            .map_err(|_| ScalarError::ParseError(s.to_owned()))
    }
}

/// A complex scalar as a pair of real scalars; input type for phase
/// normalization only.
#[derive(Clone, PartialEq, Debug)]
pub struct ComplexScalar {
    pub re: Scalar,
    pub im: Scalar,
}

impl ComplexScalar {
    pub fn new(re: Scalar, im: Scalar) -> ComplexScalar {
        ComplexScalar { re, im }
    }

    pub fn from_real(re: Scalar) -> ComplexScalar {
        ComplexScalar {
            re,
            im: Scalar::zero(),
        }
    }

    pub fn one() -> ComplexScalar {
        ComplexScalar::from_real(Scalar::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> ComplexScalar {
        ComplexScalar {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn mul(&self, rhs: &ComplexScalar) -> ComplexScalar {
        ComplexScalar {
            re: &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            im: &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        }
    }

    pub fn scale(&self, s: &Scalar) -> ComplexScalar {
        ComplexScalar {
            re: &self.re * s,
            im: &self.im * s,
        }
    }

    pub fn norm_sq(&self) -> Scalar {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    /// |z|, exact for rational-modulus inputs.
    pub fn modulus(&self) -> Result<Scalar, ScalarError> {
        self.norm_sq().sqrt()
    }

    /// z / |z|; unit-modulus direction of a nonzero complex scalar.
    pub fn phase(&self) -> Result<ComplexScalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::ZeroInput);
        }
        let m = self.modulus()?;
        Ok(ComplexScalar {
            re: self.re.checked_div(&m)?,
            im: self.im.checked_div(&m)?,
        })
    }
}

impl fmt::Display for ComplexScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, self.im.abs())
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_arithmetic_is_exact() {
        let a = Scalar::from_ratio(1, 3);
        let b = Scalar::from_ratio(1, 6);
        assert_eq!(&a + &b, Scalar::from_ratio(1, 2));
        assert_eq!(&a * &b, Scalar::from_ratio(1, 18));
        assert_eq!(&a - &a, Scalar::zero());
    }

    #[test]
    fn parse_rationals() {
        assert_eq!("3/2".parse::<Scalar>().unwrap(), Scalar::from_ratio(3, 2));
        assert_eq!("-7".parse::<Scalar>().unwrap(), Scalar::from_integer(-7));
        assert!(matches!(
            "1.5".parse::<Scalar>().unwrap(),
            Scalar::Float(_)
        ));
        assert!("1/0".parse::<Scalar>().is_err());
    }

    #[test]
    fn exact_sqrt() {
        assert_eq!(
            Scalar::from_ratio(9, 4).sqrt().unwrap(),
            Scalar::from_ratio(3, 2)
        );
        assert!(Scalar::from_integer(2).sqrt().is_err());
        assert!(Scalar::from_integer(-1).sqrt().is_err());
    }

    #[test]
    fn complex_modulus_and_phase() {
        // 3 + 4i has modulus 5
        let z = ComplexScalar::new(Scalar::from_integer(3), Scalar::from_integer(4));
        assert_eq!(z.modulus().unwrap(), Scalar::from_integer(5));
        let p = z.phase().unwrap();
        assert_eq!(p.norm_sq(), Scalar::one());
        assert_eq!(p.mul(&p.conj()), ComplexScalar::one());
    }

    #[test]
    fn display_forms() {
        use alloc::string::ToString;
        assert_eq!(Scalar::from_ratio(3, 2).to_string(), "3/2");
        assert_eq!(Scalar::from_integer(4).to_string(), "4");
        let z = ComplexScalar::new(Scalar::from_integer(1), Scalar::from_integer(-2));
        assert_eq!(z.to_string(), "1-2i");
    }
}
