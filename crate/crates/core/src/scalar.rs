//! Exact rational scalar.
//!
//! Every quantity in this crate (winning probabilities, expected durations,
//! recurrence coefficients) is a rational function of the chain's rates, so
//! the whole library computes over arbitrary-precision rationals and equality
//! checks between computation paths are exact. Floating point only enters
//! through the explicit conversions in [`crate::float`] and the simulator.

use alloc::string::{String, ToString};
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An exact rational number, always kept in reduced form with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Scalar(BigRational);

impl Scalar {
    pub fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar(BigRational::one())
    }

    pub fn from_integer(value: i64) -> Self {
        Scalar(BigRational::from_integer(BigInt::from(value)))
    }

    /// Builds `numer/denom`, reducing and normalising the sign.
    pub fn from_fraction(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(Scalar(BigRational::new(BigInt::from(numer), BigInt::from(denom))))
    }

    pub fn from_big(numer: BigInt, denom: BigInt) -> Result<Self> {
        if denom.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Scalar(BigRational::new(numer, denom)))
    }

    /// Parses `"a/b"` (integers, `b != 0`) or a decimal literal such as
    /// `"0.25"`. Decimals convert exactly through base-10 rationals, never
    /// through binary floating point.
    pub fn parse(text: &str) -> Result<Self> {
        let s = text.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty input".to_string()));
        }
        if let Some((num, den)) = s.split_once('/') {
            let n = parse_bigint(num)?;
            let d = parse_bigint(den)?;
            if d.is_zero() {
                return Err(Error::DivisionByZero);
            }
            return Ok(Scalar(BigRational::new(n, d)));
        }
        parse_decimal(s)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Multiplicative inverse; zero has none.
    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Scalar(self.0.recip()))
    }

    /// Exact division with an error (instead of a panic) on a zero divisor.
    pub fn checked_div(&self, rhs: &Scalar) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Scalar(&self.0 / &rhs.0))
    }

    /// Integer power. Negative exponents of zero are an error.
    pub fn pow(&self, exp: i32) -> Result<Self> {
        if exp < 0 && self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Scalar(num_traits::pow::Pow::pow(&self.0, exp)))
    }

    /// Nearest binary double, for the float fast path and the simulator.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Correctly rounded decimal rendering with `digits` significant digits
    /// (round half to even). Used for the human-readable `approx` field next
    /// to the exact fraction string.
    pub fn decimal(&self, digits: usize) -> String {
        assert!(digits >= 1);
        if self.is_zero() {
            return "0".to_string();
        }
        let neg = self.is_negative();
        let a = self.numer().abs();
        let b = self.denom().clone();
        // decimal exponent e with 10^e <= a/b < 10^(e+1)
        let mut e = a.to_string().len() as i64 - b.to_string().len() as i64;
        while cmp_with_pow10(&a, &b, e) == Ordering::Less {
            e -= 1;
        }
        while cmp_with_pow10(&a, &b, e + 1) != Ordering::Less {
            e += 1;
        }
        // round a/b * 10^(digits-1-e) to an integer of exactly `digits` digits
        let shift = digits as i64 - 1 - e;
        let (num, den) = if shift >= 0 {
            (a * pow10(shift), b)
        } else {
            (a, b * pow10(-shift))
        };
        let mut scaled = round_half_even(&num, &den);
        if scaled == pow10(digits as i64) {
            scaled /= BigInt::from(10);
            e += 1;
        }
        let body = scaled.to_string();
        debug_assert_eq!(body.len(), digits);
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        if e >= 0 && (e as usize) < digits {
            let point = e as usize + 1;
            out.push_str(&body[..point]);
            if point < digits {
                out.push('.');
                out.push_str(&body[point..]);
            }
        } else if (-4..0).contains(&e) {
            out.push_str("0.");
            for _ in 0..(-e - 1) {
                out.push('0');
            }
            out.push_str(&body);
        } else {
            out.push_str(&body[..1]);
            out.push('.');
            out.push_str(&body[1..]);
            out.push('e');
            out.push_str(&e.to_string());
        }
        out
    }
}

fn pow10(exp: i64) -> BigInt {
    debug_assert!(exp >= 0);
    BigInt::from(10).pow(exp as u32)
}

/// Compares `a/b` (both positive) against `10^e` without negative powers.
fn cmp_with_pow10(a: &BigInt, b: &BigInt, e: i64) -> Ordering {
    if e >= 0 {
        a.cmp(&(pow10(e) * b))
    } else {
        (a * pow10(-e)).cmp(b)
    }
}

/// `num/den` rounded to the nearest integer, ties to even. `den > 0`.
fn round_half_even(num: &BigInt, den: &BigInt) -> BigInt {
    let (q, r) = num_integer::Integer::div_rem(num, den);
    let twice: BigInt = &r * 2;
    match twice.cmp(den) {
        Ordering::Less => q,
        Ordering::Greater => q + 1,
        Ordering::Equal => {
            if num_integer::Integer::is_even(&q) {
                q
            } else {
                q + 1
            }
        }
    }
}

fn parse_bigint(text: &str) -> Result<BigInt> {
    let s = text.trim();
    BigInt::from_str(s).map_err(|_| Error::Parse(s.to_string()))
}

fn parse_decimal(s: &str) -> Result<Scalar> {
    let (sign, rest) = match s.as_bytes()[0] {
        b'-' => (-1i64, &s[1..]),
        b'+' => (1, &s[1..]),
        _ => (1, s),
    };
    let (int_part, frac_part) = match rest.split_once('.') {
        Some((i, f)) => (i, f),
        None => (rest, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::Parse(s.to_string()));
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(s.to_string()));
    }
    let mut digits = String::with_capacity(int_part.len() + frac_part.len());
    digits.push_str(int_part);
    digits.push_str(frac_part);
    if digits.is_empty() {
        return Err(Error::Parse(s.to_string()));
    }
    let numer = BigInt::from_str(&digits).map_err(|_| Error::Parse(s.to_string()))? * sign;
    let denom = pow10(frac_part.len() as i64);
    Ok(Scalar(BigRational::new(numer, denom)))
}

impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scalar::parse(s)
    }
}

impl fmt::Display for Scalar {
    /// Reduced fraction string: `"8/3"`, or just `"8"` for integers.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar($trait::$method(self.0, rhs.0))
            }
        }
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar($trait::$method(&self.0, &rhs.0))
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar($trait::$method(self.0, &rhs.0))
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar($trait::$method(&self.0, rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-&self.0)
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        self.0 *= &rhs.0;
    }
}

/// Sums an iterator of scalars exactly.
impl core::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        let mut acc = Scalar::zero();
        for x in iter {
            acc += &x;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;

    fn s(text: &str) -> Scalar {
        Scalar::parse(text).unwrap()
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(s("1/3"), Scalar::from_fraction(1, 3).unwrap());
        assert_eq!(s("0.5"), Scalar::from_fraction(1, 2).unwrap());
        assert_eq!(s("2/6"), Scalar::from_fraction(1, 3).unwrap());
        assert_eq!(s("0.25"), Scalar::from_fraction(1, 4).unwrap());
        assert_eq!(s("-3/4"), Scalar::from_fraction(-3, 4).unwrap());
        assert_eq!(s("3/-4"), Scalar::from_fraction(-3, 4).unwrap());
        assert_eq!(s("7"), Scalar::from_integer(7));
        assert_eq!(s("-0.125"), Scalar::from_fraction(-1, 8).unwrap());
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(matches!(Scalar::parse("1/0"), Err(Error::DivisionByZero)));
        assert!(Scalar::parse("abc").is_err());
        assert!(Scalar::parse("1.2.3").is_err());
        assert!(Scalar::parse("").is_err());
        assert!(Scalar::parse("1/").is_err());
        assert!(Scalar::parse(".").is_err());
    }

    #[test]
    fn displays_reduced_fractions() {
        assert_eq!(format!("{}", s("8/3")), "8/3");
        assert_eq!(format!("{}", s("4/2")), "2");
        assert_eq!(format!("{}", s("0/5")), "0");
        assert_eq!(format!("{}", s("-10/4")), "-5/2");
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert!(matches!(s("1/2").checked_div(&Scalar::zero()), Err(Error::DivisionByZero)));
        assert!(Scalar::zero().recip().is_err());
        assert!(Scalar::zero().pow(-1).is_err());
    }

    #[test]
    fn decimal_rendering_is_correctly_rounded() {
        assert_eq!(s("8/3").decimal(20), "2.6666666666666666667");
        assert_eq!(s("1/3").decimal(20), "0.33333333333333333333");
        assert_eq!(s("3").decimal(20), "3.0000000000000000000");
        assert_eq!(s("-1/8").decimal(3), "-0.125");
        // ties to even
        assert_eq!(s("1/8").decimal(2), "0.12");
        assert_eq!(s("3/8").decimal(2), "0.38");
        // exponent adjust on round-up
        assert_eq!(s("999/1000").decimal(2), "1.0");
        assert_eq!(s("1/100000").decimal(3), "1.00e-5");
        assert_eq!(Scalar::from_integer(12345678).decimal(4), "1.235e7");
        assert_eq!(Scalar::zero().decimal(20), "0");
    }

    #[test]
    fn pow_handles_negative_exponents() {
        assert_eq!(s("2/3").pow(-2).unwrap(), s("9/4"));
        assert_eq!(s("5").pow(0).unwrap(), Scalar::one());
    }
}
