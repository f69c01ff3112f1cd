//! Coefficient rings for [`MultiPoly`](crate::poly::MultiPoly).
//!
//! Floating-point rings (`f32`, `f64` and their complex versions) drop
//! negligible terms relative to the largest coefficient; exact rings
//! (`BigRational`, `Complex<BigRational>`) only ever drop true zeros.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Relative modulus below which a floating coefficient is treated as zero.
pub const DEDUP_EPSILON: f64 = 1e-14;

pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self> + 'static {
    /// Whether arithmetic in this ring is exact.
    const EXACT: bool;

    /// Modulus as a double, used for deduplication and scaling.
    fn magnitude(&self) -> f64;

    fn from_i64(n: i64) -> Self;

    /// Parses an unsigned decimal literal (`12`, `0.75`).
    fn from_decimal(text: &str) -> Option<Self>;

    /// Builds `num/den` from two unsigned integer literals.
    fn from_ratio(num: &str, den: &str) -> Option<Self>;

    /// The imaginary unit, if the ring contains one.
    fn imaginary_unit() -> Option<Self>;

    /// Writes a literal that the polynomial grammar parses back to `self`.
    fn write_literal(&self, f: &mut dyn fmt::Write) -> fmt::Result;

    /// Numerical image in `Complex<f64>`.
    fn to_complex64(&self) -> Complex<f64>;

    /// Rejects NaN and infinities.
    fn is_finite(&self) -> bool {
        true
    }

    /// True when `self` should be dropped from a polynomial whose largest
    /// coefficient modulus is `scale`.
    fn negligible(&self, scale: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.magnitude() <= DEDUP_EPSILON * scale || self.is_zero()
        }
    }
}

fn split_decimal(text: &str) -> Option<(&str, &str)> {
    let (int, frac) = match text.split_once('.') {
        Some((a, b)) => (a, b),
        None => (text, ""),
    };
    let digits = |s: &str| s.chars().all(|c| c.is_ascii_digit());
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !digits(int) || !digits(frac) {
        return None;
    }
    Some((int, frac))
}

fn write_float<F: fmt::Display + PartialOrd + Zero>(v: F, f: &mut dyn fmt::Write) -> fmt::Result {
    // Display for floats is the shortest round-trip form and never uses an
    // exponent, so it stays inside the grammar.
    write!(f, "{v}")
}

macro_rules! impl_real_float {
    ($t:ty) => {
        impl Coeff for $t {
            const EXACT: bool = false;

            fn magnitude(&self) -> f64 {
                self.abs() as f64
            }

            fn from_i64(n: i64) -> Self {
                n as $t
            }

            fn from_decimal(text: &str) -> Option<Self> {
                split_decimal(text)?;
                text.parse::<$t>().ok().filter(|v| v.is_finite())
            }

            fn from_ratio(num: &str, den: &str) -> Option<Self> {
                let n: $t = Self::from_decimal(num)?;
                let d: $t = Self::from_decimal(den)?;
                if num.contains('.') || den.contains('.') || d == 0.0 {
                    return None;
                }
                Some(n / d).filter(|v| v.is_finite())
            }

            fn imaginary_unit() -> Option<Self> {
                None
            }

            fn write_literal(&self, f: &mut dyn fmt::Write) -> fmt::Result {
                write_float(*self, f)
            }

            fn to_complex64(&self) -> Complex<f64> {
                Complex::new(*self as f64, 0.0)
            }

            fn is_finite(&self) -> bool {
                <$t>::is_finite(*self)
            }
        }

        impl Coeff for Complex<$t> {
            const EXACT: bool = false;

            fn magnitude(&self) -> f64 {
                self.norm() as f64
            }

            fn from_i64(n: i64) -> Self {
                Complex::new(n as $t, 0.0)
            }

            fn from_decimal(text: &str) -> Option<Self> {
                <$t as Coeff>::from_decimal(text).map(|v| Complex::new(v, 0.0))
            }

            fn from_ratio(num: &str, den: &str) -> Option<Self> {
                <$t as Coeff>::from_ratio(num, den).map(|v| Complex::new(v, 0.0))
            }

            fn imaginary_unit() -> Option<Self> {
                Some(Complex::new(0.0, 1.0))
            }

            fn write_literal(&self, f: &mut dyn fmt::Write) -> fmt::Result {
                if self.im == 0.0 {
                    return write_float(self.re, f);
                }
                f.write_char('(')?;
                write_float(self.re, f)?;
                if self.im < 0.0 {
                    f.write_str(" - ")?;
                    write_float(-self.im, f)?;
                } else {
                    f.write_str(" + ")?;
                    write_float(self.im, f)?;
                }
                f.write_str("*i)")
            }

            fn to_complex64(&self) -> Complex<f64> {
                Complex::new(self.re as f64, self.im as f64)
            }

            fn is_finite(&self) -> bool {
                self.re.is_finite() && self.im.is_finite()
            }
        }
    };
}

impl_real_float!(f64);
impl_real_float!(f32);

fn parse_rational_decimal(text: &str) -> Option<BigRational> {
    let (int, frac) = split_decimal(text)?;
    let digits = format!("{int}{frac}");
    let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let den = num_traits::pow(BigInt::from(10), frac.len());
    Some(BigRational::new(num, den))
}

fn write_rational(v: &BigRational, f: &mut dyn fmt::Write) -> fmt::Result {
    if v.is_integer() {
        write!(f, "{}", v.numer())
    } else {
        write!(f, "{}/{}", v.numer(), v.denom())
    }
}

impl Coeff for BigRational {
    const EXACT: bool = true;

    fn magnitude(&self) -> f64 {
        self.to_f64().map(f64::abs).unwrap_or(f64::INFINITY)
    }

    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_decimal(text: &str) -> Option<Self> {
        parse_rational_decimal(text)
    }

    fn from_ratio(num: &str, den: &str) -> Option<Self> {
        let n: BigInt = num.parse().ok()?;
        let d: BigInt = den.parse().ok()?;
        if d.is_zero() || !num.bytes().all(|c| c.is_ascii_digit()) {
            return None;
        }
        Some(BigRational::new(n, d))
    }

    fn imaginary_unit() -> Option<Self> {
        None
    }

    fn write_literal(&self, f: &mut dyn fmt::Write) -> fmt::Result {
        write_rational(self, f)
    }

    fn to_complex64(&self) -> Complex<f64> {
        Complex::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
}

impl Coeff for Complex<BigRational> {
    const EXACT: bool = true;

    fn magnitude(&self) -> f64 {
        self.to_complex64().norm()
    }

    fn from_i64(n: i64) -> Self {
        Complex::new(BigRational::from_i64(n), BigRational::zero())
    }

    fn from_decimal(text: &str) -> Option<Self> {
        parse_rational_decimal(text).map(|v| Complex::new(v, BigRational::zero()))
    }

    fn from_ratio(num: &str, den: &str) -> Option<Self> {
        <BigRational as Coeff>::from_ratio(num, den).map(|v| Complex::new(v, BigRational::zero()))
    }

    fn imaginary_unit() -> Option<Self> {
        Some(Complex::new(BigRational::zero(), BigRational::one()))
    }

    fn write_literal(&self, f: &mut dyn fmt::Write) -> fmt::Result {
        if self.im.is_zero() {
            return write_rational(&self.re, f);
        }
        f.write_char('(')?;
        write_rational(&self.re, f)?;
        if self.im < BigRational::zero() {
            f.write_str(" - ")?;
            write_rational(&-self.im.clone(), f)?;
        } else {
            f.write_str(" + ")?;
            write_rational(&self.im, f)?;
        }
        f.write_str("*i)")
    }

    fn to_complex64(&self) -> Complex<f64> {
        Complex::new(self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit<T: Coeff>(v: &T) -> String {
        let mut s = String::new();
        v.write_literal(&mut s).unwrap();
        s
    }

    #[test]
    fn decimal_literals() {
        assert_eq!(<f64 as Coeff>::from_decimal("0.75"), Some(0.75));
        assert_eq!(<f64 as Coeff>::from_decimal("12"), Some(12.0));
        assert_eq!(<f64 as Coeff>::from_decimal("1.2.3"), None);
        assert_eq!(<f64 as Coeff>::from_decimal("."), None);
        assert_eq!(<f64 as Coeff>::from_ratio("3", "4"), Some(0.75));
        assert_eq!(<f64 as Coeff>::from_ratio("3", "0"), None);
        let q = <BigRational as Coeff>::from_decimal("0.3").unwrap();
        assert_eq!(q, BigRational::new(3.into(), 10.into()));
    }

    #[test]
    fn complex_literal_shape() {
        assert_eq!(lit(&Complex::new(0.5, -2.0)), "(0.5 - 2*i)");
        assert_eq!(lit(&Complex::new(-3.0, 0.0)), "-3");
        let q = Complex::new(BigRational::new(3.into(), 4.into()), BigRational::from_i64(-1));
        assert_eq!(lit(&q), "(3/4 - 1*i)");
    }
}
