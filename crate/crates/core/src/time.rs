//! Exact time values.
//!
//! Every input datum (processing times, release dates, adversary offsets) is a
//! rational number. The two-stage t-Switch rule starts batches at instants that
//! involve the golden ratio, so points in time live in the quadratic field
//! `Q(√5)`: a value `a + b·√5` with rational `a` and `b`. Comparisons are
//! decided exactly by rational arithmetic on squares and signs.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Arbitrary-precision rational number, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

/// Shorthand for the rational `numer / denom`.
///
/// Panics if `denom` is zero.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Shorthand for an integral rational.
pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational {input:?}: {reason}")]
pub struct ParseRationalError {
    pub input: String,
    pub reason: &'static str,
}

/// Parses `"num/den"` or a bare integer `"num"`. Decimal points are rejected.
pub fn parse_rational(input: &str) -> Result<Rational, ParseRationalError> {
    let err = |reason| ParseRationalError {
        input: input.to_string(),
        reason,
    };
    let trimmed = input.trim();
    let (numer, denom) = match trimmed.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (trimmed, "1"),
    };
    let numer = BigInt::from_str(numer).map_err(|_| err("numerator is not an integer"))?;
    let denom = BigInt::from_str(denom).map_err(|_| err("denominator is not an integer"))?;
    if denom.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(Rational::new(numer, denom))
}

/// Canonical `"num/den"` form in lowest terms, denominator always written.
pub fn format_rational(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Serde adapter storing a [`Rational`] as its canonical `"num/den"` string.
pub mod rational_string {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for a list of rationals.
pub mod rational_string_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(values: &[Rational], serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(values.len()))?;
        for v in values {
            seq.serialize_element(&format_rational(v))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> Result<Vec<Rational>, D::Error> {
        let texts = Vec::<String>::deserialize(deserializer)?;
        texts
            .iter()
            .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// A point in time (or a duration) `a + b·√5`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QTime {
    a: Rational,
    b: Rational,
}

impl QTime {
    pub fn new(a: Rational, b: Rational) -> Self {
        QTime { a, b }
    }

    pub fn zero() -> Self {
        QTime::default()
    }

    pub fn from_int(value: i64) -> Self {
        QTime::from(int(value))
    }

    /// The golden ratio `(1 + √5) / 2`.
    pub fn phi() -> Self {
        QTime::new(rat(1, 2), rat(1, 2))
    }

    pub fn sqrt5() -> Self {
        QTime::new(Rational::zero(), Rational::one())
    }

    /// Rational part.
    pub fn a(&self) -> &Rational {
        &self.a
    }

    /// Coefficient of `√5`.
    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.a.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Exact sign of the represented real number.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&Rational::zero());
        let sb = self.b.cmp(&Rational::zero());
        match (sa, sb) {
            (s, Ordering::Equal) => s,
            (Ordering::Equal, s) => s,
            (x, y) if x == y => x,
            // Opposite signs: the larger magnitude wins, decided on squares.
            (x, y) => {
                let lhs = &self.a * &self.a;
                let rhs = &self.b * &self.b * int(5);
                match lhs.cmp(&rhs) {
                    Ordering::Greater => x,
                    Ordering::Less => y,
                    // a² = 5b² has no solution with b ≠ 0 over the rationals.
                    Ordering::Equal => unreachable!("√5 is irrational"),
                }
            }
        }
    }

    pub fn scale(&self, factor: &Rational) -> QTime {
        QTime::new(&self.a * factor, &self.b * factor)
    }

    /// Division by a nonzero rational.
    pub fn div_rational(&self, divisor: &Rational) -> QTime {
        QTime::new(&self.a / divisor, &self.b / divisor)
    }

    /// `a - b·√5`.
    pub fn conjugate(&self) -> QTime {
        QTime::new(self.a.clone(), -&self.b)
    }

    /// Field norm `a² - 5b²`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - &self.b * &self.b * int(5)
    }

    /// Nearest `f64`; for display and diagnostics only.
    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        a + b * 5f64.sqrt()
    }

    /// Largest integer `k` with `k <= self`.
    pub fn floor(&self) -> BigInt {
        if self.is_rational() {
            return self.a.floor().to_integer();
        }
        let estimate = self.to_f64().floor();
        let mut k = if estimate.is_finite() {
            BigInt::from(estimate as i64)
        } else {
            self.a.floor().to_integer()
        };
        let le = |k: &BigInt| QTime::from(Rational::from_integer(k.clone())) <= *self;
        if le(&k) {
            // gallop upwards
            let mut step = BigInt::one();
            while le(&(&k + &step)) {
                k += &step;
                step *= 2;
            }
            while step > BigInt::one() {
                step /= 2;
                if le(&(&k + &step)) {
                    k += &step;
                }
            }
        } else {
            let mut step = BigInt::one();
            while !le(&(&k - &step)) {
                k -= &step;
                step *= 2;
            }
            k -= &step;
            // k <= self now; climb back within the last step
            while step > BigInt::one() {
                step /= 2;
                if le(&(&k + &step)) {
                    k += &step;
                }
            }
        }
        k
    }

    /// Smallest integer `k` with `k >= self`.
    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    pub fn max_of<'a>(&'a self, other: &'a QTime) -> &'a QTime {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl From<Rational> for QTime {
    fn from(a: Rational) -> Self {
        QTime::new(a, Rational::zero())
    }
}

impl From<&Rational> for QTime {
    fn from(a: &Rational) -> Self {
        QTime::new(a.clone(), Rational::zero())
    }
}

impl From<i64> for QTime {
    fn from(value: i64) -> Self {
        QTime::from_int(value)
    }
}

impl Ord for QTime {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.b == other.b {
            return self.a.cmp(&other.a);
        }
        (self - other).signum()
    }
}

impl PartialOrd for QTime {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Exact order of two points in time.
pub fn compare_qtime(x: &QTime, y: &QTime) -> Ordering {
    x.cmp(y)
}

impl fmt::Debug for QTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QTime({})", self)
    }
}

impl fmt::Display for QTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let coeff = |f: &mut fmt::Formatter<'_>, b: &Rational| {
            if b.is_one() {
                write!(f, "√5")
            } else {
                write!(f, "{}√5", b)
            }
        };
        if self.a.is_zero() {
            if self.b.is_negative() {
                write!(f, "-")?;
            }
            return coeff(f, &self.b.abs());
        }
        write!(f, "{}", self.a)?;
        if self.b.is_negative() {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        coeff(f, &self.b.abs())
    }
}

#[derive(Serialize, Deserialize)]
struct QTimeRepr {
    #[serde(with = "rational_string")]
    a: Rational,
    #[serde(with = "rational_string")]
    b: Rational,
}

impl Serialize for QTime {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        QTimeRepr {
            a: self.a.clone(),
            b: self.b.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QTime {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = QTimeRepr::deserialize(deserializer)?;
        Ok(QTime::new(repr.a, repr.b))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&QTime> for &QTime {
            type Output = QTime;
            fn $method(self, rhs: &QTime) -> QTime {
                let f: fn(&QTime, &QTime) -> QTime = $body;
                f(self, rhs)
            }
        }
        impl $trait<QTime> for QTime {
            type Output = QTime;
            fn $method(self, rhs: QTime) -> QTime {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&QTime> for QTime {
            type Output = QTime;
            fn $method(self, rhs: &QTime) -> QTime {
                (&self).$method(rhs)
            }
        }
        impl $trait<QTime> for &QTime {
            type Output = QTime;
            fn $method(self, rhs: QTime) -> QTime {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |x, y| QTime::new(&x.a + &y.a, &x.b + &y.b));
forward_binop!(Sub, sub, |x, y| QTime::new(&x.a - &y.a, &x.b - &y.b));
forward_binop!(Mul, mul, |x, y| QTime::new(
    &x.a * &y.a + &x.b * &y.b * int(5),
    &x.a * &y.b + &x.b * &y.a
));
forward_binop!(Div, div, |x, y| {
    let norm = y.norm();
    assert!(!norm.is_zero(), "division of QTime by zero");
    (x * &y.conjugate()).div_rational(&norm)
});

impl Add<&Rational> for &QTime {
    type Output = QTime;
    fn add(self, rhs: &Rational) -> QTime {
        QTime::new(&self.a + rhs, self.b.clone())
    }
}

impl Mul<&Rational> for &QTime {
    type Output = QTime;
    fn mul(self, rhs: &Rational) -> QTime {
        self.scale(rhs)
    }
}

impl Neg for QTime {
    type Output = QTime;
    fn neg(self) -> QTime {
        QTime::new(-self.a, -self.b)
    }
}

impl Neg for &QTime {
    type Output = QTime;
    fn neg(self) -> QTime {
        QTime::new(-&self.a, -&self.b)
    }
}

impl AddAssign<&QTime> for QTime {
    fn add_assign(&mut self, rhs: &QTime) {
        self.a += &rhs.a;
        self.b += &rhs.b;
    }
}

impl AddAssign<&Rational> for QTime {
    fn add_assign(&mut self, rhs: &Rational) {
        self.a += rhs;
    }
}

impl SubAssign<&QTime> for QTime {
    fn sub_assign(&mut self, rhs: &QTime) {
        self.a -= &rhs.a;
        self.b -= &rhs.b;
    }
}

impl Sum for QTime {
    fn sum<I: Iterator<Item = QTime>>(iter: I) -> QTime {
        iter.fold(QTime::zero(), |mut acc, x| {
            acc += &x;
            acc
        })
    }
}

impl<'a> Sum<&'a QTime> for QTime {
    fn sum<I: Iterator<Item = &'a QTime>>(iter: I) -> QTime {
        iter.fold(QTime::zero(), |mut acc, x| {
            acc += x;
            acc
        })
    }
}

/// Writes an element of `Q(√5)` as `(p + q·√5) / d` with integers `p`, `q`
/// and `d > 0` sharing no common factor. Returns `(p, q, d)`.
pub fn integral_form(x: &QTime) -> (BigInt, BigInt, BigInt) {
    let d = x.a.denom().lcm(x.b.denom());
    let p = x.a.numer() * (&d / x.a.denom());
    let q = x.b.numer() * (&d / x.b.denom());
    let g = p.gcd(&q).gcd(&d);
    if g.is_zero() || g.is_one() {
        return (p, q, d);
    }
    (&p / &g, &q / &g, &d / &g)
}
