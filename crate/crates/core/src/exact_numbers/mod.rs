//! Exact arithmetic in `Q` and in real quadratic fields `Q(sqrt(d))`.
//!
//! Every value is kept in canonical form: both rational parts reduced with a
//! positive denominator, `d` square-free, and `b = 0` forces `d = 0`. Signs and
//! floors are decided with integer arithmetic only.

pub(crate) mod parse;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use parse::{format_rational, parse_rational};

/// A number `a + b*sqrt(d)` with rational `a`, `b`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QuadExt {
    a: BigRational,
    b: BigRational,
    d: u64,
}

/// Splits `d` as `s^2 * core` with `core` square-free.
fn square_free_split(d: u64) -> (u64, u64) {
    let mut core = d;
    let mut s = 1u64;
    let mut p = 2u64;
    while p.saturating_mul(p) <= core {
        while core.is_multiple_of(p * p) {
            core /= p * p;
            s *= p;
        }
        p += 1;
    }
    (s, core)
}

/// True when `d` has no repeated prime factor (0 and 1 count as square-free).
pub fn is_square_free(d: u64) -> bool {
    square_free_split(d).0 == 1
}

impl QuadExt {
    /// Builds `a + b*sqrt(d)`, pulling square factors out of `d`.
    pub fn new(a: BigRational, b: BigRational, d: u64) -> Self {
        let (s, core) = square_free_split(d);
        match core {
            0 => Self::rational(a),
            1 => Self::rational(a + b * BigRational::from_integer(BigInt::from(s))),
            _ => {
                let b = b * BigRational::from_integer(BigInt::from(s));
                if b.is_zero() {
                    Self::rational(a)
                } else {
                    QuadExt { a, b, d: core }
                }
            }
        }
    }

    pub fn rational(a: BigRational) -> Self {
        QuadExt {
            a,
            b: BigRational::zero(),
            d: 0,
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_int(n: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::rational(BigRational::from_integer(n))
    }

    /// `coef * sqrt(d)`.
    pub fn sqrt_times(coef: BigRational, d: u64) -> Self {
        Self::new(BigRational::zero(), coef, d)
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn irrational_part(&self) -> &BigRational {
        &self.b
    }

    /// Square-free radicand, or 0 for a rational value.
    pub fn field(&self) -> u64 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.d == 0
    }

    pub fn is_zero(&self) -> bool {
        self.d == 0 && self.a.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.a)
    }

    pub fn is_integer(&self) -> bool {
        self.is_rational() && self.a.is_integer()
    }

    /// The radicand shared by `self` and `other`, if any.
    pub fn common_field(&self, other: &Self) -> Result<u64> {
        match (self.d, other.d) {
            (0, d) | (d, 0) => Ok(d),
            (x, y) if x == y => Ok(x),
            (x, y) => Err(Error::MixedField(x, y)),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let d = self.common_field(other)?;
        Ok(Self::new(&self.a + &other.a, &self.b + &other.b, d))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        let d = self.common_field(other)?;
        Ok(Self::new(&self.a - &other.a, &self.b - &other.b, d))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let d = self.common_field(other)?;
        let dq = BigRational::from_integer(BigInt::from(d));
        let a = &self.a * &other.a + &self.b * &other.b * dq;
        let b = &self.a * &other.b + &other.a * &self.b;
        Ok(Self::new(a, b, d))
    }

    /// `a - b*sqrt(d)`.
    pub fn conjugate(&self) -> Self {
        Self::new(self.a.clone(), -self.b.clone(), self.d)
    }

    /// Field norm `a^2 - d*b^2`.
    pub fn norm(&self) -> BigRational {
        let dq = BigRational::from_integer(BigInt::from(self.d));
        &self.a * &self.a - &self.b * &self.b * dq
    }

    pub fn try_inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::InvalidInput("division by zero".into()));
        }
        let n = self.norm();
        let c = self.conjugate();
        Ok(Self::new(&c.a / &n, &c.b / &n, c.d))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.common_field(other)?;
        self.try_mul(&other.try_inv()?)
    }

    pub fn scale_rational(&self, q: &BigRational) -> Self {
        Self::new(&self.a * q, &self.b * q, self.d)
    }

    pub fn scale_int(&self, m: i64) -> Self {
        self.scale_rational(&BigRational::from_integer(BigInt::from(m)))
    }

    /// Exact sign of `a + b*sqrt(d)`.
    pub fn sign(&self) -> Ordering {
        let sa = self.a.cmp(&BigRational::zero());
        let sb = self.b.cmp(&BigRational::zero());
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        // opposite signs: compare a^2 with b^2 d; equality is impossible for square-free d > 1
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * BigRational::from_integer(BigInt::from(self.d));
        match sa {
            Ordering::Greater => a2.cmp(&b2d),
            _ => b2d.cmp(&a2),
        }
    }

    pub fn signum(&self) -> i8 {
        match self.sign() {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.sign() == Ordering::Less
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn cmp_exact(&self, other: &Self) -> Result<Ordering> {
        Ok(self.try_sub(other)?.sign())
    }

    /// Rational `lo < self < hi` with `hi - lo <= 1`; both equal `self` when rational.
    pub fn rational_bounds(&self) -> (BigRational, BigRational) {
        if self.is_rational() {
            return (self.a.clone(), self.a.clone());
        }
        let p = self.b.numer();
        let q = self.b.denom();
        // |b| sqrt(d) = sqrt(p^2 d) / q, and sqrt(p^2 d) lies strictly between s and s + 1
        let s = (p * p * BigInt::from(self.d)).sqrt();
        let lo = BigRational::new(s.clone(), q.clone());
        let hi = BigRational::new(s + BigInt::one(), q.clone());
        if p.is_positive() {
            (&self.a + lo, &self.a + hi)
        } else {
            (&self.a - hi, &self.a - lo)
        }
    }

    /// Largest integer `n` with `n <= self`.
    pub fn floor(&self) -> BigInt {
        if self.is_rational() {
            return self.a.floor().to_integer();
        }
        let (_, hi) = self.rational_bounds();
        let n = hi.floor().to_integer();
        if self.try_sub(&Self::from_bigint(n.clone())).expect("same field").sign() == Ordering::Less {
            n - BigInt::one()
        } else {
            n
        }
    }

    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    /// `self - floor(self)`, always in `[0, 1)`.
    pub fn frac(&self) -> Self {
        Self::new(
            &self.a - BigRational::from_integer(self.floor()),
            self.b.clone(),
            self.d,
        )
    }

    /// Floor as `i64`; panics when out of range (coordinates here are small).
    pub fn floor_i64(&self) -> i64 {
        self.floor().to_i64().expect("floor fits in i64")
    }

    /// Approximate value. Display only; never used in a decision.
    pub fn to_f64_approx(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        a + b * (self.d as f64).sqrt()
    }

    /// Least common multiple of the denominators of a rational value.
    pub fn denominator(&self) -> Option<BigInt> {
        self.as_rational().map(|r| r.denom().clone())
    }

    /// A positive rational strictly below a positive value.
    pub fn rational_below(&self) -> Option<BigRational> {
        if !self.is_positive() {
            return None;
        }
        let mut n = BigInt::from(2);
        loop {
            let scaled = self.scale_rational(&BigRational::from_integer(n.clone()));
            let f = scaled.floor();
            if f.is_positive() {
                // floor(x n)/n <= x, halved to make it strict
                return Some(BigRational::new(f, n * BigInt::from(2)));
            }
            n *= 2;
        }
    }
}

/// Smallest `k >= k_start` with `frac(k * alpha) < epsilon`.
///
/// Terminates for every irrational `alpha` since `{k alpha}` is dense in `[0, 1)`.
pub fn weyl_find(alpha: &QuadExt, epsilon: &BigRational, k_start: u64) -> Result<u64> {
    if alpha.is_rational() {
        return Err(Error::InvalidInput(
            "weyl_find needs an irrational alpha; use the denominator for rational values".into(),
        ));
    }
    if !epsilon.is_positive() || *epsilon >= BigRational::one() {
        return Err(Error::InvalidInput(format!(
            "epsilon must lie in (0, 1), got {}",
            format_rational(epsilon)
        )));
    }
    let eps = QuadExt::rational(epsilon.clone());
    let mut k = k_start;
    loop {
        let fk = alpha.scale_int(k as i64).frac();
        if fk.cmp_exact(&eps)? == Ordering::Less {
            return Ok(k);
        }
        k += 1;
    }
}

/// Radicand shared by every value, or 0 if all are rational.
pub fn common_field<'a>(values: impl IntoIterator<Item = &'a QuadExt>) -> Result<u64> {
    let mut d = 0u64;
    for v in values {
        d = match (d, v.field()) {
            (0, x) | (x, 0) => x,
            (x, y) if x == y => x,
            (x, y) => return Err(Error::MixedField(x, y)),
        };
    }
    Ok(d)
}

impl PartialOrd for QuadExt {
    /// `None` for irrationals from different fields.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.cmp_exact(other).ok()
    }
}

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt::new(-self.a, -self.b, self.d)
    }
}

impl Neg for &QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt::new(-self.a.clone(), -self.b.clone(), self.d)
    }
}

// Operator forms panic on mixed fields; callers validate the field up front.
macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&QuadExt> for &QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: &QuadExt) -> QuadExt {
                self.$checked(rhs).expect("operands in one quadratic field")
            }
        }
        impl $tr<QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: QuadExt) -> QuadExt {
                (&self).$checked(&rhs).expect("operands in one quadratic field")
            }
        }
        impl $tr<&QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: &QuadExt) -> QuadExt {
                (&self).$checked(rhs).expect("operands in one quadratic field")
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl From<i64> for QuadExt {
    fn from(n: i64) -> Self {
        QuadExt::from_int(n)
    }
}

impl From<BigRational> for QuadExt {
    fn from(q: BigRational) -> Self {
        QuadExt::rational(q)
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return f.write_str(&format_rational(&self.a));
        }
        let b_abs = self.b.abs();
        let radical = if b_abs.is_one() {
            format!("sqrt({})", self.d)
        } else {
            format!("{}*sqrt({})", format_rational(&b_abs), self.d)
        };
        if self.a.is_zero() {
            let sign = if self.b.is_negative() { "-" } else { "" };
            write!(f, "{sign}{radical}")
        } else {
            let op = if self.b.is_negative() { '-' } else { '+' };
            write!(f, "{}{op}{radical}", format_rational(&self.a))
        }
    }
}

impl FromStr for QuadExt {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse::parse_quad(s)
    }
}

impl Serialize for QuadExt {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QuadExt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `lcm` of a list of positive integers.
pub(crate) fn lcm_all<'a>(values: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, v| acc.lcm(v))
}
