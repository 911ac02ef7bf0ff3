//! Exact arithmetic in real quadratic fields `Q(sqrt(D))`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A real number `a + b·√d` with rational `a`, `b` and square-free `d`.
///
/// Rationals are stored with `b = 0` and `d = 1`; they combine with any
/// field. Mixing two genuinely irrational numbers from different fields
/// panics, since the result leaves `Q(√d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticNumber {
    a: BigRational,
    b: BigRational,
    d: u64,
}

fn square_free_part(n: u64) -> (u64, u64) {
    // n = k^2 * m with m square-free
    let mut m = n;
    let mut k = 1u64;
    let mut p = 2u64;
    while p * p <= m {
        while m.is_multiple_of(p * p) {
            m /= p * p;
            k *= p;
        }
        p += 1;
    }
    (k, m)
}

impl QuadraticNumber {
    pub fn new(a: BigRational, b: BigRational, d: u64) -> Self {
        assert!(d > 0, "radicand must be positive");
        let (k, m) = square_free_part(d);
        let b = b * BigRational::from_integer(BigInt::from(k));
        if m == 1 {
            return Self::rational(a + b);
        }
        if b.is_zero() {
            return Self::rational(a);
        }
        Self { a, b, d: m }
    }

    pub fn rational(a: BigRational) -> Self {
        Self { a, b: BigRational::zero(), d: 1 }
    }

    pub fn from_int(n: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(p: i64, q: i64) -> Self {
        Self::rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    /// `√n`, reduced to `k·√m`.
    pub fn sqrt(n: u64) -> Self {
        Self::new(BigRational::zero(), BigRational::one(), n)
    }

    /// The golden ratio `(1 + √5)/2`.
    pub fn golden() -> Self {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        Self::new(half.clone(), half, 5)
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn radicand(&self) -> u64 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.a)
    }

    fn field(&self, other: &Self) -> u64 {
        match (self.d, other.d) {
            (1, d) | (d, 1) => d,
            (d, e) if d == e => d,
            (d, e) => panic!("mixed quadratic fields Q(√{d}) and Q(√{e})"),
        }
    }

    pub fn conjugate(&self) -> Self {
        Self { a: self.a.clone(), b: -self.b.clone(), d: self.d }
    }

    /// `a² − b²d`, the field norm.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * BigRational::from_integer(BigInt::from(self.d))
    }

    pub fn signum(&self) -> i32 {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * BigRational::from_integer(BigInt::from(self.d));
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "division by zero");
        let n = self.norm();
        Self { a: &self.a / &n, b: -&self.b / &n, d: self.d }
    }

    /// Exact `⌊x⌋`.
    pub fn floor(&self) -> BigInt {
        if self.is_rational() {
            return self.a.floor().to_integer();
        }
        // x = (P + Q√d)/R with R > 0
        let r = self.a.denom().lcm(self.b.denom());
        let p = self.a.numer() * (&r / self.a.denom());
        let q = self.b.numer() * (&r / self.b.denom());
        let qd = (&q * &q) * BigInt::from(self.d);
        let m = qd.sqrt();
        let shifted = if q.sign() == Sign::Minus { p - m - 1 } else { p + m };
        shifted.div_floor(&r)
    }

    pub fn fract(&self) -> Self {
        self - &Self::rational(BigRational::from_integer(self.floor()))
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        let r = b * (self.d as f64).sqrt();
        if a * r >= 0.0 {
            return a + r;
        }
        // opposite signs cancel: use (a + b√d) = N / (a − b√d)
        let n = self.norm().to_f64().unwrap_or(f64::NAN);
        n / (a - r)
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }
}

fn sign_of(x: &BigRational) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

impl PartialOrd for QuadraticNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadraticNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl From<BigRational> for QuadraticNumber {
    fn from(a: BigRational) -> Self {
        Self::rational(a)
    }
}

impl From<i64> for QuadraticNumber {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl<'a> Add<&'a QuadraticNumber> for &'a QuadraticNumber {
    type Output = QuadraticNumber;
    fn add(self, rhs: &QuadraticNumber) -> QuadraticNumber {
        let d = self.field(rhs);
        QuadraticNumber::new(&self.a + &rhs.a, &self.b + &rhs.b, d)
    }
}

impl<'a> Sub<&'a QuadraticNumber> for &'a QuadraticNumber {
    type Output = QuadraticNumber;
    fn sub(self, rhs: &QuadraticNumber) -> QuadraticNumber {
        let d = self.field(rhs);
        QuadraticNumber::new(&self.a - &rhs.a, &self.b - &rhs.b, d)
    }
}

impl<'a> Mul<&'a QuadraticNumber> for &'a QuadraticNumber {
    type Output = QuadraticNumber;
    fn mul(self, rhs: &QuadraticNumber) -> QuadraticNumber {
        let d = self.field(rhs);
        let dd = BigRational::from_integer(BigInt::from(d));
        let a = &self.a * &rhs.a + &self.b * &rhs.b * dd;
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        QuadraticNumber::new(a, b, d)
    }
}

impl<'a> Div<&'a QuadraticNumber> for &'a QuadraticNumber {
    type Output = QuadraticNumber;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &QuadraticNumber) -> QuadraticNumber {
        self * &rhs.recip()
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for QuadraticNumber {
            type Output = QuadraticNumber;
            fn $m(self, rhs: QuadraticNumber) -> QuadraticNumber {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a QuadraticNumber> for QuadraticNumber {
            type Output = QuadraticNumber;
            fn $m(self, rhs: &QuadraticNumber) -> QuadraticNumber {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for QuadraticNumber {
    type Output = QuadraticNumber;
    fn neg(self) -> QuadraticNumber {
        QuadraticNumber { a: -self.a, b: -self.b, d: self.d }
    }
}

impl fmt::Display for QuadraticNumber {
    /// Rationals print as `p/q`; irrationals as `(a+b√D)/c` over a common
    /// integer denominator.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.a);
        }
        let c = self.a.denom().lcm(self.b.denom());
        let a = self.a.numer() * (&c / self.a.denom());
        let b = self.b.numer() * (&c / self.b.denom());
        let sign = if b.is_negative() { '-' } else { '+' };
        write!(f, "({}{}{}√{})/{}", a, sign, b.abs(), self.d, c)
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse { line: None, msg: format!("bad rational {s:?}") };
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        Ok(BigRational::new(p, q))
    } else {
        Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?))
    }
}

impl FromStr for QuadraticNumber {
    type Err = Error;

    /// Accepts `p/q`, the aliases `sqrt2`, `sqrt3`, `golden`, `sqrtN`, and
    /// `(a+b√D)/c` (also `(a+b*sqrt(D))/c` or without the outer parentheses).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "golden" | "phi" => return Ok(Self::golden()),
            _ => {}
        }
        if let Some(n) = s.strip_prefix("sqrt").filter(|r| !r.starts_with('(')) {
            let n: u64 = n.parse().map_err(|_| Error::Parse { line: None, msg: format!("bad alias {s:?}") })?;
            return Ok(Self::sqrt(n));
        }
        let norm = s.replace("*sqrt(", "√").replace("sqrt(", "√").replace(' ', "");
        if !norm.contains('√') {
            return Ok(Self::rational(parse_rational(&norm)?));
        }
        let bad = || Error::Parse { line: None, msg: format!("bad quadratic {s:?}") };
        let (body, denom) = match norm.rsplit_once(")/") {
            Some((body, c)) => (body.trim_start_matches('('), parse_rational(c)?),
            None => (norm.trim_start_matches('(').trim_end_matches(')'), BigRational::one()),
        };
        let body = body.trim_end_matches(')');
        let (head, radicand) = body.split_once('√').ok_or_else(bad)?;
        let d: u64 = radicand.trim_end_matches(')').parse().map_err(|_| bad())?;
        // head is "a+b", "a-b", "b", "a+", "-"
        let split = head.char_indices().rev().find(|&(i, c)| i > 0 && (c == '+' || c == '-'));
        let (a, b) = match split {
            Some((i, _)) => (&head[..i], &head[i..]),
            None => ("0", head),
        };
        let b = match b {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            b => parse_rational(b.trim_start_matches('+'))?,
        };
        let a = parse_rational(a)?;
        Ok(Self::new(a / &denom, b / denom, d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn display_parses_back(
            a in -500i64..500,
            b in -500i64..500,
            c in 1i64..40,
            e in 1i64..40,
            d in prop::sample::select(vec![2u64, 3, 5, 6, 7, 13]),
        ) {
            let x = QuadraticNumber::new(BigRational::new(a.into(), c.into()), BigRational::new(b.into(), e.into()), d);
            prop_assert_eq!(x.to_string().parse::<QuadraticNumber>().unwrap(), x);
        }
    }

    fn q(s: &str) -> QuadraticNumber {
        s.parse().unwrap()
    }

    #[test]
    fn small_values_keep_precision() {
        // 470832√2 − 665857 ≈ −1.06e-6, 665857² − 2·470832² = 1
        let x = QuadraticNumber::new(
            BigRational::from_integer((-665857).into()),
            BigRational::from_integer(470832.into()),
            2,
        );
        let v = x.to_f64();
        assert!((v * 1331714.0 + 1.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn floor_of_surds() {
        assert_eq!(QuadraticNumber::sqrt(2).floor(), BigInt::from(1));
        assert_eq!((-QuadraticNumber::sqrt(2)).floor(), BigInt::from(-2));
        assert_eq!(QuadraticNumber::golden().floor(), BigInt::from(1));
        let x = &QuadraticNumber::sqrt(2) * &QuadraticNumber::from_int(1000);
        assert_eq!(x.floor(), BigInt::from(1414));
        assert_eq!(QuadraticNumber::sqrt(8).floor(), BigInt::from(2));
    }

    #[test]
    fn square_factors_are_extracted() {
        let x = QuadraticNumber::sqrt(12);
        assert_eq!(x.radicand(), 3);
        assert_eq!(x.b(), &BigRational::from_integer(BigInt::from(2)));
        assert!(QuadraticNumber::sqrt(9).is_rational());
    }

    #[test]
    fn sign_and_order() {
        let r2 = QuadraticNumber::sqrt(2);
        let a = &(&r2 * &QuadraticNumber::from_int(5)) - &QuadraticNumber::from_int(7);
        assert_eq!(a.signum(), 1);
        assert!(QuadraticNumber::from_ratio(7, 5) < r2);
        assert!(QuadraticNumber::from_ratio(3, 2) > r2);
    }

    #[test]
    fn field_ops() {
        let r2 = QuadraticNumber::sqrt(2);
        assert_eq!(&r2 * &r2, QuadraticNumber::from_int(2));
        let x = &r2 + &QuadraticNumber::from_int(1);
        assert_eq!(&x * &x.recip(), QuadraticNumber::from_int(1));
    }

    #[test]
    fn parsing() {
        assert_eq!(q("sqrt2"), QuadraticNumber::sqrt(2));
        assert_eq!(q("golden"), QuadraticNumber::golden());
        assert_eq!(q("(1+1√5)/2"), QuadraticNumber::golden());
        assert_eq!(q("(1+sqrt(5))/2"), QuadraticNumber::golden());
        assert_eq!(q("5/3"), QuadraticNumber::from_ratio(5, 3));
        assert_eq!(
            q("3-2√2"),
            &QuadraticNumber::from_int(3) - &(&QuadraticNumber::sqrt(2) * &QuadraticNumber::from_int(2))
        );
        let g = QuadraticNumber::golden();
        assert_eq!(q(&g.to_string()), g);
    }
}
