//! Rigorous bounds on astronomically large positive quantities.
//!
//! A [`LogMagnitude`] stores an interval `[lower, upper]` together with a
//! level `h`; the represented quantity lies in `[exp^h(lower), exp^h(upper)]`
//! where `exp^h` is the `h`-fold iterated exponential. Level 1 is the plain
//! log-domain; higher levels appear when digits such as `⌈e^{q²}⌉` are
//! iterated, since `ln q_k` itself overflows a double after a few steps.
//! Every operation rounds outward, so bounds only ever widen.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

/// Above this a level-0 value is promoted to level 1.
const PROMOTE: f64 = 1e100;
/// Below this a level-`h ≥ 1` value is demoted (e^230 < 1e100).
const DEMOTE: f64 = 230.0;

fn down(x: f64) -> f64 {
    if x.is_infinite() {
        return x;
    }
    x - x.abs() * 4e-16 - 1e-307
}

fn up(x: f64) -> f64 {
    if x.is_infinite() {
        return x;
    }
    x + x.abs() * 4e-16 + 1e-307
}

fn ln_down(x: f64) -> f64 {
    if x <= 0.0 {
        f64::NEG_INFINITY
    } else {
        down(x.ln())
    }
}

fn ln_up(x: f64) -> f64 {
    if x <= 0.0 {
        f64::NEG_INFINITY
    } else {
        up(x.ln())
    }
}

fn exp_down(x: f64) -> f64 {
    down(x.exp()).max(0.0)
}

fn exp_up(x: f64) -> f64 {
    up(x.exp())
}

/// Interval bounds on a positive quantity, possibly at an iterated-log level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogMagnitude {
    level: u32,
    lower: f64,
    upper: f64,
}

/// One endpoint of a magnitude, used for comparisons across levels.
#[derive(Clone, Copy, Debug)]
struct Point {
    level: u32,
    value: f64,
}

impl Point {
    /// Re-express at a higher level by taking logs, rounding in `dir`.
    fn raise_to(self, level: u32, round_up: bool) -> f64 {
        let mut v = self.value;
        for _ in self.level..level {
            v = if round_up { ln_up(v) } else { ln_down(v) };
        }
        v
    }
}

impl Point {
    /// The endpoint as an ordinary double, rounding down (may be infinite).
    fn lower_value(self) -> f64 {
        let mut v = self.value;
        for _ in 0..self.level {
            v = exp_down(v);
        }
        v
    }
}

fn cmp_points(a: Point, a_up: bool, b: Point, b_up: bool) -> Ordering {
    let level = a.level.max(b.level);
    let x = a.raise_to(level, a_up);
    let y = b.raise_to(level, b_up);
    x.partial_cmp(&y).unwrap_or(Ordering::Equal)
}

impl LogMagnitude {
    /// Bounds on an ordinary real number (level 0).
    pub fn from_bounds(lower: f64, upper: f64) -> Self {
        assert!(lower <= upper, "empty interval [{lower}, {upper}]");
        Self { level: 0, lower, upper }.normalize()
    }

    pub fn from_f64(x: f64) -> Self {
        Self::from_bounds(down(x), up(x))
    }

    /// Bounds on `e^lower ..= e^upper`, i.e. given log-domain bounds.
    pub fn from_ln_bounds(ln_lower: f64, ln_upper: f64) -> Self {
        assert!(ln_lower <= ln_upper);
        Self { level: 1, lower: ln_lower, upper: ln_upper }.normalize()
    }

    pub fn from_level(level: u32, lower: f64, upper: f64) -> Self {
        assert!(lower <= upper);
        Self { level, lower, upper }.normalize()
    }

    pub fn from_biguint(n: &BigUint) -> Self {
        match n.to_f64() {
            Some(x) if x.is_finite() => Self::from_f64(x),
            _ => {
                // n in [2^(bits-1), 2^bits)
                let bits = n.bits() as f64;
                let ln2 = std::f64::consts::LN_2;
                Self::from_ln_bounds(down((bits - 1.0) * ln2), up(bits * ln2))
            }
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    fn normalize(mut self) -> Self {
        loop {
            if self.level == 0 && self.upper > PROMOTE {
                self.lower = ln_down(self.lower);
                self.upper = ln_up(self.upper);
                self.level = 1;
            } else if self.level > 0 && self.upper < DEMOTE {
                self.lower = exp_down(self.lower);
                self.upper = exp_up(self.upper);
                self.level -= 1;
            } else {
                return self;
            }
        }
    }

    fn lo_point(&self) -> Point {
        Point { level: self.level, value: self.lower }
    }

    fn hi_point(&self) -> Point {
        Point { level: self.level, value: self.upper }
    }

    fn hull(lo: Point, hi: Point) -> Self {
        let level = lo.level.max(hi.level);
        let lower = lo.raise_to(level, false);
        let upper = hi.raise_to(level, true);
        Self { level, lower, upper: upper.max(lower) }.normalize()
    }

    /// The interval from the lower end of `lo` to the upper end of `hi`.
    pub fn span(lo: &Self, hi: &Self) -> Self {
        Self::hull(lo.lo_point(), hi.hi_point())
    }

    /// Bounds on `ln x`.
    pub fn ln(&self) -> Self {
        if self.level == 0 {
            Self { level: 0, lower: ln_down(self.lower), upper: ln_up(self.upper) }
        } else {
            Self { level: self.level - 1, lower: self.lower, upper: self.upper }.normalize()
        }
    }

    /// Bounds on `e^x`.
    pub fn exp(&self) -> Self {
        Self { level: self.level + 1, lower: self.lower, upper: self.upper }.normalize()
    }

    /// Bounds on `x + c` for an ordinary number `c ∈ [lo, hi]`.
    ///
    /// At level ≥ 1 the quantity exceeds `e^230`, so `|c| ≤ 1e90` only
    /// perturbs it by a relative `1.3e-10`.
    pub fn add_small(&self, lo: f64, hi: f64) -> Self {
        if self.level == 0 {
            return Self { level: 0, lower: down(self.lower + lo), upper: up(self.upper + hi) }.normalize();
        }
        assert!(lo.abs() <= 1e90 && hi.abs() <= 1e90, "shift too large for add_small");
        let rel_lo = if lo < 0.0 { -1.4e-10 } else { 0.0 };
        let rel_hi = if hi > 0.0 { 1.4e-10 } else { 0.0 };
        self.ln().add_small(rel_lo, rel_hi).exp()
    }

    /// Bounds on `k·x` for `k > 0`.
    pub fn scale(&self, k: f64) -> Self {
        assert!(k > 0.0);
        if self.level == 0 {
            let (a, b) = (self.lower * k, self.upper * k);
            return Self { level: 0, lower: down(a.min(b)), upper: up(a.max(b)) }.normalize();
        }
        self.ln().add_small(ln_down(k), ln_up(k)).exp()
    }

    /// Bounds on `x + y` for non-negative `x`, `y`.
    pub fn add(&self, other: &Self) -> Self {
        if self.level == 0 && other.level == 0 {
            return Self { level: 0, lower: down(self.lower + other.lower), upper: up(self.upper + other.upper) }
                .normalize();
        }
        let (big, small) = if cmp_points(self.hi_point(), true, other.hi_point(), true) == Ordering::Less {
            (other, self)
        } else {
            (self, other)
        };
        let lo = if cmp_points(self.lo_point(), false, other.lo_point(), false) == Ordering::Less {
            other.lo_point()
        } else {
            self.lo_point()
        };
        // ln(B + S) = ln B + ln(1 + S/B) with S/B = exp(ln S − ln B)
        let ln_b = Self { level: big.level, lower: big.upper, upper: big.upper }.ln();
        let ln_s = Self { level: small.level, lower: small.upper, upper: small.upper }.ln();
        let delta = match (ln_b.level, ln_s.level) {
            (0, 0) => up((ln_s.upper - ln_b.lower).min(0.0).exp().ln_1p()),
            _ => {
                let gap = ln_b.lo_point().lower_value();
                let s = if ln_s.level == 0 { ln_s.upper } else { f64::INFINITY };
                if gap - s > 750.0 {
                    1e-300
                } else {
                    std::f64::consts::LN_2 * (1.0 + 1e-15)
                }
            }
        };
        let hi = ln_b.add_small(0.0, delta).exp();
        Self::hull(lo, hi.hi_point())
    }

    /// Bounds on `x·y` for `x, y ≥ 1`.
    pub fn mul(&self, other: &Self) -> Self {
        if self.level == 0 && other.level == 0 {
            return Self { level: 0, lower: down(self.lower * other.lower), upper: up(self.upper * other.upper) }
                .normalize();
        }
        self.ln().add(&other.ln()).exp()
    }

    pub fn square(&self) -> Self {
        if self.level == 0 {
            return self.mul(self);
        }
        self.ln().scale(2.0).exp()
    }

    /// `Some(true)` if certainly `self ≥ other`, `Some(false)` if certainly
    /// `self < other`, `None` when the intervals overlap.
    pub fn certainly_ge(&self, other: &Self) -> Option<bool> {
        if cmp_points(self.lo_point(), false, other.hi_point(), true) != Ordering::Less {
            Some(true)
        } else if cmp_points(self.hi_point(), true, other.lo_point(), false) == Ordering::Less {
            Some(false)
        } else {
            None
        }
    }

    /// Bounds on `ln x` as doubles, when representable.
    pub fn ln_bounds(&self) -> Option<(f64, f64)> {
        let l = self.ln();
        (l.level == 0).then_some((l.lower, l.upper))
    }

    /// Midpoint as a double (infinite when beyond range).
    pub fn approx(&self) -> f64 {
        if self.level == 0 {
            0.5 * (self.lower + self.upper)
        } else {
            let mut v = 0.5 * (self.lower + self.upper);
            for _ in 0..self.level {
                v = v.exp();
            }
            v
        }
    }

    pub fn is_finite_f64(&self) -> bool {
        self.level == 0
    }
}

impl fmt::Display for LogMagnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.level {
            0 => write!(f, "[{:.6e}, {:.6e}]", self.lower, self.upper),
            1 => write!(f, "exp[{:.6e}, {:.6e}]", self.lower, self.upper),
            h => write!(f, "exp^{h}[{:.6e}, {:.6e}]", self.lower, self.upper),
        }
    }
}

/// Wire form: `{"ln_lower": x, "ln_upper": y}`, with an extra `"log_level"`
/// when `ln x` itself overflows (the bounds are then on the `log_level`-fold
/// iterated logarithm).
#[derive(Serialize, Deserialize)]
struct Wire {
    ln_lower: f64,
    ln_upper: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    log_level: Option<u32>,
}

impl Serialize for LogMagnitude {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let wire = if self.level == 0 {
            Wire { ln_lower: ln_down(self.lower), ln_upper: ln_up(self.upper), log_level: None }
        } else if self.level == 1 {
            Wire { ln_lower: self.lower, ln_upper: self.upper, log_level: None }
        } else {
            Wire { ln_lower: self.lower, ln_upper: self.upper, log_level: Some(self.level) }
        };
        wire.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LogMagnitude {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = Wire::deserialize(d)?;
        if w.ln_lower > w.ln_upper {
            return Err(serde::de::Error::custom("ln_lower > ln_upper"));
        }
        Ok(Self::from_level(w.log_level.unwrap_or(1), w.ln_lower, w.ln_upper))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn promotes_and_demotes() {
        let x = LogMagnitude::from_f64(1e200);
        assert_eq!(x.level(), 1);
        let y = LogMagnitude::from_ln_bounds(10.0, 10.0);
        assert_eq!(y.level(), 0);
        assert!((y.approx() - 10f64.exp()).abs() < 1e-6);
    }

    #[test]
    fn exact_and_log_agree() {
        let a = LogMagnitude::from_f64(3.0e60);
        let b = LogMagnitude::from_f64(7.0e60);
        let p = a.mul(&b);
        let (lo, hi) = p.ln_bounds().unwrap();
        let exact = (3.0e60f64).ln() + (7.0e60f64).ln();
        assert!(lo <= exact && exact <= hi);
        assert!(hi - lo < 1e-12);
    }

    #[test]
    fn tower_squares_stay_ordered() {
        let q = LogMagnitude::from_ln_bounds(1e15, 1e15 + 1.0);
        let q2 = q.square();
        assert_eq!(q2.level(), 1);
        assert!((q2.lower() - 2e15).abs() < 1e3);
        let big = q2.exp();
        assert_eq!(big.level(), 2);
        assert_eq!(big.certainly_ge(&q2), Some(true));
        assert_eq!(q2.certainly_ge(&big), Some(false));
    }

    #[test]
    fn addition_widens_by_at_most_ln2() {
        let a = LogMagnitude::from_ln_bounds(500.0, 500.0);
        let s = a.add(&a);
        let (lo, hi) = s.ln_bounds().unwrap();
        assert!(lo <= 500.0 + 1e-9);
        assert!(hi >= 500.0 + std::f64::consts::LN_2 - 1e-9);
        let tiny = LogMagnitude::from_f64(5.0);
        let s = a.add(&tiny);
        let (lo, hi) = s.ln_bounds().unwrap();
        assert!(hi - lo < 1e-9);
    }

    #[test]
    fn serde_wire_form() {
        let x = LogMagnitude::from_ln_bounds(300.0, 301.0);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"ln_lower":300.0,"ln_upper":301.0}"#);
        let back: LogMagnitude = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
    }
}
