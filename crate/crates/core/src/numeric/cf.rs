//! Simple continued fractions: exact expansion, lazily generated digit
//! streams, and convergents in exact or log-domain form.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::magnitude::LogMagnitude;
use super::quadratic::QuadraticNumber;
use crate::error::{Error, Result};

/// Growth rule for digits generated from the previous denominator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DigitRule {
    /// `c_k = ⌈e^{q_{k-1}²}⌉`.
    Paper,
    /// `c_k = ⌈e^{q_{k-1}}⌉`.
    Desk,
    /// `c_k = ⌈e^{q_{k-1}^power}⌉`.
    ExpPower(f64),
    /// `c_k = c`, for comparisons against badly approximated numbers.
    Constant(u64),
}

impl DigitRule {
    pub fn exponent_power(&self) -> Option<f64> {
        match self {
            DigitRule::Paper => Some(2.0),
            DigitRule::Desk => Some(1.0),
            DigitRule::ExpPower(p) => Some(*p),
            DigitRule::Constant(_) => None,
        }
    }

    /// The digit following a convergent with denominator `q_prev`.
    pub fn next_digit(&self, q_prev: &Magnitude) -> Digit {
        let power = match self {
            DigitRule::Constant(c) => return Digit::Exact(BigUint::from(*c)),
            _ => self.exponent_power().unwrap(),
        };
        if let Magnitude::Exact(q) = q_prev {
            if let Some(qf) = q.to_f64() {
                let x = qf.powf(power);
                // e^27 < 2^39: the double is accurate to ~1e-4 here
                if x <= 27.0 {
                    let e = x.exp();
                    let frac = e - e.floor();
                    if frac > 1e-3 && frac < 1.0 - 1e-3 {
                        return Digit::Exact(BigUint::from(e.ceil() as u64));
                    }
                }
            }
        }
        let q = q_prev.bounds();
        let exponent = if power == 2.0 {
            q.square()
        } else if power == 1.0 {
            q
        } else {
            q.ln().scale(power).exp()
        };
        // ⌈e^x⌉ ∈ [e^x, e^x + 1]
        Digit::Huge { value: exponent.exp().add_small(0.0, 1.0), rule: *self }
    }
}

/// A digit of a continued fraction.
#[derive(Clone, Debug, PartialEq)]
pub enum Digit {
    Exact(BigUint),
    /// Too large to hold; `value` bounds the digit, `rule` records how it was
    /// generated from the previous denominator.
    Huge {
        value: LogMagnitude,
        rule: DigitRule,
    },
}

impl Digit {
    pub fn exact(&self) -> Option<&BigUint> {
        match self {
            Digit::Exact(c) => Some(c),
            Digit::Huge { .. } => None,
        }
    }

    pub fn bounds(&self) -> LogMagnitude {
        match self {
            Digit::Exact(c) => LogMagnitude::from_biguint(c),
            Digit::Huge { value, .. } => *value,
        }
    }

    pub fn is_huge(&self) -> bool {
        matches!(self, Digit::Huge { .. })
    }
}

impl From<u64> for Digit {
    fn from(c: u64) -> Self {
        Digit::Exact(BigUint::from(c))
    }
}

/// A numerator or denominator: exact, or bounded in log-domain.
#[derive(Clone, Debug, PartialEq)]
pub enum Magnitude {
    Exact(BigInt),
    Log(LogMagnitude),
}

/// Exact convergents are kept while their size stays below this many bits.
const EXACT_BITS: u64 = 1 << 16;

impl Magnitude {
    pub fn exact(&self) -> Option<&BigInt> {
        match self {
            Magnitude::Exact(v) => Some(v),
            Magnitude::Log(_) => None,
        }
    }

    pub fn bounds(&self) -> LogMagnitude {
        match self {
            Magnitude::Exact(v) => LogMagnitude::from_biguint(v.magnitude()),
            Magnitude::Log(m) => *m,
        }
    }

    /// `c·a + b`.
    fn mul_add(c: &Digit, a: &Magnitude, b: &Magnitude) -> Magnitude {
        if let (Digit::Exact(c), Magnitude::Exact(a), Magnitude::Exact(b)) = (c, a, b) {
            let v = BigInt::from_biguint(Sign::Plus, c.clone()) * a + b;
            if v.bits() <= EXACT_BITS {
                return Magnitude::Exact(v);
            }
        }
        let prod = c.bounds().mul(&a.bounds());
        Magnitude::Log(prod.add(&b.bounds()))
    }
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Magnitude::Exact(v) => write!(f, "{v}"),
            Magnitude::Log(m) => write!(f, "{m}"),
        }
    }
}

/// The `k`-th convergent `p_k/q_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Convergent {
    pub k: usize,
    pub p: Magnitude,
    pub q: Magnitude,
}

impl Convergent {
    pub fn is_exact(&self) -> bool {
        matches!((&self.p, &self.q), (Magnitude::Exact(_), Magnitude::Exact(_)))
    }

    pub fn ratio(&self) -> Result<BigRational> {
        match (&self.p, &self.q) {
            (Magnitude::Exact(p), Magnitude::Exact(q)) => Ok(BigRational::new(p.clone(), q.clone())),
            _ => Err(Error::LogDomain(format!("convergent {} is log-domain", self.k))),
        }
    }

    pub fn p_exact(&self) -> Result<&BigInt> {
        self.p.exact().ok_or_else(|| Error::LogDomain(format!("p_{} is log-domain", self.k)))
    }

    pub fn q_exact(&self) -> Result<&BigInt> {
        self.q.exact().ok_or_else(|| Error::LogDomain(format!("q_{} is log-domain", self.k)))
    }

    /// `p_k q_{k-1} − p_{k-1} q_k`, which equals `(−1)^{k-1}`.
    pub fn determinant(&self, prev: &Convergent) -> Result<BigInt> {
        Ok(self.p_exact()? * prev.q_exact()? - prev.p_exact()? * self.q_exact()?)
    }

    /// Exact test of `|q_k θ − p_k| < 1/q_{k+1}`.
    pub fn best_approximation_holds(&self, theta: &QuadraticNumber, next: &Convergent) -> Result<bool> {
        let p = QuadraticNumber::rational(BigRational::from_integer(self.p_exact()?.clone()));
        let q = QuadraticNumber::rational(BigRational::from_integer(self.q_exact()?.clone()));
        let q1 = QuadraticNumber::rational(BigRational::from_integer(next.q_exact()?.clone()));
        let err = (&(&q * theta) - &p).abs();
        Ok(&err * &q1 < QuadraticNumber::from_int(1))
    }
}

#[derive(Clone, Debug)]
enum Source {
    Finite(Vec<Digit>),
    Periodic { prefix: Vec<BigUint>, period: Vec<BigUint> },
    Rule { prefix: Vec<BigUint>, rule: DigitRule },
}

/// A simple continued fraction `[c0; c1, c2, …]`.
///
/// Rule-generated streams extend lazily; extensions are serialized through a
/// mutex so concurrent readers always see a consistent prefix.
#[derive(Clone, Debug)]
pub struct ContinuedFraction {
    source: Source,
    memo: Arc<Mutex<Vec<(Digit, Magnitude)>>>,
}

impl PartialEq for ContinuedFraction {
    fn eq(&self, other: &Self) -> bool {
        match (&self.source, &other.source) {
            (Source::Finite(a), Source::Finite(b)) => a == b,
            (Source::Periodic { prefix: a, period: p }, Source::Periodic { prefix: b, period: q }) => a == b && p == q,
            (Source::Rule { prefix: a, rule: r }, Source::Rule { prefix: b, rule: s }) => a == b && r == s,
            _ => false,
        }
    }
}

fn big(c: u64) -> BigUint {
    BigUint::from(c)
}

impl ContinuedFraction {
    fn with_source(source: Source) -> Self {
        Self { source, memo: Arc::new(Mutex::new(Vec::new())) }
    }

    pub fn finite(digits: Vec<Digit>) -> Result<Self> {
        check_digits(digits.iter().filter_map(Digit::exact).skip(1))?;
        if digits.is_empty() {
            return Err(Error::Precondition("empty digit list".into()));
        }
        Ok(Self::with_source(Source::Finite(digits)))
    }

    pub fn from_digits(digits: &[u64]) -> Result<Self> {
        Self::finite(digits.iter().map(|&c| Digit::from(c)).collect())
    }

    pub fn periodic(prefix: Vec<BigUint>, period: Vec<BigUint>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Precondition("periodic expansion needs a non-empty period".into()));
        }
        check_digits(prefix.iter().skip(1).chain(period.iter()))?;
        Ok(Self::with_source(Source::Periodic { prefix, period }))
    }

    /// Digits `prefix` followed by `rule`-generated digits.
    pub fn with_rule(prefix: Vec<BigUint>, rule: DigitRule) -> Result<Self> {
        if prefix.is_empty() {
            return Err(Error::Precondition("rule stream needs at least c0".into()));
        }
        check_digits(prefix.iter().skip(1))?;
        Ok(Self::with_source(Source::Rule { prefix, rule }))
    }

    /// Number of digits, or `None` for infinite expansions.
    pub fn len(&self) -> Option<usize> {
        match &self.source {
            Source::Finite(d) => Some(d.len()),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_rational(&self) -> bool {
        self.len().is_some()
    }

    pub fn periodic_from(&self) -> Option<usize> {
        match &self.source {
            Source::Periodic { prefix, .. } => Some(prefix.len()),
            _ => None,
        }
    }

    pub fn rule(&self) -> Option<DigitRule> {
        match &self.source {
            Source::Rule { rule, .. } => Some(*rule),
            _ => None,
        }
    }

    /// The `k`-th digit, if the expansion has one.
    pub fn digit(&self, k: usize) -> Option<Digit> {
        match &self.source {
            Source::Finite(d) => d.get(k).cloned(),
            Source::Periodic { prefix, period } => Some(Digit::Exact(if k < prefix.len() {
                prefix[k].clone()
            } else {
                period[(k - prefix.len()) % period.len()].clone()
            })),
            Source::Rule { .. } => Some(self.extend(k)[k].0.clone()),
        }
    }

    /// The first `n` digits (fewer for a shorter finite expansion).
    pub fn digits(&self, n: usize) -> Vec<Digit> {
        (0..n).map_while(|k| self.digit(k)).collect()
    }

    fn extend(&self, k: usize) -> Vec<(Digit, Magnitude)> {
        let Source::Rule { prefix, rule } = &self.source else { unreachable!("only rule streams are memoized") };
        let mut memo = self.memo.lock().expect("digit memo poisoned");
        while memo.len() <= k {
            let j = memo.len();
            let digit =
                if j < prefix.len() { Digit::Exact(prefix[j].clone()) } else { rule.next_digit(&memo[j - 1].1) };
            let q_prev = if j >= 1 { memo[j - 1].1.clone() } else { Magnitude::Exact(BigInt::zero()) };
            let q_prev2 = if j >= 2 {
                memo[j - 2].1.clone()
            } else if j == 1 {
                Magnitude::Exact(BigInt::zero())
            } else {
                Magnitude::Exact(BigInt::one())
            };
            let q =
                if j == 0 { Magnitude::Exact(BigInt::one()) } else { Magnitude::mul_add(&digit, &q_prev, &q_prev2) };
            memo.push((digit, q));
        }
        memo[..=k].to_vec()
    }

    /// True when any of the first `n` digits is only known in log-domain.
    pub fn is_log_domain(&self, n: usize) -> bool {
        self.digits(n).iter().any(Digit::is_huge)
    }

    /// Convergents `p_0/q_0 … p_{k_max}/q_{k_max}`.
    pub fn convergents(&self, k_max: usize) -> Result<Vec<Convergent>> {
        let digits = self.digits(k_max + 1);
        if digits.len() <= k_max {
            return Err(Error::Precondition(format!(
                "expansion has {} digits, convergent {k_max} requested",
                digits.len()
            )));
        }
        let mut out = Vec::with_capacity(k_max + 1);
        let (mut p2, mut p1) = (Magnitude::Exact(BigInt::zero()), Magnitude::Exact(BigInt::one()));
        let (mut q2, mut q1) = (Magnitude::Exact(BigInt::one()), Magnitude::Exact(BigInt::zero()));
        for (k, c) in digits.iter().enumerate() {
            let p = Magnitude::mul_add(c, &p1, &p2);
            let q = Magnitude::mul_add(c, &q1, &q2);
            out.push(Convergent { k, p: p.clone(), q: q.clone() });
            (p2, p1) = (p1, p);
            (q2, q1) = (q1, q);
        }
        Ok(out)
    }

    /// Exact value for finite expansions.
    pub fn value(&self) -> Result<BigRational> {
        let n = self.len().ok_or_else(|| Error::Precondition("infinite expansion has no rational value".into()))?;
        self.convergents(n - 1)?.pop().unwrap().ratio()
    }

    /// The closed interval of numbers whose expansion begins with the first
    /// `t + 1` digits of this one.
    pub fn cylinder(&self, t: usize) -> Result<(BigRational, BigRational)> {
        let conv = self.convergents(t)?;
        let a = conv[t].ratio()?;
        let (pp, qp) = if t == 0 {
            (BigInt::one(), BigInt::zero())
        } else {
            (conv[t - 1].p_exact()?.clone(), conv[t - 1].q_exact()?.clone())
        };
        let b = BigRational::new(conv[t].p_exact()? + pp, conv[t].q_exact()? + qp);
        Ok(if a <= b { (a, b) } else { (b, a) })
    }
}

fn check_digits<'a>(digits: impl Iterator<Item = &'a BigUint>) -> Result<()> {
    for c in digits {
        if c.is_zero() {
            return Err(Error::Precondition("digits after c0 must be positive".into()));
        }
    }
    Ok(())
}

/// Expands a non-negative rational or quadratic irrational.
///
/// Quadratic inputs produce a periodic stream; the period is found when a
/// complete quotient repeats.
pub fn cf_expand(x: &QuadraticNumber) -> Result<ContinuedFraction> {
    if x.signum() < 0 {
        return Err(Error::Negative(x.to_string()));
    }
    if let Some(r) = x.as_rational() {
        let mut digits = Vec::new();
        let mut r = r.clone();
        loop {
            let c = r.floor();
            digits.push(Digit::Exact(c.to_integer().to_biguint().expect("non-negative")));
            let f = &r - &c;
            if f.is_zero() {
                break;
            }
            r = f.recip();
        }
        return ContinuedFraction::finite(digits);
    }
    let mut seen: HashMap<QuadraticNumber, usize> = HashMap::new();
    let mut digits = Vec::new();
    let mut cur = x.clone();
    loop {
        if let Some(&start) = seen.get(&cur) {
            let period = digits.split_off(start);
            return ContinuedFraction::periodic(digits, period);
        }
        seen.insert(cur.clone(), digits.len());
        let c = cur.floor();
        digits.push(c.to_biguint().expect("non-negative"));
        cur = (&cur - &QuadraticNumber::rational(BigRational::from_integer(c))).recip();
    }
}

/// Wire form `{"digits": [...], "periodic_from": k|null, "log_domain": bool}`.
///
/// Exact digits are JSON numbers (strings beyond `u64`); log-domain digits
/// are magnitude objects. Rule streams serialize their first `n` digits.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CfWire {
    pub digits: Vec<serde_json::Value>,
    pub periodic_from: Option<usize>,
    pub log_domain: bool,
}

impl ContinuedFraction {
    pub fn to_wire(&self, n: usize) -> CfWire {
        let (digits, periodic_from) = match &self.source {
            Source::Periodic { prefix, period } => {
                let all: Vec<Digit> = prefix.iter().chain(period.iter()).cloned().map(Digit::Exact).collect();
                (all, Some(prefix.len()))
            }
            Source::Finite(d) => (d.clone(), None),
            Source::Rule { .. } => (self.digits(n), None),
        };
        let log_domain = digits.iter().any(Digit::is_huge);
        let digits = digits
            .iter()
            .map(|d| match d {
                Digit::Exact(c) => match c.to_u64() {
                    Some(v) => serde_json::Value::from(v),
                    None => serde_json::Value::from(c.to_string()),
                },
                Digit::Huge { value, .. } => serde_json::to_value(value).expect("magnitude serializes"),
            })
            .collect();
        CfWire { digits, periodic_from, log_domain }
    }

    pub fn from_wire(w: &CfWire) -> Result<Self> {
        let bad = |m: String| Error::Parse { line: None, msg: m };
        let mut digits = Vec::new();
        for v in &w.digits {
            let d = match v {
                serde_json::Value::Number(n) => {
                    Digit::Exact(big(n.as_u64().ok_or_else(|| bad(format!("bad digit {n}")))?))
                }
                serde_json::Value::String(s) => Digit::Exact(s.parse().map_err(|_| bad(format!("bad digit {s:?}")))?),
                obj => {
                    let value: LogMagnitude = serde_json::from_value(obj.clone()).map_err(|e| bad(e.to_string()))?;
                    Digit::Huge { value, rule: DigitRule::Paper }
                }
            };
            digits.push(d);
        }
        match w.periodic_from {
            Some(k) => {
                let exact: Option<Vec<BigUint>> = digits.iter().map(|d| d.exact().cloned()).collect();
                let mut exact = exact.ok_or_else(|| bad("periodic digits must be exact".into()))?;
                if k >= exact.len() {
                    return Err(bad("periodic_from beyond digit list".into()));
                }
                let period = exact.split_off(k);
                Self::periodic(exact, period)
            }
            None => Self::finite(digits),
        }
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |d: &Digit| match d {
            Digit::Exact(c) => c.to_string(),
            Digit::Huge { value, .. } => format!("≈{value}"),
        };
        match &self.source {
            Source::Finite(d) => {
                write!(f, "[{}", show(&d[0]))?;
                for (i, c) in d.iter().enumerate().skip(1) {
                    write!(f, "{}{}", if i == 1 { "; " } else { ", " }, show(c))?;
                }
                write!(f, "]")
            }
            Source::Periodic { prefix, period } if prefix.is_empty() => {
                let body: Vec<String> = period.iter().map(|c| c.to_string()).collect();
                write!(f, "[({})…]", body.join(", "))
            }
            Source::Periodic { prefix, period } => {
                write!(f, "[{}", prefix[0])?;
                for (i, c) in prefix.iter().enumerate().skip(1) {
                    write!(f, "{}{}", if i == 1 { "; " } else { ", " }, c)?;
                }
                let sep = if prefix.len() == 1 { "; " } else { ", " };
                let body: Vec<String> = period.iter().map(|c| c.to_string()).collect();
                write!(f, "{sep}({})…]", body.join(", "))
            }
            Source::Rule { prefix, rule } => {
                let body: Vec<String> = prefix.iter().map(|c| c.to_string()).collect();
                write!(f, "[{}; {:?}-rule tail…]", body.join(", "), rule)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact_digits(cf: &ContinuedFraction, n: usize) -> Vec<u64> {
        cf.digits(n).iter().map(|d| d.exact().unwrap().to_u64().unwrap()).collect()
    }

    #[test]
    fn rational_expansion() {
        let cf = cf_expand(&QuadraticNumber::from_ratio(5, 3)).unwrap();
        assert_eq!(exact_digits(&cf, 10), vec![1, 1, 2]);
        let cf = cf_expand(&QuadraticNumber::from_int(7)).unwrap();
        assert_eq!(exact_digits(&cf, 10), vec![7]);
        let c = cf.convergents(0).unwrap();
        assert_eq!(c[0].ratio().unwrap(), BigRational::from_integer(BigInt::from(7)));
    }

    #[test]
    fn display_forms() {
        assert_eq!(cf_expand(&QuadraticNumber::sqrt(2)).unwrap().to_string(), "[1; (2)…]");
        assert_eq!(cf_expand(&QuadraticNumber::golden()).unwrap().to_string(), "[(1)…]");
        assert_eq!(ContinuedFraction::from_digits(&[1, 1, 2]).unwrap().to_string(), "[1; 1, 2]");
    }

    #[test]
    fn negative_rejected() {
        assert!(matches!(cf_expand(&QuadraticNumber::from_int(-2)), Err(Error::Negative(_))));
    }

    #[test]
    fn sqrt2_is_periodic() {
        let cf = cf_expand(&QuadraticNumber::sqrt(2)).unwrap();
        assert_eq!(cf.periodic_from(), Some(1));
        assert_eq!(exact_digits(&cf, 6), vec![1, 2, 2, 2, 2, 2]);
        let conv = cf.convergents(4).unwrap();
        let got: Vec<(i64, i64)> = conv
            .iter()
            .map(|c| (c.p_exact().unwrap().to_i64().unwrap(), c.q_exact().unwrap().to_i64().unwrap()))
            .collect();
        assert_eq!(got, vec![(1, 1), (3, 2), (7, 5), (17, 12), (41, 29)]);
    }

    #[test]
    fn golden_and_sqrt3() {
        let g = cf_expand(&QuadraticNumber::golden()).unwrap();
        assert_eq!(exact_digits(&g, 5), vec![1, 1, 1, 1, 1]);
        let s = cf_expand(&QuadraticNumber::sqrt(3)).unwrap();
        assert_eq!(exact_digits(&s, 5), vec![1, 1, 2, 1, 2]);
        assert_eq!(s.periodic_from(), Some(1));
    }

    #[test]
    fn best_approximation_example() {
        let theta = QuadraticNumber::sqrt(2);
        let conv = cf_expand(&theta).unwrap().convergents(3).unwrap();
        // |5√2 − 7| < 1/12
        assert!(conv[2].best_approximation_holds(&theta, &conv[3]).unwrap());
    }

    #[test]
    fn wire_roundtrip_periodic() {
        let cf = cf_expand(&QuadraticNumber::sqrt(3)).unwrap();
        let w = cf.to_wire(0);
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(s, r#"{"digits":[1,1,2],"periodic_from":1,"log_domain":false}"#);
        assert_eq!(ContinuedFraction::from_wire(&w).unwrap(), cf);
    }

    #[test]
    fn log_domain_refuses_determinant() {
        let cf = ContinuedFraction::with_rule(vec![big(1), big(1)], DigitRule::Paper).unwrap();
        let conv = cf.convergents(5).unwrap();
        assert!(conv[3].is_exact());
        assert!(!conv[5].is_exact());
        assert!(matches!(conv[5].determinant(&conv[4]), Err(Error::LogDomain(_))));
    }

    #[test]
    fn cylinder_contains_value() {
        let theta = QuadraticNumber::sqrt(2);
        let cf = cf_expand(&theta).unwrap();
        for t in 0..6 {
            let (a, b) = cf.cylinder(t).unwrap();
            assert!(QuadraticNumber::rational(a) <= theta && theta <= QuadraticNumber::rational(b));
        }
    }
}
