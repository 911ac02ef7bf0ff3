//! Well-approximated numbers and the `SE_d` sets.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::cf::{ContinuedFraction, Digit, DigitRule, Magnitude};
use super::magnitude::LogMagnitude;
use crate::error::{Error, Result};

/// A continued fraction whose digits from index 2 on follow `rule`, starting
/// from `c0 = c1 = 1`.
pub fn well_approximated_cf(rule: DigitRule) -> ContinuedFraction {
    ContinuedFraction::with_rule(vec![BigUint::from(1u32), BigUint::from(1u32)], rule).expect("valid prefix")
}

/// Bounds on `x_k = ln(exp(C q_k) / q_{k+1})`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LogRatio {
    /// Ordinary interval.
    Interval {
        lower: f64,
        upper: f64,
    },
    /// `x_k < 0` with `|x_k|` in the given bounds.
    Negative {
        abs: LogMagnitude,
    },
    /// `x_k > 0` with `x_k` in the given bounds.
    Positive {
        abs: LogMagnitude,
    },
    Unknown,
}

impl LogRatio {
    fn compute(c: f64, q_k: &LogMagnitude, q_next: &LogMagnitude, digit: &Digit) -> Self {
        if let Digit::Huge { rule, .. } = digit {
            if let Some(p) = rule.exponent_power() {
                return Self::from_rule(c, p, q_k);
            }
        }
        let a = q_k.scale(c);
        let b = q_next.ln();
        if a.is_finite_f64() && b.is_finite_f64() {
            return LogRatio::Interval { lower: a.lower() - b.upper(), upper: a.upper() - b.lower() };
        }
        if b.certainly_ge(&a.scale(2.0)) == Some(true) {
            // b ≥ 2a ⇒ |x| ∈ [b/2, b]
            return LogRatio::Negative { abs: LogMagnitude::span(&b.scale(0.5), &b) };
        }
        if a.certainly_ge(&b.scale(2.0)) == Some(true) {
            return LogRatio::Positive { abs: LogMagnitude::span(&a.scale(0.5), &a) };
        }
        LogRatio::Unknown
    }

    /// `x_k` when `c_{k+1} = ⌈exp(Q^p)⌉` with `Q = q_k`.
    ///
    /// From `e^{Q^p} Q ≤ q_{k+1} ≤ 3 e^{Q^p} Q`,
    /// `x_k ∈ [CQ − Q^p − ln Q − ln 3, CQ − Q^p − ln Q]`. Working with this
    /// form avoids cancelling two nearly equal tower-sized bounds.
    fn from_rule(c: f64, p: f64, q: &LogMagnitude) -> Self {
        let two = LogMagnitude::from_f64(2.0);
        if q.certainly_ge(&two) != Some(true) {
            return LogRatio::Unknown;
        }
        let ln_q = q.ln();
        let tail = ln_q.add_small(0.0, 3f64.ln());
        if p > 1.0 {
            // Q^{p−1} ≥ 2C ⇒ Q^p − CQ ≥ Q^p/2, and Q^p ≥ ln Q + ln 3 for Q ≥ 2
            let gap = ln_q.scale(p - 1.0);
            if gap.certainly_ge(&LogMagnitude::from_f64((2.0 * c).ln().max(1e-300))) != Some(true) {
                return LogRatio::Unknown;
            }
            let qp = ln_q.scale(p).exp();
            return LogRatio::Negative { abs: LogMagnitude::span(&qp.scale(0.5), &qp.scale(2.0)) };
        }
        if (p - 1.0).abs() < f64::EPSILON {
            if c == 1.0 {
                return LogRatio::Negative { abs: LogMagnitude::span(&ln_q, &tail) };
            }
            if c < 1.0 {
                let lin = q.scale(1.0 - c);
                return LogRatio::Negative { abs: LogMagnitude::span(&lin, &lin.add(&tail)) };
            }
            let lin = q.scale(c - 1.0);
            if lin.certainly_ge(&tail.scale(2.0)) == Some(true) {
                return LogRatio::Positive { abs: LogMagnitude::span(&lin.scale(0.5), &lin) };
            }
        }
        LogRatio::Unknown
    }

    /// `Some(true)` when certainly `self < prev`.
    fn certainly_below(&self, prev: &LogRatio) -> Option<bool> {
        use LogRatio::*;
        match (self, prev) {
            (Interval { upper, .. }, Interval { lower, .. }) => (upper < lower).then_some(true),
            (Negative { .. }, Positive { .. }) => Some(true),
            (Negative { .. }, Interval { lower, .. }) if *lower >= 0.0 => Some(true),
            // |x| > −lower ⇒ x < lower
            (Negative { abs }, Interval { lower, .. }) => {
                abs.certainly_ge(&LogMagnitude::from_f64(-lower * (1.0 + 1e-12))).filter(|&b| b)
            }
            (Negative { abs: a }, Negative { abs: b }) => {
                let (alo, bhi) = (a, b.add_small(0.0, 1e-300));
                alo.certainly_ge(&bhi).filter(|&v| v).and_then(|_| (a != b).then_some(true))
            }
            _ => None,
        }
    }

    fn certainly_negative(&self) -> bool {
        match self {
            LogRatio::Interval { upper, .. } => *upper < 0.0,
            LogRatio::Negative { .. } => true,
            _ => false,
        }
    }
}

/// Verdict of the finite-horizon well-approximation test for one `C`.
#[derive(Clone, Debug, Serialize)]
pub struct CVerdict {
    pub c: f64,
    pub passes: bool,
    /// Which index parity achieved the verdict: "even", "odd" or "all".
    pub parity: Option<String>,
    pub log_ratios: Vec<LogRatio>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WellApproximatedReport {
    pub well_approximated: bool,
    pub failing_c: Option<f64>,
    pub k_max: usize,
    pub per_c: Vec<CVerdict>,
}

/// Number of trailing terms that must certify strict decrease.
const TAIL: usize = 3;

/// Finite evidence that `exp(C q_k)/q_{k+1} → 0` along an index sequence of
/// one parity, for every `C` in `cs`.
///
/// A `C` passes when, along the even indices, the odd indices, or all
/// indices up to `k_max`, the last `TAIL` log-ratios are certified strictly
/// decreasing and the last one is certified negative. All parities are
/// tried and the strongest verdict is kept.
pub fn well_approximated(cf: &ContinuedFraction, cs: &[f64], k_max: usize) -> Result<WellApproximatedReport> {
    let conv = cf.convergents(k_max + 1)?;
    let qs: Vec<LogMagnitude> = conv.iter().map(|c| c.q.bounds()).collect();
    let digits = cf.digits(k_max + 2);
    let mut per_c = Vec::new();
    let mut failing = None;
    for &c in cs {
        if c <= 0.0 {
            return Err(Error::Precondition("C must be positive".into()));
        }
        let ratios: Vec<LogRatio> =
            (0..=k_max).map(|k| LogRatio::compute(c, &qs[k], &qs[k + 1], &digits[k + 1])).collect();
        let mut verdict = None;
        for (name, filter) in [("all", None), ("even", Some(0)), ("odd", Some(1))] {
            let seq: Vec<&LogRatio> = ratios
                .iter()
                .enumerate()
                .filter(|(k, _)| *k >= 1 && filter.is_none_or(|p| k % 2 == p))
                .map(|(_, r)| r)
                .collect();
            if seq.len() < TAIL {
                continue;
            }
            let tail = &seq[seq.len() - TAIL..];
            let decreasing = tail.windows(2).all(|w| w[1].certainly_below(w[0]) == Some(true));
            if decreasing && tail[TAIL - 1].certainly_negative() {
                verdict = Some(name.to_string());
                break;
            }
        }
        if verdict.is_none() && failing.is_none() {
            failing = Some(c);
        }
        per_c.push(CVerdict { c, passes: verdict.is_some(), parity: verdict, log_ratios: ratios });
    }
    Ok(WellApproximatedReport { well_approximated: failing.is_none(), failing_c: failing, k_max, per_c })
}

/// Outcome of one `c_k ≥ exp(q_{k−1}²)` test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DigitTest {
    Holds,
    Fails,
    Inconclusive,
}

/// Decides `c_k ≥ exp(q_{k−1}²)`.
pub fn digit_dominates(c: &Digit, q_prev: &Magnitude) -> DigitTest {
    if let Digit::Huge { rule: DigitRule::Paper, .. } = c {
        // generated as ⌈exp(q_{k−1}²)⌉ from this very denominator
        return DigitTest::Holds;
    }
    if let (Digit::Exact(c), Magnitude::Exact(q)) = (c, q_prev) {
        if let Some(qf) = q.to_f64() {
            let x = qf * qf;
            let ln_c = match c.to_f64() {
                Some(v) if v.is_finite() && v > 0.0 => v.ln(),
                _ => {
                    let bits = c.bits() as f64;
                    let ln2 = std::f64::consts::LN_2;
                    let (lo, hi) = ((bits - 1.0) * ln2, bits * ln2);
                    return if lo > x * (1.0 + 1e-12) {
                        DigitTest::Holds
                    } else if hi < x * (1.0 - 1e-12) {
                        DigitTest::Fails
                    } else {
                        DigitTest::Inconclusive
                    };
                }
            };
            let margin = 1e-9 * x.max(1.0);
            return if ln_c - x > margin {
                DigitTest::Holds
            } else if x - ln_c > margin {
                DigitTest::Fails
            } else {
                DigitTest::Inconclusive
            };
        }
    }
    let ln_c = c.bounds().ln();
    let q2 = q_prev.bounds().square();
    match ln_c.certainly_ge(&q2) {
        Some(true) => DigitTest::Holds,
        Some(false) => DigitTest::Fails,
        None => DigitTest::Inconclusive,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SeVerdict {
    pub member: bool,
    /// The chosen indices `k_1 < … < k_d` when `member`.
    pub indices: Vec<usize>,
    /// Set when the horizon or an undecidable comparison kept a larger
    /// selection from being certified.
    pub inconclusive_at_k_max: bool,
    pub tests: Vec<(usize, DigitTest)>,
}

/// Whether `1 ≤ k_1 < … < k_d ≤ k_max` of one parity exist with
/// `c_{k_i} ≥ exp(q_{k_i−1}²)`.
pub fn is_in_se_d(cf: &ContinuedFraction, d: usize, k_max: usize) -> SeVerdict {
    let digits = cf.digits(k_max + 1);
    let available = digits.len().saturating_sub(1);
    let conv = cf.convergents(available).unwrap_or_default();
    let tests: Vec<(usize, DigitTest)> =
        (1..=available).map(|k| (k, digit_dominates(&digits[k], &conv[k - 1].q))).collect();
    let pick = |parity: usize| -> Vec<usize> {
        tests.iter().filter(|(k, t)| k % 2 == parity && *t == DigitTest::Holds).map(|(k, _)| *k).collect()
    };
    let (even, odd) = (pick(0), pick(1));
    let best = if even.len() >= odd.len() { even } else { odd };
    let member = best.len() >= d;
    let indices = if member { best[..d].to_vec() } else { Vec::new() };
    let undecided = tests.iter().any(|(_, t)| *t == DigitTest::Inconclusive);
    SeVerdict { member, indices, inconclusive_at_k_max: !member && (undecided || available < k_max), tests }
}

/// `r_t`: keeps digits `0..=t` of `cf` and continues with the paper rule.
pub fn se_density_truncate(cf: &ContinuedFraction, t: usize) -> Result<ContinuedFraction> {
    let digits = cf.digits(t + 1);
    let prefix: Option<Vec<BigUint>> = digits.iter().map(|d| d.exact().cloned()).collect();
    let prefix = prefix.ok_or_else(|| Error::LogDomain("truncation needs exact leading digits".into()))?;
    ContinuedFraction::with_rule(prefix, DigitRule::Paper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{cf_expand, QuadraticNumber};

    #[test]
    fn paper_rule_first_digits() {
        let cf = well_approximated_cf(DigitRule::Paper);
        let d = cf.digits(4);
        let ex: Vec<u64> = d.iter().map(|c| c.exact().unwrap().to_u64().unwrap()).collect();
        // c2 = ⌈e⌉, c3 = ⌈e^16⌉
        assert_eq!(ex, vec![1, 1, 3, 8886111]);
        let conv = cf.convergents(3).unwrap();
        let q3 = conv[3].q_exact().unwrap().to_f64().unwrap();
        assert_eq!(q3, 35544445.0);
        assert!(q3.ln() >= 16.0);
    }

    #[test]
    fn sqrt2_not_well_approximated() {
        let cf = cf_expand(&QuadraticNumber::sqrt(2)).unwrap();
        let r = well_approximated(&cf, &[1.0], 12).unwrap();
        assert!(!r.well_approximated);
        assert_eq!(r.failing_c, Some(1.0));
    }

    #[test]
    fn paper_rule_well_approximated() {
        let cf = well_approximated_cf(DigitRule::Paper);
        let r = well_approximated(&cf, &[1.0, 5.0, 10.0], 8).unwrap();
        assert!(r.well_approximated, "{r:#?}");
    }

    #[test]
    fn desk_rule_passes_c1_only() {
        let cf = well_approximated_cf(DigitRule::Desk);
        let r = well_approximated(&cf, &[1.0], 8).unwrap();
        assert!(r.well_approximated, "{r:#?}");
        // exp(5 q_k)/q_{k+1} ≈ e^{4 q_k}/q_k grows without bound
        let r = well_approximated(&cf, &[5.0], 8).unwrap();
        assert_eq!(r.failing_c, Some(5.0));
    }

    #[test]
    fn se_d_examples() {
        let paper = well_approximated_cf(DigitRule::Paper);
        let v = is_in_se_d(&paper, 3, 8);
        assert!(v.member, "{v:?}");
        let root2 = cf_expand(&QuadraticNumber::sqrt(2)).unwrap();
        assert!(!is_in_se_d(&root2, 1, 10).member);
        assert!(is_in_se_d(&root2, 0, 10).member);
    }

    #[test]
    fn truncation_keeps_prefix() {
        let root2 = cf_expand(&QuadraticNumber::sqrt(2)).unwrap();
        let r = se_density_truncate(&root2, 2).unwrap();
        let d = r.digits(4);
        assert_eq!(d[..3], root2.digits(3)[..]);
        // q_2 = 5, so c_3 = ⌈e^25⌉
        assert_eq!(d[3].exact().unwrap().to_f64().unwrap(), (25f64).exp().ceil());
    }
}
