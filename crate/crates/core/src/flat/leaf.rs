use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::geometry::{FlatPoint, Foliation, Measure, Segment};
use super::ray::PolygonalRay;
use crate::error::{Error, Result};
use crate::numeric::{cf_expand, ContinuedFraction, Digit, LogMagnitude, Magnitude, QuadraticNumber};
use crate::words::{block_prefix, inadmissible_word, rational_word_pq, BlockWord};

/// Exact data of a leaf approximation for a quadratic slope.
#[derive(Clone, Debug, Serialize)]
pub struct ExactLeaf {
    #[serde(serialize_with = "ser_display")]
    pub p: BigInt,
    #[serde(serialize_with = "ser_display")]
    pub q: BigInt,
    #[serde(serialize_with = "ser_display")]
    pub start_y: QuadraticNumber,
    /// Blocks read along the leaf: `w_k` followed by its first `q_k − 1`
    /// blocks.
    pub word: BlockWord,
    pub matches_w_k: bool,
    pub alpha: Measure,
    /// `α ≤ 2κ q_k |θ − p_k/q_k| < 2κ/q_{k+1}`, checked exactly.
    pub alpha_bound_holds: bool,
    /// The closed curve: leaf, then one more block, then the vertical
    /// closing segment back to the start modulo `ℤ²`.
    pub curve: PolygonalRay,
}

fn ser_display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// A leaf approximation: a leaf segment of length `d` (counted in blocks)
/// closed up by a transverse segment of Euclidean length `ε` and measure
/// `α`. Small quantities are stored through their reciprocals.
#[derive(Clone, Debug, Serialize)]
pub struct LeafApprox {
    pub k: usize,
    pub q: LogMagnitude,
    pub q_next: LogMagnitude,
    pub d: LogMagnitude,
    pub inv_alpha: LogMagnitude,
    pub inv_epsilon: LogMagnitude,
    pub kappa: f64,
    /// `p` when the digit `c_{k+1}` is `⌈exp(q_k^p)⌉` by rule.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule_power: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactLeaf>,
}

impl LeafApprox {
    pub fn d_f64(&self) -> f64 {
        self.d.approx()
    }

    pub fn alpha_f64(&self) -> f64 {
        1.0 / self.inv_alpha.approx()
    }

    pub fn epsilon_f64(&self) -> f64 {
        1.0 / self.inv_epsilon.approx()
    }

    pub fn is_log_domain(&self) -> bool {
        !self.d.is_finite_f64() || !self.inv_alpha.is_finite_f64()
    }
}

fn qn(n: &BigInt) -> QuadraticNumber {
    QuadraticNumber::rational(BigRational::from_integer(n.clone()))
}

fn exact_mag(x: &QuadraticNumber) -> LogMagnitude {
    let v = x.to_f64();
    LogMagnitude::from_bounds(v * (1.0 - 1e-12), v * (1.0 + 1e-12))
}

/// The leaf approximation of index `k ≥ 1` for a quadratic slope `θ > 1`.
///
/// Even `k` starts just above the lattice leaf, odd `k` just below it.
pub fn build_leaf_approx(fol: &Foliation, k: usize) -> Result<LeafApprox> {
    let theta = &fol.theta;
    if theta.is_rational() || theta <= &QuadraticNumber::from_int(1) {
        return Err(Error::Precondition("leaf approximations need an irrational slope above 1".into()));
    }
    let conv = cf_expand(theta)?.convergents(k + 1)?;
    let (p, q) = (conv[k].p_exact()?.clone(), conv[k].q_exact()?.clone());
    let q_next = conv[k + 1].q_exact()?.clone();
    let delta = &(&qn(&q) * theta) - &qn(&p);
    let two = QuadraticNumber::from_int(2);
    // guard: the leaf returns within the lowest (highest) start interval
    if (&(&two * &qn(&q)) * &delta.abs()) >= QuadraticNumber::from_int(1) {
        return Err(Error::Precondition(format!("index {k}: 2q_k|q_kθ − p_k| ≥ 1")));
    }
    let start_y = if delta.is_positive() {
        &delta.abs() / &QuadraticNumber::from_int(2)
    } else {
        &QuadraticNumber::from_int(1) - &(&delta.abs() / &QuadraticNumber::from_int(2))
    };
    let qu = q.to_usize().ok_or_else(|| Error::Precondition(format!("q_{k} too large for an exact leaf")))?;
    let word = block_prefix(theta, &start_y, 2 * qu - 1)?;
    let w_k = rational_word_pq(
        p.to_u64().ok_or_else(|| Error::Precondition("p_k too large".into()))?,
        q.to_u64().unwrap(),
        if k.is_multiple_of(2) { q.to_u64().unwrap() } else { 1 },
    )?;
    let mut expect = w_k.blocks.clone();
    expect.extend_from_slice(&w_k.blocks[..qu - 1]);
    let matches_w_k = word.blocks == expect;

    let start = FlatPoint::new(QuadraticNumber::from_int(0), start_y.clone());
    let leaf = Segment::leaf(start, &qn(&(&q * 2)), fol);
    let closing = Segment::vertical(leaf.end.clone(), &-(&two * &delta));
    let curve = PolygonalRay::new(vec![leaf, closing], fol)?;
    let alpha = curve.measures[1].clone();
    let kappa = QuadraticNumber::rational(fol.kappa.clone());
    let bound = &(&two * &kappa) * &delta.abs();
    let alpha_bound_holds = alpha.le(&bound) && bound < (&(&two * &kappa) / &qn(&q_next));

    let eps = &two * &delta.abs();
    let d: BigInt = BigInt::from(2) * &q - BigInt::from(1);
    Ok(LeafApprox {
        k,
        q: LogMagnitude::from_biguint(q.magnitude()),
        q_next: LogMagnitude::from_biguint(q_next.magnitude()),
        d: LogMagnitude::from_biguint(d.magnitude()),
        inv_alpha: LogMagnitude::from_bounds(
            1.0 / alpha.to_f64() * (1.0 - 1e-12),
            1.0 / alpha.to_f64() * (1.0 + 1e-12),
        ),
        inv_epsilon: exact_mag(&eps.recip()),
        kappa: fol.kappa.to_f64().unwrap_or(f64::NAN),
        rule_power: None,
        exact: Some(ExactLeaf { p, q, start_y, word, matches_w_k, alpha, alpha_bound_holds, curve }),
    })
}

/// Leaf approximations of a (possibly rule-generated) continued fraction
/// from convergent magnitudes alone, using
/// `1/(q_k + q_{k+1}) < |q_kθ − p_k| < 1/q_{k+1}` and `θ ∈ [c_0, c_0 + 1]`.
pub fn leaf_schedule(cf: &ContinuedFraction, ks: &[usize], kappa: f64) -> Result<Vec<LeafApprox>> {
    if !(kappa > 0.0) {
        return Err(Error::Precondition("κ must be positive".into()));
    }
    let k_max = ks.iter().copied().max().unwrap_or(0);
    let conv = cf.convergents(k_max + 1)?;
    let c0 = cf.digit(0).and_then(|d| d.exact().and_then(|c| c.to_f64())).unwrap_or(1.0);
    let root_lo = (1.0 + c0 * c0).sqrt() * (1.0 - 1e-15);
    let root_hi = (1.0 + (c0 + 1.0) * (c0 + 1.0)).sqrt() * (1.0 + 1e-15);
    let mut out = Vec::with_capacity(ks.len());
    for &k in ks {
        if k < 1 || k + 1 >= conv.len() {
            return Err(Error::Precondition(format!("index {k} outside the convergent range")));
        }
        let q = conv[k].q.bounds();
        let q_next = conv[k + 1].q.bounds();
        // guard 2q_k/q_{k+1} < 1
        let guard = match (&conv[k].q, &conv[k + 1].q) {
            (Magnitude::Exact(a), Magnitude::Exact(b)) => Some(BigInt::from(2) * a < *b),
            _ => q_next.certainly_ge(&q.scale(2.0)),
        };
        if guard != Some(true) {
            return Err(Error::Precondition(format!("index {k}: cannot certify 2q_k < q_{{k+1}}")));
        }
        let sum = q.add(&q_next);
        let inv_eps = LogMagnitude::span(&q_next.scale(0.5), &sum.scale(0.5));
        let inv_alpha = LogMagnitude::span(&q_next.scale(root_lo / (2.0 * kappa)), &sum.scale(root_hi / (2.0 * kappa)));
        let d = LogMagnitude::span(&q.scale(2.0).add_small(-1.0, -1.0), &q.scale(2.0));
        let rule_power = match cf.digit(k + 1) {
            Some(Digit::Huge { rule, .. }) => rule.exponent_power(),
            _ => None,
        };
        out.push(LeafApprox { k, q, q_next, d, inv_alpha, inv_epsilon: inv_eps, kappa, rule_power, exact: None });
    }
    Ok(out)
}

/// The growth function `f` of the separation sandwich.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Separation {
    /// `f(d) = e^{C d}`.
    Exp(f64),
    /// `f(d) = d^p`.
    Power(f64),
    One,
}

impl Separation {
    /// Bounds on `ln f(d)`, `None` when `f(d) ≤ 1` could make it negative.
    fn ln_f(&self, d: &LogMagnitude) -> Option<LogMagnitude> {
        match *self {
            Separation::Exp(c) if c > 0.0 => Some(d.scale(c)),
            Separation::Power(p) if p > 0.0 => d.certainly_ge(&LogMagnitude::from_f64(1.0))?.then(|| d.ln().scale(p)),
            _ => None,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Parse { line: None, msg: format!("unknown separation {s:?}") };
        if s == "one" || s == "1" {
            return Ok(Separation::One);
        }
        let (name, arg) = s.split_once(':').ok_or_else(bad)?;
        let v: f64 = arg.parse().map_err(|_| bad())?;
        match name {
            "exp" => Ok(Separation::Exp(v)),
            "power" => Ok(Separation::Power(v)),
            _ => Err(bad()),
        }
    }
}

/// The decay function `g` bounding the closing measures.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Goodness {
    /// `g` at each sample is the certified upper bound on `α` itself.
    AlphaBound,
    /// `g(d) = e^{-c d}`.
    Exp(f64),
}

impl Goodness {
    /// Bounds on `ln(1/g(d))`.
    fn ln_inv_g(&self, la: &LeafApprox) -> LogMagnitude {
        match *self {
            Goodness::AlphaBound => la.inv_alpha.ln(),
            Goodness::Exp(c) => la.d.scale(c),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Parse { line: None, msg: format!("unknown goodness {s:?}") };
        if s == "alpha-bound" {
            return Ok(Goodness::AlphaBound);
        }
        match s.split_once(':') {
            Some(("exp", v)) => Ok(Goodness::Exp(v.parse().map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }
}

/// Certified side of `ln(f g)` at one sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "bound")]
pub enum ProductTerm {
    /// `ln(f g) ≤ −M`.
    Below(LogMagnitude),
    /// `ln(f g) ≥ M`.
    Above(LogMagnitude),
    Unknown,
}

fn positive(x: f64) -> Option<LogMagnitude> {
    (x > 0.0 && x.is_finite()).then(|| LogMagnitude::from_bounds(x, x))
}

pub(crate) fn product_term(la: &LeafApprox, f: Separation, g: Goodness) -> ProductTerm {
    let a = g.ln_inv_g(la);
    let b = match f {
        Separation::One => return ProductTerm::Below(a),
        _ => match f.ln_f(&la.d) {
            Some(b) => b,
            None => return ProductTerm::Unknown,
        },
    };
    if a.is_finite_f64() && b.is_finite_f64() {
        let hi = b.upper() - a.lower();
        let lo = b.lower() - a.upper();
        if let Some(m) = positive(-hi) {
            return ProductTerm::Below(m);
        }
        if let Some(m) = positive(lo) {
            return ProductTerm::Above(m);
        }
    }
    if a.certainly_ge(&b.scale(2.0)) == Some(true) {
        return ProductTerm::Below(a.scale(0.5));
    }
    if b.certainly_ge(&a.scale(2.0)) == Some(true) {
        return ProductTerm::Above(b.scale(0.5));
    }
    match (f, g, la.rule_power) {
        (Separation::Exp(c), Goodness::AlphaBound, Some(p)) => rule_term(la, c, p),
        _ => ProductTerm::Unknown,
    }
}

/// With `c_{k+1} = ⌈exp(q_k^p)⌉`: `ln(1/g) ≥ q_k^p + ln q_k − ln 2κ` and
/// `ln f ≤ 2C q_k`.
fn rule_term(la: &LeafApprox, c: f64, p: f64) -> ProductTerm {
    let k2 = (2.0 * la.kappa).ln().max(0.0) * (1.0 + 1e-12);
    let q = &la.q;
    let m = if p == 1.0 {
        if 2.0 * c < 1.0 {
            q.scale(1.0 - 2.0 * c)
        } else if 2.0 * c == 1.0 {
            q.ln()
        } else {
            return ProductTerm::Unknown;
        }
    } else if p > 1.0 {
        let ln_q = q.ln();
        match ln_q.certainly_ge(&LogMagnitude::from_f64(((4.0 * c).ln() / (p - 1.0)).max(1e-300))) {
            Some(true) => ln_q.scale(p).exp().scale(0.5),
            _ => return ProductTerm::Unknown,
        }
    } else {
        return ProductTerm::Unknown;
    };
    if m.certainly_ge(&LogMagnitude::from_f64(2.0 * k2 + 1.0)) != Some(true) {
        return ProductTerm::Unknown;
    }
    ProductTerm::Below(m.add_small(-k2, -k2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    True,
    False,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MarkerCheck {
    /// The oracle confirmed `a·w'_k` is inadmissible.
    Verified,
    /// Covered by the flip lemma (`k ≥ 2`), too long to enumerate.
    Lemma,
    Missing,
}

#[derive(Clone, Debug, Serialize)]
pub struct CesagReport {
    pub verdict: Verdict,
    /// `(c, C)` with `c ≤ ε e^d / f(d) ≤ C` over the samples where the ratio
    /// is representable.
    pub fitted: Option<(f64, f64)>,
    pub fitted_samples: usize,
    /// `sup α/g` over representable samples.
    pub good_constant: Option<f64>,
    pub good: Verdict,
    pub product_terms: Vec<ProductTerm>,
    pub product_to_zero: Verdict,
    pub markers: Vec<MarkerCheck>,
    pub exotic: bool,
    pub note: Option<String>,
}

const TAIL: usize = 3;
const ORACLE_CAP: usize = 60;

/// Classify a sequence of leaf approximations: fitted separation constants,
/// `α = O(g)`, `f(d_j) g(d_j) → 0`, and inadmissible markers.
pub fn classify_cesag(seq: &[LeafApprox], theta: Option<&QuadraticNumber>, f: Separation, g: Goodness) -> CesagReport {
    let mut fitted: Option<(f64, f64)> = None;
    let mut fitted_samples = 0;
    let mut good_constant: Option<f64> = None;
    let mut good_fail = false;
    let mut good_ratios = Vec::new();
    let mut terms = Vec::with_capacity(seq.len());
    for la in seq {
        let ln_f = f.ln_f(&la.d);
        let ln_fv = match f {
            Separation::One => Some(0.0),
            _ => ln_f.as_ref().and_then(|m| m.is_finite_f64().then(|| m.approx())),
        };
        // ln(ε e^d / f) = d − ln(1/ε) − ln f
        if let (true, true, Some(lf)) = (la.d.is_finite_f64(), la.inv_epsilon.ln().is_finite_f64(), ln_fv) {
            let r = (la.d.approx() - la.inv_epsilon.ln().approx() - lf).exp();
            if r.is_finite() && r > 0.0 {
                fitted_samples += 1;
                fitted = Some(match fitted {
                    None => (r, r),
                    Some((lo, hi)) => (lo.min(r), hi.max(r)),
                });
            }
        }
        match g {
            Goodness::AlphaBound => good_constant = Some(1.0),
            Goodness::Exp(_) => {
                let ln_inv_g = g.ln_inv_g(la);
                let ln_inv_a = la.inv_alpha.ln();
                if ln_inv_a.certainly_ge(&ln_inv_g) == Some(true) {
                    good_constant = Some(good_constant.unwrap_or(0.0).max(1.0));
                } else if ln_inv_a.is_finite_f64() && ln_inv_g.is_finite_f64() {
                    let ratio = (ln_inv_g.upper() - ln_inv_a.lower()).exp();
                    good_constant = Some(good_constant.unwrap_or(0.0).max(ratio));
                    good_ratios.push(ratio);
                } else {
                    good_fail = true;
                }
            }
        }
        terms.push(product_term(la, f, g));
    }

    let product_to_zero = product_trend(&terms);
    let tail = &good_ratios[good_ratios.len().saturating_sub(TAIL)..];
    let growing = tail.len() == TAIL && tail.windows(2).all(|w| w[1] > 2.0 * w[0]);
    let good = if good_fail || !good_constant.is_some_and(f64::is_finite) {
        Verdict::Inconclusive
    } else if growing {
        Verdict::False
    } else {
        Verdict::True
    };
    let markers: Vec<MarkerCheck> = seq.iter().map(|la| marker_check(la, theta)).collect();
    let exotic = !markers.is_empty() && markers.iter().all(|m| *m != MarkerCheck::Missing);
    let (verdict, note) = if seq.len() < 2 {
        (Verdict::Inconclusive, Some("a single leaf approximation says nothing about limits".to_string()))
    } else {
        let v = match (good, product_to_zero) {
            (Verdict::True, Verdict::True) if exotic => Verdict::True,
            (_, Verdict::False) => Verdict::False,
            _ => Verdict::Inconclusive,
        };
        (v, None)
    };
    CesagReport {
        verdict,
        fitted,
        fitted_samples,
        good_constant,
        good,
        product_terms: terms,
        product_to_zero,
        markers,
        exotic,
        note,
    }
}

fn product_trend(terms: &[ProductTerm]) -> Verdict {
    if terms.len() < 2 {
        return Verdict::Inconclusive;
    }
    let tail = &terms[terms.len().saturating_sub(TAIL)..];
    let rising = |ms: &[LogMagnitude]| ms.windows(2).all(|w| w[1].certainly_ge(&w[0]) == Some(true));
    let below: Option<Vec<LogMagnitude>> = tail
        .iter()
        .map(|t| match t {
            ProductTerm::Below(m) => Some(*m),
            _ => None,
        })
        .collect();
    if let Some(ms) = below {
        return if rising(&ms) { Verdict::True } else { Verdict::Inconclusive };
    }
    let above: Option<Vec<LogMagnitude>> = tail
        .iter()
        .map(|t| match t {
            ProductTerm::Above(m) => Some(*m),
            _ => None,
        })
        .collect();
    match above {
        Some(ms) if rising(&ms) => Verdict::False,
        _ => Verdict::Inconclusive,
    }
}

fn marker_check(la: &LeafApprox, theta: Option<&QuadraticNumber>) -> MarkerCheck {
    if la.k < 2 {
        return MarkerCheck::Missing;
    }
    match (theta, &la.exact) {
        (Some(t), Some(e)) if e.q.to_usize().is_some_and(|q| q <= ORACLE_CAP) => match inadmissible_word(t, la.k) {
            Ok(w) if !w.prefixed_flipped.admissible => MarkerCheck::Verified,
            _ => MarkerCheck::Missing,
        },
        _ => MarkerCheck::Lemma,
    }
}

/// The `n,d,alpha,epsilon` rows of a schedule, with log-domain values
/// written through their reciprocals.
pub fn schedule_csv(seq: &[LeafApprox]) -> String {
    let mut s = String::from("n,d,alpha,epsilon\n");
    for la in seq {
        s.push_str(&format!(
            "{},{},{},{}\n",
            la.k,
            mag_cell(&la.d),
            recip_cell(&la.inv_alpha),
            recip_cell(&la.inv_epsilon)
        ));
    }
    s
}

pub(crate) fn mag_cell(m: &LogMagnitude) -> String {
    if m.is_finite_f64() {
        format!("{}", m.approx())
    } else {
        m.to_string()
    }
}

pub(crate) fn recip_cell(inv: &LogMagnitude) -> String {
    let v = 1.0 / inv.approx();
    if inv.is_finite_f64() && v > 0.0 {
        format!("{v}")
    } else {
        format!("1/{inv}")
    }
}

impl ExactLeaf {
    pub fn delta(&self, theta: &QuadraticNumber) -> QuadraticNumber {
        &(&qn(&self.q) * theta) - &qn(&self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::DigitRule;
    use num_bigint::BigUint;

    fn sqrt2() -> Foliation {
        Foliation::with_slope(QuadraticNumber::sqrt(2) + QuadraticNumber::from_int(1)).unwrap()
    }

    #[test]
    fn exact_leaves_close_up() {
        let fol = sqrt2();
        for k in 2..=6 {
            let la = build_leaf_approx(&fol, k).unwrap();
            let e = la.exact.as_ref().unwrap();
            assert!(e.matches_w_k, "k = {k}: {}", e.word);
            assert!(e.alpha_bound_holds);
            // closed modulo ℤ²
            let (s, t) = (e.curve.start().unwrap(), e.curve.end().unwrap());
            assert_eq!(s.reduce(), t.reduce());
            assert_eq!(e.word.len() as f64, la.d_f64().round());
            assert!(la.alpha_f64() < 2.0 / la.q_next.approx());
        }
    }

    #[test]
    fn guard_rejects_coarse_index() {
        // √3 − 1 > 1/2
        let fol = Foliation::with_slope(QuadraticNumber::sqrt(3)).unwrap();
        let err = build_leaf_approx(&fol, 0).unwrap_err().to_string();
        assert!(err.contains("2q_k"), "{err}");
        assert!(build_leaf_approx(&fol, 3).is_ok());
    }

    #[test]
    fn desk_rule_is_cesag() {
        let cf = ContinuedFraction::with_rule(vec![BigUint::from(1u32), BigUint::from(1u32)], DigitRule::Desk).unwrap();
        let ks: Vec<usize> = (2..=12).step_by(2).collect();
        let seq = leaf_schedule(&cf, &ks, 1.0).unwrap();
        let r = classify_cesag(&seq, None, Separation::Exp(0.5), Goodness::AlphaBound);
        assert_eq!(r.verdict, Verdict::True, "{r:#?}");
        assert_eq!(r.product_to_zero, Verdict::True);
    }

    #[test]
    fn quadratic_slope_is_not_cesag() {
        let fol = sqrt2();
        let seq: Vec<_> = (2..=8).step_by(2).map(|k| build_leaf_approx(&fol, k).unwrap()).collect();
        let r = classify_cesag(&seq, Some(&fol.theta), Separation::Exp(0.5), Goodness::AlphaBound);
        assert_eq!(r.product_to_zero, Verdict::False);
        assert_eq!(r.verdict, Verdict::False);
        // q_2 = 5, q_4 = 29 are enumerated; q_6 = 169 is left to the lemma
        assert_eq!(r.markers, [MarkerCheck::Verified, MarkerCheck::Verified, MarkerCheck::Lemma, MarkerCheck::Lemma]);
    }

    #[test]
    fn single_sample_is_inconclusive() {
        let la = build_leaf_approx(&sqrt2(), 2).unwrap();
        let r = classify_cesag(&[la], None, Separation::One, Goodness::AlphaBound);
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(r.note.is_some());
    }

    #[test]
    fn schedule_csv_rows() {
        let cf = ContinuedFraction::with_rule(vec![BigUint::from(1u32), BigUint::from(1u32)], DigitRule::Desk).unwrap();
        let seq = leaf_schedule(&cf, &[2, 4, 6], 1.0).unwrap();
        let csv = schedule_csv(&seq);
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.lines().nth(3).unwrap().contains("1/exp"));
    }
}
