use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};
use serde::Serialize;

use super::geometry::{FlatPoint, Foliation, Measure, Segment};
use super::ray::{growth_series, GrowthSeries, Marker, PolygonalRay};
use crate::error::{Error, Result};
use crate::numeric::{cf_expand, QuadraticNumber};
use crate::words::{inadmissible_word, same_tail, TailReport, TailVerdict};

fn qn(n: &BigInt) -> QuadraticNumber {
    QuadraticNumber::rational(BigRational::from_integer(n.clone()))
}

fn pow2_inv(n: usize) -> QuadraticNumber {
    QuadraticNumber::rational(BigRational::new(BigInt::one(), BigInt::one() << n))
}

/// Convergent data `(k, p_k, q_k, δ_k = q_kθ − p_k)` for even `k`.
#[derive(Clone, Debug)]
struct EvenConvergent {
    k: usize,
    q: BigInt,
    delta: QuadraticNumber,
}

/// The fixed assignment of even convergent indices to segment indices:
/// `k(n)` is the least even `k > k(n−1)` whose flip measure bound
/// `2κδ_k/√(1+θ²)` is below `2^{-n}`.
pub struct IndexMap {
    fol: Foliation,
    ks: Vec<EvenConvergent>,
}

impl IndexMap {
    pub fn new(fol: &Foliation, n_max: usize) -> Result<Self> {
        let theta = &fol.theta;
        if theta.is_rational() || theta <= &QuadraticNumber::from_int(1) {
            return Err(Error::Precondition("exotic rays need an irrational slope above 1".into()));
        }
        let cf = cf_expand(theta)?;
        let kappa = QuadraticNumber::rational(fol.kappa.clone());
        let two = QuadraticNumber::from_int(2);
        let mut ks: Vec<EvenConvergent> = Vec::with_capacity(n_max + 1);
        let mut k = 2;
        let mut conv = cf.convergents(8)?;
        for n in 1..=n_max + 1 {
            loop {
                while conv.len() <= k {
                    conv = cf.convergents(2 * conv.len())?;
                }
                let (p, q) = (conv[k].p_exact()?.clone(), conv[k].q_exact()?.clone());
                let delta = &(&qn(&q) * theta) - &qn(&p);
                let bound = Measure { raw: &(&two * &kappa) * &delta, scale_sq: fol.scale_sq() }
                    .scaled(&QuadraticNumber::from_int(1))
                    .raw;
                let m = Measure { raw: bound, scale_sq: fol.scale_sq() };
                // the flip also needs 2q_kδ_k < 1 so the leaf stays in its start interval
                let guard = &(&two * &qn(&q)) * &delta < QuadraticNumber::from_int(1);
                let accept = m.lt(&pow2_inv(n)) && guard;
                k += 2;
                if accept {
                    ks.push(EvenConvergent { k: k - 2, q, delta });
                    break;
                }
            }
        }
        Ok(IndexMap { fol: fol.clone(), ks })
    }

    pub fn k_of(&self, n: usize) -> usize {
        self.ks[n - 1].k
    }

    fn conv(&self, n: usize) -> &EvenConvergent {
        &self.ks[n - 1]
    }

    /// The index whose flip-measure window `[1.5, 2]·κδ/√(1+θ²)` contains `m`.
    pub fn decode(&self, m: f64) -> Option<usize> {
        let s = self.fol.scale_f64();
        self.ks
            .iter()
            .position(|c| {
                let d = c.delta.to_f64() * s;
                m >= 1.5 * d * (1.0 - 1e-9) && m <= 2.0 * d * (1.0 + 1e-9)
            })
            .map(|i| i + 1)
    }
}

/// A polygonal ray through a sequence of flip segments.
#[derive(Clone, Debug, Serialize)]
pub struct ExoticRay {
    pub indices: Vec<usize>,
    pub ks: Vec<usize>,
    pub ray: PolygonalRay,
    pub jumps: Vec<Measure>,
    pub total_measure: Measure,
    /// `2 Σ 2^{-n}` over the indices.
    pub bound: f64,
    /// `a·w'_k` confirmed inadmissible by enumeration (the rest rely on the
    /// flip lemma).
    pub verified_markers: usize,
}

const ORACLE_CAP: u64 = 60;

/// Assemble an exotic ray from strictly increasing segment indices.
///
/// Segment `n` runs along the lowest `θ`-leaf through `w_{k(n)}`, drops just
/// before the last horizontal crossing so the final `(n+1)`-block reads as
/// an `n`-block (the word `a·w'_k` is inadmissible), and then follows a
/// single leaf back to just above the lattice leaf. Its measure lies in
/// `[1.5, 2)·κδ_k/√(1+θ²)`.
pub fn assemble_exotic_ray(fol: &Foliation, indices: &[usize], word_cap: usize) -> Result<ExoticRay> {
    if indices.is_empty() {
        return Err(Error::Precondition("need at least one segment index".into()));
    }
    if indices[0] == 0 || indices.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition("indices must be positive and strictly increasing".into()));
    }
    let last = *indices.last().unwrap();
    let map = IndexMap::new(fol, last + 1)?;
    let theta = &fol.theta;
    let two = QuadraticNumber::from_int(2);
    let half = QuadraticNumber::from_ratio(1, 2);
    let inv_theta = theta.recip();

    let mut segments = Vec::new();
    let mut markers = Vec::new();
    let mut jumps = Vec::new();
    let first = map.conv(indices[0]);
    let sigma0 = &first.delta / &two;
    // a short leaf ending on x = 0 supplies the leading `a`
    let lead = &half.clone().min(&sigma0 / &(theta * &two));
    let p0 = FlatPoint::new(-lead.clone(), &sigma0 - &(theta * lead));
    let mut cur = FlatPoint::new(QuadraticNumber::from_int(0), sigma0.clone());
    segments.push(Segment::leaf(p0, lead, fol));
    for (j, &n) in indices.iter().enumerate() {
        let c = map.conv(n);
        let next = map.conv(indices.get(j + 1).copied().unwrap_or(last + 1));
        let sigma = &c.delta / &two;
        let eta = &next.delta / &two;
        let h = &(&sigma + &c.delta) + &eta;
        // jump halfway between the last two horizontal crossings of w_k
        let dx_jump = &(&qn(&c.q) - &(&(&sigma + &c.delta) * &inv_theta)) - &(&half * &inv_theta);
        let to_jump = Segment::leaf(cur.clone(), &dx_jump, fol);
        let jump = Segment::vertical(to_jump.end.clone(), &-h.clone());
        let rest = &(&qn(&c.q) + &qn(&next.q)) - &dx_jump;
        let back = Segment::leaf(jump.end.clone(), &rest, fol);
        markers.push((segments.len(), n));
        jumps.push(fol.measure(&jump));
        cur = back.end.clone();
        segments.push(to_jump);
        segments.push(jump);
        segments.push(back);
    }
    let mut ray = PolygonalRay::new(segments, fol)?;
    for (seg, n) in markers {
        let letter = ray.letters_before(seg) - BigInt::one();
        ray.markers.push(Marker { segment: seg, letter, index: n, label: format!("a·w'_{}", map.k_of(n)) });
    }
    ray.annotate(word_cap)?;

    for (j, (m, &n)) in jumps.iter().zip(indices).enumerate() {
        if !m.lt(&pow2_inv(n)) {
            return Err(Error::MeasureBound { index: n, reason: format!("segment measure {} ≥ 2^-{n}", m.to_f64()) });
        }
        let rest = jumps[j + 1..].iter().fold(Measure::zero(fol), |a, b| a.add(b));
        if !rest.lt_measure(&m.scaled(&QuadraticNumber::from_ratio(1, 3))) {
            return Err(Error::MeasureBound {
                index: n,
                reason: format!("later segments carry {} ≥ a third of {}", rest.to_f64(), m.to_f64()),
            });
        }
    }
    let total_measure = ray.total_measure(fol);
    let bound_q = indices.iter().fold(QuadraticNumber::from_int(0), |acc, &n| &acc + &(&two * &pow2_inv(n)));
    if !total_measure.lt(&bound_q) {
        return Err(Error::MeasureBound { index: last, reason: "total measure exceeds 2Σ2^-n".into() });
    }
    let mut verified_markers = 0;
    for &n in indices {
        let c = map.conv(n);
        if c.q <= BigInt::from(ORACLE_CAP) {
            let w = inadmissible_word(theta, c.k)?;
            if w.prefixed_flipped.admissible {
                return Err(Error::MeasureBound { index: n, reason: format!("a·w'_{} is admissible", c.k) });
            }
            verified_markers += 1;
        }
    }
    Ok(ExoticRay {
        indices: indices.to_vec(),
        ks: indices.iter().map(|&n| map.k_of(n)).collect(),
        ray,
        jumps,
        total_measure,
        bound: bound_q.to_f64(),
        verified_markers,
    })
}

impl ExoticRay {
    /// Segment indices recovered from the jump measures alone.
    pub fn decode_indices(&self, fol: &Foliation) -> Result<Vec<Option<usize>>> {
        let n_max = *self.indices.last().unwrap_or(&1) + 1;
        let map = IndexMap::new(fol, n_max)?;
        Ok(self.jumps.iter().map(|m| map.decode(m.to_f64())).collect())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RayTailReport {
    pub verdict: TailVerdict,
    pub basis: &'static str,
    pub words: TailReport,
    pub gaps: (Vec<Option<usize>>, Vec<Option<usize>>),
}

/// Compare the tails of two exotic rays: by the segment indices decoded from
/// their measure gaps when both have at least two, else by their words at
/// `horizon` letters.
pub fn compare_ray_tails(a: &ExoticRay, b: &ExoticRay, fol: &Foliation, horizon: usize) -> Result<RayTailReport> {
    let empty = crate::words::Word::new(Vec::new());
    let wa = a.ray.word.as_ref().unwrap_or(&empty);
    let wb = b.ray.word.as_ref().unwrap_or(&empty);
    let words = same_tail(wa, wb, horizon);
    let ga = a.decode_indices(fol)?;
    let gb = b.decode_indices(fol)?;
    let decoded = ga.iter().chain(&gb).all(Option::is_some);
    let (verdict, basis) = if decoded && ga.len() >= 2 && gb.len() >= 2 {
        let m = ga.len().min(gb.len()) / 2;
        let same = ga[ga.len() - m..] == gb[gb.len() - m..];
        (if same { TailVerdict::Same } else { TailVerdict::Different }, "measure-gaps")
    } else {
        (words.verdict, "words")
    };
    Ok(RayTailReport { verdict, basis, words, gaps: (ga, gb) })
}

/// A sublinear target growth `f`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "arg")]
pub enum SublinearFn {
    Sqrt,
    /// `ln(1 + t)`.
    Log1p,
    /// `t^p`, `0 < p < 1`.
    Power(f64),
    /// `c·t`; accepted by the parser only so it can be rejected.
    Linear(f64),
}

impl SublinearFn {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            SublinearFn::Sqrt => t.sqrt(),
            SublinearFn::Log1p => t.ln_1p(),
            SublinearFn::Power(p) => t.powf(p),
            SublinearFn::Linear(c) => c * t,
        }
    }

    /// `f^{-1}(n)`.
    fn inverse(&self, n: f64) -> f64 {
        match *self {
            SublinearFn::Sqrt => n * n,
            SublinearFn::Log1p => n.exp_m1(),
            SublinearFn::Power(p) => n.powf(1.0 / p),
            SublinearFn::Linear(c) => n / c,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Parse { line: None, msg: format!("unknown growth function {s:?}") };
        match s {
            "sqrt" => Ok(SublinearFn::Sqrt),
            "log" | "log1p" => Ok(SublinearFn::Log1p),
            "linear" => Ok(SublinearFn::Linear(1.0)),
            _ => match s.split_once(':') {
                Some(("power", v)) => Ok(SublinearFn::Power(v.parse().map_err(|_| bad())?)),
                Some(("linear", v)) => Ok(SublinearFn::Linear(v.parse().map_err(|_| bad())?)),
                _ => Err(bad()),
            },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SublinearRay {
    pub f: SublinearFn,
    /// Leaf run lengths `d_n`, with `f(d_1 + … + d_n) = n`.
    pub runs: Vec<f64>,
    pub ray: PolygonalRay,
    pub growth: GrowthSeries,
    /// `a f(t) ≤ I(t) ≤ b f(t)` for `t0 ≤ t ≤ t_max`.
    pub a: f64,
    pub b: f64,
    pub t0: f64,
    pub t_max: f64,
}

/// A ray whose transverse measure grows like `f`: leaf runs of length `d_n`
/// separated by vertical jumps of measure exactly 1. Needs `1 + θ²` to be
/// the square of a rational (θ = √3 gives 2).
pub fn sublinear_ray(fol: &Foliation, f: SublinearFn, t_max: f64, samples: usize) -> Result<SublinearRay> {
    match f {
        SublinearFn::Linear(_) => return Err(Error::Precondition("linear growth is not sublinear".into())),
        SublinearFn::Power(p) if !(p > 0.0 && p < 1.0) => {
            return Err(Error::Precondition(format!("t^{p} is not sublinear and unbounded")))
        }
        _ => {}
    }
    if !(t_max > 1.0 && t_max.is_finite()) {
        return Err(Error::Precondition("t_max must exceed 1".into()));
    }
    let root = rational_sqrt(&(&QuadraticNumber::from_int(1) + &(&fol.theta * &fol.theta)))
        .ok_or_else(|| Error::Precondition(format!("1 + θ² is not a rational square for θ = {}", fol.theta)))?;
    let r = root.to_f64().unwrap();
    let jump_h = QuadraticNumber::rational(&root / &fol.kappa);
    let jump_len = jump_h.to_f64();
    let mut segments = Vec::new();
    let mut runs = Vec::new();
    let mut cur = FlatPoint::new(QuadraticNumber::from_ratio(1, 7), QuadraticNumber::from_ratio(1, 11));
    let mut t = 0.0;
    let mut prev = 0.0;
    let mut n = 0u32;
    while t < t_max {
        n += 1;
        let s_n = f.inverse(n as f64);
        let d = s_n - prev;
        prev = s_n;
        let dx = BigRational::from_f64(d / r).ok_or_else(|| Error::Precondition("run length overflow".into()))?;
        let leaf = Segment::leaf(cur.clone(), &QuadraticNumber::rational(dx), fol);
        runs.push(leaf.length());
        let jump = Segment::vertical(leaf.end.clone(), &jump_h);
        cur = jump.end.clone();
        t += leaf.length() + jump_len;
        segments.push(leaf);
        segments.push(jump);
    }
    let ray = PolygonalRay::new(segments, fol)?;
    // piecewise bounds: on a run with I = m, I/f ∈ [m/f(end), m/f(start)];
    // on a jump from m to m+1, I/f ∈ [m/f(end), (m+1)/f(start)]
    let t0 = runs[0] + jump_len;
    let (mut a, mut b) = (f64::INFINITY, 0.0f64);
    let mut start = 0.0;
    let mut m = 0.0;
    for (seg, len) in ray.lengths.iter().enumerate() {
        let end = start + len;
        let is_jump = seg % 2 == 1;
        if end > t0 && start < t_max {
            let (lo_t, hi_t) = (start.max(t0), end.min(t_max));
            let top = if is_jump { m + 1.0 } else { m };
            a = a.min(m / f.eval(hi_t));
            b = b.max(top / f.eval(lo_t));
        }
        if is_jump {
            m += 1.0;
        }
        start = end;
    }
    let growth = growth_series(&ray, fol, t_max, samples);
    Ok(SublinearRay { f, runs, ray, growth, a: a * (1.0 - 1e-9), b: b * (1.0 + 1e-9), t0, t_max })
}

fn rational_sqrt(x: &QuadraticNumber) -> Option<BigRational> {
    let r = x.as_rational()?;
    if r.numer() <= &BigInt::zero() {
        return None;
    }
    let (n, d) = (r.numer().sqrt(), r.denom().sqrt());
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| BigRational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fol() -> Foliation {
        Foliation::with_slope(QuadraticNumber::sqrt(2) + QuadraticNumber::from_int(1)).unwrap()
    }

    #[test]
    fn twenty_segments() {
        let f = fol();
        let idx: Vec<usize> = (1..=20).collect();
        let r = assemble_exotic_ray(&f, &idx, 2000).unwrap();
        assert!(r.total_measure.to_f64() < r.bound);
        assert_eq!(r.ray.crossing_count(), 20);
        assert_eq!(r.ray.markers.len(), 20);
        assert!(r.verified_markers >= 2);
        assert_eq!(r.decode_indices(&f).unwrap(), idx.iter().map(|&n| Some(n)).collect::<Vec<_>>());
        // the marked letters open the flipped word
        let w = r.ray.word.as_ref().unwrap();
        let m = &r.ray.markers[1];
        let at = m.letter.to_usize().unwrap();
        let flip = inadmissible_word(&f.theta, r.ks[1]).unwrap().word;
        assert_eq!(&w.letters()[at..at + flip.len()], flip.letters());
    }

    #[test]
    fn tails_are_told_apart() {
        let f = fol();
        let a = assemble_exotic_ray(&f, &[1, 2, 3, 4, 5, 6], 1000).unwrap();
        let b = assemble_exotic_ray(&f, &[2, 3, 4, 5, 6, 7], 1000).unwrap();
        let c = assemble_exotic_ray(&f, &[1, 3, 4, 5, 6, 7], 1000).unwrap();
        assert_eq!(compare_ray_tails(&a, &b, &f, 1000).unwrap().verdict, TailVerdict::Different);
        assert_eq!(compare_ray_tails(&b, &c, &f, 1000).unwrap().verdict, TailVerdict::Same);
        assert_eq!(compare_ray_tails(&a, &a, &f, 1000).unwrap().verdict, TailVerdict::Same);
    }

    #[test]
    fn bad_indices() {
        assert!(assemble_exotic_ray(&fol(), &[], 10).is_err());
        assert!(assemble_exotic_ray(&fol(), &[3, 2], 10).is_err());
    }

    #[test]
    fn sqrt_growth() {
        let f = Foliation::with_slope(QuadraticNumber::sqrt(3)).unwrap();
        let r = sublinear_ray(&f, SublinearFn::Sqrt, 1e4, 400).unwrap();
        assert_eq!(r.runs[..3].iter().map(|x| x.round()).collect::<Vec<_>>(), [1.0, 3.0, 5.0]);
        assert!(r.a > 0.25 && r.b < 4.0, "{} {}", r.a, r.b);
        for s in r.growth.samples.iter().filter(|s| s.t >= r.t0) {
            let ratio = s.measure / s.t.sqrt();
            assert!(ratio >= r.a && ratio <= r.b);
            if s.t >= 100.0 {
                assert!((0.75..1.25).contains(&ratio), "{s:?}");
            }
        }
        assert!(sublinear_ray(&f, SublinearFn::Linear(1.0), 1e3, 10).is_err());
        assert!(sublinear_ray(&fol(), SublinearFn::Sqrt, 1e3, 10).is_err());
    }
}
