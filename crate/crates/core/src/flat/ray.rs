use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::geometry::{FlatPoint, Foliation, Measure, Segment, SegmentKind};
use crate::error::{Error, Result};
use crate::numeric::QuadraticNumber;
use crate::words::Word;

/// A labelled position on a ray: a segment index and the number of letters
/// read before it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Marker {
    pub segment: usize,
    #[serde(serialize_with = "ser_bigint")]
    pub letter: BigInt,
    pub index: usize,
    pub label: String,
}

fn ser_bigint<S: serde::Serializer>(n: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    n.to_string().serialize(s)
}

/// A finite polygonal path in the plane with per-segment transverse
/// measure, optionally annotated with its letter word (possibly only a
/// prefix of it) and markers.
#[derive(Clone, Debug, Serialize)]
pub struct PolygonalRay {
    pub segments: Vec<Segment>,
    pub measures: Vec<Measure>,
    pub lengths: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_word")]
    pub word: Option<Word>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub markers: Vec<Marker>,
}

fn ser_word<S: serde::Serializer>(w: &Option<Word>, s: S) -> std::result::Result<S::Ok, S::Error> {
    w.as_ref().map(|w| w.to_string()).serialize(s)
}

impl PolygonalRay {
    pub fn new(segments: Vec<Segment>, fol: &Foliation) -> Result<Self> {
        for (i, w) in segments.windows(2).enumerate() {
            if w[0].end != w[1].start {
                return Err(Error::Precondition(format!("segments {i} and {} are not joined", i + 1)));
            }
        }
        let measures = segments.iter().map(|s| fol.measure(s)).collect();
        let lengths = segments.iter().map(Segment::length).collect();
        Ok(PolygonalRay { segments, measures, lengths, word: None, markers: Vec::new() })
    }

    pub fn start(&self) -> Option<&FlatPoint> {
        self.segments.first().map(|s| &s.start)
    }

    pub fn end(&self) -> Option<&FlatPoint> {
        self.segments.last().map(|s| &s.end)
    }

    pub fn total_length(&self) -> f64 {
        self.lengths.iter().sum()
    }

    pub fn total_measure(&self, fol: &Foliation) -> Measure {
        self.measures.iter().fold(Measure::zero(fol), |acc, m| acc.add(m))
    }

    /// Number of segments carrying positive measure.
    pub fn crossing_count(&self) -> usize {
        self.measures.iter().filter(|m| !m.is_zero()).count()
    }

    /// Transverse measure accumulated by arc length `t`.
    pub fn measure_at(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        let mut left = t.max(0.0);
        for (len, m) in self.lengths.iter().zip(&self.measures) {
            if left >= *len {
                acc += m.to_f64();
                left -= len;
            } else {
                if *len > 0.0 {
                    acc += m.to_f64() * left / len;
                }
                return acc;
            }
        }
        acc
    }

    /// The first `limit` letters read along the ray.
    pub fn letters(&self, limit: usize) -> Result<Word> {
        let mut out = Vec::new();
        for s in &self.segments {
            if out.len() >= limit {
                break;
            }
            out.extend(s.crossings(limit - out.len())?);
        }
        Ok(Word::new(out))
    }

    /// Attach the first `limit` letters as the word annotation.
    pub fn annotate(&mut self, limit: usize) -> Result<()> {
        self.word = Some(self.letters(limit)?);
        Ok(())
    }

    /// Exact number of letters read along the first `n` segments.
    pub fn letters_before(&self, n: usize) -> BigInt {
        self.segments[..n]
            .iter()
            .map(|s| {
                let (a, b) = s.crossing_counts();
                num_traits::Signed::abs(&a) + num_traits::Signed::abs(&b)
            })
            .sum()
    }

    /// Upper bound on the Lipschitz constant of `t ↦ I(t)`, from the exact
    /// per-segment rates.
    pub fn lipschitz(&self, fol: &Foliation) -> f64 {
        self.segments
            .iter()
            .filter_map(|s| s.rate_sq(fol))
            .map(|r| r.to_f64().sqrt() * (1.0 + 1e-12))
            .fold(0.0, f64::max)
    }
}

/// A straight ray from `start` of Euclidean length `t` in the rational unit
/// direction `(u, v)`.
pub fn straight_ray(
    fol: &Foliation,
    start: FlatPoint,
    u: &BigRational,
    v: &BigRational,
    t: &BigRational,
) -> Result<PolygonalRay> {
    if u * u + v * v != BigRational::one() {
        return Err(Error::Precondition("direction must be a unit vector".into()));
    }
    let dx = QuadraticNumber::rational(u * t);
    let dy = QuadraticNumber::rational(v * t);
    let end = start.translate(&dx, &dy);
    let kind = if fol.is_leaf_direction(&dx, &dy) { SegmentKind::Leaf } else { SegmentKind::Generic };
    PolygonalRay::new(vec![Segment::new(start, end, kind, fol)?], fol)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthSample {
    pub t: f64,
    pub measure: f64,
}

/// Samples of `t ↦ I(t)` along a ray.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthSeries {
    pub samples: Vec<GrowthSample>,
    /// `I(t) ≤ c·t` for every `t`.
    pub lipschitz: f64,
}

impl GrowthSeries {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,I\n");
        for p in &self.samples {
            s.push_str(&format!("{},{}\n", p.t, p.measure));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Vec<GrowthSample>> {
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let parse = |f: Option<&str>| -> Result<f64> {
                f.and_then(|x| x.trim().parse().ok())
                    .ok_or_else(|| Error::Parse { line: Some(i + 1), msg: format!("bad row {line:?}") })
            };
            let mut it = line.split(',');
            out.push(GrowthSample { t: parse(it.next())?, measure: parse(it.next())? });
        }
        Ok(out)
    }
}

/// `I(t)` at `n` evenly spaced times on `[0, t_max]` plus every segment
/// boundary inside it.
pub fn growth_series(ray: &PolygonalRay, fol: &Foliation, t_max: f64, n: usize) -> GrowthSeries {
    let mut ts: Vec<f64> = (0..=n).map(|i| t_max * i as f64 / n.max(1) as f64).collect();
    let mut acc = 0.0;
    for len in &ray.lengths {
        acc += len;
        if acc < t_max {
            ts.push(acc);
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    GrowthSeries {
        samples: ts.into_iter().map(|t| GrowthSample { t, measure: ray.measure_at(t) }).collect(),
        lipschitz: ray.lipschitz(fol),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CroftonReport {
    pub rays: usize,
    pub length: f64,
    pub seed: u64,
    pub mean: f64,
    pub expected: f64,
    pub relative_error: f64,
}

/// A rational point on the unit circle within about `2^-24` of angle `phi`.
pub fn rational_direction(phi: f64) -> (BigRational, BigRational) {
    // rational parametrisation through t = tan(φ/2), kept away from the pole
    let (phi, flip) = {
        let p = phi.rem_euclid(std::f64::consts::TAU);
        if p > std::f64::consts::FRAC_PI_2 && p < 3.0 * std::f64::consts::FRAC_PI_2 {
            (p - std::f64::consts::PI, true)
        } else {
            (p, false)
        }
    };
    let t = (phi / 2.0).tan();
    let scale = 1i64 << 24;
    let t = BigRational::new(BigInt::from((t * scale as f64).round() as i64), BigInt::from(scale));
    let one = BigRational::one();
    let den = &one + &t * &t;
    let mut u = (&one - &t * &t) / &den;
    let mut v = (BigRational::from_integer(2.into()) * &t) / &den;
    if flip {
        u = -u;
        v = -v;
    }
    (u, v)
}

/// Monte-Carlo estimate of the average of `I(t)/t` over straight rays in
/// random directions, one jittered direction per angular stratum. The
/// expected value is `2κ/π`.
pub fn crofton_estimate(fol: &Foliation, rays: usize, length: u32, seed: u64) -> Result<CroftonReport> {
    if rays == 0 {
        return Err(Error::Precondition("need at least one ray".into()));
    }
    let t = BigRational::from_integer(length.into());
    let ratios: Vec<f64> = (0..rays)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let phi = std::f64::consts::TAU * (i as f64 + rng.gen::<f64>()) / rays as f64;
            let (u, v) = rational_direction(phi);
            let ray = straight_ray(fol, FlatPoint::origin(), &u, &v, &t)?;
            Ok(ray.total_measure(fol).to_f64() / length as f64)
        })
        .collect::<Result<_>>()?;
    let mean = ratios.iter().sum::<f64>() / rays as f64;
    let expected = 2.0 * fol.kappa.to_f64().unwrap_or(f64::NAN) / std::f64::consts::PI;
    Ok(CroftonReport {
        rays,
        length: length as f64,
        seed,
        mean,
        expected,
        relative_error: (mean - expected).abs() / expected,
    })
}
