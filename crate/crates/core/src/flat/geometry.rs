use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::QuadraticNumber;
use crate::words::Letter;

/// A point of the plane covering the flat torus `ℝ²/ℤ²`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FlatPoint {
    pub x: QuadraticNumber,
    pub y: QuadraticNumber,
}

impl FlatPoint {
    pub fn new(x: QuadraticNumber, y: QuadraticNumber) -> Self {
        FlatPoint { x, y }
    }

    pub fn origin() -> Self {
        FlatPoint::new(QuadraticNumber::from_int(0), QuadraticNumber::from_int(0))
    }

    /// The representative in `[0, 1)²`.
    pub fn reduce(&self) -> FlatPoint {
        FlatPoint::new(self.x.fract(), self.y.fract())
    }

    pub fn translate(&self, dx: &QuadraticNumber, dy: &QuadraticNumber) -> FlatPoint {
        FlatPoint::new(&self.x + dx, &self.y + dy)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
}

impl fmt::Display for FlatPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Serialize for FlatPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.x.to_string(), self.y.to_string()].serialize(s)
    }
}

/// The measured foliation of the torus by lines of slope `θ`, with
/// transverse measure `κ · (perpendicular length)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Foliation {
    pub theta: QuadraticNumber,
    pub kappa: BigRational,
}

impl Foliation {
    pub fn new(theta: QuadraticNumber, kappa: BigRational) -> Result<Self> {
        if !theta.is_positive() {
            return Err(Error::Precondition(format!("slope {theta} must be positive")));
        }
        if !kappa.is_positive() {
            return Err(Error::Precondition("κ must be positive".into()));
        }
        Ok(Foliation { theta, kappa })
    }

    pub fn with_slope(theta: QuadraticNumber) -> Result<Self> {
        Self::new(theta, BigRational::one())
    }

    /// `κ² / (1 + θ²)`: the square of the factor turning `|Δy − θΔx|` into
    /// measure.
    pub fn scale_sq(&self) -> QuadraticNumber {
        let k = QuadraticNumber::rational(self.kappa.clone());
        &(&k * &k) / &(&QuadraticNumber::from_int(1) + &(&self.theta * &self.theta))
    }

    pub fn scale_f64(&self) -> f64 {
        self.scale_sq().to_f64().sqrt()
    }

    pub fn measure(&self, seg: &Segment) -> Measure {
        let raw = (&(&seg.end.y - &seg.start.y) - &(&self.theta * &(&seg.end.x - &seg.start.x))).abs();
        Measure { raw, scale_sq: self.scale_sq() }
    }

    /// Whether `Δy = θΔx`.
    pub fn is_leaf_direction(&self, dx: &QuadraticNumber, dy: &QuadraticNumber) -> bool {
        (dy - &(&self.theta * dx)).is_zero()
    }
}

/// A transverse measure `raw · √scale_sq`, kept exact.
#[derive(Clone, Debug, PartialEq)]
pub struct Measure {
    pub raw: QuadraticNumber,
    pub scale_sq: QuadraticNumber,
}

impl Measure {
    pub fn zero(fol: &Foliation) -> Self {
        Measure { raw: QuadraticNumber::from_int(0), scale_sq: fol.scale_sq() }
    }

    pub fn is_zero(&self) -> bool {
        self.raw.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.raw.to_f64() * self.scale_sq.to_f64().sqrt()
    }

    pub fn add(&self, other: &Measure) -> Measure {
        assert_eq!(self.scale_sq, other.scale_sq, "measures of different foliations");
        Measure { raw: &self.raw + &other.raw, scale_sq: self.scale_sq.clone() }
    }

    pub fn scaled(&self, c: &QuadraticNumber) -> Measure {
        Measure { raw: &self.raw * c, scale_sq: self.scale_sq.clone() }
    }

    /// Exact `self < bound` for a non-negative bound, by squaring.
    pub fn lt(&self, bound: &QuadraticNumber) -> bool {
        if bound.signum() <= 0 {
            return false;
        }
        (&(&self.raw * &self.raw) * &self.scale_sq) < (bound * bound)
    }

    pub fn le(&self, bound: &QuadraticNumber) -> bool {
        if bound.signum() < 0 {
            return false;
        }
        (&(&self.raw * &self.raw) * &self.scale_sq) <= (bound * bound)
    }

    /// Exact `self < other` for measures of one foliation.
    pub fn lt_measure(&self, other: &Measure) -> bool {
        assert_eq!(self.scale_sq, other.scale_sq, "measures of different foliations");
        self.raw < other.raw
    }
}

impl Serialize for Measure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Measure", 3)?;
        st.serialize_field("raw", &self.raw.to_string())?;
        st.serialize_field("scale_sq", &self.scale_sq.to_string())?;
        st.serialize_field("value", &self.to_f64())?;
        st.end()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SegmentKind {
    Leaf,
    Transversal,
    Generic,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Segment {
    pub start: FlatPoint,
    pub end: FlatPoint,
    pub kind: SegmentKind,
}

impl Segment {
    pub fn new(start: FlatPoint, end: FlatPoint, kind: SegmentKind, fol: &Foliation) -> Result<Self> {
        let dx = &end.x - &start.x;
        let dy = &end.y - &start.y;
        let along = fol.is_leaf_direction(&dx, &dy);
        match kind {
            SegmentKind::Leaf if !along => {
                return Err(Error::Precondition(format!("leaf segment {start} → {end} is not along the foliation")))
            }
            SegmentKind::Transversal if along => {
                return Err(Error::Precondition(format!("transversal {start} → {end} runs along a leaf")))
            }
            _ => {}
        }
        Ok(Segment { start, end, kind })
    }

    /// The leaf segment from `start` spanning `dx` horizontally.
    pub fn leaf(start: FlatPoint, dx: &QuadraticNumber, fol: &Foliation) -> Self {
        let end = start.translate(dx, &(&fol.theta * dx));
        Segment { start, end, kind: SegmentKind::Leaf }
    }

    pub fn vertical(start: FlatPoint, dy: &QuadraticNumber) -> Self {
        let end = start.translate(&QuadraticNumber::from_int(0), dy);
        Segment { start, end, kind: SegmentKind::Transversal }
    }

    pub fn delta(&self) -> (QuadraticNumber, QuadraticNumber) {
        (&self.end.x - &self.start.x, &self.end.y - &self.start.y)
    }

    /// Squared Euclidean length, exact.
    pub fn length_sq(&self) -> QuadraticNumber {
        let (dx, dy) = self.delta();
        &(&dx * &dx) + &(&dy * &dy)
    }

    pub fn length(&self) -> f64 {
        let (dx, dy) = self.delta();
        dx.to_f64().hypot(dy.to_f64())
    }

    pub fn reversed(&self) -> Segment {
        Segment { start: self.end.clone(), end: self.start.clone(), kind: self.kind }
    }

    /// `(measure / length)²`, exact; `None` for a degenerate segment.
    pub fn rate_sq(&self, fol: &Foliation) -> Option<QuadraticNumber> {
        let l2 = self.length_sq();
        if l2.is_zero() {
            return None;
        }
        let m = fol.measure(self);
        Some(&(&(&m.raw * &m.raw) * &m.scale_sq) / &l2)
    }

    /// Grid crossings in order along the segment, as letters. Stops after
    /// `limit` letters.
    pub fn crossings(&self, limit: usize) -> Result<Vec<Letter>> {
        let (dx, dy) = self.delta();
        let xs = lines_crossed(&self.start.x, &self.end.x, limit);
        let ys = lines_crossed(&self.start.y, &self.end.y, limit);
        let (ax, bx) = (dx.signum() >= 0, dy.signum() >= 0);
        let mut out = Vec::new();
        let (mut i, mut j) = (0usize, 0usize);
        // parameter of crossing the line at value v: (v − start) / delta
        while out.len() < limit && (i < xs.len() || j < ys.len()) {
            let pick_x = if i == xs.len() {
                false
            } else if j == ys.len() {
                true
            } else {
                let tx = &(&xs[i] - &self.start.x) * &dy.abs();
                let ty = &(&ys[j] - &self.start.y) * &dx.abs();
                let (tx, ty) = (tx.abs(), ty.abs());
                match tx.cmp(&ty) {
                    std::cmp::Ordering::Less => true,
                    std::cmp::Ordering::Greater => false,
                    std::cmp::Ordering::Equal => return Err(Error::LatticeHit { index: out.len() }),
                }
            };
            if pick_x {
                out.push(if ax { Letter::A } else { Letter::AInv });
                i += 1;
            } else {
                out.push(if bx { Letter::B } else { Letter::BInv });
                j += 1;
            }
        }
        Ok(out)
    }

    /// Number of vertical and horizontal grid lines crossed (exact).
    pub fn crossing_counts(&self) -> (num_bigint::BigInt, num_bigint::BigInt) {
        (count_lines(&self.start.x, &self.end.x), count_lines(&self.start.y, &self.end.y))
    }
}

/// The first `cap` integers strictly after `a` up to and including `b` (or
/// the mirror image when `b < a`), in the order met.
fn lines_crossed(a: &QuadraticNumber, b: &QuadraticNumber, cap: usize) -> Vec<QuadraticNumber> {
    let mut out = Vec::new();
    if a == b {
        return out;
    }
    if a < b {
        let mut v: num_bigint::BigInt = a.floor() + 1;
        while QuadraticNumber::rational(BigRational::from_integer(v.clone())) <= *b {
            out.push(QuadraticNumber::rational(BigRational::from_integer(v.clone())));
            v += 1;
            if out.len() >= cap {
                break;
            }
        }
    } else {
        let mut v = a.floor();
        if QuadraticNumber::rational(BigRational::from_integer(v.clone())) == *a {
            v -= 1;
        }
        while QuadraticNumber::rational(BigRational::from_integer(v.clone())) >= *b {
            out.push(QuadraticNumber::rational(BigRational::from_integer(v.clone())));
            v -= 1;
            if out.len() >= cap {
                break;
            }
        }
    }
    out
}

fn count_lines(a: &QuadraticNumber, b: &QuadraticNumber) -> num_bigint::BigInt {
    if a <= b {
        b.floor() - a.floor()
    } else {
        // lines in [b, a): ⌈a⌉ − ⌈b⌉
        let ceil = |v: &QuadraticNumber| -(-v.clone()).floor();
        ceil(a) - ceil(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> QuadraticNumber {
        QuadraticNumber::from_ratio(p, d)
    }

    #[test]
    fn diagonal_measure() {
        let fol = Foliation::with_slope(QuadraticNumber::from_int(1)).unwrap();
        let s =
            Segment::new(FlatPoint::origin(), FlatPoint::new(q(1, 1), q(0, 1)), SegmentKind::Generic, &fol).unwrap();
        let m = fol.measure(&s);
        assert!((m.to_f64() - 0.5f64.sqrt()).abs() < 1e-15);
        // exactly 1/√2: m² = 1/2
        assert!(m.le(&QuadraticNumber::sqrt(2).recip()) && !m.lt(&QuadraticNumber::sqrt(2).recip()));
        assert_eq!(fol.measure(&s.reversed()), m);
    }

    #[test]
    fn leaves_have_zero_measure() {
        let fol = Foliation::with_slope(QuadraticNumber::sqrt(2)).unwrap();
        let s = Segment::leaf(FlatPoint::new(q(1, 3), q(1, 7)), &q(17, 5), &fol);
        assert!(fol.measure(&s).is_zero());
        assert!(Segment::new(s.start.clone(), s.end.clone(), SegmentKind::Transversal, &fol).is_err());
        let bad = FlatPoint::new(q(1, 1), q(1, 1));
        assert!(Segment::new(FlatPoint::origin(), bad, SegmentKind::Leaf, &fol).is_err());
    }

    #[test]
    fn crossing_letters() {
        let fol = Foliation::with_slope(QuadraticNumber::from_int(2)).unwrap();
        let s = Segment::leaf(FlatPoint::new(q(0, 1), q(1, 4)), &q(2, 1), &fol);
        let w: String = s.crossings(100).unwrap().iter().map(|l| l.as_char()).collect();
        assert_eq!(w, "bbabba");
        let back: String = s.reversed().crossings(100).unwrap().iter().map(|l| l.as_char()).collect();
        assert_eq!(back, "BBABBA");
        let (a, b) = s.crossing_counts();
        assert_eq!((a, b), (2.into(), 4.into()));
    }
}
