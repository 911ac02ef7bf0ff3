use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A point of ℂ ∪ {∞}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Point {
    Finite(Complex64),
    Infinity,
}

impl Point {
    pub fn real(x: f64) -> Self {
        Point::Finite(Complex64::new(x, 0.0))
    }

    pub fn finite(self) -> Option<Complex64> {
        match self {
            Point::Finite(z) => Some(z),
            Point::Infinity => None,
        }
    }

    fn close_to(self, other: Point, tol: f64) -> bool {
        match (self, other) {
            (Point::Infinity, Point::Infinity) => true,
            (Point::Finite(a), Point::Finite(b)) => (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm())),
            _ => false,
        }
    }
}

impl From<Complex64> for Point {
    fn from(z: Complex64) -> Self {
        Point::Finite(z)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl MobiusMap {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        MobiusMap { a: one, b: zero, c: zero, d: one }
    }

    /// Scales the matrix to determinant 1.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        if det.norm() == 0.0 || !det.is_finite() {
            return Err(Error::Precondition("singular Möbius matrix".into()));
        }
        let s = det.sqrt();
        Ok(MobiusMap { a: a / s, b: b / s, c: c / s, d: d / s })
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, p: Point) -> Point {
        match p {
            Point::Infinity => {
                if self.c.norm() == 0.0 {
                    Point::Infinity
                } else {
                    Point::Finite(self.a / self.c)
                }
            }
            Point::Finite(z) => {
                let den = self.c * z + self.d;
                if den.norm() == 0.0 {
                    Point::Infinity
                } else {
                    Point::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// Applies to a finite point, panicking on a pole. Handy inside formulas.
    pub fn at(&self, z: Complex64) -> Complex64 {
        self.apply(Point::Finite(z)).finite().expect("pole")
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MobiusMap) -> MobiusMap {
        MobiusMap {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn inverse(&self) -> MobiusMap {
        MobiusMap { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }
}

fn distinct(p: [Point; 3]) -> Result<()> {
    for i in 0..3 {
        for j in i + 1..3 {
            if p[i].close_to(p[j], 1e-15) {
                return Err(Error::Precondition("coincident points".into()));
            }
        }
    }
    Ok(())
}

/// The map sending z₁, z₂, z₃ to 0, 1, ∞.
fn to_standard(z: [Point; 3]) -> Result<MobiusMap> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    match (z[0], z[1], z[2]) {
        (Point::Infinity, Point::Finite(z2), Point::Finite(z3)) => MobiusMap::new(zero, z2 - z3, one, -z3),
        (Point::Finite(z1), Point::Infinity, Point::Finite(z3)) => MobiusMap::new(one, -z1, one, -z3),
        (Point::Finite(z1), Point::Finite(z2), Point::Infinity) => MobiusMap::new(one, -z1, zero, z2 - z1),
        (Point::Finite(z1), Point::Finite(z2), Point::Finite(z3)) => {
            MobiusMap::new(z2 - z3, -z1 * (z2 - z3), z2 - z1, -z3 * (z2 - z1))
        }
        _ => Err(Error::Precondition("coincident points".into())),
    }
}

pub fn mobius_from_triple(z: [Point; 3], w: [Point; 3]) -> Result<MobiusMap> {
    distinct(z)?;
    distinct(w)?;
    let s = to_standard(z)?;
    let t = to_standard(w)?;
    let m = t.inverse().compose(&s);
    MobiusMap::new(m.a, m.b, m.c, m.d)
}

/// Cross ratio in the convention `[p₁, p₂, p₃, p₄] = T(p₄)` where `T` sends
/// p₁, p₂, p₃ to 0, 1, ∞. So `[0, 1, ∞, λ] = λ` and the harmonic quadruple
/// `[0, 1, ∞, −1]` is −1.
pub fn cross_ratio(p1: Point, p2: Point, p3: Point, p4: Point) -> Result<Point> {
    let pts = [p1, p2, p3, p4];
    for i in 0..4 {
        for j in i + 1..4 {
            if pts[i].close_to(pts[j], 1e-15) {
                return Err(Error::Precondition("coincident points".into()));
            }
        }
    }
    Ok(to_standard([p1, p2, p3])?.apply(p4))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_4;

    fn c(x: f64, y: f64) -> Point {
        Point::Finite(Complex64::new(x, y))
    }

    fn random_point(rng: &mut ChaCha8Rng) -> Point {
        c(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0))
    }

    fn random_map(rng: &mut ChaCha8Rng) -> MobiusMap {
        let z = [random_point(rng), random_point(rng), random_point(rng)];
        let w = [random_point(rng), random_point(rng), random_point(rng)];
        mobius_from_triple(z, w).unwrap()
    }

    #[test]
    fn identity_triple() {
        let t = [c(0.0, 0.0), c(1.0, 0.0), Point::Infinity];
        let m = mobius_from_triple(t, t).unwrap();
        let id = MobiusMap::identity();
        for (x, y) in [(m.a, id.a), (m.b, id.b), (m.c, id.c), (m.d, id.d)] {
            assert!((x - y).norm() < 1e-12 || (x + y).norm() < 1e-12);
        }
    }

    #[test]
    fn lemma_map_pointwise() {
        let r = 1.0;
        let phi = FRAC_PI_4;
        let e = Complex64::from_polar(r, phi);
        let z = [Point::Infinity, c(0.0, 0.0), c(-1.0, 0.0)];
        let w = [Point::Finite(-e), Point::Finite(e.conj()), c(0.0, -r)];
        let m = mobius_from_triple(z, w).unwrap();
        assert!((m.det() - 1.0).norm() < 1e-12);
        for (zi, wi) in z.iter().zip(w.iter()) {
            assert!(m.apply(*zi).close_to(*wi, 1e-12));
        }
    }

    #[test]
    fn coincident_points_rejected() {
        let z = [c(0.0, 0.0), c(0.0, 0.0), Point::Infinity];
        let w = [c(0.0, 0.0), c(1.0, 0.0), Point::Infinity];
        assert!(mobius_from_triple(z, w).is_err());
        assert!(cross_ratio(c(0.0, 0.0), Point::Infinity, Point::Infinity, c(2.0, 0.0)).is_err());
    }

    #[test]
    fn composition_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let t0 = [random_point(&mut rng), random_point(&mut rng), random_point(&mut rng)];
            let t1 = [random_point(&mut rng), random_point(&mut rng), random_point(&mut rng)];
            let t2 = [random_point(&mut rng), random_point(&mut rng), random_point(&mut rng)];
            let m01 = mobius_from_triple(t0, t1).unwrap();
            let m12 = mobius_from_triple(t1, t2).unwrap();
            let m02 = mobius_from_triple(t0, t2).unwrap();
            let comp = m12.compose(&m01);
            let p = random_point(&mut rng);
            assert!(comp.apply(p).close_to(m02.apply(p), 1e-8));
        }
    }

    #[test]
    fn cross_ratio_normalization() {
        let lam = c(0.3, -2.0);
        let v = cross_ratio(c(0.0, 0.0), c(1.0, 0.0), Point::Infinity, lam).unwrap();
        assert!(v.close_to(lam, 1e-15));
        let h = cross_ratio(c(0.0, 0.0), c(1.0, 0.0), Point::Infinity, c(-1.0, 0.0)).unwrap();
        assert!(h.close_to(c(-1.0, 0.0), 1e-15));
    }

    #[test]
    fn cross_ratio_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let m = random_map(&mut rng);
            let p: Vec<Point> = (0..4).map(|_| random_point(&mut rng)).collect();
            let before = cross_ratio(p[0], p[1], p[2], p[3]).unwrap();
            let q: Vec<Point> = p.iter().map(|x| m.apply(*x)).collect();
            let after = cross_ratio(q[0], q[1], q[2], q[3]).unwrap();
            assert!(before.close_to(after, 1e-8), "{before:?} {after:?}");
        }
    }
}
