use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::mobius::{mobius_from_triple, MobiusMap, Point};
use crate::{Error, Result};

/// Boundary circle of a hemisphere or half-circle, as serialized everywhere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
}

/// A half-circle geodesic given by its boundary pair. `b = ∞` is a vertical line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicHalfCircle {
    pub a: Point,
    pub b: Point,
    /// Whether the smaller piece of the containing plane lies to the right
    /// when travelling from `a` to `b`. Arbitrary when the geodesic is equatorial.
    pub smaller_on_right: bool,
}

impl GeodesicHalfCircle {
    pub fn new(a: Point, b: Point) -> Self {
        GeodesicHalfCircle { a, b, smaller_on_right: true }
    }

    /// `None` for a vertical line.
    pub fn radius(&self) -> Option<f64> {
        Some((self.a.finite()? - self.b.finite()?).norm() / 2.0)
    }

    pub fn center(&self) -> Option<Complex64> {
        Some((self.a.finite()? + self.b.finite()?) / 2.0)
    }

    pub fn circle(&self) -> Option<Circle> {
        let c = self.center()?;
        Some(Circle { cx: c.re, cy: c.im, r: self.radius()? })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlaneSphere {
    Sphere(Circle),
    Vertical,
}

impl PlaneSphere {
    pub fn radius(&self) -> Option<f64> {
        match self {
            PlaneSphere::Sphere(c) => Some(c.r),
            PlaneSphere::Vertical => None,
        }
    }
}

fn check_radii(r_g: f64, r_p: f64) -> Result<()> {
    if !(r_g > 0.0 && r_p > 0.0 && r_g.is_finite() && r_p.is_finite()) {
        return Err(Error::Precondition(format!("radii must be positive, got r_G = {r_g}, r_P = {r_p}")));
    }
    if r_g > r_p * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!("r_G = {r_g} exceeds r_P = {r_p}")));
    }
    Ok(())
}

/// sin φ = √(1 − r_G²/r_P²), computed without cancellation.
pub fn inclination_sin(r_g: f64, r_p: f64) -> Result<f64> {
    check_radii(r_g, r_p)?;
    let t = (r_g / r_p).min(1.0);
    Ok(((1.0 - t) * (1.0 + t)).sqrt())
}

/// The map sending ∞, 0, −1 to −r_P e^{iφ}, r_P e^{−iφ}, −i r_P: the
/// imaginary axis goes to the geodesic of radius r_G on the hemisphere.
pub fn lemma_map(r_g: f64, r_p: f64) -> Result<MobiusMap> {
    let s = inclination_sin(r_g, r_p)?;
    let e = Complex64::new(r_g, r_p * s);
    mobius_from_triple(
        [Point::Infinity, Point::real(0.0), Point::real(-1.0)],
        [Point::Finite(-e), Point::Finite(e.conj()), Point::Finite(Complex64::new(0.0, -r_p))],
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingRadius {
    pub value: f64,
    pub bound: f64,
}

/// Radius of the geodesic reached by a crossing of length `k` started at
/// distance `d` past the peak, away from the shared vertex.
pub fn radius_after_crossing(r_g: f64, r_p: f64, d: f64, k: f64) -> Result<CrossingRadius> {
    let s = inclination_sin(r_g, r_p)?;
    if k < 0.0 {
        return Err(Error::Precondition("crossing length must be non-negative".into()));
    }
    if k == 0.0 {
        return Ok(CrossingRadius { value: r_g, bound: r_g });
    }
    let x = k * (-d).exp();
    let value = r_g / (1.0 + 2.0 * x * s + x * x).sqrt();
    let bound = r_g / (1.0 + x);
    debug_assert!(value >= bound * (1.0 - 1e-14));
    Ok(CrossingRadius { value, bound })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReverseCrossingRadius {
    pub value: f64,
    pub bound: f64,
    pub bound_holds: bool,
    /// The variant with an unsquared `k` in front of e^{2d}.
    pub literal: f64,
}

/// Same, with the crossing made toward the shared vertex: e^{−d} becomes e^{d}.
pub fn radius_after_reverse_crossing(r_g: f64, r_p: f64, d: f64, k: f64) -> Result<ReverseCrossingRadius> {
    let s = inclination_sin(r_g, r_p)?;
    if k < 0.0 {
        return Err(Error::Precondition("crossing length must be non-negative".into()));
    }
    let x = k * d.exp();
    let value = r_g / (1.0 + 2.0 * x * s + x * x).sqrt();
    let literal = r_g / (1.0 + 2.0 * x * s + k * (2.0 * d).exp()).sqrt();
    let bound = r_g / (1.0 + x);
    Ok(ReverseCrossingRadius { value, bound, bound_holds: value >= bound * (1.0 - 1e-14), literal })
}

/// Radius measured by pushing the boundary of the crossed-to geodesic through
/// [`lemma_map`]. The vertical line over `-k e^{∓d}` is the image of the
/// target geodesic in the standard picture.
pub fn crossing_radius_oracle(r_g: f64, r_p: f64, d: f64, k: f64, reverse: bool) -> Result<f64> {
    let m = lemma_map(r_g, r_p)?;
    let foot = if reverse { -k * d.exp() } else { -k * (-d).exp() };
    let g = GeodesicHalfCircle::new(m.apply(Point::real(foot)), m.apply(Point::Infinity));
    g.radius().ok_or_else(|| Error::Precondition("image geodesic is vertical".into()))
}

/// Height in the standard picture of the peak of the geodesic over
/// `[foot, ∞]`, once mapped onto the hemisphere of radius r_P.
pub fn peak_height(r_g: f64, r_p: f64, foot: f64) -> Result<f64> {
    let m = lemma_map(r_g, r_p)?;
    let a = m.at(Complex64::new(foot, 0.0));
    let b = m.apply(Point::Infinity).finite().expect("finite endpoint");
    let mid = (a + b) / 2.0;
    let h = (1.0 - (mid.norm() / r_p).powi(2)).max(0.0).sqrt();
    let p = mid / (1.0 + h);
    let z = m.inverse().at(p);
    Ok(z.im)
}

/// Closed form of [`peak_height`] for the foot `-k e^d`: the peak is the
/// projection of the hemisphere's top onto the geodesic, which gives
/// √(1 + 2k e^d sin φ + k² e^{2d}), the same factor that divides r_G.
pub fn ridge_peak_height(r_g: f64, r_p: f64, d: f64, k: f64) -> Result<f64> {
    let s = inclination_sin(r_g, r_p)?;
    let x = k * d.exp();
    Ok((1.0 + 2.0 * x * s + x * x).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BentRadius {
    Finite(f64),
    Vertical,
}

impl BentRadius {
    pub fn value(&self) -> Option<f64> {
        match self {
            BentRadius::Finite(r) => Some(*r),
            BentRadius::Vertical => None,
        }
    }
}

/// The denominator is cos(α − φ); compare angles so that α = π/2 on an
/// equatorial geodesic lands exactly on the vertical plane.
fn past_vertical(sin_phi: f64, cos_phi: f64, alpha: f64) -> bool {
    alpha - sin_phi.atan2(cos_phi) >= std::f64::consts::FRAC_PI_2 - 4e-16
}

/// Radius of the plane obtained by bending the hemisphere of radius r_P by
/// `alpha` about a contained geodesic of radius r_G.
pub fn bent_plane_radius(r_p: f64, r_g: f64, alpha: f64) -> Result<BentRadius> {
    let s = inclination_sin(r_g, r_p)?;
    if alpha == 0.0 {
        return Ok(BentRadius::Finite(r_p));
    }
    let c = r_g / r_p;
    let den = alpha.sin() * s + alpha.cos() * c;
    if den <= 0.0 || past_vertical(s, c, alpha) {
        return Ok(BentRadius::Vertical);
    }
    Ok(BentRadius::Finite(r_g / den))
}

/// The same quantity written as r_P r_G / (√(r_P² − r_G²) sin α + r_G cos α).
pub fn bent_plane_radius_radical(r_p: f64, r_g: f64, alpha: f64) -> Result<BentRadius> {
    check_radii(r_g, r_p)?;
    if alpha == 0.0 {
        return Ok(BentRadius::Finite(r_p));
    }
    let root = ((r_p - r_g).max(0.0) * (r_p + r_g)).sqrt();
    let den = root * alpha.sin() + r_g * alpha.cos();
    if den <= 0.0 || past_vertical(root, r_g, alpha) {
        return Ok(BentRadius::Vertical);
    }
    Ok(BentRadius::Finite(r_p * r_g / den))
}

fn rotate(v: [f64; 3], axis: [f64; 3], angle: f64) -> [f64; 3] {
    let (s, c) = angle.sin_cos();
    let dot = v[0] * axis[0] + v[1] * axis[1] + v[2] * axis[2];
    let cross = [axis[1] * v[2] - axis[2] * v[1], axis[2] * v[0] - axis[0] * v[2], axis[0] * v[1] - axis[1] * v[0]];
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = v[i] * c + cross[i] * s + axis[i] * dot * (1.0 - c);
    }
    out
}

/// Bends in Euclidean half-space: the hemisphere centred at the origin meets
/// the vertical plane `y = −h` in the geodesic. Its unit normal at the top of
/// the geodesic is rotated about the tangent line there, and the new sphere is
/// the one through the geodesic with that normal.
pub fn bending_oracle(r_p: f64, r_g: f64, alpha: f64) -> Result<PlaneSphere> {
    check_radii(r_g, r_p)?;
    let h = ((r_p - r_g).max(0.0) * (r_p + r_g)).sqrt();
    let top = [0.0, -h, r_g];
    let normal = [top[0] / r_p, top[1] / r_p, top[2] / r_p];
    let n = rotate(normal, [1.0, 0.0, 0.0], -alpha);
    if n[2] <= 1e-15 {
        return Ok(PlaneSphere::Vertical);
    }
    let r = top[2] / n[2];
    let center = [top[0] - r * n[0], top[1] - r * n[1]];
    Ok(PlaneSphere::Sphere(Circle { cx: center[0], cy: center[1], r }))
}

/// Radius of the geodesic on the unit hemisphere orthogonal to a meridian at
/// distance `d` from the top. Equals sech d.
pub fn meridian_geodesic_radius(d: f64) -> f64 {
    1.0 / d.cosh()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecaySample {
    pub d: f64,
    pub r: f64,
    pub log_r_plus_d: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub alpha: f64,
    pub samples: Vec<DecaySample>,
    /// Least-squares slope of ln r against d over the grid.
    pub slope: f64,
    /// ln(2 / sin α), the limit of ln r + d.
    pub limit: f64,
}

/// Bends the unit hemisphere by `alpha` about the meridian-orthogonal
/// geodesic at each distance of `grid`.
pub fn single_bend_decay(alpha: f64, grid: &[f64]) -> Result<DecayReport> {
    if !(alpha > 0.0 && alpha <= std::f64::consts::FRAC_PI_2 + 1e-15) {
        return Err(Error::Precondition("bending angle must lie in (0, π/2]".into()));
    }
    if grid.len() < 2 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition("distance grid must be increasing with two points".into()));
    }
    let mut samples = Vec::with_capacity(grid.len());
    for &d in grid {
        let r_g = meridian_geodesic_radius(d);
        let r = bent_plane_radius(1.0, r_g, alpha)?
            .value()
            .ok_or_else(|| Error::Precondition(format!("vertical plane at d = {d}")))?;
        samples.push(DecaySample { d, r, log_r_plus_d: r.ln() + d });
    }
    let n = samples.len() as f64;
    let mx = samples.iter().map(|s| s.d).sum::<f64>() / n;
    let my = samples.iter().map(|s| s.r.ln()).sum::<f64>() / n;
    let sxy: f64 = samples.iter().map(|s| (s.d - mx) * (s.r.ln() - my)).sum();
    let sxx: f64 = samples.iter().map(|s| (s.d - mx).powi(2)).sum();
    Ok(DecayReport { alpha, samples, slope: sxy / sxx, limit: (2.0 / alpha.sin()).ln() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, PI};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn config(rng: &mut ChaCha8Rng) -> (f64, f64, f64, f64) {
        let r_p = rng.gen_range(0.1..10.0);
        let r_g = r_p * rng.gen_range(0.05..1.0);
        (r_g, r_p, rng.gen_range(-3.0..3.0), rng.gen_range(0.0..0.99))
    }

    #[test]
    fn zero_crossing_is_identity() {
        assert_eq!(radius_after_crossing(0.7, 1.3, 2.0, 0.0).unwrap().value, 0.7);
        assert_eq!(radius_after_reverse_crossing(0.7, 1.3, 0.0, 0.0).unwrap().value, 0.7);
    }

    #[test]
    fn equatorial_crossing() {
        let (d, k) = (0.4, 0.8);
        let v = radius_after_crossing(2.0, 2.0, d, k).unwrap().value;
        let expect = 2.0 / (1.0 + k * k * (-2.0 * d).exp()).sqrt();
        assert!(rel(v, expect) < 1e-15);
    }

    #[test]
    fn oversized_geodesic_rejected() {
        assert!(radius_after_crossing(2.0, 1.0, 0.0, 0.1).is_err());
        assert!(bent_plane_radius(1.0, 2.0, 0.1).is_err());
    }

    #[test]
    fn crossing_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let (r_g, r_p, d, k) = config(&mut rng);
            let f = radius_after_crossing(r_g, r_p, d, k).unwrap();
            let o = crossing_radius_oracle(r_g, r_p, d, k, false).unwrap();
            assert!(rel(f.value, o) < 1e-10, "{r_g} {r_p} {d} {k}: {} vs {o}", f.value);
            assert!(f.value >= f.bound);
        }
    }

    #[test]
    fn reverse_matches_oracle_and_literal_does_not() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut literal_off = 0;
        for _ in 0..1000 {
            let (r_g, r_p, d, k) = config(&mut rng);
            let f = radius_after_reverse_crossing(r_g, r_p, d, k).unwrap();
            let o = crossing_radius_oracle(r_g, r_p, d, k, true).unwrap();
            assert!(rel(f.value, o) < 1e-10);
            if rel(f.literal, o) > 1e-6 {
                literal_off += 1;
            }
        }
        assert!(literal_off > 900, "{literal_off}");
    }

    #[test]
    fn crossing_monotone_in_k_and_d() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let (r_g, r_p, d, _) = config(&mut rng);
            let mut prev = f64::INFINITY;
            for i in 0..20 {
                let v = radius_after_crossing(r_g, r_p, d, i as f64 * 0.1).unwrap().value;
                assert!(v <= prev);
                prev = v;
            }
            let far = radius_after_crossing(r_g, r_p, 40.0, 0.5).unwrap().value;
            assert!(rel(far, r_g) < 1e-12);
        }
    }

    #[test]
    fn peak_of_standard_geodesic() {
        let m = lemma_map(1.1, 1.7).unwrap();
        let g = GeodesicHalfCircle::new(m.apply(Point::real(0.0)), m.apply(Point::Infinity));
        assert!(rel(g.radius().unwrap(), 1.1) < 1e-12);
        // peak of the image of the imaginary axis sits over i
        let h = peak_height(1.1, 1.7, -1e-300).unwrap();
        assert!(rel(h, 1.0) < 1e-9, "{h}");
    }

    #[test]
    fn peak_tracks_the_foot() {
        for (d, k) in [(5.0f64, 0.3), (10.0, 0.1), (20.0, 0.01)] {
            let foot = k * d.exp();
            let h = peak_height(1.1, 1.7, -foot).unwrap();
            assert!((h / foot - 1.0).abs() < 0.05, "{d} {k}: {}", h / foot);
        }
    }

    #[test]
    fn peak_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let (r_g, r_p, d, k) = config(&mut rng);
            let h = ridge_peak_height(r_g, r_p, d, k).unwrap();
            let o = peak_height(r_g, r_p, -k * d.exp()).unwrap();
            assert!(rel(h, o) < 1e-8, "{h} {o}");
            let v = radius_after_reverse_crossing(r_g, r_p, d, k).unwrap().value;
            assert!(rel(v * h, r_g) < 1e-14);
        }
    }

    #[test]
    fn bending_forms_and_oracle_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let (r_g, r_p, _, _) = config(&mut rng);
            let a = rng.gen_range(0.0..PI);
            let x = bent_plane_radius(r_p, r_g, a).unwrap();
            let y = bent_plane_radius_radical(r_p, r_g, a).unwrap();
            let o = bending_oracle(r_p, r_g, a).unwrap();
            match (x, y, o) {
                (BentRadius::Finite(x), BentRadius::Finite(y), PlaneSphere::Sphere(c)) => {
                    if x < 1e6 * r_p {
                        assert!(rel(x, y) < 1e-10, "{x} {y}");
                        assert!(rel(x, c.r) < 1e-10, "{x} {}", c.r);
                    }
                }
                (BentRadius::Vertical, BentRadius::Vertical, PlaneSphere::Vertical) => {}
                other => {
                    // only near the vertical threshold may the tags disagree
                    let c = r_g / r_p;
                    let den = a.sin() * (1.0 - c * c).sqrt() + a.cos() * c;
                    assert!(den.abs() < 1e-9, "{other:?}");
                }
            }
        }
    }

    #[test]
    fn oracle_sphere_contains_geodesic() {
        let (r_p, r_g, a) = (2.0f64, 1.2, 0.7);
        let h = (r_p * r_p - r_g * r_g).sqrt();
        if let PlaneSphere::Sphere(c) = bending_oracle(r_p, r_g, a).unwrap() {
            for x in [-r_g, r_g] {
                let dist = ((x - c.cx).powi(2) + (-h - c.cy).powi(2)).sqrt();
                assert!(rel(dist, c.r) < 1e-12);
            }
        } else {
            panic!("vertical");
        }
    }

    #[test]
    fn bending_edge_cases() {
        assert_eq!(bent_plane_radius(1.3, 0.4, 0.0).unwrap(), BentRadius::Finite(1.3));
        assert_eq!(bent_plane_radius(1.0, 1.0, FRAC_PI_2).unwrap(), BentRadius::Vertical);
        let mut r = 1.7;
        for _ in 0..50 {
            r = bent_plane_radius(r, 0.9, 0.0).unwrap().value().unwrap();
        }
        assert_eq!(r, 1.7);
    }

    #[test]
    fn meridian_geodesic_in_disk_model() {
        // in the disk model the point at distance d is tanh(d/2); the
        // orthogonal geodesic ends where cos ψ = 2p/(1+p²)
        for d in [0.5f64, 1.0, 3.0, 7.0] {
            let p = (d / 2.0).tanh();
            let cos_psi = 2.0 * p / (1.0 + p * p);
            let half_chord = (1.0 - cos_psi * cos_psi).sqrt();
            assert!(rel(meridian_geodesic_radius(d), half_chord) < 1e-9);
        }
    }

    #[test]
    fn right_angle_decay_is_inverse_sinh() {
        for d in [0.5f64, 2.0, 6.0] {
            let o = bending_oracle(1.0, meridian_geodesic_radius(d), FRAC_PI_2).unwrap();
            assert!(rel(o.radius().unwrap(), 1.0 / d.sinh()) < 1e-10);
        }
    }

    #[test]
    fn decay_slopes() {
        let grid: Vec<f64> = (0..=70).map(|i| 3.0 + i as f64 * 0.1).collect();
        for a in [FRAC_PI_6, FRAC_PI_4, FRAC_PI_2] {
            let rep = single_bend_decay(a, &grid).unwrap();
            assert!((rep.slope + 1.0).abs() < 0.02, "{a}: {}", rep.slope);
            let last = rep.samples.last().unwrap();
            assert!((last.log_r_plus_d - rep.limit).abs() < 1e-3);
        }
        let tiny = single_bend_decay(1e-9, &grid).unwrap();
        assert!(tiny.samples.iter().all(|s| (s.r - 1.0).abs() < 1e-4));
    }
}
