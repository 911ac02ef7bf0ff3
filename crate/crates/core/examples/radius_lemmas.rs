//! Euclidean radii of half-circle geodesics after crossing a bent plane,
//! checked against explicit Möbius maps.
//!
//!     cargo run --example radius_lemmas

use std::f64::consts::FRAC_PI_4;

use halo::hyperbolic::{
    bending_oracle, bent_plane_radius, crossing_radius_oracle, meridian_geodesic_radius, radius_after_crossing,
    radius_after_reverse_crossing, single_bend_decay, BentRadius, PlaneSphere,
};

fn main() -> halo::Result<()> {
    let (r_g, r_p) = (0.6, 1.0);
    for (d, k) in [(0.0, 0.1), (1.0, 0.3), (-2.0, 0.9)] {
        let fwd = radius_after_crossing(r_g, r_p, d, k)?;
        let rev = radius_after_reverse_crossing(r_g, r_p, d, k)?;
        println!(
            "d = {d:>4}, k = {k}: forward {:.6} (oracle {:.6}), reverse {:.6} (oracle {:.6})",
            fwd.value,
            crossing_radius_oracle(r_g, r_p, d, k, false)?,
            rev.value,
            crossing_radius_oracle(r_g, r_p, d, k, true)?,
        );
    }

    for alpha in [0.1, 1.0, 2.0] {
        let r = bent_plane_radius(r_p, r_g, alpha)?;
        let shown = match (r, bending_oracle(r_p, r_g, alpha)?) {
            (BentRadius::Finite(x), PlaneSphere::Sphere(c)) => format!("{x:.6} (oracle {:.6})", c.r),
            (BentRadius::Vertical, PlaneSphere::Vertical) => "vertical".into(),
            other => format!("{other:?}"),
        };
        println!("bend by {alpha}: {shown}");
    }

    println!("sech 2 = {:.6}", meridian_geodesic_radius(2.0));
    let grid: Vec<f64> = (0..=10).map(|i| 3.0 + 0.5 * i as f64).collect();
    let decay = single_bend_decay(FRAC_PI_4, &grid)?;
    println!("one bend by π/4: d log r / dd ≈ {:.4}, log r + d → {:.4}", decay.slope, decay.limit);
    Ok(())
}
