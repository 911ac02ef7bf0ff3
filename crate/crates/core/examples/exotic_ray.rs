//! A ray of finite transverse measure that keeps crossing leaves, and a tail
//! comparison between two of them.
//!
//!     cargo run --release --example exotic_ray

use halo::flat::{assemble_exotic_ray, compare_ray_tails, Foliation};
use halo::numeric::QuadraticNumber;
use num_bigint::BigInt;
use num_traits::Zero;

fn main() -> halo::Result<()> {
    let fol = Foliation::with_slope(QuadraticNumber::sqrt(2))?;
    let idx: Vec<usize> = (1..=12).collect();
    let ray = assemble_exotic_ray(&fol, &idx, 2000)?;
    println!("indices 1..=12, convergent indices {:?}", ray.ks);
    println!("total measure {:.9} < {}", ray.total_measure.to_f64(), ray.bound);
    let crossings =
        ray.ray.segments.iter().map(|s| s.crossing_counts()).fold(BigInt::zero(), |acc, (a, b)| acc + a + b);
    println!(
        "{crossings} leaf crossings, {} markers ({} checked by the oracle)",
        ray.ray.markers.len(),
        ray.verified_markers
    );

    let odd = assemble_exotic_ray(&fol, &[1, 3, 5, 7, 9], 1000)?;
    let late = assemble_exotic_ray(&fol, &[5, 7, 9], 1000)?;
    let even = assemble_exotic_ray(&fol, &[2, 4, 6, 8, 10], 1000)?;
    for (name, other) in [("odd vs 5,7,9", &late), ("odd vs even", &even)] {
        let r = compare_ray_tails(&odd, other, &fol, 1000)?;
        println!("{name}: {:?} ({})", r.verdict, r.basis);
    }
    Ok(())
}
