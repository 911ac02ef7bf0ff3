//! Transverse growth I(t): straight rays average 2t/π, while built rays can
//! grow like √t or log(1+t).
//!
//!     cargo run --release --example growth

use halo::flat::{crofton_estimate, sublinear_ray, Foliation, SublinearFn};
use halo::numeric::QuadraticNumber;

fn main() -> halo::Result<()> {
    let fol = Foliation::with_slope(QuadraticNumber::sqrt(2))?;
    let c = crofton_estimate(&fol, 2000, 100, 7)?;
    println!("{} rays of length {}: mean I(t)/t = {:.5}, 2/π = {:.5}", c.rays, c.length, c.mean, c.expected);

    // √3 makes every vertical jump measure exactly 1
    let fol = Foliation::with_slope(QuadraticNumber::sqrt(3))?;
    for f in [SublinearFn::Sqrt, SublinearFn::Log1p] {
        let r = sublinear_ray(&fol, f, 1e4, 6)?;
        println!("{f:?}: {:.3} f(t) ≤ I(t) ≤ {:.3} f(t)", r.a, r.b);
        for s in r.growth.samples.iter().rev().step_by(4).take(4) {
            println!("  t = {:>9.1}  I = {:>8.3}  f = {:>8.3}", s.t, s.measure, f.eval(s.t));
        }
    }
    Ok(())
}
