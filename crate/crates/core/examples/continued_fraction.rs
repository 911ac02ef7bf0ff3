//! Continued fractions of quadratic slopes and of the rule-generated ones.
//!
//!     cargo run --example continued_fraction

use halo::numeric::{cf_expand, is_in_se_d, well_approximated, well_approximated_cf, DigitRule, QuadraticNumber};

fn main() -> halo::Result<()> {
    for s in ["sqrt2", "golden", "(3+√13)/2", "355/113"] {
        let x: QuadraticNumber = s.parse()?;
        let cf = cf_expand(&x)?;
        let k = cf.len().map_or(6, |n| n - 1).min(6);
        let last = cf.convergents(k)?.pop().unwrap();
        println!("{s:>10} = {cf}   p_{k}/q_{k} = {}/{}", last.p, last.q);
    }

    // c_k = ⌈e^{q_{k-1}²}⌉; from k = 4 on only log bounds are kept
    let paper = well_approximated_cf(DigitRule::Paper);
    for c in paper.convergents(5)? {
        println!("paper q_{} = {}", c.k, c.q);
    }
    let rep = well_approximated(&paper, &[1.0, 5.0, 10.0], 8)?;
    println!("paper rule well approximated for C = 1, 5, 10: {}", rep.well_approximated);

    let desk = well_approximated_cf(DigitRule::Desk);
    for d in 1..=3 {
        let v = is_in_se_d(&desk, d, 12);
        println!("desk in SE_{d}: {} (inconclusive: {})", v.member, v.inconclusive_at_k_max);
    }
    Ok(())
}
