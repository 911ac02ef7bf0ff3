//! Closed-leaf approximations: length d, angle α and separation ε per
//! convergent, then the classification of a whole schedule.
//!
//!     cargo run --release --example leaf_schedule

use halo::flat::{build_leaf_approx, classify_cesag, leaf_schedule, Foliation, Goodness, Separation};
use halo::numeric::{well_approximated_cf, DigitRule, QuadraticNumber};

fn main() -> halo::Result<()> {
    let theta = QuadraticNumber::sqrt(2);
    let fol = Foliation::with_slope(theta.clone())?;
    println!("  k         d           α           ε");
    for k in 1..=8 {
        let la = build_leaf_approx(&fol, k)?;
        println!("{k:>3} {:>9.0} {:>11.3e} {:>11.3e}", la.d_f64(), la.alpha_f64(), la.epsilon_f64());
    }
    let seq: Vec<_> = (1..=8).map(|k| build_leaf_approx(&fol, k)).collect::<halo::Result<_>>()?;
    let rep = classify_cesag(&seq, Some(&theta), Separation::Exp(0.5), Goodness::AlphaBound);
    println!("√2 with ε ~ e^(-d/2): {:?}, exotic: {}", rep.verdict, rep.exotic);

    // the desk rule: magnitudes only, mostly log-domain; even indices, one side of the lattice leaf
    let cf = well_approximated_cf(DigitRule::Desk);
    let ks: Vec<usize> = (2..=24).step_by(2).collect();
    let seq = leaf_schedule(&cf, &ks, 1.0)?;
    println!("desk d_24 = {}", seq.last().unwrap().d);
    let rep = classify_cesag(&seq, None, Separation::Exp(0.5), Goodness::AlphaBound);
    println!("desk: {:?}, fitted {:?}, f·g → 0: {:?}", rep.verdict, rep.fitted, rep.product_to_zero);
    Ok(())
}
