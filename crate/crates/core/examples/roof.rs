//! The roof recursion: bend repeatedly along a schedule of leaves and watch
//! the certified Euclidean radius.
//!
//!     cargo run --release --example roof

use halo::numeric::{well_approximated_cf, DigitRule};
use halo::roof::{run_roof, BendingSchedule, BetaMode, RoofState, Selector};

fn main() -> halo::Result<()> {
    let cf = well_approximated_cf(DigitRule::Desk);
    let ks: Vec<usize> = (2..=400).step_by(2).collect();
    let (sched, big_c) = BendingSchedule::from_rule(&cf, &ks, 0.5, BetaMode::Equal)?;
    let tr = run_roof(&sched, Selector::Doubling { budget: 16 }, 150, RoofState::new(1.0, 1.0)?);
    println!("desk, C = {big_c:.4}: {:?} after {} steps, bound ≥ {:.6}", tr.verdict, tr.steps.len(), tr.min_bound);
    for st in tr.steps.iter().take(5) {
        println!("  step {} uses leaf {}: r = {:.9}, β = {}", st.k, st.n, st.r, st.beta_cell);
    }

    // bending by a fixed angle every time drives the radius to zero
    let sched = BendingSchedule::constant(50, 0.05, BetaMode::Equal)?;
    let tr = run_roof(&sched, Selector::Sequential, 50, RoofState::new(1.0, 1.0)?);
    let radii: Vec<String> = tr.radii().iter().map(|r| format!("{r:.4}")).collect();
    println!("α = 0.05: {:?}, radii {}", tr.verdict, radii.join(" "));
    Ok(())
}
