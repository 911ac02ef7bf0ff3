//! Block words of rational slopes, and the letters a leaf of slope √2 reads.
//!
//!     cargo run --example rational_word -- 5/3

use halo::numeric::{BigRational, QuadraticNumber};
use halo::words::{rational_word_any, theta_prefix};

fn main() -> halo::Result<()> {
    let arg = std::env::args().nth(1).unwrap_or_else(|| "5/3".into());
    let slope: BigRational =
        arg.parse().map_err(|_| halo::Error::Parse { line: None, msg: format!("not a fraction: {arg}") })?;
    let den = slope.denom().clone();
    let den: u64 = den.try_into().unwrap_or(1);
    let num: u64 = slope.numer().clone().try_into().unwrap_or(1);
    // starts range over the smaller of p and q
    for l1 in 1..=den.min(num) {
        let w = rational_word_any(&slope, l1)?;
        println!("l1 = {l1}: {w}  {}", w.to_word());
    }

    let p = theta_prefix(&QuadraticNumber::sqrt(2), 4)?;
    println!("√2 up to q_4 = {}: {}", p.q, p.word.to_word());
    Ok(())
}
