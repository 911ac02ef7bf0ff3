//! Which words a leaf of slope √2 can read, and the flipped-block words it can't.
//!
//!     cargo run --example admissibility

use halo::numeric::QuadraticNumber;
use halo::words::{count_all_block_words, count_factors, inadmissible_word, is_admissible, Word};

fn main() -> halo::Result<()> {
    let theta = QuadraticNumber::sqrt(2);
    for w in ["babba", "bbabb", "babab", "bbb"] {
        let a = is_admissible(&w.parse::<Word>()?, &theta)?;
        match a.witness {
            Some(wit) => println!("{w}: admissible, start height {}", wit.s),
            None => println!("{w}: not admissible ({})", a.reason.unwrap_or_default()),
        }
    }

    for k in 2..=4 {
        let iw = inadmissible_word(&theta, k)?;
        println!(
            "k = {k}: w_k = {}, flip block {} -> a·w'_k = {} admissible: {}",
            iw.w_k, iw.flipped_block, iw.word, iw.prefixed_flipped.admissible
        );
    }

    for n in [5, 10, 20] {
        println!(
            "length {n}: {} factors, {} block words",
            count_factors(&theta, n)?,
            count_all_block_words(&theta, n)?
        );
    }
    Ok(())
}
