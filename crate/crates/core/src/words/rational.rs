use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use super::letter::BlockWord;
use crate::error::{Error, Result};

/// Block counts and orderings for slope `p/q > 1`.
///
/// Start points on the left side are indexed `1..=q` from top to bottom;
/// the `t` highest start an `(n+1)`-block. At the right side the order is
/// reversed between the two kinds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpEpTable {
    pub p: u64,
    pub q: u64,
    pub n: u64,
    /// Number of `n`-blocks.
    pub s: u64,
    /// Number of `(n+1)`-blocks.
    pub t: u64,
}

impl SpEpTable {
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if q == 0 || p <= q {
            return Err(Error::Precondition(format!("slope {p}/{q} must exceed 1; invert and swap letters")));
        }
        if p.gcd(&q) != 1 {
            return Err(Error::Precondition(format!("{p}/{q} is not in lowest terms")));
        }
        let n = p / q;
        Ok(SpEpTable { p, q, n, s: (n + 1) * q - p, t: p - n * q })
    }

    pub fn sp(&self, j: u64) -> u64 {
        if j <= self.t {
            self.n + 1
        } else {
            self.n
        }
    }

    pub fn ep(&self, j: u64) -> u64 {
        if j <= self.s {
            self.n
        } else {
            self.n + 1
        }
    }

    /// The start index reached after the block starting at `l`.
    pub fn next(&self, l: u64) -> u64 {
        if l <= self.t {
            self.s + l
        } else {
            l - self.t
        }
    }
}

/// Numerator and denominator of a positive rational as `u64`s.
pub fn ratio_parts(r: &BigRational) -> Result<(u64, u64)> {
    match (r.numer().to_u64(), r.denom().to_u64()) {
        (Some(p), Some(q)) if p > 0 => Ok((p, q)),
        _ => Err(Error::Precondition(format!("slope {r} must be positive and fit in 64 bits"))),
    }
}

/// The `p/q`-word produced by walking start points from `l1`.
pub fn rational_word(slope: &BigRational, l1: u64) -> Result<BlockWord> {
    let (p, q) = ratio_parts(slope)?;
    rational_word_pq(p, q, l1)
}

pub fn rational_word_pq(p: u64, q: u64, l1: u64) -> Result<BlockWord> {
    let table = SpEpTable::new(p, q)?;
    if l1 == 0 || l1 > q {
        return Err(Error::Precondition(format!("l1 = {l1} must lie in 1..={q}")));
    }
    let mut blocks = Vec::with_capacity(q as usize);
    let mut l = l1;
    loop {
        blocks.push(table.sp(l));
        l = table.next(l);
        if l == l1 {
            break;
        }
    }
    Ok(BlockWord { n: table.n, blocks, swapped: false })
}

/// Like [`rational_word`] but also accepts slopes `≤ 1` by inverting and
/// exchanging the letters. Slope 1 gives the single block `(1)` swapped,
/// i.e. the word `ab`.
pub fn rational_word_any(slope: &BigRational, l1: u64) -> Result<BlockWord> {
    let (p, q) = ratio_parts(slope)?;
    if p > q {
        return rational_word_pq(p, q, l1);
    }
    if slope.is_one() {
        return Ok(BlockWord { n: 1, blocks: vec![1], swapped: true });
    }
    let mut w = rational_word_pq(q, p, l1)?;
    w.swapped = true;
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Letter;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn counts_and_rotations(q in 1u64..80, extra in 1u64..300, seed in 0u64..10_000) {
            let p = q + extra;
            prop_assume!(p.gcd(&q) == 1);
            let l1 = 1 + seed % q;
            let w = rational_word_pq(p, q, l1).unwrap();
            let letters = w.to_word();
            prop_assert_eq!(letters.count(Letter::A), q as usize);
            prop_assert_eq!(letters.count(Letter::B), p as usize);
            prop_assert!(w.is_rotation_of(&rational_word_pq(p, q, 1).unwrap()));
        }
    }

    #[test]
    fn five_thirds() {
        let w = rational_word_pq(5, 3, 1).unwrap();
        assert_eq!(w.blocks, vec![2, 2, 1]);
        assert_eq!(w.to_word().to_string(), "bbabbaba");
        let t = SpEpTable::new(5, 3).unwrap();
        assert_eq!((t.s, t.t), (1, 2));
    }

    #[test]
    fn integer_slope() {
        assert_eq!(rational_word_pq(2, 1, 1).unwrap().blocks, vec![2]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(rational_word_pq(3, 3, 1).is_err());
        assert!(rational_word_pq(6, 4, 1).is_err());
        assert!(rational_word_pq(2, 3, 1).is_err());
        assert!(rational_word_pq(5, 3, 4).is_err());
    }

    #[test]
    fn letter_swap_below_one() {
        let r = BigRational::new(3.into(), 5.into());
        let w = rational_word_any(&r, 1).unwrap();
        assert!(w.swapped);
        assert_eq!(w.to_word().to_string(), "aabaabab");
    }

    #[test]
    fn table_is_consistent() {
        for q in 1..12u64 {
            for p in q + 1..40 {
                let Ok(t) = SpEpTable::new(p, q) else {
                    continue;
                };
                assert_eq!(t.s + t.t, q);
                let ends: Vec<u64> = (1..=q).map(|j| t.ep(t.next(j))).collect();
                let starts: Vec<u64> = (1..=q).map(|j| t.sp(j)).collect();
                // the block starting at j ends at next(j) with the same length
                assert_eq!(ends, starts, "{p}/{q}");
            }
        }
    }
}
