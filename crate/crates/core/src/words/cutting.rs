use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::letter::{BlockWord, Letter, Word};
use crate::error::{Error, Result};
use crate::numeric::{cf_expand, BigRational, QuadraticNumber};

fn check_slope_and_start(theta: &QuadraticNumber, s: &QuadraticNumber) -> Result<()> {
    if !theta.is_positive() {
        return Err(Error::Precondition(format!("slope {theta} must be positive")));
    }
    if s.signum() < 0 || s >= &QuadraticNumber::from_int(1) {
        return Err(Error::Precondition(format!("start height {s} must lie in [0, 1)")));
    }
    Ok(())
}

/// Letters of the line `y = θx + s`, `x > 0`, crossing the unit grid.
///
/// Yields `Err(LatticeHit)` at the first crossing through a lattice point.
pub struct Crossings {
    theta: QuadraticNumber,
    /// Height at the next vertical line `x = i`.
    y_next: QuadraticNumber,
    /// Next horizontal line `y = j`.
    j: BigInt,
    index: usize,
    failed: bool,
}

impl Crossings {
    pub fn new(theta: &QuadraticNumber, s: &QuadraticNumber) -> Result<Self> {
        check_slope_and_start(theta, s)?;
        Ok(Crossings { theta: theta.clone(), y_next: theta + s, j: BigInt::one(), index: 0, failed: false })
    }
}

impl Iterator for Crossings {
    type Item = Result<Letter>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        let diff = &self.y_next - &QuadraticNumber::rational(BigRational::from_integer(self.j.clone()));
        let letter = match diff.signum() {
            // reaches x = i below y = j
            -1 => {
                self.y_next = &self.y_next + &self.theta;
                Letter::A
            }
            1 => {
                self.j += 1;
                Letter::B
            }
            _ => {
                self.failed = true;
                return Some(Err(Error::LatticeHit { index: self.index }));
            }
        };
        self.index += 1;
        Some(Ok(letter))
    }
}

/// The first `count` letters of the cutting sequence of `y = θx + s`.
pub fn cutting_sequence(theta: &QuadraticNumber, s: &QuadraticNumber, count: usize) -> Result<Word> {
    Crossings::new(theta, s)?.take(count).collect::<Result<Vec<_>>>().map(Word)
}

/// Block lengths `⌊θi + s⌋ − ⌊θ(i−1) + s⌋`, `i = 1..=count`, for `θ > 1`.
///
/// Errors if `θi + s` is an integer for some `1 ≤ i ≤ count`, or `s = 0`
/// and the start itself is a lattice point.
pub fn block_prefix(theta: &QuadraticNumber, s: &QuadraticNumber, count: usize) -> Result<BlockWord> {
    check_slope_and_start(theta, s)?;
    let n = theta
        .floor()
        .to_u64()
        .filter(|&n| n >= 1)
        .ok_or_else(|| Error::Precondition(format!("slope {theta} must exceed 1")))?;
    let mut blocks = Vec::with_capacity(count);
    let mut y = s.clone();
    let mut prev = BigInt::zero();
    for i in 1..=count {
        y = &y + theta;
        let f = y.floor();
        if y.is_rational() && y.as_rational().is_some_and(|r| r.is_integer()) {
            return Err(Error::LatticeHit { index: i });
        }
        blocks.push((&f - &prev).to_u64().unwrap());
        prev = f;
    }
    Ok(BlockWord { n, blocks, swapped: false })
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaPrefix {
    pub word: BlockWord,
    pub p: String,
    pub q: String,
    /// `ε_k` of the lattice-avoidance condition.
    pub epsilon: String,
}

/// The first `q_k` blocks of the `θ`-leaf starting at height 1/2 on the
/// left side.
pub fn theta_prefix(theta: &QuadraticNumber, k: usize) -> Result<ThetaPrefix> {
    theta_prefix_from(theta, k, &QuadraticNumber::from_ratio(1, 2))
}

/// [`theta_prefix`] from start height `s`. Requires `1/q_{k+1} < ε_k`
/// where `ε_k = s` for odd `k` and `1 − s` for even `k`.
pub fn theta_prefix_from(theta: &QuadraticNumber, k: usize, s: &QuadraticNumber) -> Result<ThetaPrefix> {
    if theta.is_rational() {
        return Err(Error::Precondition("theta_prefix needs an irrational slope".into()));
    }
    if k < 2 {
        return Err(Error::Precondition("theta_prefix needs k ≥ 2".into()));
    }
    check_slope_and_start(theta, s)?;
    if s.is_zero() {
        return Err(Error::Precondition("start height must lie in (0, 1)".into()));
    }
    let conv = cf_expand(theta)?.convergents(k + 1)?;
    let q_k = conv[k].q_exact()?.clone();
    let q_next = conv[k + 1].q_exact()?.clone();
    let eps = if k % 2 == 1 { s.clone() } else { &QuadraticNumber::from_int(1) - s };
    let inv = QuadraticNumber::rational(BigRational::new(BigInt::one(), q_next));
    if inv >= eps {
        return Err(Error::TooCoarse(format!("approximation too coarse: 1/q_{} ≥ ε_{k} = {eps}", k + 1)));
    }
    let count = q_k.to_usize().ok_or_else(|| Error::Precondition("q_k too large".into()))?;
    Ok(ThetaPrefix {
        word: block_prefix(theta, s, count)?,
        p: conv[k].p_exact()?.to_string(),
        q: q_k.to_string(),
        epsilon: eps.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::rational_word_pq;

    #[test]
    fn slope_two_quarter() {
        let w = cutting_sequence(&QuadraticNumber::from_int(2), &QuadraticNumber::from_ratio(1, 4), 3).unwrap();
        assert_eq!(w.to_string(), "bba");
        // the mirror image in y = x has slope 1/2
        assert_eq!(w.swapped().to_string(), "aab");
        let w = cutting_sequence(&QuadraticNumber::from_ratio(1, 2), &QuadraticNumber::from_ratio(1, 8), 3).unwrap();
        assert_eq!(w.to_string(), "aba");
    }

    #[test]
    fn lattice_hit_is_reported() {
        let e = cutting_sequence(&QuadraticNumber::from_int(2), &QuadraticNumber::from_int(0), 5).unwrap_err();
        assert!(matches!(e, Error::LatticeHit { index: 1 }), "{e:?}");
        let e = cutting_sequence(&QuadraticNumber::from_ratio(3, 2), &QuadraticNumber::from_ratio(1, 2), 10);
        assert!(matches!(e, Err(Error::LatticeHit { .. })));
    }

    #[test]
    fn sqrt2_prefix_matches_blocks() {
        let theta = QuadraticNumber::sqrt(2);
        let s = QuadraticNumber::from_ratio(1, 3);
        let letters = cutting_sequence(&theta, &s, 50).unwrap();
        let blocks = block_prefix(&theta, &s, 30).unwrap().to_word();
        assert_eq!(letters.letters(), &blocks.letters()[..50]);
    }

    #[test]
    fn theta_prefix_is_rational_word() {
        let theta = QuadraticNumber::sqrt(2);
        let tp = theta_prefix(&theta, 2).unwrap();
        assert_eq!(tp.word.len(), 5);
        assert_eq!(tp.word.block_counts(), (3, 2));
        assert!(tp.word.is_rotation_of(&rational_word_pq(7, 5, 1).unwrap()));
        let tp3 = theta_prefix(&theta, 3).unwrap();
        assert_eq!(tp3.word.blocks[..5], tp.word.blocks[..]);
        assert!(tp3.word.is_rotation_of(&rational_word_pq(17, 12, 1).unwrap()));
    }

    #[test]
    fn coarse_start_rejected() {
        // q_3 = 12 for √2, so ε_2 = 1 − s must exceed 1/12
        let e = theta_prefix_from(&QuadraticNumber::sqrt(2), 2, &QuadraticNumber::from_ratio(19, 20));
        assert!(matches!(e, Err(Error::TooCoarse(_))));
    }
}
