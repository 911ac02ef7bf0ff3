use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::cutting::cutting_sequence;
use super::letter::{BlockWord, Letter, Word};
use super::rational::rational_word_pq;
use crate::error::{Error, Result};
use crate::numeric::{cf_expand, QuadraticNumber};

/// Start heights on the left side between consecutive breakpoints
/// `{−jθ mod 1}` give identical prefixes; one sample per interval.
#[derive(Clone, Debug)]
struct StartInterval {
    lo: QuadraticNumber,
    hi: QuadraticNumber,
    mid: QuadraticNumber,
}

fn start_intervals(theta: &QuadraticNumber, crossings: usize) -> Vec<StartInterval> {
    let mut points: Vec<QuadraticNumber> =
        (0..=crossings as i64 + 1).map(|j| (-(theta * &QuadraticNumber::from_int(j))).fract()).collect();
    points.sort();
    points.dedup();
    points.push(QuadraticNumber::from_int(1));
    let half = QuadraticNumber::from_ratio(1, 2);
    points
        .windows(2)
        .map(|w| StartInterval { lo: w[0].clone(), hi: w[1].clone(), mid: &(&w[0] + &w[1]) * &half })
        .collect()
}

/// Leaves starting on the left side return to it within this many letters,
/// so every factor starts at one of these offsets of some such leaf.
fn max_offset(theta: &QuadraticNumber) -> usize {
    let f = theta.floor().to_usize().expect("slope fits");
    if theta.is_rational() && theta.as_rational().is_some_and(|r| r.is_integer()) {
        f
    } else {
        f + 1
    }
}

/// Prefix words of every generic start interval, each `len` letters long.
fn interval_words(theta: &QuadraticNumber, len: usize) -> Vec<(StartInterval, Word)> {
    start_intervals(theta, len)
        .into_par_iter()
        .map(|iv| {
            let w = cutting_sequence(theta, &iv.mid, len).expect("interval midpoints avoid lattice points");
            (iv, w)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    /// A start height on the left side whose leaf contains the word.
    pub s: String,
    /// Every start height strictly inside this interval works.
    pub interval: (String, String),
    /// Letter offset of the occurrence.
    pub offset: usize,
    pub s_approx: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub witness: Option<Witness>,
    pub reason: Option<String>,
}

/// Whether `w` occurs in the cutting sequence of some leaf of slope `θ`.
pub fn is_admissible(w: &Word, theta: &QuadraticNumber) -> Result<Admissibility> {
    if !theta.is_positive() {
        return Err(Error::Precondition(format!("slope {theta} must be positive")));
    }
    if !w.is_positive() {
        return Ok(Admissibility { admissible: false, witness: None, reason: Some("negative letter".into()) });
    }
    if w.is_empty() {
        return Ok(Admissibility { admissible: true, witness: None, reason: None });
    }
    let offsets = max_offset(theta);
    let len = w.len() + offsets;
    let found = interval_words(theta, len).into_iter().find_map(|(iv, prefix)| {
        (0..=offsets).find(|&o| &prefix.letters()[o..o + w.len()] == w.letters()).map(|o| Witness {
            s: iv.mid.to_string(),
            s_approx: iv.mid.to_f64(),
            interval: (iv.lo.to_string(), iv.hi.to_string()),
            offset: o,
        })
    });
    Ok(match found {
        Some(wit) => Admissibility { admissible: true, witness: Some(wit), reason: None },
        None => Admissibility {
            admissible: false,
            witness: None,
            reason: Some("no start interval produces the word".into()),
        },
    })
}

pub fn is_block_word_admissible(w: &BlockWord, theta: &QuadraticNumber) -> Result<Admissibility> {
    is_admissible(&w.to_word(), theta)
}

/// All distinct factors of length `n` over all leaves of slope `θ`.
pub fn factor_set(theta: &QuadraticNumber, n: usize) -> Result<BTreeSet<Word>> {
    if !theta.is_positive() {
        return Err(Error::Precondition(format!("slope {theta} must be positive")));
    }
    let offsets = max_offset(theta);
    let mut out = BTreeSet::new();
    for (_, prefix) in interval_words(theta, n + offsets) {
        for o in 0..=offsets {
            out.insert(Word(prefix.letters()[o..o + n].to_vec()));
        }
    }
    Ok(out)
}

pub fn count_factors(theta: &QuadraticNumber, n: usize) -> Result<usize> {
    Ok(factor_set(theta, n)?.len())
}

/// Number of words of at most `n` letters (the empty word included) that
/// are concatenations of the two first-return blocks `b^m a` and
/// `b^{m+1} a`, `m = ⌊θ⌋` (letters exchanged for `θ < 1`).
pub fn count_all_block_words(theta: &QuadraticNumber, n: usize) -> Result<BigUint> {
    if !theta.is_positive() || theta.is_rational() {
        return Err(Error::Precondition("count_all_block_words needs a positive irrational slope".into()));
    }
    let big = if theta > &QuadraticNumber::from_int(1) { theta.clone() } else { theta.recip() };
    let m = big.floor().to_usize().expect("slope fits");
    let (l1, l2) = (m + 1, m + 2);
    let mut exact = vec![BigUint::zero(); n + 1];
    exact[0] = BigUint::one();
    for len in 1..=n {
        let mut c = BigUint::zero();
        if len >= l1 {
            c += &exact[len - l1];
        }
        if len >= l2 {
            c += &exact[len - l2];
        }
        exact[len] = c;
    }
    Ok(exact.iter().sum())
}

/// The inadmissible-word construction for index `k` and the oracle's
/// verdict on each variant.
#[derive(Clone, Debug, Serialize)]
pub struct InadmissibleWord {
    pub k: usize,
    pub p: u64,
    pub q: u64,
    /// `w_k`: the `p_k/q_k`-word from the lowest (`k` even) or highest
    /// (`k` odd) start point.
    pub w_k: BlockWord,
    /// `w_k` with one block flipped.
    pub w_k_prime: BlockWord,
    pub flipped_block: usize,
    /// `a·w'_k`, the word claimed inadmissible.
    pub word: Word,
    pub prefixed_flipped: Admissibility,
    pub flipped: Admissibility,
    pub unflipped: Admissibility,
    /// `a·w'_k` rejected and `w_k` accepted.
    pub lemma_holds: bool,
}

pub fn inadmissible_word(theta: &QuadraticNumber, k: usize) -> Result<InadmissibleWord> {
    if theta.is_rational() || theta <= &QuadraticNumber::from_int(1) {
        return Err(Error::Precondition("inadmissible_word needs an irrational slope above 1".into()));
    }
    if k < 2 {
        return Err(Error::Precondition("inadmissible_word needs k ≥ 2".into()));
    }
    let conv = cf_expand(theta)?.convergents(k)?;
    let to_u64 = |x: &num_bigint::BigInt| x.to_u64().ok_or_else(|| Error::Precondition("convergent too large".into()));
    let (p, q) = (to_u64(conv[k].p_exact()?)?, to_u64(conv[k].q_exact()?)?);
    let even = k.is_multiple_of(2);
    let w_k = rational_word_pq(p, q, if even { q } else { 1 })?;
    let n = w_k.n;
    let (from, to) = if even { (n + 1, n) } else { (n, n + 1) };
    let idx = w_k
        .blocks
        .iter()
        .rposition(|&b| b == from)
        .ok_or_else(|| Error::Precondition(format!("w_{k} has no {from}-block to flip")))?;
    if even && idx + 1 != w_k.len() {
        return Err(Error::Precondition(format!("w_{k} does not end with an (n+1)-block")));
    }
    let mut w_k_prime = w_k.clone();
    w_k_prime.blocks[idx] = to;
    let word = Word(vec![Letter::A]).concat(&w_k_prime.to_word());
    let prefixed_flipped = is_admissible(&word, theta)?;
    let flipped = is_admissible(&w_k_prime.to_word(), theta)?;
    let unflipped = is_admissible(&w_k.to_word(), theta)?;
    let lemma_holds = !prefixed_flipped.admissible && unflipped.admissible;
    Ok(InadmissibleWord {
        k,
        p,
        q,
        w_k,
        w_k_prime,
        flipped_block: idx,
        word,
        prefixed_flipped,
        flipped,
        unflipped,
        lemma_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn adm(w: &str, theta: &QuadraticNumber) -> bool {
        is_admissible(&w.parse().unwrap(), theta).unwrap().admissible
    }

    #[test]
    fn sqrt2_blocks() {
        let r2 = QuadraticNumber::sqrt(2);
        assert!(!adm("bbabba", &r2));
        assert!(adm("ba", &r2));
        assert!(adm("bba", &r2));
        assert!(!adm("bbb", &r2));
        assert!(!adm("aB", &r2));
    }

    #[test]
    fn witness_reproduces_word() {
        let r2 = QuadraticNumber::sqrt(2);
        let w: Word = "babba".parse().unwrap();
        let a = is_admissible(&w, &r2).unwrap();
        let wit = a.witness.unwrap();
        assert!(a.admissible && wit.offset <= 2);
    }

    #[test]
    fn factor_complexity_small() {
        let r2 = QuadraticNumber::sqrt(2);
        assert_eq!(count_factors(&r2, 1).unwrap(), 2);
        assert_eq!(count_factors(&r2, 10).unwrap(), 11);
        let slow = QuadraticNumber::sqrt(2).recip();
        assert_eq!(count_factors(&slow, 7).unwrap(), 8);
    }

    #[test]
    fn block_word_counts() {
        let r2 = QuadraticNumber::sqrt(2);
        // lengths 2 and 3: 1, 0, 1, 1, 1, 2, 2, 3
        assert_eq!(count_all_block_words(&r2, 7).unwrap(), BigUint::from(11u32));
    }

    #[test]
    fn lemma_for_k2() {
        let r2 = QuadraticNumber::sqrt(2);
        let r = inadmissible_word(&r2, 2).unwrap();
        assert_eq!(r.w_k.blocks, vec![1, 1, 2, 1, 2]);
        assert_eq!(r.w_k_prime.blocks, vec![1, 1, 2, 1, 1]);
        assert!(r.lemma_holds);
        assert!(r.flipped.admissible);
    }
}
