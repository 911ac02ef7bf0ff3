use serde::Serialize;

use super::letter::Word;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailVerdict {
    Same,
    Different,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct TailReport {
    pub verdict: TailVerdict,
    pub horizon: usize,
    /// `w2[i + shift] = w1[i]` across the compared window when `Same`.
    pub shift: Option<isize>,
}

/// Finite-horizon tail comparison.
///
/// Letters `i ∈ [H/2, 3H/4)` of `w1` are compared with `w2[i + δ]` for every
/// shift `|δ| ≤ H/4`. The tails are the same if one shift matches the whole
/// window, different if every shift still mismatches in the second half of
/// the window, and inconclusive otherwise or when a word is shorter than
/// `H`.
pub fn same_tail(w1: &Word, w2: &Word, horizon: usize) -> TailReport {
    let h = horizon;
    let inconclusive = TailReport { verdict: TailVerdict::Inconclusive, horizon: h, shift: None };
    if h < 8 || w1.len() < h || w2.len() < h {
        return inconclusive;
    }
    let (a, b) = (w1.letters(), w2.letters());
    let (start, end, reach) = (h / 2, 3 * h / 4, (h / 4) as isize);
    let late = start + (end - start) / 2;
    let mut all_late = true;
    for delta in -reach..=reach {
        let last_mismatch = (start..end).rev().find(|&i| a[i] != b[(i as isize + delta) as usize]);
        match last_mismatch {
            None => return TailReport { verdict: TailVerdict::Same, horizon: h, shift: Some(delta) },
            Some(i) if i < late => all_late = false,
            Some(_) => {}
        }
    }
    if all_late {
        TailReport { verdict: TailVerdict::Different, horizon: h, shift: None }
    } else {
        inconclusive
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::QuadraticNumber;
    use crate::words::cutting_sequence;

    #[test]
    fn shifted_copy_is_same() {
        let w = cutting_sequence(&QuadraticNumber::sqrt(2), &QuadraticNumber::from_ratio(1, 3), 400).unwrap();
        let shifted = Word(w.letters()[3..].to_vec());
        let r = same_tail(&w, &shifted, 200);
        assert_eq!(r.verdict, TailVerdict::Same);
        assert_eq!(r.shift, Some(-3));
    }

    #[test]
    fn short_words_inconclusive() {
        let w: Word = "abab".parse().unwrap();
        assert_eq!(same_tail(&w, &w, 100).verdict, TailVerdict::Inconclusive);
    }

    #[test]
    fn different_slopes_differ() {
        let s = QuadraticNumber::from_ratio(1, 3);
        let w1 = cutting_sequence(&QuadraticNumber::sqrt(2), &s, 400).unwrap();
        let w2 = cutting_sequence(&QuadraticNumber::sqrt(3), &s, 400).unwrap();
        assert_eq!(same_tail(&w1, &w2, 400).verdict, TailVerdict::Different);
    }
}
