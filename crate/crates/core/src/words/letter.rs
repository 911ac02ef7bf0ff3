use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A generator of the punctured-torus group or its inverse.
///
/// `A` is crossing a vertical side of the unit square, `B` a horizontal one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    AInv,
    B,
    BInv,
}

impl Letter {
    pub fn inverse(self) -> Self {
        match self {
            Letter::A => Letter::AInv,
            Letter::AInv => Letter::A,
            Letter::B => Letter::BInv,
            Letter::BInv => Letter::B,
        }
    }

    pub fn is_positive(self) -> bool {
        matches!(self, Letter::A | Letter::B)
    }

    /// Exchanges `a` with `b` (and their inverses).
    pub fn swapped(self) -> Self {
        match self {
            Letter::A => Letter::B,
            Letter::AInv => Letter::BInv,
            Letter::B => Letter::A,
            Letter::BInv => Letter::AInv,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::AInv => 'A',
            Letter::B => 'b',
            Letter::BInv => 'B',
        }
    }
}

impl TryFrom<char> for Letter {
    type Error = Error;

    fn try_from(c: char) -> Result<Self> {
        Ok(match c {
            'a' => Letter::A,
            'A' | 'ā' => Letter::AInv,
            'b' => Letter::B,
            'B' => Letter::BInv,
            _ => return Err(Error::Parse { line: None, msg: format!("unknown letter {c:?}") }),
        })
    }
}

/// A finite word; serialized as a string over `a A b B`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != w[1].inverse())
    }

    /// Free reduction.
    pub fn reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|l| l.is_positive())
    }

    pub fn count(&self, letter: Letter) -> usize {
        self.0.iter().filter(|&&l| l == letter).count()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Whether `self` occurs in `other` as a contiguous factor.
    pub fn is_factor_of(&self, other: &Word) -> bool {
        self.is_empty() || other.0.windows(self.len()).any(|w| w == self.0.as_slice())
    }

    pub fn swapped(&self) -> Word {
        Word(self.0.iter().map(|l| l.swapped()).collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars().filter(|c| !c.is_whitespace()).map(Letter::try_from).collect::<Result<Vec<_>>>().map(Word)
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `(n_1, …, n_k)`: the word `b^{n_1} a ⋯ b^{n_k} a`, or `a^{n_1} b ⋯` when
/// `swapped` (slopes below 1).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockWord {
    pub n: u64,
    pub blocks: Vec<u64>,
    pub swapped: bool,
}

impl BlockWord {
    pub fn new(n: u64, blocks: Vec<u64>) -> Result<Self> {
        let w = BlockWord { n, blocks, swapped: false };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Precondition("block base n must be positive".into()));
        }
        if let Some(b) = self.blocks.iter().find(|&&b| b != self.n && b != self.n + 1) {
            return Err(Error::Precondition(format!("block {b} not in {{{}, {}}}", self.n, self.n + 1)));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Number of letters in the expansion.
    pub fn letter_len(&self) -> u64 {
        self.blocks.iter().map(|b| b + 1).sum()
    }

    pub fn to_word(&self) -> Word {
        let (run, sep) = if self.swapped { (Letter::A, Letter::B) } else { (Letter::B, Letter::A) };
        let mut v = Vec::with_capacity(self.letter_len() as usize);
        for &b in &self.blocks {
            v.extend(std::iter::repeat_n(run, b as usize));
            v.push(sep);
        }
        Word(v)
    }

    /// Counts of `n`- and `(n+1)`-blocks.
    pub fn block_counts(&self) -> (usize, usize) {
        let small = self.blocks.iter().filter(|&&b| b == self.n).count();
        (small, self.blocks.len() - small)
    }

    pub fn rotate(&self, k: usize) -> BlockWord {
        let mut blocks = self.blocks.clone();
        if !blocks.is_empty() {
            let m = k % blocks.len();
            blocks.rotate_left(m);
        }
        BlockWord { blocks, ..*self }
    }

    /// Whether `other` is a cyclic rotation of `self`.
    pub fn is_rotation_of(&self, other: &BlockWord) -> bool {
        self.n == other.n
            && self.len() == other.len()
            && (self.is_empty() || (0..self.len()).any(|k| self.rotate(k).blocks == other.blocks))
    }
}

impl fmt::Display for BlockWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.blocks.iter().map(|b| b.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}
