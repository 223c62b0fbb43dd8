//! Words, level sets, the base construction and the factor-language queries.
//!
//! A word of `W(2^m)` is stored as a code `[i_{m-1}, ..., i_0, x]`: the word is
//! `C_{m-1}[i_{m-1}] C_{m-2}[i_{m-2}] ... C_0[i_0] x`. Every `C` list is kept
//! sorted, and all blocks at a position have the same length, so comparing codes
//! digit by digit is the same as comparing the words lexicographically.

pub(crate) mod automata;
pub mod build;
pub mod factors;
pub mod persist;
pub mod sets;
pub mod state;
pub mod verify;

use std::fmt;

use crate::error::{Error, Result};

pub use build::{build, extend, StrategySpec};
pub use state::{CSet, ConstructionState, Level, Limits};

/// A finite word over letters `0..alphabet`, rendered as `a`, `b`, `c`, ...
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn parse(s: &str, alphabet: u8) -> Result<Word> {
        let mut out = Vec::with_capacity(s.len());
        for ch in s.chars() {
            let v = (ch as u32).wrapping_sub('a' as u32);
            if v >= alphabet as u32 {
                return Err(Error::Parse(format!(
                    "letter {ch:?} outside an alphabet of {alphabet}"
                )));
            }
            out.push(v as u8);
        }
        Ok(Word(out))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(&self.0))
    }
}

/// Renders letters as `a`, `b`, ...
pub fn render(letters: &[u8]) -> String {
    letters.iter().map(|&x| (b'a' + x) as char).collect()
}

/// The suffix of length `2^m` of a word of length `2^m_prime`.
pub fn project(w: &[u8], m_prime: usize, m: usize) -> Result<Vec<u8>> {
    if m > m_prime || m_prime >= 63 || w.len() as u64 != 1u64 << m_prime {
        return Err(Error::Invalid(format!(
            "project needs |w| = 2^{m_prime} and m <= m', got |w| = {}",
            w.len()
        )));
    }
    Ok(w[w.len() - (1usize << m)..].to_vec())
}

/// `ceil(log2 l)` for `l >= 1`.
pub fn ceil_log2(l: u64) -> usize {
    if l <= 1 {
        0
    } else {
        64 - (l - 1).leading_zeros() as usize
    }
}

/// Whether `u` occurs in `w`.
pub fn contains(w: &[u8], u: &[u8]) -> bool {
    u.is_empty() || w.windows(u.len()).any(|x| x == u)
}
