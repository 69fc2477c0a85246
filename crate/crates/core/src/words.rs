//! Words in the free monoid on the letters `1..=d`.
//!
//! Words are ordered length-lexicographically everywhere they index rows or
//! columns of a matrix, so Gram and multiplication matrices are reproducible.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{identity, CMat};
use crate::tuple::MatrixTuple;

/// A word `i₁i₂…i_k`; the empty word is the monoid identity.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Builds a word, checking every letter lies in `1..=d`.
    pub fn new(letters: Vec<u8>, d: usize) -> Result<Self> {
        if let Some(&bad) = letters.iter().find(|&&l| l == 0 || l as usize > d) {
            return Err(Error::LetterOutOfRange { letter: bad, d });
        }
        Ok(Word(letters))
    }

    pub fn letter(l: u8) -> Self {
        Word(vec![l])
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn reverse(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    /// Word with `l` prepended.
    pub fn prepend(&self, l: u8) -> Word {
        let mut v = Vec::with_capacity(self.len() + 1);
        v.push(l);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    pub fn push(&self, l: u8) -> Word {
        let mut v = self.0.clone();
        v.push(l);
        Word(v)
    }

    /// If `self = prefix · rest`, returns `rest`.
    pub fn strip_prefix(&self, prefix: &Word) -> Option<Word> {
        self.0.strip_prefix(prefix.letters()).map(|s| Word(s.to_vec()))
    }

    /// If `self = rest · suffix`, returns `rest`.
    pub fn strip_suffix(&self, suffix: &Word) -> Option<Word> {
        self.0.strip_suffix(suffix.letters()).map(|s| Word(s.to_vec()))
    }

    pub fn max_letter(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0) as usize
    }

    /// Position of this word in the length-lexicographic enumeration of all
    /// words over `d` letters.
    pub fn canonical_index(&self, d: usize) -> usize {
        let k = self.len();
        let offset: usize = (0..k).map(|i| d.pow(i as u32)).sum();
        let rank = self.0.iter().fold(0usize, |acc, &l| acc * d + (l as usize - 1));
        offset + rank
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "Word(∅)")
        } else {
            write!(f, "Word({self})")
        }
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Parses the digit form `"i₁i₂…"`; the empty string is the empty word.
    fn from_str(s: &str) -> Result<Self> {
        let mut v = Vec::with_capacity(s.len());
        for (pos, ch) in s.chars().enumerate() {
            match ch.to_digit(10) {
                Some(dig) if dig >= 1 => v.push(dig as u8),
                _ => {
                    return Err(Error::Syntax { pos, msg: format!("invalid letter {ch:?} in word") })
                }
            }
        }
        Ok(Word(v))
    }
}

/// Number of words of length at most `max_len` over `d` letters.
pub fn word_count(d: usize, max_len: usize) -> usize {
    (0..=max_len).map(|i| d.pow(i as u32)).sum()
}

/// All words of length `len`, in lexicographic order.
pub fn words_of_length(d: usize, len: usize) -> Vec<Word> {
    let mut level = vec![Word::empty()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(level.len() * d);
        for w in &level {
            for l in 1..=d as u8 {
                next.push(w.push(l));
            }
        }
        level = next;
    }
    level
}

/// All words of length at most `max_len`, in length-lexicographic order.
pub fn words_up_to(d: usize, max_len: usize) -> Vec<Word> {
    let mut out = Vec::with_capacity(word_count(d, max_len));
    for len in 0..=max_len {
        out.extend(words_of_length(d, len));
    }
    out
}

/// `Z^w = Z_{i₁}⋯Z_{i_k}`; the empty word evaluates to the identity.
pub fn eval_word(z: &MatrixTuple, w: &Word) -> Result<CMat> {
    if w.max_letter() > z.d() {
        return Err(Error::DimensionMismatch(format!(
            "word {w} uses letter {} but the tuple has d = {}",
            w.max_letter(),
            z.d()
        )));
    }
    let mut acc = identity(z.n());
    for &l in w.letters() {
        acc *= &z[l as usize - 1];
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn concat_examples() {
        assert_eq!(Word::empty().concat(&w("12")), w("12"));
        assert_eq!(w("12").concat(&w("2")), w("122"));
        assert_eq!(w("121").concat(&w("22")).len(), 5);
    }

    #[test]
    fn reverse_examples() {
        assert_eq!(Word::empty().reverse(), Word::empty());
        assert_eq!(w("12").reverse(), w("21"));
    }

    #[test]
    fn letters_are_validated() {
        assert!(Word::new(vec![1, 3], 2).is_err());
        assert!(Word::new(vec![0], 2).is_err());
        assert!(Word::new(vec![], 2).is_ok());
        assert!("1a".parse::<Word>().is_err());
    }

    #[test]
    fn canonical_order_matches_index() {
        let all = words_up_to(3, 3);
        assert_eq!(all.len(), word_count(3, 3));
        for (i, word) in all.iter().enumerate() {
            assert_eq!(word.canonical_index(3), i);
        }
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(sorted, all);
    }

    #[test]
    fn eval_word_empty_is_identity() {
        let z = MatrixTuple::zeros(2, 3);
        assert_eq!(eval_word(&z, &Word::empty()).unwrap(), identity(3));
        assert!(eval_word(&z, &w("3")).is_err());
    }

    fn arb_word(d: u8, max: usize) -> impl Strategy<Value = Word> {
        prop::collection::vec(1..=d, 0..=max).prop_map(Word)
    }

    proptest! {
        #[test]
        fn reverse_is_antihomomorphic_involution(u in arb_word(3, 6), v in arb_word(3, 6)) {
            prop_assert_eq!(u.reverse().reverse(), u.clone());
            prop_assert_eq!(u.concat(&v).reverse(), v.reverse().concat(&u.reverse()));
            prop_assert_eq!(u.concat(&v).len(), u.len() + v.len());
            prop_assert_eq!(Word::empty().concat(&u), u.clone());
            prop_assert_eq!(u.concat(&Word::empty()), u.clone());
        }

        #[test]
        fn display_round_trips(u in arb_word(9, 8)) {
            let s = u.to_string();
            prop_assert_eq!(s.parse::<Word>().unwrap(), u);
        }
    }
}
