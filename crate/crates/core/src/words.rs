//! Binary words, their shuffle algebra over ℚ, and the composition codec.
//!
//! A word is read left to right as the sequence of letters of an iterated
//! integral, outermost form first: `0` stands for `dx/x` and `1` for
//! `dx/(1-x)`. Admissible words (first letter `0`, last letter `1`) are
//! exactly the convergent ones and are in bijection with MZV indices.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num::{Signed, Zero};
use thiserror::Error;

use crate::rational::{format_rational, from_u128, parse_rational, Rational};

/// Maximum number of letters a [`Word`] can hold.
pub const MAX_WORD_LEN: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("invalid letter {letter:?} at position {position}; words use only '0' and '1'")]
    InvalidLetter { letter: char, position: usize },
    #[error("word has {0} letters; at most {MAX_WORD_LEN} are supported")]
    TooLong(usize),
    #[error("word {0} is not admissible (it must start with 0 and end with 1)")]
    NotAdmissible(Word),
    #[error("empty word")]
    Empty,
    #[error("invalid composition: {0}")]
    InvalidComposition(String),
    #[error("malformed word sum line {line}: {text:?}")]
    MalformedSum { line: usize, text: String },
}

/// A finite word over {0, 1}, packed left-aligned into 128 bits.
///
/// The derived ordering compares the packed bits first and the length second,
/// which is the usual lexicographic order with `0 < 1` and a proper prefix
/// sorting before its extensions.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    bits: u128,
    len: u8,
}

const TOP: u128 = 1 << 127;

impl Word {
    pub const fn empty() -> Self {
        Word { bits: 0, len: 0 }
    }

    pub fn from_letters(letters: &[u8]) -> Result<Self, WordError> {
        if letters.len() > MAX_WORD_LEN {
            return Err(WordError::TooLong(letters.len()));
        }
        let mut w = Word::empty();
        for (position, &b) in letters.iter().enumerate() {
            match b {
                0 | 1 => w = w.pushed(b),
                _ => {
                    return Err(WordError::InvalidLetter {
                        letter: char::from_digit(b as u32 % 36, 36).unwrap_or('?'),
                        position,
                    })
                }
            }
        }
        Ok(w)
    }

    /// `0^zeros 1`, the word of the depth-one value ζ(zeros + 1).
    pub fn zeros_then_one(zeros: usize) -> Self {
        let mut w = Word::empty();
        for _ in 0..zeros {
            w = w.pushed(0);
        }
        w.pushed(1)
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Weight of the word, i.e. its length.
    pub fn weight(&self) -> usize {
        self.len()
    }

    /// Number of `1` letters; the depth of the associated MZV.
    pub fn depth(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn letter(&self, i: usize) -> u8 {
        assert!(i < self.len(), "letter index {i} out of range");
        ((self.bits >> (127 - i)) & 1) as u8
    }

    pub fn letters(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.len()).map(move |i| self.letter(i))
    }

    pub fn first(&self) -> Option<u8> {
        (!self.is_empty()).then(|| self.letter(0))
    }

    pub fn last(&self) -> Option<u8> {
        (!self.is_empty()).then(|| self.letter(self.len() - 1))
    }

    /// Starts with 0 and ends with 1.
    pub fn is_admissible(&self) -> bool {
        self.first() == Some(0) && self.last() == Some(1)
    }

    pub fn require_admissible(&self) -> Result<(), WordError> {
        if self.is_admissible() {
            Ok(())
        } else {
            Err(WordError::NotAdmissible(*self))
        }
    }

    /// Appends one letter. Panics past [`MAX_WORD_LEN`].
    pub fn pushed(self, letter: u8) -> Self {
        assert!(self.len() < MAX_WORD_LEN, "word exceeds {MAX_WORD_LEN} letters");
        let bits = if letter == 1 { self.bits | (TOP >> self.len) } else { self.bits };
        Word { bits, len: self.len + 1 }
    }

    /// Inserts `0` in front.
    pub fn with_leading_zero(self) -> Self {
        assert!(self.len() < MAX_WORD_LEN, "word exceeds {MAX_WORD_LEN} letters");
        Word { bits: self.bits >> 1, len: self.len + 1 }
    }

    /// Inserts `1` at the end.
    pub fn with_trailing_one(self) -> Self {
        self.pushed(1)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let len = self.len() + other.len();
        assert!(len <= MAX_WORD_LEN, "word exceeds {MAX_WORD_LEN} letters");
        let tail = if self.len == 128 { 0 } else { other.bits >> self.len };
        Word { bits: self.bits | tail, len: len as u8 }
    }

    /// Letters in `start..end`.
    pub fn slice(&self, start: usize, end: usize) -> Word {
        assert!(start <= end && end <= self.len(), "slice {start}..{end} out of range");
        if start == end {
            return Word::empty();
        }
        let len = end - start;
        let shifted = self.bits << start;
        let mask = if len == 128 { u128::MAX } else { !(u128::MAX >> len) };
        Word { bits: shifted & mask, len: len as u8 }
    }

    pub fn reversed(&self) -> Word {
        if self.is_empty() {
            return *self;
        }
        Word { bits: self.bits.reverse_bits() << (128 - self.len()), len: self.len }
    }

    /// Exchanges every 0 with 1.
    pub fn complemented(&self) -> Word {
        if self.is_empty() {
            return *self;
        }
        let mask = !u128::MAX.checked_shr(self.len() as u32).unwrap_or(0);
        Word { bits: !self.bits & mask, len: self.len }
    }

    /// All words of exactly `len` letters, in increasing order.
    pub fn all_of_length(len: usize) -> impl Iterator<Item = Word> {
        assert!(len < 64, "enumeration limited to fewer than 64 letters");
        (0u64..(1u64 << len))
            .map(move |n| Word { bits: if len == 0 { 0 } else { (n as u128) << (128 - len) }, len: len as u8 })
    }

    /// All admissible words of weight `len` (there are `2^(len-2)` of them).
    pub fn admissible_of_weight(len: usize) -> impl Iterator<Item = Word> {
        Word::all_of_length(len).filter(Word::is_admissible)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.letters() {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            f.write_str("ε")
        } else {
            fmt::Display::fmt(self, f)
        }
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let mut letters = Vec::with_capacity(s.len());
        for (position, c) in s.chars().enumerate() {
            match c {
                '0' => letters.push(0),
                '1' => letters.push(1),
                letter => return Err(WordError::InvalidLetter { letter, position }),
            }
        }
        Word::from_letters(&letters)
    }
}

/// An MZV index `(n_1, …, n_d)` with every part ≥ 1 and `n_d ≥ 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition {
    parts: Vec<u32>,
}

impl Composition {
    pub fn new(parts: Vec<u32>) -> Result<Self, WordError> {
        match parts.last() {
            None => Err(WordError::InvalidComposition("no parts".into())),
            Some(_) if parts.contains(&0) => Err(WordError::InvalidComposition("parts must be positive".into())),
            Some(&last) if last < 2 => Err(WordError::InvalidComposition(format!(
                "last part is {last}; it must be at least 2 for convergence"
            ))),
            Some(_) => {
                let weight: u64 = parts.iter().map(|&n| n as u64).sum();
                if weight as usize > MAX_WORD_LEN {
                    return Err(WordError::TooLong(weight as usize));
                }
                Ok(Composition { parts })
            }
        }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn depth(&self) -> usize {
        self.parts.len()
    }

    pub fn weight(&self) -> usize {
        self.parts.iter().map(|&n| n as usize).sum()
    }

    /// All valid compositions of the given weight.
    pub fn all_of_weight(weight: usize) -> Vec<Composition> {
        if weight < 2 {
            return Vec::new();
        }
        Word::admissible_of_weight(weight).map(|w| composition_from_word(&w).unwrap()).collect()
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(u32::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for Composition {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts = s
            .split(',')
            .map(|p| {
                p.trim().parse::<u32>().map_err(|_| WordError::InvalidComposition(format!("bad part {:?}", p.trim())))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Composition::new(parts)
    }
}

/// `(n_1, …, n_d) ↦ 0^{n_d-1} 1 0^{n_{d-1}-1} 1 ⋯ 0^{n_1-1} 1`.
pub fn word_from_composition(c: &Composition) -> Word {
    c.parts.iter().rev().fold(Word::empty(), |w, &n| (1..n).fold(w, |w, _| w.pushed(0)).pushed(1))
}

/// Inverse of [`word_from_composition`].
pub fn composition_from_word(w: &Word) -> Result<Composition, WordError> {
    w.require_admissible()?;
    let mut parts = Vec::with_capacity(w.depth());
    let mut run = 1u32;
    for b in w.letters() {
        if b == 0 {
            run += 1;
        } else {
            parts.push(run);
            run = 1;
        }
    }
    parts.reverse();
    Composition::new(parts)
}

/// Reverse the word and exchange 0 with 1. Encodes MZV duality.
pub fn dual_word(w: &Word) -> Result<Word, WordError> {
    w.require_admissible()?;
    Ok(w.reversed().complemented())
}

/// A finite ℚ-linear combination of words with no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct WordSum {
    terms: BTreeMap<Word, Rational>,
}

impl WordSum {
    pub fn zero() -> Self {
        WordSum::default()
    }

    pub fn from_word(w: Word) -> Self {
        Self::term(Rational::from_integer(1.into()), w)
    }

    pub fn term(coeff: Rational, w: Word) -> Self {
        let mut s = WordSum::zero();
        s.add_term(coeff, w);
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, coeff: Rational, w: Word) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(w).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn add_scaled(&mut self, scale: &Rational, other: &WordSum) {
        for (w, c) in &other.terms {
            self.add_term(scale * c, *w);
        }
    }

    pub fn scaled(&self, scale: &Rational) -> WordSum {
        let mut out = WordSum::zero();
        out.add_scaled(scale, self);
        out
    }

    pub fn coefficient(&self, w: &Word) -> Rational {
        self.terms.get(w).cloned().unwrap_or_else(Rational::zero)
    }

    /// Terms in descending lexicographic order (the leading word first).
    pub fn iter(&self) -> impl Iterator<Item = (&Word, &Rational)> {
        self.terms.iter().rev()
    }

    /// The lexicographically greatest word with its coefficient.
    pub fn leading(&self) -> Option<(&Word, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn total_coefficient(&self) -> Rational {
        self.terms.values().fold(Rational::zero(), |acc, c| acc + c)
    }

    /// The common weight of all words, if there is exactly one.
    pub fn homogeneous_weight(&self) -> Option<usize> {
        let mut weights = self.terms.keys().map(Word::weight);
        let first = weights.next()?;
        weights.all(|w| w == first).then_some(first)
    }

    pub fn all_admissible(&self) -> bool {
        self.terms.keys().all(Word::is_admissible)
    }

    pub fn all_coefficients_positive(&self) -> bool {
        self.terms.values().all(Signed::is_positive)
    }

    pub fn map_words(&self, f: impl Fn(Word) -> Word) -> WordSum {
        let mut out = WordSum::zero();
        for (w, c) in &self.terms {
            out.add_term(c.clone(), f(*w));
        }
        out
    }
}

impl std::ops::Add for &WordSum {
    type Output = WordSum;
    fn add(self, rhs: &WordSum) -> WordSum {
        let mut out = self.clone();
        out.add_scaled(&Rational::from_integer(1.into()), rhs);
        out
    }
}

impl std::ops::Sub for &WordSum {
    type Output = WordSum;
    fn sub(self, rhs: &WordSum) -> WordSum {
        let mut out = self.clone();
        out.add_scaled(&Rational::from_integer((-1).into()), rhs);
        out
    }
}

impl fmt::Display for WordSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return writeln!(f, "0");
        }
        for (w, c) in self.iter() {
            writeln!(f, "{} {}", format_rational(c), w)?;
        }
        Ok(())
    }
}

impl FromStr for WordSum {
    type Err = WordError;

    /// Reads the `<rational> <word>` per-line format; a lone `0` is the zero sum.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = WordSum::zero();
        for (idx, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line == "0" {
                continue;
            }
            let malformed = || WordError::MalformedSum { line: idx + 1, text: line.to_string() };
            let (coeff, word) = line.split_once(char::is_whitespace).ok_or_else(malformed)?;
            let coeff = parse_rational(coeff).ok_or_else(malformed)?;
            let word: Word = word.trim().parse()?;
            if word.is_empty() {
                return Err(malformed());
            }
            out.add_term(coeff, word);
        }
        Ok(out)
    }
}

/// Shuffle product of two words, with integer multiplicities.
///
/// Interleavings are built prefix by prefix: the table entry `(i, j)` holds
/// every merge of `u[..i]` with `v[..j]`, so shared prefixes are merged once.
pub fn shuffle_counts(u: &Word, v: &Word) -> HashMap<Word, u128> {
    assert!(u.len() + v.len() <= MAX_WORD_LEN, "shuffle result exceeds {MAX_WORD_LEN} letters");
    let (m, n) = (u.len(), v.len());
    let unit = || HashMap::from([(Word::empty(), 1u128)]);
    // row[j] = merges of u[..i] with v[..j] for the current i
    let mut row: Vec<HashMap<Word, u128>> = Vec::with_capacity(n + 1);
    row.push(unit());
    for j in 1..=n {
        let extended = extend_all(&row[j - 1], v.letter(j - 1));
        row.push(extended);
    }
    for i in 1..=m {
        let a = u.letter(i - 1);
        let mut next: Vec<HashMap<Word, u128>> = Vec::with_capacity(n + 1);
        next.push(extend_all(&row[0], a));
        for j in 1..=n {
            let mut cell = extend_all(&row[j], a);
            let b = v.letter(j - 1);
            for (w, c) in &next[j - 1] {
                *cell.entry(w.pushed(b)).or_insert(0) += *c;
            }
            next.push(cell);
        }
        row = next;
    }
    row.pop().unwrap_or_else(unit)
}

fn extend_all(cell: &HashMap<Word, u128>, letter: u8) -> HashMap<Word, u128> {
    cell.iter().map(|(w, c)| (w.pushed(letter), *c)).collect()
}

/// `u ⧢ v` as a [`WordSum`].
pub fn shuffle(u: &Word, v: &Word) -> WordSum {
    let mut out = WordSum::zero();
    for (w, c) in shuffle_counts(u, v) {
        out.add_term(from_u128(c), w);
    }
    out
}

/// Bilinear extension of [`shuffle`].
pub fn shuffle_sum(a: &WordSum, b: &WordSum) -> WordSum {
    let mut out = WordSum::zero();
    for (u, cu) in &a.terms {
        for (v, cv) in &b.terms {
            let scale = cu * cv;
            for (w, c) in shuffle_counts(u, v) {
                out.add_term(&scale * from_u128(c), w);
            }
        }
    }
    out
}

/// `s ↦ 0·s`, termwise.
pub fn prepend_word(s: &WordSum) -> WordSum {
    s.map_words(Word::with_leading_zero)
}

/// `s ↦ s·1`, termwise.
pub fn append_word(s: &WordSum) -> WordSum {
    s.map_words(Word::with_trailing_one)
}
