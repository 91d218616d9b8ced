//! Lyndon words, Chen–Fox–Lyndon factorization and the triangular
//! decomposition of admissible words into shuffles of Lyndon words.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Zero};
use thiserror::Error;

use crate::rational::{factorial, format_rational, Rational};
use crate::words::{shuffle_sum, Word, WordError, WordSum};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LyndonError {
    #[error("the empty word has no Lyndon factorization")]
    EmptyWord,
    #[error("invalid factorization: {0}")]
    InvalidFactorization(String),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// True iff `w` is strictly smaller than each of its proper nonempty suffixes.
pub fn is_lyndon(w: &Word) -> Result<bool, LyndonError> {
    if w.is_empty() {
        return Err(LyndonError::EmptyWord);
    }
    let f = duval(w);
    Ok(f.len() == 1 && f[0].1 == 1)
}

/// `w = l_1^{k_1} ⋯ l_m^{k_m}` with Lyndon `l_1 > ⋯ > l_m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LyndonFactorization {
    factors: Vec<(Word, u32)>,
}

impl LyndonFactorization {
    /// Validates Lyndon-ness, strict decrease and positive multiplicities.
    pub fn new(factors: Vec<(Word, u32)>) -> Result<Self, LyndonError> {
        if factors.is_empty() {
            return Err(LyndonError::InvalidFactorization("no factors".into()));
        }
        for (l, k) in &factors {
            if *k == 0 {
                return Err(LyndonError::InvalidFactorization(format!("factor {l} has multiplicity 0")));
            }
            if !is_lyndon(l)? {
                return Err(LyndonError::InvalidFactorization(format!("{l} is not a Lyndon word")));
            }
        }
        if factors.windows(2).any(|pair| pair[0].0 <= pair[1].0) {
            return Err(LyndonError::InvalidFactorization("factors must strictly decrease".into()));
        }
        Ok(LyndonFactorization { factors })
    }

    pub fn factors(&self) -> &[(Word, u32)] {
        &self.factors
    }

    /// The factored word, reassembled.
    pub fn word(&self) -> Word {
        self.factors
            .iter()
            .flat_map(|(l, k)| std::iter::repeat_n(l, *k as usize))
            .fold(Word::empty(), |acc, l| acc.concat(l))
    }

    /// Factors repeated by multiplicity, in descending order.
    pub fn multiset(&self) -> LyndonMultiset {
        LyndonMultiset(self.factors.iter().flat_map(|(l, k)| std::iter::repeat_n(*l, *k as usize)).collect())
    }
}

impl fmt::Display for LyndonFactorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.factors.iter().map(|(l, k)| if *k == 1 { format!("({l})") } else { format!("({l})^{k}") }).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Duval's algorithm, grouping equal consecutive factors.
fn duval(w: &Word) -> Vec<(Word, u32)> {
    let s: Vec<u8> = w.letters().collect();
    let n = s.len();
    let mut out: Vec<(Word, u32)> = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        let mut k = i;
        while j < n && s[k] <= s[j] {
            if s[k] < s[j] {
                k = i;
            } else {
                k += 1;
            }
            j += 1;
        }
        let period = j - k;
        while i <= k {
            let factor = w.slice(i, i + period);
            match out.last_mut() {
                Some((last, count)) if *last == factor => *count += 1,
                _ => out.push((factor, 1)),
            }
            i += period;
        }
    }
    out
}

/// The unique Chen–Fox–Lyndon factorization of a nonempty word.
pub fn chen_fox_lyndon(w: &Word) -> Result<LyndonFactorization, LyndonError> {
    if w.is_empty() {
        return Err(LyndonError::EmptyWord);
    }
    Ok(LyndonFactorization { factors: duval(w) })
}

/// `(1/(k_1!⋯k_m!)) · l_1^{⧢k_1} ⧢ ⋯ ⧢ l_m^{⧢k_m}`.
///
/// Its leading term is the factored word with coefficient 1.
pub fn radford_expand(fact: &LyndonFactorization) -> WordSum {
    let mut product = WordSum::from_word(Word::empty());
    let mut denom = num::BigInt::one();
    for (l, k) in &fact.factors {
        let single = WordSum::from_word(*l);
        for _ in 0..*k {
            product = shuffle_sum(&product, &single);
        }
        denom *= factorial(*k as u64);
    }
    product.scaled(&Rational::new(num::BigInt::one(), denom))
}

/// A multiset of Lyndon words, stored in descending order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LyndonMultiset(Vec<Word>);

impl LyndonMultiset {
    pub fn new(mut words: Vec<Word>) -> Self {
        words.sort_unstable_by(|a, b| b.cmp(a));
        LyndonMultiset(words)
    }

    pub fn words(&self) -> &[Word] {
        &self.0
    }

    /// The shuffle product of all members.
    pub fn expand(&self) -> WordSum {
        self.0.iter().fold(WordSum::from_word(Word::empty()), |acc, l| shuffle_sum(&acc, &WordSum::from_word(*l)))
    }
}

impl fmt::Display for LyndonMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(Word::to_string).collect();
        write!(f, "[{}]", parts.join(" ⧢ "))
    }
}

/// A ℚ-combination of shuffle products of admissible Lyndon words.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LyndonBasisDecomposition {
    terms: BTreeMap<LyndonMultiset, Rational>,
}

impl LyndonBasisDecomposition {
    fn add(&mut self, key: LyndonMultiset, coeff: Rational) {
        let entry = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// Terms, greatest multiset first.
    pub fn iter(&self) -> impl Iterator<Item = (&LyndonMultiset, &Rational)> {
        self.terms.iter().rev()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, key: &LyndonMultiset) -> Rational {
        self.terms.get(key).cloned().unwrap_or_else(Rational::zero)
    }

    /// Sums the shuffle products back into a [`WordSum`].
    pub fn expand(&self) -> WordSum {
        let mut out = WordSum::zero();
        for (m, c) in &self.terms {
            out.add_scaled(c, &m.expand());
        }
        out
    }
}

impl fmt::Display for LyndonBasisDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (m, c) in self.iter() {
            writeln!(f, "{} {}", format_rational(c), m)?;
        }
        Ok(())
    }
}

/// Rewrites an admissible word over shuffles of admissible Lyndon words.
///
/// Works down from the greatest outstanding word: each is replaced by its
/// factor multiset minus the lower terms of its Radford expansion, until
/// nothing is left.
pub fn lyndon_basis_decompose(w: &Word) -> Result<LyndonBasisDecomposition, LyndonError> {
    w.require_admissible()?;
    let mut out = LyndonBasisDecomposition::default();
    let mut pending = WordSum::from_word(*w);
    while let Some((top, coeff)) = pending.leading() {
        let (top, coeff) = (*top, coeff.clone());
        let fact = chen_fox_lyndon(&top)?;
        let multiplicity: num::BigInt = fact.factors.iter().map(|(_, k)| factorial(*k as u64)).product();
        out.add(fact.multiset(), &coeff / Rational::from_integer(multiplicity));
        pending.add_scaled(&-coeff, &radford_expand(&fact));
        debug_assert!(pending.coefficient(&top).is_zero());
    }
    Ok(out)
}
