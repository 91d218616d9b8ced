//! Floating-point MZV evaluation and exact Bernoulli numbers.
//!
//! `ζ(w)` is the iterated integral of the word `w` over `[0, 1]` with
//! `0 ↦ dt/t` and `1 ↦ dt/(1-t)`. Splitting the path at `1/2` and mapping the
//! upper half back with `t ↦ 1 - t` gives
//!
//! ```text
//! ζ(a_1⋯a_n) = Σ_j  Li[τ(a_j)⋯τ(a_1)](1/2) · Li[a_{j+1}⋯a_n](1/2)
//! ```
//!
//! where `τ` swaps the letters. For an admissible word every factor is a
//! convergent multiple polylogarithm at `1/2`, whose nested series converges
//! geometrically, so the truncation error has an explicit bound.

use std::f64::consts::PI;

use num::{BigInt, Complex, One, Zero};
use thiserror::Error;

use crate::rational::{factorial, Rational};
use crate::words::{composition_from_word, word_from_composition, Composition, Word, WordError, WordSum};

pub type Complex64 = Complex<f64>;

/// Smallest tolerance the evaluator accepts.
pub const MIN_TOLERANCE: f64 = 1e-12;

/// Largest truncation order tried before giving up.
const MAX_TERMS: usize = 100_000;

/// Tolerance used when none is given: tight enough for every weight ≤ 8.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("tolerance {0:e} is below the supported minimum {MIN_TOLERANCE:e}")]
    ToleranceTooSmall(f64),
    #[error("tolerance {requested:e} unachievable: best bound after {terms} terms is {achieved:e}")]
    ToleranceUnachievable { requested: f64, achieved: f64, terms: usize },
    #[error("Bernoulli numbers here are indexed by even integers ≥ 2, got {0}")]
    BadBernoulliIndex(u32),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// A numeric value with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MzvValue {
    pub value: Complex64,
    pub abs_error_bound: f64,
}

impl MzvValue {
    pub fn zero() -> Self {
        MzvValue { value: Complex64::zero(), abs_error_bound: 0.0 }
    }

    /// `|self - target| ≤ bound + slack`.
    pub fn agrees_with(&self, target: Complex64, slack: f64) -> bool {
        (self.value - target).norm() <= self.abs_error_bound + slack
    }
}

fn check_tolerance(tol: f64) -> Result<(), NumericsError> {
    if !(tol.is_finite() && tol >= MIN_TOLERANCE) {
        return Err(NumericsError::ToleranceTooSmall(tol));
    }
    Ok(())
}

/// Block lengths `s_1, …, s_k` of a word ending in `1`, outermost first:
/// `0^{s_1-1} 1 ⋯ 0^{s_k-1} 1`.
fn blocks(letters: &[u8]) -> Vec<u32> {
    let mut out = Vec::new();
    let mut run = 1u32;
    for &b in letters {
        if b == 0 {
            run += 1;
        } else {
            out.push(run);
            run = 1;
        }
    }
    out
}

/// `Σ_{m>n} 2^{-m} (1 + ln m)^{k-1}`, bounded geometrically; needs `n ≥ 3k`.
fn tail_bound(n: usize, depth: usize) -> f64 {
    let m = (n + 1) as f64;
    let term = (-(m) * std::f64::consts::LN_2 + (depth.saturating_sub(1) as f64) * (1.0 + m.ln()).ln()).exp();
    4.0 * term
}

/// Multiple polylogarithm `Li_{s_1,…,s_k}(1/2) = Σ_{m_1>⋯>m_k≥1} 2^{-m_1} / Π m_i^{s_i}`
/// truncated at `m_1 ≤ n`.
fn li_half(s: &[u32], n: usize) -> f64 {
    if s.is_empty() {
        return 1.0;
    }
    let k = s.len();
    // inner[m] holds the nested sum over indices below the current level ending at m
    let mut level: Vec<f64> = (0..=n).map(|m| if m == 0 { 0.0 } else { (m as f64).powi(-(s[k - 1] as i32)) }).collect();
    for &sj in s[..k - 1].iter().rev() {
        let mut next = vec![0.0; n + 1];
        let mut prefix = 0.0;
        for m in 1..=n {
            next[m] = prefix * (m as f64).powi(-(sj as i32));
            prefix += level[m];
        }
        level = next;
    }
    let mut total = 0.0;
    let mut z = 1.0;
    for value in level.iter().skip(1) {
        z *= 0.5;
        total += z * value;
    }
    total
}

/// Upper bound for `|Li_s(1/2)|` with `k` blocks: `(ln 2)^k / k!`.
fn li_half_magnitude(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc * std::f64::consts::LN_2 / j as f64)
}

/// Truncation plus rounding error of [`li_half`] with `k` blocks and `n` terms.
///
/// All summands are positive, so rounding is bounded relative to the value.
fn li_half_error(k: usize, n: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    tail_bound(n, k) + ((k + 1) * (n + 1)) as f64 * f64::EPSILON * li_half_magnitude(k)
}

/// Value of the iterated integral of an admissible word with its error bound.
fn zeta_of_word(w: &Word, tol: f64) -> Result<(f64, f64), NumericsError> {
    w.require_admissible()?;
    let letters: Vec<u8> = w.letters().collect();
    let n = letters.len();
    let pieces: Vec<(Vec<u32>, Vec<u32>)> = (0..=n)
        .map(|j| {
            let upper: Vec<u8> = letters[..j].iter().rev().map(|b| 1 - b).collect();
            (blocks(&upper), blocks(&letters[j..]))
        })
        .collect();
    let max_depth = pieces.iter().map(|(a, b)| a.len().max(b.len())).max().unwrap_or(1);
    let per_piece = tol / (4.0 * (n as f64 + 1.0));
    let mut terms = (3 * max_depth).max(24);
    while tail_bound(terms, max_depth) > per_piece {
        terms *= 2;
        if terms > MAX_TERMS {
            return Err(NumericsError::ToleranceUnachievable {
                requested: tol,
                achieved: tail_bound(MAX_TERMS, max_depth) * 4.0 * (n as f64 + 1.0),
                terms: MAX_TERMS,
            });
        }
    }
    let mut value = 0.0;
    let mut bound = 0.0;
    for (upper, lower) in &pieces {
        let (a, b) = (li_half(upper, terms), li_half(lower, terms));
        let (ea, eb) = (li_half_error(upper.len(), terms), li_half_error(lower.len(), terms));
        let (ma, mb) = (li_half_magnitude(upper.len()), li_half_magnitude(lower.len()));
        value += a * b;
        bound += ea * mb + eb * ma + ea * eb + (n as f64 + 2.0) * f64::EPSILON * (a * b).abs();
    }
    if bound > tol {
        return Err(NumericsError::ToleranceUnachievable { requested: tol, achieved: bound, terms });
    }
    Ok((value, bound))
}

/// `ζ(n_1, …, n_d) = Σ_{0<k_1<⋯<k_d} Π k_i^{-n_i}` to within `tol`.
pub fn eval_mzv(c: &Composition, tol: f64) -> Result<f64, NumericsError> {
    eval_mzv_bounded(c, tol).map(|(v, _)| v)
}

/// As [`eval_mzv`], also returning the error bound actually achieved.
pub fn eval_mzv_bounded(c: &Composition, tol: f64) -> Result<(f64, f64), NumericsError> {
    check_tolerance(tol)?;
    zeta_of_word(&word_from_composition(c), tol)
}

/// `(2πi)^n`.
fn two_pi_i_pow(n: usize) -> Complex64 {
    let modulus = (2.0 * PI).powi(n as i32);
    match n % 4 {
        0 => Complex64::new(modulus, 0.0),
        1 => Complex64::new(0.0, modulus),
        2 => Complex64::new(-modulus, 0.0),
        _ => Complex64::new(0.0, -modulus),
    }
}

/// Normalized value `(-1)^d ζ(c) / (2πi)^n` of an admissible word.
pub fn eval_word(w: &Word, tol: f64) -> Result<MzvValue, NumericsError> {
    check_tolerance(tol)?;
    let c = composition_from_word(w)?;
    let n = c.weight();
    let scale = (2.0 * PI).powi(n as i32);
    // the zeta value may carry error up to tol * (2π)^n before normalization
    let (zeta, bound) = zeta_of_word(w, (tol * scale).min(1e-3))?;
    let sign = if c.depth() % 2 == 0 { 1.0 } else { -1.0 };
    Ok(MzvValue { value: Complex64::new(sign * zeta, 0.0) / two_pi_i_pow(n), abs_error_bound: bound / scale })
}

/// Linear extension of [`eval_word`].
pub fn eval_word_sum(s: &WordSum, tol: f64) -> Result<MzvValue, NumericsError> {
    check_tolerance(tol)?;
    let mut out = MzvValue::zero();
    for (w, c) in s.iter() {
        let coeff = rational_to_f64(c);
        let v = eval_word(w, tol)?;
        out.value += v.value * coeff;
        out.abs_error_bound += v.abs_error_bound * coeff.abs() + f64::EPSILON * (v.value * coeff).norm();
    }
    Ok(out)
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    use num::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// `B_n` for every `n ≥ 0` via `Σ_{j=0}^{m} C(m+1, j) B_j = 0`, `B_1 = -1/2`.
#[derive(Debug, Clone)]
pub struct BernoulliTable {
    values: Vec<Rational>,
}

impl BernoulliTable {
    pub fn up_to(max: usize) -> Self {
        let mut values: Vec<Rational> = Vec::with_capacity(max + 1);
        values.push(Rational::one());
        for m in 1..=max {
            // B_m = -1/(m+1) Σ_{j<m} C(m+1, j) B_j
            let mut acc = Rational::zero();
            let mut binom = BigInt::one();
            for (j, b) in values.iter().enumerate() {
                acc += Rational::from_integer(binom.clone()) * b;
                binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
            }
            values.push(-acc / Rational::from_integer(BigInt::from(m + 1)));
        }
        BernoulliTable { values }
    }

    pub fn get(&self, n: usize) -> Option<&Rational> {
        self.values.get(n)
    }

    /// `(2k, B_{2k})` pairs with `2k ≥ 2`.
    pub fn even_entries(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.values.iter().enumerate().skip(2).step_by(2)
    }
}

/// Exact `B_{2k}`; the argument is the even index `2k ≥ 2`.
pub fn bernoulli(index: u32) -> Result<Rational, NumericsError> {
    if index < 2 || !index.is_multiple_of(2) {
        return Err(NumericsError::BadBernoulliIndex(index));
    }
    Ok(BernoulliTable::up_to(index as usize).values.swap_remove(index as usize))
}

/// Exact normalized value of `0^{2k-1} 1`, namely `B_{2k} / (2 (2k)!)`.
pub fn even_zeta_word_value(k: u32) -> Result<Rational, NumericsError> {
    let b = bernoulli(2 * k)?;
    Ok(b / Rational::from_integer(BigInt::from(2) * factorial(2 * k as u64)))
}

/// If `w = 0^{2k-1}1`, returns `k`.
pub fn even_zeta_index(w: &Word) -> Option<u32> {
    let n = w.len();
    (n >= 2 && n.is_multiple_of(2) && *w == Word::zeros_then_one(n - 1)).then_some((n / 2) as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn c(s: &str) -> Composition {
        s.parse().unwrap()
    }

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    /// Depth-one oracle: direct partial sum with an Euler–Maclaurin tail.
    fn zeta_direct(s: i32) -> f64 {
        let n = 2000usize;
        let partial: f64 = (1..=n).rev().map(|k| (k as f64).powi(-s)).sum();
        let nf = n as f64;
        let sf = s as f64;
        let tail = nf.powf(1.0 - sf) / (sf - 1.0) - 0.5 * nf.powf(-sf) + sf / 12.0 * nf.powf(-sf - 1.0)
            - sf * (sf + 1.0) * (sf + 2.0) / 720.0 * nf.powf(-sf - 3.0);
        partial + tail
    }

    #[test]
    fn depth_one_values() {
        assert!((eval_mzv(&c("2"), 1e-12).unwrap() - PI * PI / 6.0).abs() < 1e-12);
        assert!((eval_mzv(&c("3"), 1e-12).unwrap() - 1.202_056_903_159_594_3).abs() < 1e-12);
        assert!((eval_mzv(&c("4"), 1e-12).unwrap() - PI.powi(4) / 90.0).abs() < 1e-12);
        for s in 2..=8 {
            let v = eval_mzv(&c(&s.to_string()), 1e-12).unwrap();
            assert!((v - zeta_direct(s)).abs() < 1e-11, "zeta({s})");
        }
    }

    #[test]
    fn depth_two_closed_forms() {
        let z = |s: &str| eval_mzv(&c(s), 1e-12).unwrap();
        let (z2, z3, z5) = (PI * PI / 6.0, z("3"), z("5"));
        assert!((z("1,3") - PI.powi(4) / 360.0).abs() < 1e-12);
        assert!((z("1,2") - z3).abs() < 1e-12);
        // Euler: Σ_{k<m} 1/(k m^4) = 2ζ(5) − ζ(2)ζ(3), and the two weight-5 depth-2 sums
        assert!((z("1,4") - (2.0 * z5 - z2 * z3)).abs() < 1e-12);
        assert!((z("2,3") - (3.0 * z2 * z3 - 5.5 * z5)).abs() < 1e-12);
        assert!((z("3,2") - (4.5 * z5 - 2.0 * z2 * z3)).abs() < 1e-12);
        // ζ(1,…,1,2) = ζ(n) by duality
        assert!((z("1,1,1,2") - z5).abs() < 1e-12);
    }

    #[test]
    fn normalized_word_values() {
        let v = eval_word(&w("01"), 1e-12).unwrap();
        assert!(v.agrees_with(Complex64::new(1.0 / 24.0, 0.0), 1e-15));
        let v = eval_word(&w("0011"), 1e-12).unwrap();
        assert!(v.agrees_with(Complex64::new(1.0 / 5760.0, 0.0), 1e-15));
        let v = eval_word(&w("001"), 1e-12).unwrap();
        // (2πi)^3 = -8π^3 i, so -ζ(3)/(2πi)^3 = -i ζ(3)/(8π^3)
        let expected = -1.202_056_903_159_594_3 / (8.0 * PI.powi(3));
        assert!(v.agrees_with(Complex64::new(0.0, expected), 1e-15));
    }

    #[test]
    fn word_sum_values() {
        let mut s = WordSum::zero();
        s.add_term(crate::rational::int(2), w("0101"));
        s.add_term(crate::rational::int(4), w("0011"));
        let lhs = eval_word_sum(&s, 1e-12).unwrap();
        let single = eval_word(&w("01"), 1e-12).unwrap();
        assert!(lhs.agrees_with(single.value * single.value, 2e-12));
        assert_eq!(eval_word_sum(&WordSum::zero(), 1e-8).unwrap().value, Complex64::zero());
        let mut dual_pair = WordSum::zero();
        dual_pair.add_term(crate::rational::int(1), w("011"));
        dual_pair.add_term(crate::rational::int(1), w("001"));
        assert!(eval_word_sum(&dual_pair, 1e-12).unwrap().agrees_with(Complex64::zero(), 1e-14));
    }

    #[test]
    fn errors() {
        assert!(matches!(eval_mzv(&c("2"), 1e-13), Err(NumericsError::ToleranceTooSmall(_))));
        assert!(matches!(eval_word(&w("10"), 1e-8), Err(NumericsError::Word(_))));
        assert!(matches!(eval_mzv(&c("2"), f64::NAN), Err(NumericsError::ToleranceTooSmall(_))));
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(2).unwrap(), ratio(1, 6));
        assert_eq!(bernoulli(4).unwrap(), ratio(-1, 30));
        assert_eq!(bernoulli(12).unwrap(), ratio(-691, 2730));
        assert!(bernoulli(3).is_err());
        assert!(bernoulli(0).is_err());
        let table = BernoulliTable::up_to(10);
        assert_eq!(table.get(1), Some(&ratio(-1, 2)));
        assert_eq!(table.get(3), Some(&Rational::zero()));
        assert_eq!(table.even_entries().count(), 5);
        assert_eq!(even_zeta_word_value(1).unwrap(), ratio(1, 24));
        assert_eq!(even_zeta_index(&w("0001")), Some(2));
        assert_eq!(even_zeta_index(&w("001")), None);
    }

    #[test]
    fn bernoulli_matches_even_zeta() {
        for k in 1..=4u32 {
            let v = eval_word(&Word::zeros_then_one(2 * k as usize - 1), 1e-12).unwrap();
            let scaled = 2.0 * rational_to_f64(&Rational::from_integer(factorial(2 * k as u64))) * v.value.re;
            assert!((scaled - rational_to_f64(&bernoulli(2 * k).unwrap())).abs() < 1e-8);
        }
    }

    #[test]
    fn parity_law() {
        for n in 2..=8 {
            for x in Word::admissible_of_weight(n) {
                let v = eval_word(&x, 1e-10).unwrap();
                let off = if n % 2 == 0 { v.value.im } else { v.value.re };
                assert!(off.abs() <= 1e-10, "{x}");
            }
        }
    }
}
