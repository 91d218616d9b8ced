//! Writing normalized MZVs as combinations of graph weights.
//!
//! Over ℚ, every admissible word is reached from `01` by prepending `0`,
//! appending `1` and shuffling: decompose into shuffles of Lyndon words, and
//! shorten each Lyndon word of length ≥ 3 by peeling a leading `0` (when it
//! starts `00`) or a trailing `1` (when it ends `11`). Over ℤ, unit fractions
//! `1/p` come from the wedge graph and Bernoulli numbers through the
//! Von Staudt–Clausen congruence.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num::{BigInt, One, Signed, Zero};
use serde_json::json;
use thiserror::Error;

use crate::graphs::wedge_value;
use crate::lyndon::{lyndon_basis_decompose, LyndonError};
use crate::numerics::{eval_mzv, even_zeta_index, even_zeta_word_value, NumericsError};
use crate::rational::{factorial, format_rational, int, is_prime, Rational};
use crate::trees::{word_image, Tree, TreeSum};
use crate::words::{composition_from_word, word_from_composition, Composition, Word, WordError, WordSum};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecomposeError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Lyndon(#[from] LyndonError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("generator {0} has no known exact rational value")]
    NoExactValue(String),
    #[error("Von Staudt–Clausen sum for p = {0} is not an integer")]
    NotIntegral(u64),
}

/// Memoizes the tree chosen for each admissible Lyndon word.
#[derive(Debug, Default)]
pub struct Decomposer {
    lyndon_trees: HashMap<Word, TreeSum>,
    words: HashMap<Word, TreeSum>,
}

impl Decomposer {
    pub fn new() -> Self {
        Self::default()
    }

    /// A tree combination with `I(result) = 1·w`.
    pub fn word(&mut self, w: &Word) -> Result<TreeSum, DecomposeError> {
        w.require_admissible()?;
        if let Some(hit) = self.words.get(w) {
            return Ok(hit.clone());
        }
        let basis = lyndon_basis_decompose(w)?;
        let mut out = TreeSum::zero();
        for (multiset, coeff) in basis.iter() {
            let mut product: Option<TreeSum> = None;
            for l in multiset.words() {
                let factor = self.lyndon(l)?;
                product = Some(match product {
                    None => factor,
                    Some(acc) => acc.join(&factor),
                });
            }
            let product = product.expect("multisets are nonempty");
            out.add_scaled(coeff, &product);
        }
        self.words.insert(*w, out.clone());
        Ok(out)
    }

    /// Trees for an admissible Lyndon word: `01 ↦ e`, `00s ↦ p(0s)`, `s11 ↦ q(s1)`.
    fn lyndon(&mut self, l: &Word) -> Result<TreeSum, DecomposeError> {
        if let Some(hit) = self.lyndon_trees.get(l) {
            return Ok(hit.clone());
        }
        let n = l.len();
        let out = if n == 2 {
            debug_assert_eq!(l.to_string(), "01");
            TreeSum::from_tree(Tree::E)
        } else if l.letter(1) == 0 {
            self.word(&l.slice(1, n))?.prepend()
        } else {
            // every Lyndon word of length ≥ 3 that does not start 00 ends 11
            debug_assert_eq!(l.letter(n - 2), 1);
            self.word(&l.slice(0, n - 1))?.append()
        };
        self.lyndon_trees.insert(*l, out.clone());
        Ok(out)
    }
}

/// See [`Decomposer::word`].
pub fn decompose_word(w: &Word) -> Result<TreeSum, DecomposeError> {
    Decomposer::new().word(w)
}

/// The identity `Σ a_i c(G(t_i)) = (-1)^d ζ(c) / (2πi)^n` certified by a
/// decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct MzvDecomposition {
    pub composition: Composition,
    pub word: Word,
    pub trees: TreeSum,
}

impl MzvDecomposition {
    /// `-1` for odd depth, `+1` for even.
    pub fn sign(&self) -> i32 {
        if self.composition.depth().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    pub fn weight(&self) -> usize {
        self.composition.weight()
    }

    pub fn report(&self) -> String {
        let sign = if self.sign() < 0 { "-" } else { "" };
        format!(
            "sum_i a_i * c(G(t_i)) = {sign}zeta({})/(2 pi i)^{}   [word {}]",
            self.composition,
            self.weight(),
            self.word
        )
    }
}

impl fmt::Display for MzvDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.trees)?;
        writeln!(f, "{}", self.report())
    }
}

pub fn decompose_mzv(c: &Composition) -> Result<MzvDecomposition, DecomposeError> {
    let word = word_from_composition(c);
    Ok(MzvDecomposition { composition: c.clone(), word, trees: decompose_word(&word)? })
}

/// A certificate generator: a generated tree or the distinguished wedge.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    Wedge,
    Tree(Tree),
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Wedge => f.write_str("wedge"),
            Generator::Tree(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateKind {
    /// Rational coefficients.
    Q,
    /// Integer coefficients, unit-fraction target.
    Z,
}

/// A combination of generator weights claimed to equal `target`.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub target: Rational,
    terms: BTreeMap<Generator, Rational>,
}

impl Certificate {
    pub fn terms(&self) -> impl Iterator<Item = (&Generator, &Rational)> {
        self.terms.iter()
    }

    fn add(&mut self, coeff: Rational, g: Generator) {
        let entry = self.terms.entry(g.clone()).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&g);
        }
    }

    fn add_scaled(&mut self, scale: &Rational, other: &Certificate) {
        for (g, c) in &other.terms {
            self.add(scale * c, g.clone());
        }
    }

    /// Exact weight of the claimed combination.
    pub fn evaluate(&self) -> Result<Rational, DecomposeError> {
        let mut total = Rational::zero();
        for (g, c) in &self.terms {
            total += c * generator_value(g)?;
        }
        Ok(total)
    }

    /// Evaluates exactly and checks the target, and for ℤ-certificates that
    /// every coefficient is an integer and the target is `1/p`.
    pub fn check(&self) -> Result<bool, DecomposeError> {
        let value = self.evaluate()?;
        let shape_ok = match self.kind {
            CertificateKind::Q => true,
            CertificateKind::Z => {
                self.terms.values().all(|c| c.is_integer())
                    && self.target.numer().is_one()
                    && self.target.denom().to_string().parse::<u64>().is_ok_and(is_prime)
            }
        };
        Ok(shape_ok && value == self.target)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> =
            self.terms.iter().map(|(g, c)| json!({"coeff": format_rational(c), "gen": g.to_string()})).collect();
        json!({
            "target": format_rational(&self.target),
            "kind": match self.kind { CertificateKind::Q => "Q", CertificateKind::Z => "Z" },
            "terms": terms,
        })
    }
}

/// Exact weight of a generator: `-1/2` for the wedge; for a tree whose image
/// is supported on words `0^{2k-1}1`, the Bernoulli value of each word.
pub fn generator_value(g: &Generator) -> Result<Rational, DecomposeError> {
    match g {
        Generator::Wedge => Ok(wedge_value()),
        Generator::Tree(t) => {
            let image = word_image(t);
            let mut total = Rational::zero();
            for (w, c) in image.iter() {
                let k = even_zeta_index(w).ok_or_else(|| DecomposeError::NoExactValue(t.to_string()))?;
                total += c * even_zeta_word_value(k)?;
            }
            Ok(total)
        }
    }
}

/// An integer combination of graph weights equal to `1/p`.
///
/// `1/2` is minus the wedge. For odd `p`, Von Staudt–Clausen gives an integer
/// `m = B_{p-1} + Σ_{(q-1) | (p-1)} 1/q`, so
/// `1/p = m - B_{p-1} - Σ_{q<p} 1/q`, with `m = (-2m)·wedge`,
/// `B_{p-1} = 2(p-1)!·c(G(p^{p-3}(e)))` and each `1/q` certified recursively.
pub fn unit_fraction_certificate(p: u64) -> Result<Certificate, DecomposeError> {
    if !is_prime(p) {
        return Err(DecomposeError::NotPrime(p));
    }
    let mut memo = HashMap::new();
    unit_fraction_inner(p, &mut memo)
}

fn unit_fraction_inner(p: u64, memo: &mut HashMap<u64, Certificate>) -> Result<Certificate, DecomposeError> {
    if let Some(hit) = memo.get(&p) {
        return Ok(hit.clone());
    }
    let target = Rational::new(BigInt::one(), BigInt::from(p));
    let mut cert = Certificate { kind: CertificateKind::Z, target: target.clone(), terms: BTreeMap::new() };
    if p == 2 {
        cert.add(int(-1), Generator::Wedge);
    } else {
        let index = (p - 1) as u32;
        let b = crate::numerics::bernoulli(index)?;
        let smaller: Vec<u64> = (2..p).filter(|&q| is_prime(q) && (p - 1).is_multiple_of(q - 1)).collect();
        let mut vsc = &b + &target;
        for &q in &smaller {
            vsc += Rational::new(BigInt::one(), BigInt::from(q));
        }
        if !vsc.is_integer() {
            return Err(DecomposeError::NotIntegral(p));
        }
        cert.add(-Rational::from_integer(BigInt::from(2) * vsc.to_integer()), Generator::Wedge);
        let bernoulli_tree = Tree::p_power((p - 3) as usize, Tree::E);
        cert.add(-Rational::from_integer(BigInt::from(2) * factorial(p - 1)), Generator::Tree(bernoulli_tree));
        for q in smaller {
            let sub = unit_fraction_inner(q, memo)?;
            cert.add_scaled(&int(-1), &sub);
        }
    }
    debug_assert!(cert.terms.values().all(|c| c.is_integer() && !c.is_zero()));
    memo.insert(p, cert.clone());
    Ok(cert)
}

/// One row of the weight-5 table: a tree and its word image.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub tree: Tree,
    pub image: WordSum,
}

impl TableRow {
    /// `Σ c_w ζ(composition(w))`, without the `(-1)^d` normalization sign.
    pub fn zeta_combination(&self, tol: f64) -> Result<f64, DecomposeError> {
        let mut total = 0.0;
        for (w, c) in self.image.iter() {
            total += crate::numerics::rational_to_f64(c) * eval_mzv(&composition_from_word(w)?, tol)?;
        }
        Ok(total)
    }
}

/// The weight-5 generating set and why it fails to span over ℤ.
#[derive(Debug, Clone, PartialEq)]
pub struct Weight5Obstruction {
    /// `p³(e), p²(q(e)), p(e*e), p(e)*e`, then their mirrors with `q`.
    pub rows: Vec<TableRow>,
    /// Five times the coordinates of the first four rows in `ζ(2,3), ζ(3,2)`,
    /// fitted from the numeric values.
    pub matrix: [[i64; 2]; 4],
    pub matrix_mod2: [[u8; 2]; 4],
    pub rank_mod2: usize,
    /// Whether each mirrored row's image is the dual of its partner's.
    pub mirrors_are_dual: bool,
    /// `|row − M·(ζ(2,3), ζ(3,2))/5|` for each of the first four rows.
    pub residuals: [f64; 4],
}

/// The coordinates the fit is expected to find.
pub const WEIGHT5_MATRIX: [[i64; 2]; 4] = [[4, 6], [-1, 1], [6, 4], [9, 11]];

const COORD_RANGE: i64 = 30;

/// Rank over GF(2) by elimination.
pub fn rank_mod2(rows: &[[u8; 2]]) -> usize {
    let mut rows: Vec<[u8; 2]> = rows.iter().map(|r| [r[0] & 1, r[1] & 1]).collect();
    let mut rank = 0;
    for col in 0..2 {
        if let Some(pivot) = (rank..rows.len()).find(|&i| rows[i][col] == 1) {
            rows.swap(rank, pivot);
            for i in 0..rows.len() {
                if i != rank && rows[i][col] == 1 {
                    rows[i][0] ^= rows[rank][0];
                    rows[i][1] ^= rows[rank][1];
                }
            }
            rank += 1;
        }
    }
    rank
}

pub fn weight5_trees() -> Vec<Tree> {
    let e = || Tree::E;
    vec![
        Tree::p_power(3, e()),
        Tree::p_power(2, Tree::q(e())),
        Tree::p(Tree::join(e(), e())),
        Tree::join(Tree::p(e()), e()),
        Tree::q_power(3, e()),
        Tree::p(Tree::q_power(2, e())),
        Tree::q(Tree::join(e(), e())),
        Tree::join(Tree::q(e()), e()),
    ]
}

pub fn weight5_obstruction(tol: f64) -> Result<Weight5Obstruction, DecomposeError> {
    let rows: Vec<TableRow> =
        weight5_trees().into_iter().map(|tree| TableRow { image: word_image(&tree), tree }).collect();
    let mirrors_are_dual =
        (0..4).all(|i| rows[i].image.map_words(|w| w.reversed().complemented()) == rows[i + 4].image);
    let z23 = eval_mzv(&"2,3".parse()?, tol)?;
    let z32 = eval_mzv(&"3,2".parse()?, tol)?;
    let mut matrix = [[0i64; 2]; 4];
    let mut residuals = [0.0; 4];
    for (i, row) in rows.iter().take(4).enumerate() {
        let lhs = 5.0 * row.zeta_combination(tol)?;
        // nearest small integer point; ζ(2,3) and ζ(3,2) are far enough apart
        // that the best fit is unambiguous at this range
        let (a, b, r) = (-COORD_RANGE..=COORD_RANGE)
            .flat_map(|a| (-COORD_RANGE..=COORD_RANGE).map(move |b| (a, b)))
            .map(|(a, b)| (a, b, (lhs - a as f64 * z23 - b as f64 * z32).abs()))
            .min_by(|x, y| x.2.total_cmp(&y.2))
            .expect("nonempty search range");
        matrix[i] = [a, b];
        residuals[i] = r / 5.0;
    }
    let matrix_mod2 = matrix.map(|r| r.map(|x| x.rem_euclid(2) as u8));
    let rank = rank_mod2(&matrix_mod2);
    Ok(Weight5Obstruction { rows, matrix, matrix_mod2, rank_mod2: rank, mirrors_are_dual, residuals })
}

/// Coefficients of a decomposition are rational; report whether they happen
/// to be integral.
pub fn is_integral(s: &TreeSum) -> bool {
    s.iter().all(|(_, c)| c.is_integer())
}

/// Largest absolute coefficient, for reporting sizes.
pub fn max_abs_coefficient(s: &TreeSum) -> Rational {
    s.iter().map(|(_, c)| c.abs()).max().unwrap_or_else(Rational::zero)
}
