//! Syntax trees built from the rung `e`, the wedge operations `p`, `q` and the
//! commutative, associative join `*`, together with the word map `I`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num::{One, Zero};
use thiserror::Error;

use crate::rational::{format_rational, parse_rational, Rational};
use crate::words::{append_word, prepend_word, shuffle_sum, Word, WordSum};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("join node with {0} children; a join needs at least two")]
    DegenerateJoin(usize),
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("malformed tree sum line {line}: {text:?}")]
    MalformedSum { line: usize, text: String },
}

fn parse_error(position: usize, message: impl Into<String>) -> TreeError {
    TreeError::Parse { position, message: message.into() }
}

/// An element of the tree algebra.
///
/// The derived order (`E < P < Q < Join`, then children lexicographically)
/// is the total order used to sort join children in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tree {
    E,
    P(Box<Tree>),
    Q(Box<Tree>),
    Join(Vec<Tree>),
}

impl Tree {
    pub fn e() -> Tree {
        Tree::E
    }

    pub fn p(t: Tree) -> Tree {
        Tree::P(Box::new(t))
    }

    pub fn q(t: Tree) -> Tree {
        Tree::Q(Box::new(t))
    }

    /// `p` applied `k` times.
    pub fn p_power(k: usize, t: Tree) -> Tree {
        (0..k).fold(t, |acc, _| Tree::p(acc))
    }

    /// `q` applied `k` times.
    pub fn q_power(k: usize, t: Tree) -> Tree {
        (0..k).fold(t, |acc, _| Tree::q(acc))
    }

    /// Canonical join of two canonical trees.
    pub fn join(a: Tree, b: Tree) -> Tree {
        let mut children = Vec::new();
        for t in [a, b] {
            match t {
                Tree::Join(inner) => children.extend(inner),
                other => children.push(other),
            }
        }
        children.sort();
        Tree::Join(children)
    }

    /// `2·#e + #p + #q`.
    pub fn weight(&self) -> usize {
        match self {
            Tree::E => 2,
            Tree::P(t) | Tree::Q(t) => t.weight() + 1,
            Tree::Join(ts) => ts.iter().map(Tree::weight).sum(),
        }
    }

    pub fn is_canonical(&self) -> bool {
        match self {
            Tree::E => true,
            Tree::P(t) | Tree::Q(t) => t.is_canonical(),
            Tree::Join(ts) => {
                ts.len() >= 2
                    && ts.iter().all(|t| !matches!(t, Tree::Join(_)) && t.is_canonical())
                    && ts.windows(2).all(|pair| pair[0] <= pair[1])
            }
        }
    }
}

/// Flattens nested joins and sorts join children.
pub fn canonicalize(t: &Tree) -> Result<Tree, TreeError> {
    Ok(match t {
        Tree::E => Tree::E,
        Tree::P(c) => Tree::p(canonicalize(c)?),
        Tree::Q(c) => Tree::q(canonicalize(c)?),
        Tree::Join(ts) => {
            if ts.len() < 2 {
                return Err(TreeError::DegenerateJoin(ts.len()));
            }
            let mut children = Vec::with_capacity(ts.len());
            for child in ts {
                match canonicalize(child)? {
                    Tree::Join(inner) => children.extend(inner),
                    other => children.push(other),
                }
            }
            children.sort();
            Tree::Join(children)
        }
    })
}

pub fn tree_weight(t: &Tree) -> usize {
    t.weight()
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tree::E => f.write_str("e"),
            Tree::P(t) => write!(f, "p({t})"),
            Tree::Q(t) => write!(f, "q({t})"),
            Tree::Join(ts) => {
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        f.write_str("*")?;
                    }
                    // a join child is never itself a join in canonical form
                    if matches!(t, Tree::Join(_)) {
                        write!(f, "({t})")?;
                    } else {
                        write!(f, "{t}")?;
                    }
                }
                Ok(())
            }
        }
    }
}

/// Recursive-descent parser for `t ::= e | p(t) | q(t) | t * t | (t)`.
struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, want: u8) -> Result<(), TreeError> {
        match self.peek() {
            Some(c) if c == want => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => Err(parse_error(self.pos, format!("expected '{}', found '{}'", want as char, c as char))),
            None => Err(parse_error(self.pos, format!("expected '{}', found end of input", want as char))),
        }
    }

    fn expr(&mut self) -> Result<Tree, TreeError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = Tree::join(acc, rhs);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Tree, TreeError> {
        match self.peek() {
            Some(b'e') => {
                self.pos += 1;
                Ok(Tree::E)
            }
            Some(op @ (b'p' | b'q')) => {
                self.pos += 1;
                self.expect(b'(')?;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(if op == b'p' { Tree::p(inner) } else { Tree::q(inner) })
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(b')') => Err(parse_error(self.pos, "unbalanced ')'")),
            Some(c) => Err(parse_error(self.pos, format!("unknown token '{}'", char_at(self.src, self.pos, c)))),
            None => Err(parse_error(self.pos, "expected a tree, found end of input")),
        }
    }
}

fn char_at(src: &[u8], pos: usize, fallback: u8) -> char {
    std::str::from_utf8(&src[pos..]).ok().and_then(|s| s.chars().next()).unwrap_or(fallback as char)
}

/// Parses a tree expression into canonical form.
pub fn parse_tree(expr: &str) -> Result<Tree, TreeError> {
    let mut parser = Parser { src: expr.as_bytes(), pos: 0 };
    let tree = parser.expr()?;
    match parser.peek() {
        None => Ok(tree),
        Some(b')') => Err(parse_error(parser.pos, "unbalanced ')'")),
        Some(c) => Err(parse_error(parser.pos, format!("unexpected '{}'", char_at(parser.src, parser.pos, c)))),
    }
}

impl FromStr for Tree {
    type Err = TreeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_tree(s)
    }
}

/// A ℚ-linear combination of canonical trees.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TreeSum {
    terms: BTreeMap<Tree, Rational>,
}

impl TreeSum {
    pub fn zero() -> Self {
        TreeSum::default()
    }

    pub fn from_tree(t: Tree) -> Self {
        Self::term(Rational::one(), t)
    }

    pub fn term(coeff: Rational, t: Tree) -> Self {
        let mut s = TreeSum::zero();
        s.add_term(coeff, t);
        s
    }

    pub fn add_term(&mut self, coeff: Rational, t: Tree) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(t.clone()).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&t);
        }
    }

    pub fn add_scaled(&mut self, scale: &Rational, other: &TreeSum) {
        for (t, c) in &other.terms {
            self.add_term(scale * c, t.clone());
        }
    }

    pub fn scaled(&self, scale: &Rational) -> TreeSum {
        let mut out = TreeSum::zero();
        out.add_scaled(scale, self);
        out
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

    pub fn coefficient(&self, t: &Tree) -> Rational {
        self.terms.get(t).cloned().unwrap_or_else(Rational::zero)
    }

    /// Terms, greatest tree first.
    pub fn iter(&self) -> impl Iterator<Item = (&Tree, &Rational)> {
        self.terms.iter().rev()
    }

    pub fn homogeneous_weight(&self) -> Option<usize> {
        let mut weights = self.terms.keys().map(Tree::weight);
        let first = weights.next()?;
        weights.all(|w| w == first).then_some(first)
    }

    fn map_trees(&self, f: impl Fn(Tree) -> Tree) -> TreeSum {
        let mut out = TreeSum::zero();
        for (t, c) in &self.terms {
            out.add_term(c.clone(), f(t.clone()));
        }
        out
    }

    /// Applies `p` termwise.
    pub fn prepend(&self) -> TreeSum {
        self.map_trees(Tree::p)
    }

    /// Applies `q` termwise.
    pub fn append(&self) -> TreeSum {
        self.map_trees(Tree::q)
    }

    /// Bilinear join.
    pub fn join(&self, other: &TreeSum) -> TreeSum {
        let mut out = TreeSum::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(ca * cb, Tree::join(a.clone(), b.clone()));
            }
        }
        out
    }
}

impl fmt::Display for TreeSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return writeln!(f, "0");
        }
        for (t, c) in self.iter() {
            writeln!(f, "{} {}", format_rational(c), t)?;
        }
        Ok(())
    }
}

impl FromStr for TreeSum {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = TreeSum::zero();
        for (idx, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line == "0" {
                continue;
            }
            let malformed = || TreeError::MalformedSum { line: idx + 1, text: line.to_string() };
            let (coeff, expr) = line.split_once(char::is_whitespace).ok_or_else(malformed)?;
            let coeff = parse_rational(coeff).ok_or_else(malformed)?;
            out.add_term(coeff, parse_tree(expr)?);
        }
        Ok(out)
    }
}

/// Memoized evaluation of `I` on subtrees.
///
/// `I(e) = 01`, `I(p t) = 0·I(t)`, `I(q t) = I(t)·1`, and a join is sent to
/// the shuffle of its children's images.
#[derive(Debug, Default)]
pub struct WordImage {
    memo: HashMap<Tree, WordSum>,
}

impl WordImage {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn of_tree(&mut self, t: &Tree) -> WordSum {
        if let Some(hit) = self.memo.get(t) {
            return hit.clone();
        }
        let out = match t {
            Tree::E => WordSum::from_word(Word::zeros_then_one(1)),
            Tree::P(c) => prepend_word(&self.of_tree(c)),
            Tree::Q(c) => append_word(&self.of_tree(c)),
            Tree::Join(ts) => {
                let mut acc = WordSum::from_word(Word::empty());
                for child in ts {
                    let image = self.of_tree(child);
                    acc = shuffle_sum(&acc, &image);
                }
                acc
            }
        };
        self.memo.insert(t.clone(), out.clone());
        out
    }

    pub fn of_sum(&mut self, s: &TreeSum) -> WordSum {
        let mut out = WordSum::zero();
        for (t, c) in &s.terms {
            let image = self.of_tree(t);
            out.add_scaled(c, &image);
        }
        out
    }
}

/// `I` on a single tree.
pub fn word_image(t: &Tree) -> WordSum {
    WordImage::new().of_tree(t)
}

/// `I` extended linearly.
pub fn word_image_sum(s: &TreeSum) -> WordSum {
    WordImage::new().of_sum(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::words::shuffle;

    fn t(s: &str) -> Tree {
        parse_tree(s).unwrap()
    }

    fn ws(terms: &[(i64, &str)]) -> WordSum {
        let mut s = WordSum::zero();
        for (c, w) in terms {
            s.add_term(int(*c), w.parse().unwrap());
        }
        s
    }

    #[test]
    fn canonical_forms() {
        let nested = Tree::Join(vec![Tree::Join(vec![Tree::E, Tree::E]), Tree::E]);
        assert_eq!(canonicalize(&nested).unwrap(), Tree::Join(vec![Tree::E, Tree::E, Tree::E]));
        assert_eq!(t("e*p(e)"), t("p(e)*e"));
        assert_eq!(t("p(q(e))"), Tree::p(Tree::q(Tree::E)));
        assert_eq!(canonicalize(&t("p(q(e))")).unwrap(), t("p(q(e))"));
        assert_eq!(canonicalize(&Tree::Join(vec![Tree::E])), Err(TreeError::DegenerateJoin(1)));
        assert!(t("(e*q(e))*(p(e)*e)").is_canonical());
        assert!(!nested.is_canonical());
    }

    #[test]
    fn parser() {
        assert_eq!(t("p(e*e)"), Tree::p(Tree::Join(vec![Tree::E, Tree::E])));
        assert_eq!(t("q(e)*p(e)"), Tree::Join(vec![Tree::p(Tree::E), Tree::q(Tree::E)]));
        assert_eq!(t(" p ( e ) * ( e ) "), t("p(e)*e"));
        let err = |s: &str| match parse_tree(s) {
            Err(TreeError::Parse { position, .. }) => position,
            other => panic!("expected parse error for {s:?}, got {other:?}"),
        };
        assert_eq!(err("e*"), 2);
        assert_eq!(err("p(e"), 3);
        assert_eq!(err("e)"), 1);
        assert_eq!(err("x"), 0);
        assert_eq!(err("e e"), 2);
        assert_eq!(err(""), 0);
        assert_eq!(err("p e"), 2);
    }

    #[test]
    fn render_reparses() {
        for s in ["e", "p(e*e)", "q(e)*p(e)", "p(q(e)*p(e))*e*e", "q(q(p(e)))"] {
            let tree = t(s);
            assert_eq!(t(&tree.to_string()), tree);
        }
        assert_eq!(t("q(e)*p(e)").to_string(), "p(e)*q(e)");
    }

    #[test]
    fn weights() {
        assert_eq!(tree_weight(&t("e")), 2);
        assert_eq!(tree_weight(&t("p(q(e))")), 4);
        assert_eq!(tree_weight(&t("q(e)*p(e)")), 6);
    }

    #[test]
    fn image_examples() {
        assert_eq!(word_image(&t("p(p(p(e)))")), ws(&[(1, "00001")]));
        assert_eq!(word_image(&t("p(e*e)")), ws(&[(2, "00101"), (4, "00011")]));
        assert_eq!(word_image(&t("p(e)*e")), ws(&[(1, "01001"), (3, "00101"), (6, "00011")]));
        assert_eq!(word_image(&t("q(e)*p(e)")), shuffle(&"011".parse().unwrap(), &"001".parse().unwrap()));
    }

    #[test]
    fn worked_example_identity() {
        let mut s = TreeSum::zero();
        s.add_term(ratio(1, 2), t("q(e*e)"));
        s.add_term(int(-2), t("q(q(p(e)))"));
        assert_eq!(word_image_sum(&s), ws(&[(1, "01011")]));
    }

    #[test]
    fn tree_sum_ops_and_text() {
        let mut s = TreeSum::zero();
        s.add_term(ratio(1, 2), t("q(e*e)"));
        s.add_term(int(-2), t("q(q(p(e)))"));
        assert_eq!(s.to_string(), "1/2 q(e*e)\n-2 q(q(p(e)))\n");
        assert_eq!(s.to_string().parse::<TreeSum>().unwrap(), s);
        assert_eq!(s.homogeneous_weight(), Some(5));
        let e = TreeSum::from_tree(Tree::E);
        assert_eq!(e.join(&e), TreeSum::from_tree(t("e*e")));
        assert_eq!(e.prepend().append(), TreeSum::from_tree(t("q(p(e))")));
        assert!("1/2".parse::<TreeSum>().is_err());
    }
}
