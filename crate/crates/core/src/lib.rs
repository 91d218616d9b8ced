//! Kontsevich graph weights and multiple zeta values in exact arithmetic.
//!
//! Trees built from `e`, `p`, `q` and `*` map to binary-word combinations
//! under [`trees::word_image`] and to graphs under [`graphs::graph_of_tree`].
//! [`decompose::decompose_word`] inverts the word map, which expresses every
//! normalized MZV as a rational combination of graph weights.

pub mod cli;
pub mod decompose;
pub mod graphs;
pub mod lyndon;
pub mod numerics;
pub mod par;
pub mod rational;
pub mod trees;
pub mod verify;
pub mod words;

pub use decompose::{decompose_mzv, decompose_word, unit_fraction_certificate, Certificate, MzvDecomposition};
pub use graphs::{graph_of_tree, KGraph};
pub use numerics::{eval_mzv, eval_word, MzvValue};
pub use rational::Rational;
pub use trees::{parse_tree, word_image, Tree, TreeSum};
pub use words::{shuffle, Composition, Word, WordSum};
