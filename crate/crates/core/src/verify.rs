//! Named invariant suites, runnable from the command line.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decompose::{decompose_word, unit_fraction_certificate, weight5_obstruction};
use crate::lyndon::{chen_fox_lyndon, is_lyndon, lyndon_basis_decompose, radford_expand};
use crate::numerics::{bernoulli, eval_word, eval_word_sum, rational_to_f64, Complex64};
use crate::par::{self, ExecMode};
use crate::rational::{factorial, int, ratio, Rational};
use crate::trees::word_image_sum;
use crate::words::{
    append_word, composition_from_word, dual_word, prepend_word, shuffle, shuffle_sum, word_from_composition,
    Composition, Word, WordSum,
};

const SEED: u64 = 0x6d7a_7667;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Codec,
    Shuffle,
    Lyndon,
    Pipeline,
    Weight5,
    Certificates,
    Numeric,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Codec,
        Suite::Shuffle,
        Suite::Lyndon,
        Suite::Pipeline,
        Suite::Weight5,
        Suite::Certificates,
        Suite::Numeric,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Codec => "codec",
            Suite::Shuffle => "shuffle",
            Suite::Lyndon => "lyndon",
            Suite::Pipeline => "pipeline",
            Suite::Weight5 => "weight5",
            Suite::Certificates => "certificates",
            Suite::Numeric => "numeric",
        }
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL.into_iter().find(|suite| suite.name() == s).ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        writeln!(f, "suite {}: {}", self.suite.name(), if self.passed() { "OK" } else { "FAILED" })
    }
}

fn check(name: &str, failures: Vec<String>, total: usize) -> Check {
    let passed = failures.is_empty();
    let detail = if passed {
        format!("{total} cases")
    } else {
        format!("{} of {total} failed, first: {}", failures.len(), failures[0])
    };
    Check { name: name.to_string(), passed, detail }
}

fn admissible_up_to(max: usize) -> Vec<Word> {
    (2..=max).flat_map(Word::admissible_of_weight).collect()
}

fn all_words_up_to(min: usize, max: usize) -> Vec<Word> {
    (min..=max).flat_map(Word::all_of_length).collect()
}

fn random_admissible(rng: &mut ChaCha8Rng, weight: usize) -> Word {
    let mut w = Word::empty().pushed(0);
    for _ in 1..weight - 1 {
        w = w.pushed(rng.gen_range(0..2));
    }
    w.pushed(1)
}

fn random_word(rng: &mut ChaCha8Rng, len: usize) -> Word {
    (0..len).fold(Word::empty(), |w, _| w.pushed(rng.gen_range(0..2)))
}

pub fn run_suite(suite: Suite, mode: ExecMode) -> SuiteReport {
    let checks = match suite {
        Suite::Codec => codec_suite(mode),
        Suite::Shuffle => shuffle_suite(mode),
        Suite::Lyndon => lyndon_suite(mode),
        Suite::Pipeline => vec![pipeline_check(mode, 8)],
        Suite::Weight5 => weight5_suite(),
        Suite::Certificates => certificates_suite(),
        Suite::Numeric => numeric_suite(mode),
    };
    SuiteReport { suite, checks }
}

fn codec_suite(mode: ExecMode) -> Vec<Check> {
    let words = admissible_up_to(10);
    let failures: Vec<String> = par::map(mode, &words, |w| {
        let c = composition_from_word(w).ok()?;
        (word_from_composition(&c) != *w || c.depth() != w.depth()).then(|| w.to_string())
    })
    .into_iter()
    .flatten()
    .collect();
    let counts_ok: Vec<String> = (2..=10)
        .filter(|&n| Composition::all_of_weight(n).len() != 1 << (n - 2))
        .map(|n| format!("weight {n} count"))
        .collect();
    let dual: Vec<String> = words
        .iter()
        .filter(|w| {
            let d = dual_word(w).unwrap();
            dual_word(&d).unwrap() != **w || w.depth() + d.depth() != w.len()
        })
        .map(Word::to_string)
        .collect();
    vec![
        check("word/composition round trip, weight <= 10", failures, words.len()),
        check("2^(n-2) compositions of weight n", counts_ok, 9),
        check("duality is an involution with complementary depth", dual, words.len()),
    ]
}

fn shuffle_suite(mode: ExecMode) -> Vec<Check> {
    let pairs: Vec<(Word, Word)> =
        all_words_up_to(0, 5).iter().flat_map(|u| all_words_up_to(0, 5).into_iter().map(move |v| (*u, v))).collect();
    let mass: Vec<String> = par::map(mode, &pairs, |(u, v)| {
        let s = shuffle(u, v);
        let expected = binomial(u.len() + v.len(), u.len());
        (s.total_coefficient() != expected || s.homogeneous_weight().is_some_and(|n| n != u.len() + v.len()))
            .then(|| format!("{u:?} ⧢ {v:?}"))
    })
    .into_iter()
    .flatten()
    .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let triples: Vec<[Word; 3]> = (0..200)
        .map(|_| {
            let mut pick = || {
                let len = rng.gen_range(1..=5);
                random_word(&mut rng, len)
            };
            [pick(), pick(), pick()]
        })
        .collect();
    let algebra: Vec<String> = par::map(mode, &triples, |[a, b, c]| {
        let (sa, sb, sc) = (WordSum::from_word(*a), WordSum::from_word(*b), WordSum::from_word(*c));
        let comm = shuffle_sum(&sa, &sb) == shuffle_sum(&sb, &sa);
        let assoc = shuffle_sum(&shuffle_sum(&sa, &sb), &sc) == shuffle_sum(&sa, &shuffle_sum(&sb, &sc));
        (!(comm && assoc)).then(|| format!("{a}, {b}, {c}"))
    })
    .into_iter()
    .flatten()
    .collect();

    let admissible = admissible_up_to(8);
    let closure: Vec<String> = par::map(mode, &admissible, |u| {
        let s = WordSum::from_word(*u);
        let mut ok = prepend_word(&s).all_admissible() && append_word(&s).all_admissible();
        for v in admissible.iter().filter(|v| v.len() + u.len() <= 8) {
            ok &= shuffle(u, v).all_admissible();
        }
        (!ok).then(|| u.to_string())
    })
    .into_iter()
    .flatten()
    .collect();

    vec![
        check("coefficient mass is binomial, |u|,|v| <= 5", mass, pairs.len()),
        check("commutative and associative on random triples", algebra, triples.len()),
        check("admissibility closed under p, q and shuffle, weight <= 8", closure, admissible.len()),
    ]
}

fn binomial(n: usize, k: usize) -> Rational {
    Rational::from_integer(factorial(n as u64) / (factorial(k as u64) * factorial((n - k) as u64)))
}

fn lyndon_suite(mode: ExecMode) -> Vec<Check> {
    let words = all_words_up_to(1, 8);
    let radford: Vec<String> = par::map(mode, &words, |w| {
        let r = radford_expand(&chen_fox_lyndon(w).ok()?);
        let leading_ok = r.leading() == Some((w, &int(1)));
        (!(leading_ok && r.all_coefficients_positive())).then(|| w.to_string())
    })
    .into_iter()
    .flatten()
    .collect();

    let admissible = admissible_up_to(8);
    let rebuild: Vec<String> = par::map(mode, &admissible, |w| {
        let d = lyndon_basis_decompose(w).ok()?;
        let shapes_ok = d.iter().all(|(m, _)| m.words().iter().all(|l| l.len() >= 2 && l.is_admissible()));
        (!(shapes_ok && d.expand() == WordSum::from_word(*w))).then(|| w.to_string())
    })
    .into_iter()
    .flatten()
    .collect();

    let long = all_words_up_to(2, 10);
    let lemmas: Vec<String> = par::map(mode, &long, |w| {
        let n = w.len();
        let lyndon = is_lyndon(w).unwrap_or(false);
        let len2 = !lyndon || w.is_admissible();
        let ends = !lyndon
            || n < 3
            || (w.letter(0) == 0 && w.letter(1) == 0)
            || (w.letter(n - 2) == 1 && w.letter(n - 1) == 1);
        let factors =
            !w.is_admissible() || chen_fox_lyndon(w).is_ok_and(|f| f.factors().iter().all(|(l, _)| l.len() >= 2));
        (!(len2 && ends && factors)).then(|| w.to_string())
    })
    .into_iter()
    .flatten()
    .collect();

    vec![
        check("Radford triangularity, all words of length <= 8", radford, words.len()),
        check("basis decomposition reconstructs, weight <= 8", rebuild, admissible.len()),
        check("Lyndon shape lemmas, length <= 10", lemmas, long.len()),
    ]
}

/// `I(decompose_word(w)) = 1·w` for every admissible word of weight `2..=max`.
pub fn pipeline_check(mode: ExecMode, max: usize) -> Check {
    let words = admissible_up_to(max);
    let failures: Vec<String> = par::map(mode, &words, |w| match decompose_word(w) {
        Ok(d) if word_image_sum(&d) == WordSum::from_word(*w) && d.homogeneous_weight() == Some(w.len()) => None,
        Ok(_) => Some(format!("{w}: image mismatch")),
        Err(e) => Some(format!("{w}: {e}")),
    })
    .into_iter()
    .flatten()
    .collect();
    check(&format!("I(decompose(w)) = w, weight 2..={max}"), failures, words.len())
}

/// The eight rows of the weight-5 table, as printed.
pub const WEIGHT5_TABLE: [(&str, &str); 8] = [
    ("p(p(p(e)))", "1 00001"),
    ("p(p(q(e)))", "1 00011"),
    ("p(e*e)", "2 00101 + 4 00011"),
    ("p(e)*e", "1 01001 + 3 00101 + 6 00011"),
    ("q(q(q(e)))", "1 01111"),
    ("p(q(q(e)))", "1 00111"),
    ("q(e*e)", "2 01011 + 4 00111"),
    ("q(e)*e", "1 01101 + 3 01011 + 6 00111"),
];

pub fn format_inline(s: &WordSum) -> String {
    let parts: Vec<String> = s.iter().map(|(w, c)| format!("{} {}", crate::rational::format_rational(c), w)).collect();
    parts.join(" + ")
}

fn weight5_suite() -> Vec<Check> {
    let obstruction = match weight5_obstruction(1e-12) {
        Ok(o) => o,
        Err(e) => return vec![Check { name: "weight-5 obstruction".into(), passed: false, detail: e.to_string() }],
    };
    let table: Vec<String> = obstruction
        .rows
        .iter()
        .zip(WEIGHT5_TABLE)
        .filter(|(row, (tree, image))| {
            tree.parse().ok() != Some(row.tree.clone()) || format_inline(&row.image) != *image
        })
        .map(|(row, _)| format!("{}: {}", row.tree, format_inline(&row.image)))
        .collect();
    let expected_mod2 = [[0, 0], [1, 1], [0, 0], [1, 1]];
    let worst = obstruction.residuals.iter().cloned().fold(0.0, f64::max);
    vec![
        check("table images", table, 8),
        Check {
            name: "mirrored rows are dual".into(),
            passed: obstruction.mirrors_are_dual,
            detail: format!("{}", obstruction.mirrors_are_dual),
        },
        Check {
            name: "matrix mod 2 has rank 1".into(),
            passed: obstruction.matrix_mod2 == expected_mod2 && obstruction.rank_mod2 == 1,
            detail: format!("{:?}, rank {}", obstruction.matrix_mod2, obstruction.rank_mod2),
        },
        Check {
            name: "basis change holds numerically".into(),
            passed: worst <= 1e-6,
            detail: format!("max residual {worst:.3e}"),
        },
    ]
}

fn certificates_suite() -> Vec<Check> {
    [2u64, 3, 5, 7, 11, 13]
        .into_iter()
        .map(|p| {
            let outcome = unit_fraction_certificate(p).and_then(|c| Ok((c.check()?, c.evaluate()?)));
            match outcome {
                Ok((ok, value)) => Check {
                    name: format!("certificate 1/{p}"),
                    passed: ok,
                    detail: format!("evaluates to {}", crate::rational::format_rational(&value)),
                },
                Err(e) => Check { name: format!("certificate 1/{p}"), passed: false, detail: e.to_string() },
            }
        })
        .collect()
}

fn numeric_suite(mode: ExecMode) -> Vec<Check> {
    let tol = 1e-10;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let pairs: Vec<(Word, Word)> = (0..30)
        .map(|_| {
            let a = rng.gen_range(2..=6);
            let b = rng.gen_range(2..=8 - a);
            (random_admissible(&mut rng, a), random_admissible(&mut rng, b))
        })
        .collect();
    let homomorphism: Vec<String> = par::map(mode, &pairs, |(u, v)| {
        let lhs = eval_word(u, tol).ok()?.value * eval_word(v, tol).ok()?.value;
        let rhs = eval_word_sum(&shuffle(u, v), tol).ok()?.value;
        ((lhs - rhs).norm() > 1e-6).then(|| format!("{u} ⧢ {v}: {:.3e}", (lhs - rhs).norm()))
    })
    .into_iter()
    .flatten()
    .collect();

    let small = admissible_up_to(6);
    let duality: Vec<String> = par::map(mode, &small, |w| {
        let v = eval_word(w, tol).ok()?.value;
        let d = eval_word(&dual_word(w).ok()?, tol).ok()?.value;
        let sign = if w.len() % 2 == 0 { 1.0 } else { -1.0 };
        ((v - d * sign).norm() > 1e-6).then(|| w.to_string())
    })
    .into_iter()
    .flatten()
    .collect();

    let bern: Vec<String> = (1..=4u32)
        .filter_map(|k| {
            let v = eval_word(&Word::zeros_then_one(2 * k as usize - 1), tol).ok()?.value;
            let approx = 2.0 * rational_to_f64(&Rational::from_integer(factorial(2 * k as u64))) * v;
            let exact = rational_to_f64(&bernoulli(2 * k).ok()?);
            ((approx - Complex64::new(exact, 0.0)).norm() > 1e-8).then(|| format!("B_{}", 2 * k))
        })
        .collect();

    let all_small: Vec<Composition> = (2..=6).flat_map(Composition::all_of_weight).collect();
    let sample: Vec<Composition> = all_small.choose_multiple(&mut rng, 20).cloned().collect();
    let soundness: Vec<String> = par::map(mode, &sample, |c| {
        let w = word_from_composition(c);
        let d = decompose_word(&w).ok()?;
        let lhs = eval_word_sum(&word_image_sum(&d), tol).ok()?.value;
        let rhs = eval_word(&w, tol).ok()?.value;
        ((lhs - rhs).norm() > 1e-6).then(|| c.to_string())
    })
    .into_iter()
    .flatten()
    .collect();

    let exact: Vec<String> = {
        let one24 = eval_word(&"01".parse().unwrap(), tol).map(|v| v.value.re).unwrap_or(f64::NAN);
        let rung2 = eval_word(&"0011".parse().unwrap(), tol).map(|v| v.value.re).unwrap_or(f64::NAN);
        let mut out = Vec::new();
        if (one24 - rational_to_f64(&ratio(1, 24))).abs() > 1e-8 {
            out.push(format!("c(G(e)) = {one24}"));
        }
        if (rung2 - rational_to_f64(&ratio(1, 5760))).abs() > 1e-8 {
            out.push(format!("L(0011) = {rung2}"));
        }
        out
    };

    vec![
        check("shuffle homomorphism on 30 random pairs", homomorphism, pairs.len()),
        check("duality sign law, weight <= 6", duality, small.len()),
        check("Bernoulli cross-check, k = 1..4", bern, 4),
        check("decompositions agree numerically, 20 compositions", soundness, sample.len()),
        check("ladder values 1/24 and 1/5760", exact, 2),
    ]
}
