//! Command-line front end.
//!
//! Results go to `out`, diagnostics to `err`. Exit status is 0 on success,
//! 1 when a check or computation fails, and 2 on usage or parse errors.

use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use crate::decompose::{decompose_word, unit_fraction_certificate, DecomposeError, MzvDecomposition};
use crate::graphs::{emit_graph, graph_json_value, graph_of_tree, GraphFormat};
use crate::lyndon::{chen_fox_lyndon, lyndon_basis_decompose, LyndonError};
use crate::numerics::{eval_mzv_bounded, eval_word, NumericsError, DEFAULT_TOLERANCE};
use crate::par::ExecMode;
use crate::rational::format_rational;
use crate::trees::{parse_tree, word_image, TreeError, TreeSum};
use crate::verify::{run_suite, Suite};
use crate::words::{composition_from_word, shuffle, word_from_composition, Composition, Word, WordError, WordSum};

const SCHEMA: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "mzvgraph", version, about = "Graph weights and multiple zeta values in exact arithmetic")]
pub struct Cli {
    /// Output format for results.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub output: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ArgKind {
    Composition,
    Word,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphFormatArg {
    Dot,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encode a composition such as 1,2,2 as a binary word.
    Word { composition: String },
    /// Decode an admissible binary word into a composition.
    Composition { word: String },
    /// Shuffle product of two binary words.
    Shuffle { left: String, right: String },
    /// Lyndon factorization or Lyndon basis decomposition.
    Lyndon {
        #[command(subcommand)]
        action: LyndonAction,
    },
    /// Operations on tree expressions.
    Tree {
        #[command(subcommand)]
        action: TreeAction,
    },
    /// Emit the graph of a tree expression.
    Graph {
        expr: String,
        #[arg(long, value_enum, default_value_t = GraphFormatArg::Dot)]
        format: GraphFormatArg,
    },
    /// Numeric value of an MZV and of its normalized word value.
    Eval {
        input: String,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        /// Force how the argument is read.
        #[arg(long = "as", value_enum)]
        kind: Option<ArgKind>,
    },
    /// Express a normalized MZV as a combination of graph weights.
    Decompose {
        input: String,
        #[arg(long = "as", value_enum)]
        kind: Option<ArgKind>,
    },
    /// Integer certificate for 1/p as a combination of graph weights.
    Certify { prime: u64 },
    /// Run a named invariant suite.
    Verify {
        #[arg(long)]
        suite: Suite,
        /// Run on the calling thread only.
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum LyndonAction {
    /// Chen–Fox–Lyndon factorization of any word.
    Factor { word: String },
    /// Decomposition of an admissible word over products of Lyndon words.
    Decomp { word: String },
}

#[derive(Debug, Subcommand)]
pub enum TreeAction {
    /// Print the word image I(t).
    Eval { expr: String },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Lyndon(#[from] LyndonError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerics(NumericsError::ToleranceUnachievable { .. }) | CliError::Failed(_) => 1,
            CliError::Decompose(DecomposeError::NotIntegral(_) | DecomposeError::NoExactValue(_)) => 1,
            _ => 2,
        }
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Reads an argument as a composition or a word; a comma or a digit of 2 or
/// more means composition unless `kind` says otherwise.
pub fn classify(input: &str, kind: Option<ArgKind>) -> Result<(Composition, Word), CliError> {
    let looks_like_composition = input.contains(',') || input.chars().any(|c| c.is_ascii_digit() && c >= '2');
    let kind = kind.unwrap_or(if looks_like_composition { ArgKind::Composition } else { ArgKind::Word });
    match kind {
        ArgKind::Composition => {
            let c: Composition = input.parse()?;
            let w = word_from_composition(&c);
            Ok((c, w))
        }
        ArgKind::Word => {
            let w: Word = input.parse()?;
            if w.is_empty() {
                return Err(WordError::Empty.into());
            }
            let c = composition_from_word(&w)?;
            Ok((c, w))
        }
    }
}

fn parse_word(input: &str) -> Result<Word, CliError> {
    let w: Word = input.parse()?;
    if w.is_empty() {
        return Err(WordError::Empty.into());
    }
    Ok(w)
}

fn word_terms(s: &WordSum) -> Value {
    s.iter().map(|(w, c)| json!({"coeff": format_rational(c), "word": w.to_string()})).collect()
}

fn tree_terms(s: &TreeSum) -> Value {
    s.iter().map(|(t, c)| json!({"coeff": format_rational(c), "tree": t.to_string()})).collect()
}

fn with_schema(body: Value) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert("schema".into(), json!(SCHEMA));
    if let Value::Object(fields) = body {
        obj.extend(fields);
    }
    Value::Object(obj)
}

/// `x` to 12 significant digits.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-3..12).contains(&exponent) {
        format!("{:.*}", (11 - exponent) as usize, x)
    } else {
        format!("{x:.11e}")
    }
}

fn emit(
    out: &mut dyn Write,
    format: OutputFormat,
    text: impl FnOnce() -> String,
    json: impl FnOnce() -> Value,
) -> Result<(), CliError> {
    let rendered = match format {
        OutputFormat::Text => text(),
        OutputFormat::Json => {
            let mut s = serde_json::to_string(&with_schema(json())).expect("json value serializes");
            s.push('\n');
            s
        }
    };
    out.write_all(rendered.as_bytes()).map_err(|e| CliError::Failed(format!("write failed: {e}")))
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let fmt = cli.output;
    match &cli.command {
        Command::Word { composition } => {
            let c: Composition = composition.parse()?;
            let w = word_from_composition(&c);
            emit(out, fmt, || format!("{w}\n"), || json!({"composition": c.to_string(), "word": w.to_string()}))?;
        }
        Command::Composition { word } => {
            let w = parse_word(word)?;
            let c = composition_from_word(&w)?;
            emit(out, fmt, || format!("{c}\n"), || json!({"word": w.to_string(), "composition": c.to_string()}))?;
        }
        Command::Shuffle { left, right } => {
            let (u, v) = (parse_word(left)?, parse_word(right)?);
            let s = shuffle(&u, &v);
            emit(
                out,
                fmt,
                || s.to_string(),
                || json!({"left": u.to_string(), "right": v.to_string(), "terms": word_terms(&s)}),
            )?;
        }
        Command::Lyndon { action: LyndonAction::Factor { word } } => {
            let w = parse_word(word)?;
            let f = chen_fox_lyndon(&w)?;
            let factors: Value =
                f.factors().iter().map(|(l, k)| json!({"lyndon": l.to_string(), "power": k})).collect();
            emit(out, fmt, || format!("{f}\n"), || json!({"word": w.to_string(), "factors": factors}))?;
        }
        Command::Lyndon { action: LyndonAction::Decomp { word } } => {
            let w = parse_word(word)?;
            w.require_admissible()?;
            let d = lyndon_basis_decompose(&w)?;
            let terms: Value = d
                .iter()
                .map(|(m, c)| {
                    let words: Vec<String> = m.words().iter().map(Word::to_string).collect();
                    json!({"coeff": format_rational(c), "lyndon": words})
                })
                .collect();
            emit(out, fmt, || d.to_string(), || json!({"word": w.to_string(), "terms": terms}))?;
        }
        Command::Tree { action: TreeAction::Eval { expr } } => {
            let t = parse_tree(expr)?;
            let image = word_image(&t);
            emit(
                out,
                fmt,
                || image.to_string(),
                || json!({"tree": t.to_string(), "weight": t.weight(), "image": word_terms(&image)}),
            )?;
        }
        Command::Graph { expr, format } => {
            let t = parse_tree(expr)?;
            let g = graph_of_tree(&t);
            let text = match format {
                GraphFormatArg::Dot => emit_graph(&g, GraphFormat::Dot),
                GraphFormatArg::Json => {
                    serde_json::to_string(&with_schema(graph_json_value(&g))).expect("json value serializes")
                }
            };
            writeln!(out, "{}", text.trim_end()).map_err(|e| CliError::Failed(format!("write failed: {e}")))?;
        }
        Command::Eval { input, tol, kind } => {
            let (c, w) = classify(input, *kind)?;
            let (zeta, zeta_err) = eval_mzv_bounded(&c, *tol)?;
            let l = eval_word(&w, *tol)?;
            emit(
                out,
                fmt,
                || {
                    format!(
                        "zeta({c}) = {}  (error <= {:.1e})\nL({w}) = {} + {} i  (error <= {:.1e})\n",
                        sig12(zeta),
                        zeta_err,
                        sig12(l.value.re),
                        sig12(l.value.im),
                        l.abs_error_bound
                    )
                },
                || {
                    json!({
                        "composition": c.to_string(),
                        "word": w.to_string(),
                        "zeta": {"value": zeta, "error_bound": zeta_err},
                        "normalized": {"re": l.value.re, "im": l.value.im, "error_bound": l.abs_error_bound},
                    })
                },
            )?;
        }
        Command::Decompose { input, kind } => {
            let (c, w) = classify(input, *kind)?;
            let d = MzvDecomposition { composition: c, word: w, trees: decompose_word(&w)? };
            emit(
                out,
                fmt,
                || d.to_string(),
                || {
                    json!({
                        "composition": d.composition.to_string(),
                        "word": d.word.to_string(),
                        "trees": tree_terms(&d.trees),
                        "report": d.report(),
                    })
                },
            )?;
        }
        Command::Certify { prime } => {
            let cert = unit_fraction_certificate(*prime)?;
            let ok = cert.check()?;
            let status = if ok { "OK" } else { "FAILED" };
            emit(
                out,
                fmt,
                || format!("{}\nCHECK {status} 1/{prime}\n", cert.to_json()),
                || json!({"certificate": cert.to_json(), "check": status}),
            )?;
            return Ok(if ok { 0 } else { 1 });
        }
        Command::Verify { suite, sequential } => {
            let mode = if *sequential { ExecMode::Sequential } else { ExecMode::Parallel };
            let report = run_suite(*suite, mode);
            emit(
                out,
                fmt,
                || report.to_string(),
                || {
                    let checks: Value = report
                        .checks
                        .iter()
                        .map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail}))
                        .collect();
                    json!({"suite": suite.name(), "passed": report.passed(), "checks": checks})
                },
            )?;
            return Ok(if report.passed() { 0 } else { 1 });
        }
    }
    Ok(0)
}
