//! Command-line front end: dimensions, patterns, weights, operators, Wigner
//! tables and verification suites.
//!
//! Exit status: 0 on success, 1 when a verification check fails or a
//! computation breaks an internal invariant, 2 on usage errors.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gtbcd::action::Representation;
use gtbcd::algebra::{AlgebraLabel, DominantWeight, Family, GeneratorId};
use gtbcd::io::{
    bundle_from_json, operator_to_json, operator_to_matrix_market, patterns_from_json, patterns_to_json, render,
};
use gtbcd::numeric::format_rational;
use gtbcd::oracle::weyl_dim;
use gtbcd::pattern::{enumerate, enumerate_gl};
use gtbcd::verify::{
    acceptance_grid, check_commutators_of, check_dimension_of, check_weights_of, parse_weight, run_suite,
    CaseResult, GridEntry, Suite, VerificationReport, DEFAULT_TOLERANCE,
};
use gtbcd::wigner::{build_intertwiner, WignerError};

#[derive(Parser)]
#[command(name = "gtbcd", version, about = "Gelfand–Tsetlin-type bases for B, C and D")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dimension of the irreducible module.
    Dim(Module),
    /// Basis patterns in pattern order.
    Patterns(WithOut),
    /// Weight multiplicities read off the patterns.
    Weights(WithOut),
    /// Matrix of one generator on the basis.
    Op(OpArgs),
    /// Fundamental Wigner coefficients for one shift.
    Wigner(WignerArgs),
    /// Run verification suites.
    Verify(VerifyArgs),
}

#[derive(Args, Clone)]
struct Module {
    /// Series: A, B, C or D.
    #[arg(long)]
    family: Family,
    #[arg(long)]
    rank: usize,
    /// Highest weight, most dominant first, e.g. 3/2,1/2.
    #[arg(long, allow_hyphen_values = true)]
    hw: String,
}

#[derive(Args)]
struct WithOut {
    #[command(flatten)]
    module: Module,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Mtx,
}

#[derive(Args)]
struct OpArgs {
    #[command(flatten)]
    module: Module,
    /// Generator index pair i,j.
    #[arg(long, allow_hyphen_values = true)]
    gen: String,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WignerArgs {
    #[command(flatten)]
    module: Module,
    /// Standard coordinate of the shift.
    #[arg(long, allow_hyphen_values = true)]
    shift: i32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    /// Restrict to one module instead of the acceptance grid.
    #[arg(long, requires_all = ["rank", "hw"])]
    family: Option<Family>,
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    hw: Option<String>,
    /// Check a pattern list or an operator bundle from a file instead.
    #[arg(long, conflicts_with = "family")]
    input: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(String),
    Runtime(String),
}

type Outcome = Result<ExitCode, Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn runtime(e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Dim(m) => cmd_dim(&m),
        Command::Patterns(a) => cmd_patterns(&a),
        Command::Weights(a) => cmd_weights(&a),
        Command::Op(a) => cmd_op(&a),
        Command::Wigner(a) => cmd_wigner(&a),
        Command::Verify(a) => cmd_verify(&a),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn resolve(m: &Module) -> Result<(AlgebraLabel, DominantWeight), Failure> {
    let label = AlgebraLabel::new(m.family, m.rank).map_err(usage)?;
    let hw = parse_weight(&label, &m.hw).map_err(usage)?;
    Ok((label, hw))
}

fn require_bcd(label: &AlgebraLabel, command: &str) -> Result<(), Failure> {
    if label.family == Family::A {
        return Err(usage(format!("{command} supports the B, C and D series only")));
    }
    Ok(())
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_dim(m: &Module) -> Outcome {
    let (label, hw) = resolve(m)?;
    println!("{}", weyl_dim(&label, &hw).map_err(runtime)?);
    Ok(ExitCode::SUCCESS)
}

fn pattern_documents(label: &AlgebraLabel, hw: &DominantWeight) -> Result<(Value, Vec<Vec<String>>), Failure> {
    let show = |w: &[gtbcd::numeric::Rational]| w.iter().map(format_rational).collect::<Vec<_>>();
    if label.family == Family::A {
        let ps = enumerate_gl(hw.components());
        let records: Vec<_> = ps.iter().map(|p| p.to_record()).collect();
        let weights = ps.iter().map(|p| show(p.weight().components())).collect();
        return Ok((serde_json::to_value(records).map_err(runtime)?, weights));
    }
    let ps = enumerate(label, hw).map_err(runtime)?;
    let weights = ps.iter().map(|p| show(p.weight_unchecked().components())).collect();
    Ok((patterns_to_json(&ps), weights))
}

fn cmd_patterns(a: &WithOut) -> Outcome {
    let (label, hw) = resolve(&a.module)?;
    let (doc, _) = pattern_documents(&label, &hw)?;
    emit(&render(&doc), a.out.as_ref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_weights(a: &WithOut) -> Outcome {
    let (label, hw) = resolve(&a.module)?;
    let (_, weights) = pattern_documents(&label, &hw)?;
    let mut counts: BTreeMap<Vec<String>, u64> = BTreeMap::new();
    for w in weights {
        *counts.entry(w).or_default() += 1;
    }
    let rows: Vec<Value> = counts.into_iter().map(|(w, m)| json!({"weight": w, "multiplicity": m})).collect();
    emit(&render(&Value::Array(rows)), a.out.as_ref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_op(a: &OpArgs) -> Outcome {
    let (label, hw) = resolve(&a.module)?;
    require_bcd(&label, "op")?;
    let g = GeneratorId::parse(&a.gen).map_err(usage)?;
    label.position(g.i).map_err(usage)?;
    label.position(g.j).map_err(usage)?;
    let rep = Representation::new(label, hw.components()).map_err(runtime)?;
    let op = rep.operator(g).map_err(runtime)?;
    let text = match a.format {
        Format::Json => render(&operator_to_json(&op)),
        Format::Mtx => operator_to_matrix_market(&op),
    };
    emit(&text, a.out.as_ref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_wigner(a: &WignerArgs) -> Outcome {
    let (label, hw) = resolve(&a.module)?;
    require_bcd(&label, "wigner")?;
    let table = build_intertwiner(label, hw.components(), a.shift).map_err(|e| match e {
        WignerError::NotStandardWeight(_) | WignerError::NotConstituent(_) => usage(e),
        other => runtime(other),
    })?;
    emit(&render(&table.to_json()), a.out.as_ref())?;
    Ok(ExitCode::SUCCESS)
}

fn report_from_input(path: &PathBuf, tol: f64) -> Result<VerificationReport, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let doc: Value = serde_json::from_str(&text).map_err(usage)?;
    let (suite, cases) = if doc.get("operators").is_some() {
        let bundle = bundle_from_json(&doc).map_err(usage)?;
        ("commutators", vec![check_commutators_of(&bundle.label, &bundle.highest_weight, &bundle.operators)])
    } else {
        let patterns = patterns_from_json(&doc).map_err(usage)?;
        let first = patterns.first().ok_or_else(|| usage("empty pattern list"))?;
        let label = first.label;
        let hw = DominantWeight::new(&label, first.highest_weight().to_vec()).map_err(usage)?;
        if patterns.iter().any(|p| p.label != label || p.highest_weight() != hw.components()) {
            return Err(usage("patterns from different modules"));
        }
        ("dimension", vec![check_dimension_of(&label, &hw, &patterns), check_weights_of(&label, &hw, &patterns)])
    };
    let mut metadata = BTreeMap::new();
    metadata.insert("input".to_string(), path.display().to_string());
    metadata.insert("tolerance".to_string(), format!("{tol:e}"));
    Ok(VerificationReport { suite: suite.into(), metadata, cases })
}

fn cmd_verify(a: &VerifyArgs) -> Outcome {
    let suite: Suite = a.suite.parse().map_err(usage)?;
    let report = if let Some(path) = &a.input {
        report_from_input(path, a.tol)?
    } else {
        let grid = match (&a.family, a.rank, &a.hw) {
            (Some(family), Some(rank), Some(hw)) => {
                let (label, hw) = resolve(&Module { family: *family, rank, hw: hw.clone() })?;
                require_bcd(&label, "verify")?;
                vec![GridEntry { label, hw }]
            }
            _ => acceptance_grid(),
        };
        run_suite(suite, &grid, a.tol)
    };
    let mut text = report.to_json();
    text.push('\n');
    emit(&text, a.out.as_ref())?;
    let failures: Vec<&CaseResult> = report.failures().collect();
    for c in &failures {
        eprintln!(
            "FAIL {} {} [{}] {}: {}",
            c.check,
            c.label,
            c.hw.join(","),
            c.parameter,
            c.witness.as_deref().unwrap_or("")
        );
    }
    eprintln!("{} cases, {} failed", report.cases.len(), failures.len());
    Ok(if failures.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
