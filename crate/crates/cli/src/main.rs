//! Command-line front end: gap reports, statement verification, randomized
//! sweeps, and witness constructions, with JSON or CSV output.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gaplab::{
    classify_gaps, construct_c2_witness, gap_report, parse_rational, rational_from_decimal_str,
    run_sweep, verify_affine, verify_five_distance, verify_general_bound,
    verify_main_construction, verify_three_gap, verify_tightened_bound, verify_triangle_bounds,
    verify_two_piece_shift, PeriodicFn, PlDocument, Scalar, StatementId, SweepConfig,
    ToleranceContext, VerificationReport, DEFAULT_PRECISION_BITS,
};
use num_rational::BigRational;
use num_traits::Zero;

#[derive(Parser)]
#[command(
    name = "gaplab",
    version,
    about = "Gap-length analysis of periodic functions sampled along arithmetic progressions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the gap report of one orbit f(d*alpha + beta), d = 1..=N
    Gaps(GapsArgs),
    /// Check one statement's gap-count bound on one instance
    Verify(VerifyArgs),
    /// Run a seeded randomized sweep of one statement
    Sweep(SweepArgs),
    /// Build a witness instance (main or c2) and verify it
    Construct(ConstructArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    /// Exact when every input is rational, approximate otherwise
    Auto,
    /// Require rational inputs and zero-tolerance comparison
    Exact,
    /// Force high-precision floating point
    Approx,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Args)]
struct CommonArgs {
    /// Arithmetic mode
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    mode: ModeArg,
    /// Mantissa bits for approximate arithmetic (default GAPLAB_DEFAULT_BITS or 256)
    #[arg(long)]
    bits: Option<usize>,
    /// Equality tolerance, e.g. 1e-30 or 1/1000000
    #[arg(long)]
    tol: Option<String>,
    /// Output format
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Write the report to a file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GapsArgs {
    /// Function: builtin name, shifted_cosine(EXPR), or @file.json
    #[arg(long = "fn")]
    function: String,
    /// Step, e.g. 1/4, 0.31, pi/16, sqrt2
    #[arg(long)]
    alpha: String,
    /// Offset (default 0)
    #[arg(long)]
    beta: Option<String>,
    /// Number of samples
    #[arg(long = "N", value_parser = clap::value_parser!(u64).range(1..))]
    big_n: u64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Statement id (three_gap, affine, general, tightened, two_piece_shift,
    /// triangle, five_distance, main_construction, c2_construction)
    statement: String,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    /// Number of samples
    #[arg(long = "N")]
    big_n: Option<u64>,
    /// Target gap count for the constructions
    #[arg(long)]
    n: Option<u64>,
    /// Slope for the affine statement
    #[arg(long)]
    m: Option<String>,
    /// Intercept for the affine statement
    #[arg(long)]
    c: Option<String>,
    /// Breakpoint for the two-piece shift statement
    #[arg(long)]
    kappa: Option<String>,
    /// Function for the general/tightened statements (PL) or c2 (analytic)
    #[arg(long = "fn")]
    function: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Statement id to sweep
    statement: String,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    draws: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Piece-count cap for random functions
    #[arg(long = "max-pieces")]
    max_pieces: Option<usize>,
    /// Orbit-length cap
    #[arg(long = "max-N")]
    max_points: Option<u64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct ConstructArgs {
    /// Construction kind: main or c2
    kind: String,
    /// Target gap count
    #[arg(long)]
    n: Option<u64>,
    /// Analytic function for c2 (e.g. cosine)
    #[arg(long = "fn")]
    function: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

enum CliError {
    Usage(String),
    Lib(gaplab::Error),
}

impl From<gaplab::Error> for CliError {
    fn from(e: gaplab::Error) -> Self {
        CliError::Lib(e)
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let result = match cli.command {
        Command::Gaps(a) => cmd_gaps(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Construct(a) => cmd_construct(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

fn effective_bits(common: &CommonArgs) -> Result<usize, CliError> {
    if let Some(b) = common.bits {
        return Ok(b);
    }
    match std::env::var("GAPLAB_DEFAULT_BITS") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| usage(format!("GAPLAB_DEFAULT_BITS must be a bit count, got {v:?}"))),
        Err(_) => Ok(DEFAULT_PRECISION_BITS),
    }
}

fn parse_tolerance(s: &str) -> Result<BigRational, CliError> {
    parse_rational(s)
        .or_else(|_| rational_from_decimal_str(s))
        .map_err(|_| usage(format!("cannot parse tolerance {s:?}")))
}

/// Comparison context from the mode, the precision, the optional --tol
/// override, and whether every parsed input came out exact.
fn build_ctx(
    common: &CommonArgs,
    bits: usize,
    inputs_exact: bool,
) -> Result<ToleranceContext, CliError> {
    let exact = match common.mode {
        ModeArg::Exact => true,
        ModeArg::Approx => false,
        ModeArg::Auto => inputs_exact,
    };
    let tol = match (&common.tol, exact) {
        (Some(t), _) => parse_tolerance(t)?,
        (None, true) => BigRational::zero(),
        (None, false) => return Ok(ToleranceContext::approx(bits)),
    };
    ToleranceContext::with_tolerance(bits, tol).map_err(CliError::Lib)
}

/// Parses `p/q`, a decimal literal, or a constant expression
/// `[RAT *] CONST [/ POSINT]` with CONST in {pi, e, sqrt2, phi}.
fn parse_value(s: &str, bits: usize, mode: ModeArg) -> Result<Scalar, CliError> {
    let s = s.trim();
    if let Some(v) = try_const_expr(s, bits)? {
        if mode == ModeArg::Exact {
            return Err(usage(format!(
                "{s:?} is not rational; exact mode takes rationals and decimals only"
            )));
        }
        return Ok(v);
    }
    if let Ok(r) = parse_rational(s) {
        let v = Scalar::from_rational(r);
        return Ok(if mode == ModeArg::Approx {
            Scalar::from_bigfloat(v.to_bigfloat(bits))
        } else {
            v
        });
    }
    if let Ok(r) = rational_from_decimal_str(s) {
        let v = Scalar::from_rational(r);
        return Ok(if mode == ModeArg::Exact {
            v
        } else {
            Scalar::from_bigfloat(v.to_bigfloat(bits))
        });
    }
    Err(usage(format!("cannot parse value {s:?}")))
}

fn try_const_expr(s: &str, bits: usize) -> Result<Option<Scalar>, CliError> {
    let (prefix, rest) = match s.split_once('*') {
        Some((a, b)) => (Some(a.trim()), b.trim()),
        None => (None, s),
    };
    let (name, divisor) = match rest.split_once('/') {
        Some((a, b)) => (a.trim(), Some(b.trim())),
        None => (rest, None),
    };
    let base = match name {
        "pi" => Scalar::pi(bits),
        "e" => Scalar::e(bits),
        "sqrt2" => Scalar::sqrt2(bits),
        "phi" => Scalar::phi(bits),
        _ => return Ok(None),
    };
    let mut v = base;
    if let Some(p) = prefix {
        let r = parse_rational(p)
            .or_else(|_| rational_from_decimal_str(p))
            .map_err(|_| usage(format!("bad coefficient in {s:?}")))?;
        v = Scalar::from_rational(r).mul(&v);
    }
    if let Some(d) = divisor {
        let n: u64 = d
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| usage(format!("bad divisor in {s:?}")))?;
        v = v.div(&Scalar::from_u64(n));
    }
    Ok(Some(v))
}

fn resolve_fn(spec: &str, bits: usize) -> Result<PeriodicFn, CliError> {
    let spec = spec.trim();
    if let Some(path) = spec.strip_prefix('@') {
        let text =
            fs::read_to_string(path).map_err(|e| usage(format!("cannot read {path}: {e}")))?;
        let doc: PlDocument = serde_json::from_str(&text)
            .map_err(|e| usage(format!("invalid function JSON in {path}: {e}")))?;
        return Ok(PeriodicFn::Pl(doc.validate()?));
    }
    if let Some(inner) = spec
        .strip_prefix("shifted_cosine(")
        .and_then(|r| r.strip_suffix(')'))
    {
        let shift = parse_value(inner, bits, ModeArg::Auto)?;
        return Ok(gaplab::shifted_cosine(&shift, bits));
    }
    match spec {
        "sawtooth" => Ok(gaplab::sawtooth()),
        "triangle" => Ok(gaplab::triangle()),
        "cosine" => Ok(gaplab::cosine(bits)),
        _ => Err(usage(format!("unknown function {spec:?}"))),
    }
}

fn emit(common: &CommonArgs, json: &serde_json::Value, csv: String) -> Result<(), CliError> {
    let text = match common.format {
        FormatArg::Json => {
            let mut t = serde_json::to_string_pretty(json).expect("report serialize");
            t.push('\n');
            t
        }
        FormatArg::Csv => csv,
    };
    match &common.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn verification_csv(report: &VerificationReport) -> String {
    format!(
        "{}\n{}\n",
        VerificationReport::csv_header(),
        report.to_csv_row()
    )
}

fn cmd_gaps(a: GapsArgs) -> Result<bool, CliError> {
    let bits = effective_bits(&a.common)?;
    let f = resolve_fn(&a.function, bits)?;
    let alpha = parse_value(&a.alpha, bits, a.common.mode)?;
    let beta = match &a.beta {
        Some(b) => parse_value(b, bits, a.common.mode)?,
        None => Scalar::zero(),
    };
    let inputs_exact = f.is_exact() && alpha.is_exact() && beta.is_exact();
    if a.common.mode == ModeArg::Exact && !inputs_exact {
        return Err(usage(
            "exact mode requires a rational-valued function and rational parameters",
        ));
    }
    let ctx = build_ctx(&a.common, bits, inputs_exact)?;
    let mut report = gap_report(&f, &alpha, &beta, a.big_n, &ctx)?;
    if f.as_pl().is_some() {
        classify_gaps(&mut report, &f)?;
    }
    let json = serde_json::to_value(&report).expect("report serialize");
    emit(&a.common, &json, report.to_csv())?;
    Ok(true)
}

fn require<T>(v: Option<T>, what: &str, statement: &str) -> Result<T, CliError> {
    v.ok_or_else(|| usage(format!("{statement} requires {what}")))
}

fn cmd_verify(a: VerifyArgs) -> Result<bool, CliError> {
    let statement =
        StatementId::from_str(&a.statement).map_err(|e| usage(e.to_string()))?;
    let bits = effective_bits(&a.common)?;
    let mode = a.common.mode;
    let id = statement.as_str();

    let parse_opt = |v: &Option<String>, what: &str| -> Result<Scalar, CliError> {
        parse_value(require(v.as_ref(), what, id)?, bits, mode)
    };

    let report = match statement {
        StatementId::ThreeGap => {
            let alpha = parse_opt(&a.alpha, "--alpha")?;
            let n = require(a.big_n, "--N", id)?;
            let ctx = build_ctx(&a.common, bits, alpha.is_exact())?;
            verify_three_gap(&alpha, n, &ctx)?
        }
        StatementId::Affine => {
            let m = parse_opt(&a.m, "--m")?;
            let c = parse_opt(&a.c, "--c")?;
            let alpha = parse_opt(&a.alpha, "--alpha")?;
            let beta = match &a.beta {
                Some(b) => parse_value(b, bits, mode)?,
                None => Scalar::zero(),
            };
            let n = require(a.big_n, "--N", id)?;
            let exact =
                m.is_exact() && c.is_exact() && alpha.is_exact() && beta.is_exact();
            let ctx = build_ctx(&a.common, bits, exact)?;
            verify_affine(&m, &c, &alpha, &beta, n, &ctx)?
        }
        StatementId::General | StatementId::Tightened => {
            let spec = require(a.function.as_ref(), "--fn", id)?;
            let f = resolve_fn(spec, bits)?;
            let pl = f
                .as_pl()
                .ok_or_else(|| usage(format!("{id} requires a piecewise linear function")))?;
            let alpha = parse_opt(&a.alpha, "--alpha")?;
            let n = require(a.big_n, "--N", id)?;
            let ctx = build_ctx(&a.common, bits, f.is_exact() && alpha.is_exact())?;
            if statement == StatementId::General {
                verify_general_bound(pl, &alpha, n, &ctx)?
            } else {
                verify_tightened_bound(pl, &alpha, n, &ctx)?
            }
        }
        StatementId::TwoPieceShift => {
            let kappa = parse_opt(&a.kappa, "--kappa")?;
            let beta = parse_opt(&a.beta, "--beta")?;
            let alpha = parse_opt(&a.alpha, "--alpha")?;
            let n = require(a.big_n, "--N", id)?;
            let exact = kappa.is_exact() && beta.is_exact() && alpha.is_exact();
            let ctx = build_ctx(&a.common, bits, exact)?;
            verify_two_piece_shift(&kappa, &beta, &alpha, n, &ctx)?
        }
        StatementId::Triangle => {
            let alpha = parse_opt(&a.alpha, "--alpha")?;
            let n = require(a.big_n, "--N", id)?;
            let ctx = build_ctx(&a.common, bits, alpha.is_exact())?;
            verify_triangle_bounds(&alpha, n, &ctx)?
        }
        StatementId::FiveDistance => {
            let alpha = parse_opt(&a.alpha, "--alpha")?;
            let beta = parse_opt(&a.beta, "--beta")?;
            let n = require(a.big_n, "--N", id)?;
            let ctx = build_ctx(&a.common, bits, alpha.is_exact() && beta.is_exact())?;
            verify_five_distance(&alpha, &beta, n, &ctx)?
        }
        StatementId::MainConstruction => {
            let n = require(a.n, "--n", id)?;
            if n == 0 {
                return Err(usage("--n must be at least 1"));
            }
            verify_main_construction(n)?.1
        }
        StatementId::C2Construction => {
            let (_, _, report) = run_c2(&a.function, a.n, &a.common, bits)?;
            report
        }
    };
    let json = serde_json::to_value(&report).expect("report serialize");
    emit(&a.common, &json, verification_csv(&report))?;
    Ok(report.pass)
}

fn run_c2(
    function: &Option<String>,
    n: Option<u64>,
    common: &CommonArgs,
    bits: usize,
) -> Result<(gaplab::C2Witness, PeriodicFn, VerificationReport), CliError> {
    let spec = require(function.as_ref(), "--fn", "c2_construction")?;
    let n = require(n, "--n", "c2_construction")?;
    if n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    let f = resolve_fn(spec, bits)?;
    let analytic = match &f {
        PeriodicFn::Analytic(a) => a.clone(),
        PeriodicFn::Pl(_) => {
            return Err(usage(
                "the c2 construction takes an analytic function (cosine or shifted_cosine)",
            ))
        }
    };
    let ctx = build_ctx(common, bits, false)?;
    let tol = if ctx.equality_tolerance().is_zero() {
        Scalar::from_decimal_str("1e-30", bits).expect("default tolerance")
    } else {
        Scalar::from_rational(ctx.equality_tolerance().clone())
    };
    let (witness, report) = construct_c2_witness(&analytic, n, &tol, &ctx)?;
    Ok((witness, f, report))
}

fn cmd_sweep(a: SweepArgs) -> Result<bool, CliError> {
    let statement =
        StatementId::from_str(&a.statement).map_err(|e| usage(e.to_string()))?;
    let bits = effective_bits(&a.common)?;
    let mut cfg = SweepConfig::new(statement, a.draws, a.seed);
    if let Some(p) = a.max_pieces {
        cfg.max_pieces = p;
    }
    if let Some(n) = a.max_points {
        cfg.max_points = n;
    }
    cfg.exact_inputs = a.common.mode == ModeArg::Exact;
    let ctx = build_ctx(&a.common, bits, cfg.exact_inputs)?;
    let result = run_sweep(&cfg, &ctx)?;
    let json = serde_json::json!({
        "config": cfg,
        "outcomes": result.outcomes,
        "summary": result.summary,
    });
    emit(&a.common, &json, result.to_csv())?;
    Ok(result.summary.all_pass)
}

fn cmd_construct(a: ConstructArgs) -> Result<bool, CliError> {
    let bits = effective_bits(&a.common)?;
    match a.kind.as_str() {
        "main" => {
            let n = require(a.n, "--n", "construct main")?;
            if n == 0 {
                return Err(usage("--n must be at least 1"));
            }
            let (c, report) = verify_main_construction(n)?;
            let json = serde_json::json!({
                "kind": "main",
                "n": n,
                "N": c.big_n,
                "epsilon": c.epsilon,
                "alpha": c.alpha,
                "ladder": c.ladder,
                "function": c.f,
                "report": report,
            });
            let pass = report.pass;
            emit(&a.common, &json, verification_csv(&report))?;
            Ok(pass)
        }
        "c2" => {
            let (witness, _, report) = run_c2(&a.function, a.n, &a.common, bits)?;
            let json = serde_json::json!({
                "kind": "c2",
                "n": witness.n,
                "witness": witness,
                "report": report,
            });
            let pass = report.pass;
            emit(&a.common, &json, verification_csv(&report))?;
            Ok(pass)
        }
        other => Err(usage(format!(
            "unknown construction {other:?}; expected main or c2"
        ))),
    }
}
