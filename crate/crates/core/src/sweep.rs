//! Seeded randomized sweeps over the verifiable statements.
//!
//! A sweep draws random parameters (and random functions where the statement
//! calls for one), runs the statement's verifier on each draw, and aggregates
//! pass counts. The ChaCha8 generator makes every sweep reproducible from its
//! seed alone.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::periodic::{Piece, PiecewiseLinearPeriodic};
use crate::scalar::{rational_to_bigfloat, Scalar, ToleranceContext};
use crate::theorems::{
    verify_affine, verify_five_distance, verify_general_bound, verify_three_gap,
    verify_tightened_bound, verify_triangle_bounds, verify_two_piece_shift, StatementId,
    VerificationReport,
};
use crate::{Error, Result};

/// Parameters of one randomized sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepConfig {
    pub statement: StatementId,
    pub draws: u64,
    pub seed: u64,
    /// Upper bound on piece counts for random functions.
    pub max_pieces: usize,
    /// Upper bound on orbit length N.
    pub max_points: u64,
    /// Draw rational parameters instead of high-precision reals.
    pub exact_inputs: bool,
}

impl SweepConfig {
    pub fn new(statement: StatementId, draws: u64, seed: u64) -> Self {
        let max_points = match statement {
            StatementId::ThreeGap | StatementId::Triangle => 5000,
            StatementId::FiveDistance | StatementId::TwoPieceShift => 1000,
            _ => 2000,
        };
        Self {
            statement,
            draws,
            seed,
            max_pieces: 5,
            max_points,
            exact_inputs: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepOutcome {
    pub draw: u64,
    pub report: VerificationReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepSummary {
    pub draws: u64,
    pub passes: u64,
    pub pass_rate: f64,
    pub max_observed: u64,
    pub all_pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub outcomes: Vec<SweepOutcome>,
    pub summary: SweepSummary,
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = format!("draw,{}\n", VerificationReport::csv_header());
        for o in &self.outcomes {
            writeln!(out, "{},{}", o.draw, o.report.to_csv_row()).unwrap();
        }
        let s = &self.summary;
        writeln!(
            out,
            "summary,,{},{},,,\"{{\"\"draws\"\":{},\"\"passes\"\":{},\"\"pass_rate\"\":{}}}\"",
            s.all_pass, s.max_observed, s.draws, s.passes, s.pass_rate
        )
        .unwrap();
        out
    }
}

/// Runs `cfg.draws` randomized instances of the statement's verifier.
pub fn run_sweep(cfg: &SweepConfig, ctx: &ToleranceContext) -> Result<SweepResult> {
    if cfg.draws == 0 {
        return Err(Error::InvalidArgument("draws must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut outcomes = Vec::with_capacity(cfg.draws as usize);
    for draw in 0..cfg.draws {
        let report = draw_one(cfg, ctx, &mut rng)?;
        outcomes.push(SweepOutcome { draw, report });
    }
    let passes = outcomes.iter().filter(|o| o.report.pass).count() as u64;
    let max_observed = outcomes.iter().map(|o| o.report.observed).max().unwrap_or(0);
    let summary = SweepSummary {
        draws: cfg.draws,
        passes,
        pass_rate: passes as f64 / cfg.draws as f64,
        max_observed,
        all_pass: passes == cfg.draws,
    };
    Ok(SweepResult { outcomes, summary })
}

fn draw_one(
    cfg: &SweepConfig,
    ctx: &ToleranceContext,
    rng: &mut ChaCha8Rng,
) -> Result<VerificationReport> {
    let bits = ctx.precision_bits();
    match cfg.statement {
        StatementId::ThreeGap => {
            let alpha = random_step(rng, cfg.exact_inputs, bits);
            let n = rng.gen_range(1..=cfg.max_points);
            verify_three_gap(&alpha, n, ctx)
        }
        StatementId::Affine => {
            let m = Scalar::from_int(rng.gen_range(-5..=5));
            let c = random_small_rational(rng);
            let alpha = random_step(rng, cfg.exact_inputs, bits);
            let beta = random_step(rng, cfg.exact_inputs, bits);
            let n = rng.gen_range(1..=cfg.max_points);
            verify_affine(&m, &c, &alpha, &beta, n, ctx)
        }
        StatementId::General => {
            let f = random_injective_pl(rng, cfg.max_pieces)?;
            let alpha = random_step(rng, cfg.exact_inputs, bits);
            let n = rng.gen_range(1..=cfg.max_points);
            verify_general_bound(&f, &alpha, n, ctx)
        }
        StatementId::Tightened => {
            let f = random_monotone_equal_end_pl(rng, cfg.max_pieces)?;
            let alpha = random_step(rng, cfg.exact_inputs, bits);
            let n = rng.gen_range(1..=cfg.max_points);
            verify_tightened_bound(&f, &alpha, n, ctx)
        }
        StatementId::TwoPieceShift => {
            let q = rng.gen_range(2u64..=24);
            let p = rng.gen_range(1..q);
            let kappa = Scalar::ratio(p as i64, q as i64);
            let r = rng.gen_range(1..=p);
            let beta = Scalar::ratio(r as i64, q as i64);
            let alpha = random_step(rng, cfg.exact_inputs, bits);
            let n = rng.gen_range(1..=cfg.max_points);
            verify_two_piece_shift(&kappa, &beta, &alpha, n, ctx)
        }
        StatementId::Triangle => {
            let alpha = random_unit_real(rng, bits);
            let n = rng.gen_range(2..=cfg.max_points.max(2));
            verify_triangle_bounds(&alpha, n, ctx)
        }
        StatementId::FiveDistance => {
            let alpha = random_step(rng, cfg.exact_inputs, bits);
            let beta = random_step(rng, cfg.exact_inputs, bits);
            let n = rng.gen_range(1..=cfg.max_points);
            verify_five_distance(&alpha, &beta, n, ctx)
        }
        StatementId::MainConstruction | StatementId::C2Construction => {
            Err(Error::InvalidArgument(format!(
                "{} is not sweepable; use the construct command",
                cfg.statement
            )))
        }
    }
}

/// A dyadic real uniform over multiples of 2^-128 in (0, 1).
fn random_unit_real(rng: &mut ChaCha8Rng, bits: usize) -> Scalar {
    let u = loop {
        let u: u128 = rng.gen();
        if u != 0 {
            break u;
        }
    };
    let r = BigRational::new(BigInt::from(u), BigInt::from(1u8) << 128);
    Scalar::from_bigfloat(rational_to_bigfloat(&r, bits))
}

/// A rational p/q uniform over q in 2..=999, p in 1..q.
fn random_unit_rational(rng: &mut ChaCha8Rng) -> Scalar {
    let q = rng.gen_range(2u64..=999);
    let p = rng.gen_range(1..q);
    Scalar::ratio(p as i64, q as i64)
}

fn random_step(rng: &mut ChaCha8Rng, exact: bool, bits: usize) -> Scalar {
    if exact {
        random_unit_rational(rng)
    } else {
        random_unit_real(rng, bits)
    }
}

fn random_small_rational(rng: &mut ChaCha8Rng) -> Scalar {
    let numer = rng.gen_range(-8i64..=8);
    let denom = rng.gen_range(1i64..=4);
    Scalar::ratio(numer, denom)
}

fn random_breakpoints(rng: &mut ChaCha8Rng, count: usize) -> Option<Vec<Scalar>> {
    let mut set = std::collections::BTreeSet::new();
    for _ in 0..200 {
        if set.len() == count {
            break;
        }
        let q = rng.gen_range(2u64..=24);
        let p = rng.gen_range(1..q);
        set.insert(Scalar::ratio(p as i64, q as i64));
    }
    (set.len() == count).then(|| set.into_iter().collect())
}

fn assemble(bounds: &[Scalar], slopes: &[Scalar], intercepts: &[Scalar]) -> Result<PiecewiseLinearPeriodic> {
    let pieces = (0..slopes.len())
        .map(|i| {
            Piece::new(
                bounds[i].clone(),
                bounds[i + 1].clone(),
                slopes[i].clone(),
                intercepts[i].clone(),
            )
        })
        .collect();
    PiecewiseLinearPeriodic::new(Scalar::one(), pieces)
}

const MAX_ATTEMPTS: usize = 10_000;

/// Rejection-samples a period-1 function that is injective on `[0, 1)`:
/// random breakpoints with denominators up to 24, nonzero integer slopes in
/// [-5, 5], small rational intercepts.
pub fn random_injective_pl(
    rng: &mut ChaCha8Rng,
    max_pieces: usize,
) -> Result<PiecewiseLinearPeriodic> {
    let max_pieces = max_pieces.max(2);
    for _ in 0..MAX_ATTEMPTS {
        let ell = rng.gen_range(2..=max_pieces);
        let Some(inner) = random_breakpoints(rng, ell - 1) else {
            continue;
        };
        let mut bounds = vec![Scalar::zero()];
        bounds.extend(inner);
        bounds.push(Scalar::one());
        let slopes: Vec<Scalar> = (0..ell)
            .map(|_| {
                let s = loop {
                    let s = rng.gen_range(-5i64..=5);
                    if s != 0 {
                        break s;
                    }
                };
                Scalar::from_int(s)
            })
            .collect();
        let intercepts: Vec<Scalar> = (0..ell).map(|_| random_small_rational(rng)).collect();
        if let Ok(f) = assemble(&bounds, &slopes, &intercepts) {
            if f.injective_on_fd() {
                return Ok(f);
            }
        }
    }
    Err(Error::SearchFailure(
        "no injective function found within the attempt budget".into(),
    ))
}

/// Rejection-samples a strictly monotone period-1 function whose first and
/// last slopes are equal (the tightened bound's hypotheses).
pub fn random_monotone_equal_end_pl(
    rng: &mut ChaCha8Rng,
    max_pieces: usize,
) -> Result<PiecewiseLinearPeriodic> {
    let max_pieces = max_pieces.max(2);
    for _ in 0..MAX_ATTEMPTS {
        let ell = rng.gen_range(2..=max_pieces);
        let Some(inner) = random_breakpoints(rng, ell - 1) else {
            continue;
        };
        let mut bounds = vec![Scalar::zero()];
        bounds.extend(inner);
        bounds.push(Scalar::one());
        let sign: i64 = if rng.gen::<bool>() { 1 } else { -1 };
        let mut slopes: Vec<Scalar> = (0..ell)
            .map(|_| Scalar::from_int(sign * rng.gen_range(1i64..=5)))
            .collect();
        slopes[ell - 1] = slopes[0].clone();
        let intercepts: Vec<Scalar> = (0..ell).map(|_| random_small_rational(rng)).collect();
        if let Ok(f) = assemble(&bounds, &slopes, &intercepts) {
            if f.monotone_on_fd() && f.injective_on_fd() {
                return Ok(f);
            }
        }
    }
    Err(Error::SearchFailure(
        "no monotone function found within the attempt budget".into(),
    ))
}
