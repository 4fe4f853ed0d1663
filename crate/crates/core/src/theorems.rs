//! Verifiers for gap-count bounds and constructors for the two witness
//! families that force many distinct gaps.
//!
//! Each verifier computes a gap set and checks an inequality on its size,
//! returning a structured [`VerificationReport`]. Precondition violations are
//! errors, never failed verifications, so `pass == false` always means the
//! computed count actually violated the claimed bound.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::gap::{circle_gaps, gap_report, two_orbit_circle_gaps, GapReport};
use crate::periodic::{triangle, AnalyticPeriodic, PeriodicFn, Piece, PiecewiseLinearPeriodic};
use crate::scalar::{cluster_distinct, Scalar, ToleranceContext};
use crate::{Error, Result};

/// Stable identifier of a verified statement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatementId {
    ThreeGap,
    Affine,
    General,
    Tightened,
    TwoPieceShift,
    Triangle,
    FiveDistance,
    MainConstruction,
    C2Construction,
}

impl StatementId {
    pub const ALL: [StatementId; 9] = [
        StatementId::ThreeGap,
        StatementId::Affine,
        StatementId::General,
        StatementId::Tightened,
        StatementId::TwoPieceShift,
        StatementId::Triangle,
        StatementId::FiveDistance,
        StatementId::MainConstruction,
        StatementId::C2Construction,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            StatementId::ThreeGap => "three_gap",
            StatementId::Affine => "affine",
            StatementId::General => "general",
            StatementId::Tightened => "tightened",
            StatementId::TwoPieceShift => "two_piece_shift",
            StatementId::Triangle => "triangle",
            StatementId::FiveDistance => "five_distance",
            StatementId::MainConstruction => "main_construction",
            StatementId::C2Construction => "c2_construction",
        }
    }
}

impl fmt::Display for StatementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StatementId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown statement id {s:?}")))
    }
}

/// Outcome of checking one statement on one instance.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub statement: StatementId,
    pub params: Map<String, Value>,
    pub claimed_lower: Option<u64>,
    pub claimed_upper: Option<u64>,
    /// The computed number of distinct gap lengths.
    pub observed: u64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<GapReport>,
    /// Distinct lengths for circle statements that have no function report.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lengths: Option<Vec<Scalar>>,
}

impl VerificationReport {
    fn new(
        statement: StatementId,
        params: Map<String, Value>,
        claimed_lower: Option<u64>,
        claimed_upper: Option<u64>,
        observed: u64,
    ) -> Self {
        let pass = claimed_upper.map_or(true, |u| observed <= u)
            && claimed_lower.map_or(true, |l| observed >= l);
        Self {
            statement,
            params,
            claimed_lower,
            claimed_upper,
            observed,
            pass,
            witness: None,
            lengths: None,
        }
    }

    pub fn csv_header() -> &'static str {
        "statement,pass,observed,claimed_lower,claimed_upper,params"
    }

    pub fn to_csv_row(&self) -> String {
        let bound = |b: Option<u64>| b.map(|v| v.to_string()).unwrap_or_default();
        let params = serde_json::to_string(&self.params).expect("params serialize");
        format!(
            "{},{},{},{},{},\"{}\"",
            self.statement,
            self.pass,
            self.observed,
            bound(self.claimed_lower),
            bound(self.claimed_upper),
            params.replace('"', "\"\"")
        )
    }
}

fn scalar_json(s: &Scalar) -> Value {
    serde_json::to_value(s).expect("scalar serialize")
}

fn fn_json(f: &PiecewiseLinearPeriodic) -> Value {
    serde_json::to_value(f).expect("function serialize")
}

fn distinct_lengths(mut lengths: Vec<Scalar>, ctx: &ToleranceContext) -> Result<Vec<Scalar>> {
    lengths.sort();
    cluster_distinct(&lengths, ctx)
}

/// Distinct arc lengths cut by `{frac(d * alpha) : d = 1..=n}` number at
/// most 3.
pub fn verify_three_gap(alpha: &Scalar, n: u64, ctx: &ToleranceContext) -> Result<VerificationReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let mut points = Vec::with_capacity(n as usize);
    for d in 1..=n {
        points.push(Scalar::from_u64(d).mul(alpha).frac());
    }
    let lengths = distinct_lengths(circle_gaps(&points, ctx)?, ctx)?;
    let mut params = Map::new();
    params.insert("alpha".into(), scalar_json(alpha));
    params.insert("N".into(), n.into());
    let mut report = VerificationReport::new(
        StatementId::ThreeGap,
        params,
        None,
        Some(3),
        lengths.len() as u64,
    );
    report.lengths = Some(lengths);
    Ok(report)
}

/// One affine piece `mx + c` of period 1 has at most 3 distinct gap lengths
/// for every step, offset, and count.
pub fn verify_affine(
    m: &Scalar,
    c: &Scalar,
    alpha: &Scalar,
    beta: &Scalar,
    n: u64,
    ctx: &ToleranceContext,
) -> Result<VerificationReport> {
    let piece = Piece::new(Scalar::zero(), Scalar::one(), m.clone(), c.clone());
    let f = PeriodicFn::Pl(PiecewiseLinearPeriodic::new(Scalar::one(), vec![piece])?);
    let witness = gap_report(&f, alpha, beta, n, ctx)?;
    let mut params = Map::new();
    params.insert("m".into(), scalar_json(m));
    params.insert("c".into(), scalar_json(c));
    params.insert("alpha".into(), scalar_json(alpha));
    params.insert("beta".into(), scalar_json(beta));
    params.insert("N".into(), n.into());
    let mut report = VerificationReport::new(
        StatementId::Affine,
        params,
        None,
        Some(3),
        witness.distinct_count() as u64,
    );
    report.witness = Some(witness);
    Ok(report)
}

/// An injective piecewise linear function with `ell` pieces and `mu` distinct
/// absolute slopes has at most `3 mu + ell` distinct gap lengths.
pub fn verify_general_bound(
    f: &PiecewiseLinearPeriodic,
    alpha: &Scalar,
    n: u64,
    ctx: &ToleranceContext,
) -> Result<VerificationReport> {
    if !f.injective_on_fd() {
        return Err(Error::PreconditionViolation(
            "the general bound requires injectivity on the fundamental domain".into(),
        ));
    }
    let (ell, mu) = f.slope_stats();
    let witness = gap_report(&PeriodicFn::Pl(f.clone()), alpha, &Scalar::zero(), n, ctx)?;
    let mut params = Map::new();
    params.insert("alpha".into(), scalar_json(alpha));
    params.insert("N".into(), n.into());
    params.insert("ell".into(), ell.into());
    params.insert("mu".into(), mu.into());
    params.insert("function".into(), fn_json(f));
    let mut report = VerificationReport::new(
        StatementId::General,
        params,
        None,
        Some((3 * mu + ell) as u64),
        witness.distinct_count() as u64,
    );
    report.witness = Some(witness);
    Ok(report)
}

/// Under the extra hypotheses (strictly monotone, equal first and last
/// slopes) the general bound tightens to `3 mu + ell - 1`.
pub fn verify_tightened_bound(
    f: &PiecewiseLinearPeriodic,
    alpha: &Scalar,
    n: u64,
    ctx: &ToleranceContext,
) -> Result<VerificationReport> {
    if !f.injective_on_fd() {
        return Err(Error::PreconditionViolation(
            "the tightened bound requires injectivity on the fundamental domain".into(),
        ));
    }
    if !f.monotone_on_fd() {
        return Err(Error::PreconditionViolation(
            "the tightened bound requires strict monotonicity".into(),
        ));
    }
    let pieces = f.pieces();
    if pieces[0].slope != pieces[pieces.len() - 1].slope {
        return Err(Error::PreconditionViolation(
            "the tightened bound requires equal first and last slopes".into(),
        ));
    }
    let (ell, mu) = f.slope_stats();
    let witness = gap_report(&PeriodicFn::Pl(f.clone()), alpha, &Scalar::zero(), n, ctx)?;
    let mut params = Map::new();
    params.insert("alpha".into(), scalar_json(alpha));
    params.insert("N".into(), n.into());
    params.insert("ell".into(), ell.into());
    params.insert("mu".into(), mu.into());
    params.insert("function".into(), fn_json(f));
    let mut report = VerificationReport::new(
        StatementId::Tightened,
        params,
        None,
        Some((3 * mu + ell - 1) as u64),
        witness.distinct_count() as u64,
    );
    report.witness = Some(witness);
    Ok(report)
}

/// The two-piece shifted sawtooth `x` on `[0, kappa)`, `x - beta` on
/// `[kappa, 1)` with `0 < beta <= kappa < 1` has at most 10 distinct gap
/// lengths.
pub fn verify_two_piece_shift(
    kappa: &Scalar,
    beta: &Scalar,
    alpha: &Scalar,
    n: u64,
    ctx: &ToleranceContext,
) -> Result<VerificationReport> {
    let (zero, one) = (Scalar::zero(), Scalar::one());
    if !(beta > &zero && beta <= kappa && kappa < &one) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < beta <= kappa < 1, got beta = {beta}, kappa = {kappa}"
        )));
    }
    let pieces = vec![
        Piece::new(zero.clone(), kappa.clone(), one.clone(), zero.clone()),
        Piece::new(kappa.clone(), one.clone(), one, beta.neg()),
    ];
    let f = PeriodicFn::Pl(PiecewiseLinearPeriodic::new(Scalar::one(), pieces)?);
    let witness = gap_report(&f, alpha, &Scalar::zero(), n, ctx)?;
    let mut params = Map::new();
    params.insert("kappa".into(), scalar_json(kappa));
    params.insert("beta".into(), scalar_json(beta));
    params.insert("alpha".into(), scalar_json(alpha));
    params.insert("N".into(), n.into());
    let mut report = VerificationReport::new(
        StatementId::TwoPieceShift,
        params,
        None,
        Some(10),
        witness.distinct_count() as u64,
    );
    report.witness = Some(witness);
    Ok(report)
}

/// The triangle wave (distance to the nearest integer) has between 2 and 4
/// distinct gap lengths for irrational steps and `N >= 2`.
pub fn verify_triangle_bounds(
    alpha: &Scalar,
    n: u64,
    ctx: &ToleranceContext,
) -> Result<VerificationReport> {
    if alpha.is_exact() {
        return Err(Error::PreconditionViolation(
            "the triangle lower bound is asserted for irrational (approximate) steps only".into(),
        ));
    }
    if n < 2 {
        return Err(Error::PreconditionViolation(
            "the triangle lower bound needs N >= 2".into(),
        ));
    }
    let f = triangle();
    let witness = gap_report(&f, alpha, &Scalar::zero(), n, ctx)?;
    let mut params = Map::new();
    params.insert("alpha".into(), scalar_json(alpha));
    params.insert("N".into(), n.into());
    let mut report = VerificationReport::new(
        StatementId::Triangle,
        params,
        Some(2),
        Some(4),
        witness.distinct_count() as u64,
    );
    report.witness = Some(witness);
    Ok(report)
}

/// The union of the circle orbits `{d alpha}` and `{d alpha + beta}`,
/// `d = 0..=N`, cuts arcs of at most 5 distinct lengths when `beta != 0`.
pub fn verify_five_distance(
    alpha: &Scalar,
    beta: &Scalar,
    n: u64,
    ctx: &ToleranceContext,
) -> Result<VerificationReport> {
    if beta.is_zero() {
        return Err(Error::PreconditionViolation(
            "the five distance bound requires a nonzero offset".into(),
        ));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let lengths = distinct_lengths(two_orbit_circle_gaps(alpha, beta, n, ctx)?, ctx)?;
    let mut params = Map::new();
    params.insert("alpha".into(), scalar_json(alpha));
    params.insert("beta".into(), scalar_json(beta));
    params.insert("N".into(), n.into());
    let mut report = VerificationReport::new(
        StatementId::FiveDistance,
        params,
        None,
        Some(5),
        lengths.len() as u64,
    );
    report.lengths = Some(lengths);
    Ok(report)
}

/// The instance family whose gap count exceeds any prescribed `n`.
#[derive(Clone, Debug, Serialize)]
pub struct MainConstruction {
    pub f: PiecewiseLinearPeriodic,
    pub alpha: Scalar,
    #[serde(rename = "N")]
    pub big_n: u64,
    pub epsilon: Scalar,
    /// Gap lengths guaranteed to appear: `k * epsilon / N` for
    /// `k = 1..=N/2 - 1`.
    pub ladder: Vec<Scalar>,
}

/// Builds the two-piece function, step, and sample count whose gap set has
/// more than `n` elements: `N = 2n + 4`, `epsilon = 1/(N-3)`, `alpha = 1/N`,
/// `f(x) = x` on `[0, 1/2]` and `(1+epsilon) x - (1+epsilon)/2` on `(1/2, 1)`.
pub fn construct_unbounded_pl(n: u64) -> Result<MainConstruction> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let big_n = 2 * n + 4;
    let epsilon = Scalar::one().div(&Scalar::from_u64(big_n - 3));
    let alpha = Scalar::one().div(&Scalar::from_u64(big_n));
    let half = Scalar::ratio(1, 2);
    let one_plus_eps = Scalar::one().add(&epsilon);
    let pieces = vec![
        Piece::new(Scalar::zero(), half.clone(), Scalar::one(), Scalar::zero()).closed(),
        Piece::new(
            half,
            Scalar::one(),
            one_plus_eps.clone(),
            one_plus_eps.div(&Scalar::from_int(2)).neg(),
        ),
    ];
    let f = PiecewiseLinearPeriodic::new(Scalar::one(), pieces)?;
    let n_scalar = Scalar::from_u64(big_n);
    let ladder = (1..=big_n / 2 - 1)
        .map(|k| Scalar::from_u64(k).mul(&epsilon).div(&n_scalar))
        .collect();
    Ok(MainConstruction {
        f,
        alpha,
        big_n,
        epsilon,
        ladder,
    })
}

/// Runs the constructed instance in exact arithmetic and checks
/// `|gap_set| > n`. The params record whether the promised ladder of lengths
/// is contained in the gap set.
pub fn verify_main_construction(n: u64) -> Result<(MainConstruction, VerificationReport)> {
    let construction = construct_unbounded_pl(n)?;
    let ctx = ToleranceContext::exact();
    let witness = gap_report(
        &PeriodicFn::Pl(construction.f.clone()),
        &construction.alpha,
        &Scalar::zero(),
        construction.big_n,
        &ctx,
    )?;
    let ladder_included = construction
        .ladder
        .iter()
        .all(|rung| witness.gap_set.binary_search(rung).is_ok());
    let mut params = Map::new();
    params.insert("n".into(), n.into());
    params.insert("N".into(), construction.big_n.into());
    params.insert("epsilon".into(), scalar_json(&construction.epsilon));
    params.insert("alpha".into(), scalar_json(&construction.alpha));
    params.insert("ladder_included".into(), ladder_included.into());
    let mut report = VerificationReport::new(
        StatementId::MainConstruction,
        params,
        Some(n + 1),
        None,
        witness.distinct_count() as u64,
    );
    report.witness = Some(witness);
    Ok((construction, report))
}

/// First zero of `g` on `[lo, hi]`: returns `lo` when `|g(lo)| <= tol`, else
/// scans a uniform grid for the first near-zero or sign change, bisecting the
/// bracketing step down to width `tol`. `None` when no zero is detected.
pub fn find_first_zero(
    g: &dyn Fn(&Scalar) -> Scalar,
    lo: &Scalar,
    hi: &Scalar,
    grid_points: usize,
    tol: &Scalar,
) -> Result<Option<Scalar>> {
    if lo >= hi {
        return Err(Error::InvalidArgument(format!(
            "need lo < hi, got [{lo}, {hi}]"
        )));
    }
    if grid_points < 2 {
        return Err(Error::InvalidArgument("need at least 2 grid points".into()));
    }
    let within = |v: &Scalar| v.abs() <= *tol;
    let first = g(lo);
    if within(&first) {
        return Ok(Some(lo.clone()));
    }
    let step = hi.sub(lo).div(&Scalar::from_u64(grid_points as u64 - 1));
    let mut prev_x = lo.clone();
    let mut prev_neg = first.is_negative();
    for k in 1..grid_points {
        let x = if k == grid_points - 1 {
            hi.clone()
        } else {
            lo.add(&step.mul(&Scalar::from_u64(k as u64)))
        };
        let v = g(&x);
        if within(&v) {
            return Ok(Some(x));
        }
        if v.is_negative() != prev_neg {
            return Ok(Some(bisect(g, prev_x, x, tol, prev_neg)));
        }
        prev_x = x;
        prev_neg = v.is_negative();
    }
    Ok(None)
}

fn bisect(
    g: &dyn Fn(&Scalar) -> Scalar,
    mut lo: Scalar,
    mut hi: Scalar,
    tol: &Scalar,
    lo_neg: bool,
) -> Scalar {
    let two = Scalar::from_int(2);
    for _ in 0..100_000 {
        if hi.sub(&lo) <= *tol {
            break;
        }
        let mid = lo.add(&hi).div(&two);
        let v = g(&mid);
        if v.abs() <= *tol {
            return mid;
        }
        if v.is_negative() == lo_neg {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo.add(&hi).div(&two)
}

/// The data determining the step in the smooth construction.
#[derive(Clone, Debug, Serialize)]
pub struct C2Witness {
    /// First zero of `f''` on `[0, P]`.
    #[serde(rename = "I")]
    pub i_value: Scalar,
    /// First zero of `f'` on `[0, I]`, when one exists.
    #[serde(rename = "I_prime")]
    pub i_prime: Option<Scalar>,
    pub alpha: Scalar,
    pub n: u64,
}

const ZERO_GRID: usize = 1 << 14;
const SIGN_GRID: u64 = 512;

/// For a smooth periodic `f` with `f''(0) != 0`, derives the step `alpha`
/// from the first zero `I` of `f''` (and the first zero `I'` of `f'` below
/// it) and checks that the orbit of length `n + 1` has at least `n` distinct
/// gap lengths.
pub fn construct_c2_witness(
    f: &AnalyticPeriodic,
    n: u64,
    tol: &Scalar,
    ctx: &ToleranceContext,
) -> Result<(C2Witness, VerificationReport)> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let bits = ctx.precision_bits();
    let d2f0 = f.eval_d2f(&Scalar::zero(), bits);
    if d2f0.abs() <= *tol {
        return Err(Error::HypothesisViolation(
            "f''(0) vanishes; the construction requires f''(0) != 0".into(),
        ));
    }
    let period = f.period().clone();
    let d2 = |x: &Scalar| f.eval_d2f(x, bits);
    let i_value = find_first_zero(&d2, &Scalar::zero(), &period, ZERO_GRID, tol)?
        .ok_or_else(|| Error::SearchFailure("no zero of f'' on [0, P]".into()))?;

    // The step rule assumes f'' keeps one sign before its first zero; verify
    // on a dense grid so a zero missed by the scan surfaces as an error.
    let base_neg = d2f0.is_negative();
    for j in 1..SIGN_GRID {
        let x = i_value
            .mul(&Scalar::from_u64(j))
            .div(&Scalar::from_u64(SIGN_GRID));
        let v = d2(&x);
        if v.abs() > *tol && v.is_negative() != base_neg {
            return Err(Error::SearchFailure(
                "f'' changes sign before the reported first zero".into(),
            ));
        }
    }

    let d1 = |x: &Scalar| f.eval_df(x, bits);
    let i_prime = find_first_zero(&d1, &Scalar::zero(), &i_value, ZERO_GRID, tol)?;
    let seed = match &i_prime {
        Some(ip) if ip.abs() > *tol => ip.clone(),
        _ => i_value.clone(),
    };
    let alpha = seed.div(&Scalar::from_u64(n + 1));

    let witness = gap_report(
        &PeriodicFn::Analytic(f.clone()),
        &alpha,
        &Scalar::zero(),
        n + 1,
        ctx,
    )?;
    let mut params = Map::new();
    params.insert("function".into(), f.name().into());
    params.insert("n".into(), n.into());
    params.insert("alpha".into(), scalar_json(&alpha));
    params.insert("I".into(), scalar_json(&i_value));
    params.insert(
        "I_prime".into(),
        i_prime
            .as_ref()
            .map(scalar_json)
            .unwrap_or(Value::Null),
    );
    let mut report = VerificationReport::new(
        StatementId::C2Construction,
        params,
        Some(n),
        None,
        witness.distinct_count() as u64,
    );
    report.witness = Some(witness);
    let c2 = C2Witness {
        i_value,
        i_prime,
        alpha,
        n,
    };
    Ok((c2, report))
}
