//! Periodic functions on the fundamental domain `[0, P)`.
//!
//! Two families are supported: piecewise linear functions given by a maximal
//! partition of `[0, P)` into half-open affine pieces, and analytic functions
//! given by closures for the function and its first two derivatives.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::scalar::{rational_from_decimal_str, Scalar};
use crate::{Error, Result};

/// One affine piece `x -> slope * x + intercept` on `[left, right)`, or
/// `[left, right]` when `right_closed` is set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Piece {
    pub left: Scalar,
    pub right: Scalar,
    #[serde(default)]
    pub right_closed: bool,
    pub slope: Scalar,
    pub intercept: Scalar,
}

impl Piece {
    pub fn new(left: Scalar, right: Scalar, slope: Scalar, intercept: Scalar) -> Self {
        Piece {
            left,
            right,
            right_closed: false,
            slope,
            intercept,
        }
    }

    pub fn closed(mut self) -> Self {
        self.right_closed = true;
        self
    }

    pub fn value_at(&self, x: &Scalar) -> Scalar {
        self.slope.mul(x).add(&self.intercept)
    }

    fn left_value(&self) -> Scalar {
        self.value_at(&self.left)
    }

    fn right_value(&self) -> Scalar {
        self.value_at(&self.right)
    }
}

/// Infimum and supremum of a function over its fundamental domain.
#[derive(Clone, Debug, Serialize)]
pub struct FunctionExtrema {
    pub inf_value: Scalar,
    pub sup_value: Scalar,
}

/// A piecewise linear periodic function. The pieces tile `[0, period)` exactly,
/// in order, and the representation is maximal: no two consecutive pieces lie
/// on the same line.
#[derive(Clone, Debug, Serialize)]
pub struct PiecewiseLinearPeriodic {
    period: Scalar,
    pieces: Vec<Piece>,
}

/// Raw piecewise linear data as it appears on disk, prior to validation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlDocument {
    pub period: Scalar,
    pub pieces: Vec<Piece>,
}

impl PlDocument {
    pub fn validate(self) -> Result<PiecewiseLinearPeriodic> {
        PiecewiseLinearPeriodic::new(self.period, self.pieces)
    }
}

impl<'de> Deserialize<'de> for PiecewiseLinearPeriodic {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        PlDocument::deserialize(d)?
            .validate()
            .map_err(serde::de::Error::custom)
    }
}

impl PiecewiseLinearPeriodic {
    pub fn new(period: Scalar, pieces: Vec<Piece>) -> Result<Self> {
        if !period.is_positive() {
            return Err(Error::InvalidArgument(format!(
                "period must be positive, got {period}"
            )));
        }
        if pieces.is_empty() {
            return Err(Error::InvalidPartition("no pieces".into()));
        }
        if !pieces[0].left.is_zero() {
            return Err(Error::InvalidPartition(format!(
                "first piece must start at 0, starts at {}",
                pieces[0].left
            )));
        }
        for (i, p) in pieces.iter().enumerate() {
            if p.left >= p.right {
                return Err(Error::InvalidPartition(format!(
                    "piece {} is empty or reversed: [{}, {})",
                    i + 1,
                    p.left,
                    p.right
                )));
            }
        }
        for i in 1..pieces.len() {
            if pieces[i - 1].right != pieces[i].left {
                return Err(Error::InvalidPartition(format!(
                    "pieces {} and {} do not share a boundary: {} vs {}",
                    i,
                    i + 1,
                    pieces[i - 1].right,
                    pieces[i].left
                )));
            }
        }
        let last = pieces.last().unwrap();
        if last.right != period {
            return Err(Error::InvalidPartition(format!(
                "last piece must end at the period: {} vs {period}",
                last.right
            )));
        }
        if last.right_closed {
            return Err(Error::InvalidPartition(
                "last piece must be right-open; the period point wraps to 0".into(),
            ));
        }
        for i in 1..pieces.len() {
            let (a, b) = (&pieces[i - 1], &pieces[i]);
            if a.slope == b.slope && a.intercept == b.intercept {
                return Err(Error::NotMaximal(format!(
                    "pieces {} and {} lie on the same line",
                    i,
                    i + 1
                )));
            }
        }
        Ok(Self { period, pieces })
    }

    pub fn period(&self) -> &Scalar {
        &self.period
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub(crate) fn locate(&self, x: &Scalar) -> usize {
        for (i, p) in self.pieces.iter().enumerate() {
            if x < &p.right || (x == &p.right && p.right_closed) {
                return i;
            }
        }
        unreachable!("reduced argument lies in [0, period)")
    }

    /// 1-based index of the piece owning `x` (after reduction mod the period).
    pub fn piece_index_of(&self, x: &Scalar) -> Result<usize> {
        let r = x.reduce_mod_period(&self.period)?;
        Ok(self.locate(&r) + 1)
    }

    pub fn eval(&self, x: &Scalar) -> Result<Scalar> {
        let r = x.reduce_mod_period(&self.period)?;
        Ok(self.pieces[self.locate(&r)].value_at(&r))
    }

    /// `(piece count, number of distinct absolute slopes)`.
    pub fn slope_stats(&self) -> (usize, usize) {
        let abs: BTreeSet<Scalar> = self.pieces.iter().map(|p| p.slope.abs()).collect();
        (self.pieces.len(), abs.len())
    }

    pub fn extrema(&self) -> FunctionExtrema {
        let mut inf = self.pieces[0].left_value();
        let mut sup = inf.clone();
        for p in &self.pieces {
            for v in [p.left_value(), p.right_value()] {
                if v < inf {
                    inf = v.clone();
                }
                if v > sup {
                    sup = v;
                }
            }
        }
        FunctionExtrema {
            inf_value: inf,
            sup_value: sup,
        }
    }

    fn value_intervals(&self) -> Vec<(Scalar, bool, Scalar, bool)> {
        // (lo, lo_open, hi, hi_open) of each piece's value set over its actual
        // domain: the left endpoint belongs to the previous piece when that
        // piece is right-closed.
        let mut out = Vec::with_capacity(self.pieces.len());
        for (i, p) in self.pieces.iter().enumerate() {
            let dom_left_open = i > 0 && self.pieces[i - 1].right_closed;
            let dom_right_open = !p.right_closed;
            let (lv, rv) = (p.left_value(), p.right_value());
            if p.slope.is_negative() {
                out.push((rv, dom_right_open, lv, dom_left_open));
            } else {
                out.push((lv, dom_left_open, rv, dom_right_open));
            }
        }
        out
    }

    /// Whether the function is injective on the fundamental domain `[0, P)`.
    pub fn injective_on_fd(&self) -> bool {
        if self.pieces.iter().any(|p| p.slope.is_zero()) {
            return false;
        }
        let iv = self.value_intervals();
        for i in 0..iv.len() {
            for j in (i + 1)..iv.len() {
                if intervals_intersect(&iv[i], &iv[j]) {
                    return false;
                }
            }
        }
        true
    }

    /// Whether the function is strictly monotone on the fundamental domain.
    pub fn monotone_on_fd(&self) -> bool {
        let increasing = self.pieces.iter().all(|p| p.slope.is_positive());
        let decreasing = self.pieces.iter().all(|p| p.slope.is_negative());
        if !increasing && !decreasing {
            return false;
        }
        for i in 1..self.pieces.len() {
            let at_boundary = &self.pieces[i].left;
            let before = self.pieces[i - 1].value_at(at_boundary);
            let after = self.pieces[i].value_at(at_boundary);
            let ok = if increasing {
                before <= after
            } else {
                before >= after
            };
            if !ok {
                return false;
            }
        }
        true
    }

    /// The function `c1 * f + c2` over the same partition. `c1` must be
    /// nonzero, otherwise the image is constant and the partition collapses.
    pub fn affine_image(&self, c1: &Scalar, c2: &Scalar) -> Result<Self> {
        if c1.is_zero() {
            return Err(Error::InvalidArgument(
                "affine image requires a nonzero scale".into(),
            ));
        }
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece {
                left: p.left.clone(),
                right: p.right.clone(),
                right_closed: p.right_closed,
                slope: p.slope.mul(c1),
                intercept: p.intercept.mul(c1).add(c2),
            })
            .collect();
        Self::new(self.period.clone(), pieces)
    }

    pub fn is_exact(&self) -> bool {
        self.period.is_exact()
            && self.pieces.iter().all(|p| {
                p.left.is_exact() && p.right.is_exact() && p.slope.is_exact() && p.intercept.is_exact()
            })
    }
}

fn intervals_intersect(a: &(Scalar, bool, Scalar, bool), b: &(Scalar, bool, Scalar, bool)) -> bool {
    let (alo, alo_open, ahi, ahi_open) = a;
    let (blo, blo_open, bhi, bhi_open) = b;
    let left_ok = alo < bhi || (alo == bhi && !alo_open && !bhi_open);
    let right_ok = blo < ahi || (blo == ahi && !blo_open && !ahi_open);
    left_ok && right_ok
}

type AnalyticEval = Arc<dyn Fn(&Scalar, usize) -> Scalar + Send + Sync>;

/// A smooth periodic function given by closures for `f`, `f'`, `f''`. Each
/// closure receives the evaluation point and a working precision in bits.
#[derive(Clone)]
pub struct AnalyticPeriodic {
    name: String,
    period: Scalar,
    inf_value: Scalar,
    sup_value: Scalar,
    f: AnalyticEval,
    df: AnalyticEval,
    d2f: AnalyticEval,
}

impl fmt::Debug for AnalyticPeriodic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticPeriodic")
            .field("name", &self.name)
            .field("period", &self.period)
            .field("inf_value", &self.inf_value)
            .field("sup_value", &self.sup_value)
            .finish_non_exhaustive()
    }
}

const CHECK_BITS: usize = 256;

impl AnalyticPeriodic {
    /// Builds an analytic periodic function. The constructor spot-checks that
    /// `f` has the stated period and that `df` and `d2f` are consistent with
    /// central finite differences of `f` and `df`.
    pub fn new(
        name: impl Into<String>,
        period: Scalar,
        inf_value: Scalar,
        sup_value: Scalar,
        f: AnalyticEval,
        df: AnalyticEval,
        d2f: AnalyticEval,
    ) -> Result<Self> {
        if !period.is_positive() {
            return Err(Error::InvalidArgument(format!(
                "period must be positive, got {period}"
            )));
        }
        if inf_value > sup_value {
            return Err(Error::InvalidArgument(
                "inf_value exceeds sup_value".into(),
            ));
        }
        let out = Self {
            name: name.into(),
            period,
            inf_value,
            sup_value,
            f,
            df,
            d2f,
        };
        out.spot_check()?;
        Ok(out)
    }

    fn spot_check(&self) -> Result<()> {
        let tol_period = Scalar::from_decimal_str("1e-20", CHECK_BITS).unwrap();
        let tol_diff = Scalar::from_decimal_str("1e-12", CHECK_BITS).unwrap();
        let h = Scalar::from_decimal_str("1e-8", CHECK_BITS).unwrap();
        let two_h = h.add(&h);
        for t in ["0.13", "0.37", "0.71"] {
            let x = Scalar::from_decimal_str(t, CHECK_BITS)
                .unwrap()
                .mul(&self.period);
            let fx = (self.f)(&x, CHECK_BITS);
            let fxp = (self.f)(&x.add(&self.period), CHECK_BITS);
            if fxp.sub(&fx).abs() > tol_period {
                return Err(Error::InvalidArgument(format!(
                    "function is not periodic with period {} near x = {x}",
                    self.period
                )));
            }
            for (g, dg) in [(&self.f, &self.df), (&self.df, &self.d2f)] {
                let hi = g(&x.add(&h), CHECK_BITS);
                let lo = g(&x.sub(&h), CHECK_BITS);
                let approx = hi.sub(&lo).div(&two_h);
                if approx.sub(&dg(&x, CHECK_BITS)).abs() > tol_diff {
                    return Err(Error::InvalidArgument(format!(
                        "derivative closure disagrees with finite differences near x = {x}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn period(&self) -> &Scalar {
        &self.period
    }

    pub fn extrema(&self) -> FunctionExtrema {
        FunctionExtrema {
            inf_value: self.inf_value.clone(),
            sup_value: self.sup_value.clone(),
        }
    }

    pub fn eval(&self, x: &Scalar, bits: usize) -> Scalar {
        (self.f)(x, bits)
    }

    pub fn eval_df(&self, x: &Scalar, bits: usize) -> Scalar {
        (self.df)(x, bits)
    }

    pub fn eval_d2f(&self, x: &Scalar, bits: usize) -> Scalar {
        (self.d2f)(x, bits)
    }
}

/// Either family behind one interface.
#[derive(Clone, Debug)]
pub enum PeriodicFn {
    Pl(PiecewiseLinearPeriodic),
    Analytic(AnalyticPeriodic),
}

impl PeriodicFn {
    pub fn eval(&self, x: &Scalar, bits: usize) -> Result<Scalar> {
        match self {
            // Analytic evaluation takes the unreduced argument: range reduction
            // happens inside the closure at working precision, which avoids the
            // error of reducing by an approximate period first.
            PeriodicFn::Pl(f) => f.eval(x),
            PeriodicFn::Analytic(f) => Ok(f.eval(x, bits)),
        }
    }

    pub fn period(&self) -> &Scalar {
        match self {
            PeriodicFn::Pl(f) => f.period(),
            PeriodicFn::Analytic(f) => f.period(),
        }
    }

    pub fn extrema(&self) -> FunctionExtrema {
        match self {
            PeriodicFn::Pl(f) => f.extrema(),
            PeriodicFn::Analytic(f) => f.extrema(),
        }
    }

    pub fn is_exact(&self) -> bool {
        match self {
            PeriodicFn::Pl(f) => f.is_exact(),
            PeriodicFn::Analytic(_) => false,
        }
    }

    pub fn name(&self) -> String {
        match self {
            PeriodicFn::Pl(_) => "piecewise_linear".into(),
            PeriodicFn::Analytic(f) => f.name().into(),
        }
    }

    pub fn as_pl(&self) -> Option<&PiecewiseLinearPeriodic> {
        match self {
            PeriodicFn::Pl(f) => Some(f),
            PeriodicFn::Analytic(_) => None,
        }
    }
}

/// The unit sawtooth: `f(x) = x` on `[0, 1)`.
pub fn sawtooth() -> PeriodicFn {
    let pieces = vec![Piece::new(
        Scalar::zero(),
        Scalar::one(),
        Scalar::one(),
        Scalar::zero(),
    )];
    PeriodicFn::Pl(PiecewiseLinearPeriodic::new(Scalar::one(), pieces).unwrap())
}

/// The unit triangle wave: up with slope 1 on `[0, 1/2)`, down with slope -1
/// on `[1/2, 1)`.
pub fn triangle() -> PeriodicFn {
    let pieces = vec![
        Piece::new(
            Scalar::zero(),
            Scalar::ratio(1, 2),
            Scalar::one(),
            Scalar::zero(),
        ),
        Piece::new(
            Scalar::ratio(1, 2),
            Scalar::one(),
            Scalar::from_int(-1),
            Scalar::one(),
        ),
    ];
    PeriodicFn::Pl(PiecewiseLinearPeriodic::new(Scalar::one(), pieces).unwrap())
}

/// `cos(x - shift)` with period `2 * pi` computed at `bits`.
pub fn shifted_cosine(shift: &Scalar, bits: usize) -> PeriodicFn {
    let period = Scalar::pi(bits).add(&Scalar::pi(bits));
    let name = if shift.is_zero() {
        "cosine".to_string()
    } else {
        format!("shifted_cosine({shift})")
    };
    let s_f = shift.clone();
    let s_df = shift.clone();
    let s_d2f = shift.clone();
    let f: AnalyticEval = Arc::new(move |x, p| x.sub(&s_f).cos(p));
    let df: AnalyticEval = Arc::new(move |x, p| x.sub(&s_df).sin(p).neg());
    let d2f: AnalyticEval = Arc::new(move |x, p| x.sub(&s_d2f).cos(p).neg());
    PeriodicFn::Analytic(
        AnalyticPeriodic::new(
            name,
            period,
            Scalar::from_int(-1),
            Scalar::one(),
            f,
            df,
            d2f,
        )
        .expect("cosine family passes its own spot checks"),
    )
}

/// `cos(x)` with period `2 * pi` computed at `bits`.
pub fn cosine(bits: usize) -> PeriodicFn {
    shifted_cosine(&Scalar::zero(), bits)
}

/// Looks up a builtin by name: `sawtooth`, `triangle`, `cosine`, or
/// `shifted_cosine(<rational or decimal>)`.
pub fn builtin(name: &str, bits: usize) -> Result<PeriodicFn> {
    let name = name.trim();
    match name {
        "sawtooth" => return Ok(sawtooth()),
        "triangle" => return Ok(triangle()),
        "cosine" => return Ok(cosine(bits)),
        _ => {}
    }
    if let Some(inner) = name
        .strip_prefix("shifted_cosine(")
        .and_then(|r| r.strip_suffix(')'))
    {
        let shift = crate::scalar::parse_rational(inner)
            .or_else(|_| rational_from_decimal_str(inner))
            .map(Scalar::Exact)?;
        return Ok(shifted_cosine(&shift, bits));
    }
    Err(Error::InvalidArgument(format!(
        "unknown builtin function {name:?}"
    )))
}
