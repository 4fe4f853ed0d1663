//! Orbits, gap reports, and gap classification.
//!
//! For a periodic function `f`, a step `alpha`, an offset `beta`, and a sample
//! count `N`, the orbit is `f(d * alpha + beta)` for `d = 1..=N`. Sorting the
//! distinct orbit values `s_1 < ... < s_n` yields `n` gaps: the `n - 1`
//! consecutive differences plus the extremal gap
//! `(s_1 - inf f) + (sup f - s_n)`, which wraps around through the function's
//! range. The gap set is the set of distinct gap lengths.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize};

use crate::periodic::PeriodicFn;
use crate::scalar::{cluster_distinct, cluster_ranges, gt_tol, Scalar, ToleranceContext};
use crate::{Error, Result};

/// Whether a computation ran on all-rational inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Approx,
}

/// One orbit point: the index, the reduced coordinate, the owning piece for
/// piecewise linear functions (1-based), and the function value.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitSample {
    pub d: u64,
    pub x_reduced: Scalar,
    pub piece_index: Option<usize>,
    pub value: Scalar,
}

/// Samples `f(d * alpha + beta)` for `d = 1..=n`.
pub fn orbit(
    f: &PeriodicFn,
    alpha: &Scalar,
    beta: &Scalar,
    n: u64,
    bits: usize,
) -> Result<Vec<OrbitSample>> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let period = f.period();
    let mut out = Vec::with_capacity(n as usize);
    for d in 1..=n {
        let x = Scalar::from_u64(d).mul(alpha).add(beta);
        let x_reduced = x.reduce_mod_period(period)?;
        let (piece_index, value) = match f {
            PeriodicFn::Pl(pl) => {
                let i = pl.locate(&x_reduced);
                (Some(i + 1), pl.pieces()[i].value_at(&x_reduced))
            }
            // Analytic functions get the unreduced argument: range reduction
            // happens inside at working precision.
            PeriodicFn::Analytic(a) => (None, a.eval(&x, bits)),
        };
        out.push(OrbitSample {
            d,
            x_reduced,
            piece_index,
            value,
        });
    }
    Ok(out)
}

/// Classification of a gap between nearest-neighbor orbit values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GapKind {
    /// Both endpoint values have preimages in the same piece (1-based index).
    Interior(usize),
    NonInterior,
    /// The wraparound gap through inf f and sup f.
    Extremal,
    /// Not yet classified (analytic functions, or before classify_gaps).
    Unclassified,
}

impl GapKind {
    pub fn label(&self) -> &'static str {
        match self {
            GapKind::Interior(_) => "interior",
            GapKind::NonInterior => "non_interior",
            GapKind::Extremal => "extremal",
            GapKind::Unclassified => "unclassified",
        }
    }

    pub fn piece(&self) -> Option<usize> {
        match self {
            GapKind::Interior(p) => Some(*p),
            _ => None,
        }
    }

    fn csv_label(&self) -> String {
        match self {
            GapKind::Interior(p) => format!("interior({p})"),
            _ => self.label().to_string(),
        }
    }
}

/// One gap. For consecutive gaps `lower_value < upper_value` and the length is
/// their difference; for the extremal gap `lower_value` is the largest orbit
/// value, `upper_value` the smallest, and the length wraps through the range.
/// `d_lower` and `d_upper` are the smallest indices attaining each value.
#[derive(Clone, Debug)]
pub struct GapEntry {
    pub lower_value: Scalar,
    pub upper_value: Scalar,
    pub d_lower: u64,
    pub d_upper: u64,
    pub length: Scalar,
    pub kind: GapKind,
}

impl Serialize for GapEntry {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("GapEntry", 7)?;
        st.serialize_field("length", &self.length)?;
        st.serialize_field("kind", self.kind.label())?;
        st.serialize_field("piece", &self.kind.piece())?;
        st.serialize_field("lower", &self.lower_value)?;
        st.serialize_field("upper", &self.upper_value)?;
        st.serialize_field("d_lower", &self.d_lower)?;
        st.serialize_field("d_upper", &self.d_upper)?;
        st.end()
    }
}

/// The full gap analysis of one orbit.
#[derive(Clone, Debug)]
pub struct GapReport {
    /// Distinct orbit values, ascending.
    pub sorted_values: Vec<Scalar>,
    /// For each distinct value, the set of 1-based piece indices over all
    /// samples attaining it (empty for analytic functions).
    pub value_pieces: Vec<BTreeSet<usize>>,
    /// `n - 1` consecutive gaps in ascending position order, then the extremal
    /// gap last.
    pub entries: Vec<GapEntry>,
    /// Gap lengths with multiplicity, in entry order.
    pub gap_multiset: Vec<Scalar>,
    /// Distinct gap lengths, ascending.
    pub gap_set: Vec<Scalar>,
    pub mode: Mode,
    pub ctx: ToleranceContext,
}

impl GapReport {
    pub fn distinct_count(&self) -> usize {
        self.gap_set.len()
    }

    pub fn extremal_entry(&self) -> &GapEntry {
        self.entries.last().expect("reports always hold an extremal entry")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("d_range,lower,upper,length,kind\n");
        for e in &self.entries {
            writeln!(
                out,
                "{}-{},{},{},{},{}",
                e.d_lower,
                e.d_upper,
                e.lower_value.to_literal(),
                e.upper_value.to_literal(),
                e.length.to_literal(),
                e.kind.csv_label()
            )
            .unwrap();
        }
        out
    }
}

impl Serialize for GapReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("GapReport", 6)?;
        st.serialize_field("n", &self.sorted_values.len())?;
        st.serialize_field("values", &self.sorted_values)?;
        st.serialize_field("gaps", &self.entries)?;
        st.serialize_field("gap_set", &self.gap_set)?;
        st.serialize_field("mode", &self.mode)?;
        st.serialize_field("ctx", &self.ctx)?;
        st.end()
    }
}

/// Computes the gap report of the orbit `f(d * alpha + beta)`, `d = 1..=n`.
///
/// Distinctness of orbit values and of gap lengths both use `ctx`. The report
/// is in exact mode iff the function and both parameters are exact.
pub fn gap_report(
    f: &PeriodicFn,
    alpha: &Scalar,
    beta: &Scalar,
    n: u64,
    ctx: &ToleranceContext,
) -> Result<GapReport> {
    let samples = orbit(f, alpha, beta, n, ctx.precision_bits())?;
    let mode = if f.is_exact() && alpha.is_exact() && beta.is_exact() {
        Mode::Exact
    } else {
        Mode::Approx
    };

    let mut idx: Vec<usize> = (0..samples.len()).collect();
    idx.sort_by(|&a, &b| samples[a].value.cmp_scalar(&samples[b].value));
    let by_value: Vec<Scalar> = idx.iter().map(|&i| samples[i].value.clone()).collect();

    let mut sorted_values = Vec::new();
    let mut value_pieces = Vec::new();
    let mut min_d = Vec::new();
    for (start, end) in cluster_ranges(&by_value, ctx)? {
        sorted_values.push(by_value[start].clone());
        let mut pieces = BTreeSet::new();
        let mut d = u64::MAX;
        for k in start..end {
            let sample = &samples[idx[k]];
            if let Some(p) = sample.piece_index {
                pieces.insert(p);
            }
            d = d.min(sample.d);
        }
        value_pieces.push(pieces);
        min_d.push(d);
    }

    let count = sorted_values.len();
    let mut entries = Vec::with_capacity(count);
    let mut gap_multiset = Vec::with_capacity(count);
    for j in 1..count {
        let length = sorted_values[j].sub(&sorted_values[j - 1]);
        entries.push(GapEntry {
            lower_value: sorted_values[j - 1].clone(),
            upper_value: sorted_values[j].clone(),
            d_lower: min_d[j - 1],
            d_upper: min_d[j],
            length: length.clone(),
            kind: GapKind::Unclassified,
        });
        gap_multiset.push(length);
    }

    let extrema = f.extrema();
    let mut extremal_length = sorted_values[0]
        .sub(&extrema.inf_value)
        .add(&extrema.sup_value.sub(&sorted_values[count - 1]));
    // Rounding can push an extremal length of zero slightly negative when the
    // orbit attains both extrema; clamp within tolerance.
    if extremal_length.is_negative() && !gt_tol(&extremal_length.abs(), &Scalar::zero(), ctx) {
        extremal_length = Scalar::zero();
    }
    entries.push(GapEntry {
        lower_value: sorted_values[count - 1].clone(),
        upper_value: sorted_values[0].clone(),
        d_lower: min_d[count - 1],
        d_upper: min_d[0],
        length: extremal_length.clone(),
        kind: GapKind::Extremal,
    });
    gap_multiset.push(extremal_length);

    let mut lengths = gap_multiset.clone();
    lengths.sort();
    let gap_set = cluster_distinct(&lengths, ctx)?;

    Ok(GapReport {
        sorted_values,
        value_pieces,
        entries,
        gap_multiset,
        gap_set,
        mode,
        ctx: ctx.clone(),
    })
}

/// Assigns interior / non-interior kinds to the consecutive gaps of a report
/// produced from a piecewise linear function. A gap is interior to piece `i`
/// when both endpoint values have a preimage in piece `i`; when several pieces
/// qualify the smallest index is reported.
pub fn classify_gaps(report: &mut GapReport, f: &PeriodicFn) -> Result<()> {
    if f.as_pl().is_none() {
        return Err(Error::Unsupported(
            "gap classification requires a piecewise linear function".into(),
        ));
    }
    if report.value_pieces.iter().any(BTreeSet::is_empty) {
        return Err(Error::Unsupported(
            "report lacks piece annotations; was it computed from this function?".into(),
        ));
    }
    let consecutive = report.entries.len() - 1;
    for j in 0..consecutive {
        let common = report.value_pieces[j]
            .intersection(&report.value_pieces[j + 1])
            .next()
            .copied();
        report.entries[j].kind = match common {
            Some(p) => GapKind::Interior(p),
            None => GapKind::NonInterior,
        };
    }
    Ok(())
}

/// Gap multiset of a finite point set on the unit circle: consecutive
/// differences of the distinct sorted points plus the wraparound arc. A single
/// distinct point yields the full circle, length 1.
pub fn circle_gaps(points: &[Scalar], ctx: &ToleranceContext) -> Result<Vec<Scalar>> {
    if points.is_empty() {
        return Err(Error::InvalidArgument(
            "at least one circle point required".into(),
        ));
    }
    let one = Scalar::one();
    for p in points {
        if p.is_negative() || *p >= one {
            return Err(Error::InvalidArgument(format!(
                "circle points must lie in [0, 1), got {p}"
            )));
        }
    }
    let mut sorted = points.to_vec();
    sorted.sort();
    let distinct = cluster_distinct(&sorted, ctx)?;
    if distinct.len() == 1 {
        return Ok(vec![one]);
    }
    let mut gaps: Vec<Scalar> = distinct.windows(2).map(|w| w[1].sub(&w[0])).collect();
    let span = distinct.last().unwrap().sub(&distinct[0]);
    gaps.push(one.sub(&span));
    Ok(gaps)
}

/// Gap multiset of the union of the two orbits `{d * alpha}` and
/// `{d * alpha + beta}` on the circle, `d = 0..=n`.
pub fn two_orbit_circle_gaps(
    alpha: &Scalar,
    beta: &Scalar,
    n: u64,
    ctx: &ToleranceContext,
) -> Result<Vec<Scalar>> {
    let mut points = Vec::with_capacity(2 * (n as usize + 1));
    for d in 0..=n {
        let base = Scalar::from_u64(d).mul(alpha);
        points.push(base.frac());
        points.push(base.add(beta).frac());
    }
    circle_gaps(&points, ctx)
}
