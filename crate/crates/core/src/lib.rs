//! Gap-length analysis for periodic functions sampled along arithmetic progressions.
//!
//! Given a bounded periodic function `f`, a step `alpha`, an offset `beta`, and a
//! count `N`, the library computes the sorted distinct values of `f(d*alpha + beta)`
//! for `d = 1..=N`, the multiset of consecutive differences together with the
//! wraparound (extremal) length `s_1 - inf f + sup f - s_n`, and the set of
//! distinct gap lengths. Gaps of piecewise-linear functions are classified as
//! interior, non-interior, or extremal. A suite of verifiers checks gap-count
//! bounds for several function classes, and two constructors produce instances
//! whose gap sets are provably large.
//!
//! Arithmetic is exact (arbitrary-precision rationals) whenever every input is
//! rational, and high-precision floating point (configurable mantissa width,
//! default 256 bits) with tolerance-based comparison otherwise.

pub mod gap;
pub mod periodic;
pub mod scalar;
pub mod sweep;
pub mod theorems;

pub use gap::{
    circle_gaps, classify_gaps, gap_report, orbit, two_orbit_circle_gaps, GapEntry, GapKind,
    GapReport, Mode, OrbitSample,
};
pub use periodic::{
    builtin, cosine, sawtooth, shifted_cosine, triangle, AnalyticPeriodic, FunctionExtrema,
    PeriodicFn, Piece, PiecewiseLinearPeriodic, PlDocument,
};
pub use scalar::{
    cluster_distinct, parse_rational, rational_from_decimal_str, Scalar, ToleranceContext,
    DEFAULT_PRECISION_BITS, MIN_PRECISION_BITS,
};
pub use sweep::{
    random_injective_pl, random_monotone_equal_end_pl, run_sweep, SweepConfig, SweepOutcome,
    SweepResult, SweepSummary,
};
pub use theorems::{
    construct_c2_witness, construct_unbounded_pl, find_first_zero, verify_affine,
    verify_five_distance, verify_general_bound, verify_main_construction, verify_three_gap,
    verify_tightened_bound, verify_triangle_bounds, verify_two_piece_shift, C2Witness,
    MainConstruction, StatementId, VerificationReport,
};

/// Errors shared by every module.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter is outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// Candidate pieces do not tile the fundamental domain.
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    /// Adjacent pieces are collinear; the partition is not maximal.
    #[error("not maximal: {0}")]
    NotMaximal(String),
    /// A verifier's hypotheses are not met; no bound is claimed.
    #[error("precondition violation: {0}")]
    PreconditionViolation(String),
    /// A construction's hypothesis fails (e.g. f''(0) = 0).
    #[error("hypothesis violation: {0}")]
    HypothesisViolation(String),
    /// A numeric search did not locate its target.
    #[error("search failure: {0}")]
    SearchFailure(String),
    /// The operation is not defined for this input class.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
