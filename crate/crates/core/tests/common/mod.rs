//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use gaplab::{Scalar, ToleranceContext};

pub const BITS: usize = 256;

pub fn rat(s: &str) -> Scalar {
    Scalar::from_rational_str(s).expect("rational literal")
}

pub fn dec(s: &str) -> Scalar {
    Scalar::from_decimal_str(s, BITS).expect("decimal literal")
}

pub fn exact_ctx() -> ToleranceContext {
    ToleranceContext::exact()
}

pub fn approx_ctx() -> ToleranceContext {
    ToleranceContext::approx(BITS)
}

/// Asserts that `v` is within `tol` of the reference decimal expansion.
pub fn assert_close(v: &Scalar, oracle: &str, tol: &str) {
    let diff = v.sub(&dec(oracle)).abs();
    let bound = dec(tol);
    assert!(
        diff <= bound,
        "expected {v} within {tol} of {oracle}, off by {diff}"
    );
}

/// Asserts that two scalars compare equal under the total order.
pub fn assert_same(a: &Scalar, b: &Scalar) {
    assert!(a == b, "expected {a} == {b}");
}
