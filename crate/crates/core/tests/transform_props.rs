//! Cross-route checks for the transform engine: the symbolic matrix agrees
//! with the pointwise homography formula at random rational points.

use varfun::suites::{all_passed, pointwise_cross_check_suite};

#[test]
fn symbolic_equals_pointwise_at_fifty_points() {
    let outcomes = pointwise_cross_check_suite(42, 50);
    assert!(all_passed(&outcomes), "{:?}", outcomes);
}
