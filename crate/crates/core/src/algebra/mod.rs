//! Exact rational arithmetic, multivariate polynomials, truncated power
//! series, and the division kernel the rest of the crate builds on.
//!
//! Everything here is exact: coefficients are arbitrary-precision rationals
//! and no operation ever rounds. Monomials are ordered graded-lexicographically
//! throughout, which fixes a canonical form for polynomials and series.

pub mod divide;
pub mod exponent;
pub mod linalg;
pub mod parse;
pub mod poly;
pub mod series;

pub use divide::{exact_poly_div, series_solve_vanishing_div, series_solve_vanishing_div_multi};
pub use exponent::ExponentVector;
pub use parse::{poly_parse, rational_parse, rational_to_string, series_parse};
pub use poly::{MultiPoly, PolyMatrix};
pub use series::{series_det, SeriesVector, TruncSeries};

/// Exact scalar type: arbitrary-precision rational, always in lowest terms
/// with positive denominator.
pub type Rational = num_rational::BigRational;

/// Convenience constructor for small integer rationals.
pub fn rat(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

/// Convenience constructor p/q for small integers.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown variable '{name}' at byte {pos}")]
    UnknownVariable { pos: usize, name: String },
    #[error("negative exponent at byte {pos}")]
    NegativeExponent { pos: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("series has a nonzero constant term where zero is required")]
    NonzeroConstantTerm,
    #[error("series has a zero constant term where a unit is required")]
    ZeroConstantTerm,
    #[error("matrix entry ({row},{col}) breaks symmetry")]
    NotSymmetric { row: usize, col: usize },
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("inconsistent division at total degree {degree}: quotient is not analytic at 0")]
    InconsistentDivision { degree: u32 },
    #[error("linear system is inconsistent")]
    InconsistentSystem,
    #[error("linear system is underdetermined")]
    UnderdeterminedSystem,
}
