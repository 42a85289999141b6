//! Computer algebra for natural exponential families: the GL(n+1) action on
//! variance functions, classification of simple quadratic/cubic families,
//! recovery of lattice generating measures by multivariate Lagrange
//! inversion, and tilted density constructions for the subgroup of
//! homographies fixing the origin direction.
//!
//! All symbolic computation is exact over arbitrary-precision rationals;
//! floating point appears only in the numeric density kernels and in the
//! rank-deficient branch of the group decomposition.

pub mod algebra;
pub mod catalog;
pub mod group;
pub mod lagrange;
pub mod recover;
pub mod rouques;
pub mod sampling;
pub mod suites;
pub mod transform;

pub use algebra::Rational;
