//! Degree-graded exact division of polynomials with vanishing denominators.
//!
//! Solves q * x = P for a truncated series x when the quotient P/q is analytic
//! at the origin, without any polynomial GCD machinery. Writing q = q_low +
//! q_high with q_low the lowest-degree homogeneous part, each homogeneous
//! piece x_d of the solution satisfies the exact linear system
//!
//! ```text
//!   q_low * x_d = (P - q * x_{<d})_{d + deg q_low}
//! ```
//!
//! over the rationals. Multiplication by the nonzero polynomial q_low is
//! injective, so the solution is unique whenever it exists; an inconsistent
//! system at some degree certifies that P/q is not analytic at 0.

use num_traits::Zero;

use super::exponent::ExponentVector;
use super::linalg::solve_exact_multi;
use super::poly::MultiPoly;
use super::series::TruncSeries;
use super::{AlgebraError, Rational};

/// Solves q * x = P through total degree `d + deg(q_low)`, returning x as a
/// series truncated at degree `d`.
pub fn series_solve_vanishing_div(
    q: &MultiPoly,
    p: &MultiPoly,
    d: u32,
) -> Result<TruncSeries, AlgebraError> {
    let xs = series_solve_vanishing_div_multi(q, std::slice::from_ref(p), d)?;
    Ok(xs.into_iter().next().unwrap())
}

/// Multi-right-hand-side variant of [`series_solve_vanishing_div`]; the
/// elimination work for each degree is shared across all targets.
pub fn series_solve_vanishing_div_multi(
    q: &MultiPoly,
    ps: &[MultiPoly],
    d: u32,
) -> Result<Vec<TruncSeries>, AlgebraError> {
    if q.is_zero() {
        return Err(AlgebraError::ZeroDivisor);
    }
    let n = q.dim();
    for p in ps {
        if p.dim() != n {
            return Err(AlgebraError::DimensionMismatch {
                expected: n,
                got: p.dim(),
            });
        }
    }
    let d0 = q.lowest_degree().expect("nonzero divisor");
    let q_low = q.homogeneous_part(d0);
    let single = single_monomial(&q_low);

    let mut xs: Vec<TruncSeries> = vec![TruncSeries::zero(n, d); ps.len()];
    // residual_j = P_j - q * x_j, kept truncated at degree d + d0.
    let mut residuals: Vec<TruncSeries> = ps
        .iter()
        .map(|p| TruncSeries::from_poly(p, d + d0))
        .collect();
    let q_series = TruncSeries::from_poly(q, d + d0);

    for deg in 0..=d {
        let target = deg + d0;
        let monos_x = ExponentVector::homogeneous(n, deg);
        let monos_t = ExponentVector::homogeneous(n, target);
        // Consistency: residual components of degree < target must vanish
        // (they can never be reached by q * x_d for d >= deg).
        for r in residuals.iter() {
            for (k, c) in r.terms() {
                if k.total_degree() < target && !c.is_zero() {
                    return Err(AlgebraError::InconsistentDivision {
                        degree: k.total_degree(),
                    });
                }
            }
        }
        let pieces: Vec<MultiPoly> = if let Some((mono, coeff)) = &single {
            // Fast path: q_low is a single monomial, so the system is diagonal.
            let mut pieces = vec![MultiPoly::zero(n); ps.len()];
            for (j, r) in residuals.iter().enumerate() {
                for k in &monos_t {
                    let c = r.coefficient(k);
                    if c.is_zero() {
                        continue;
                    }
                    match k.checked_sub(mono) {
                        Some(kx) => pieces[j].add_term(kx, c / coeff),
                        None => {
                            return Err(AlgebraError::InconsistentDivision {
                                degree: target,
                            })
                        }
                    }
                }
            }
            pieces
        } else {
            // General path: exact Gaussian elimination on the multiplication
            // map by q_low from degree `deg` to degree `target`.
            let a: Vec<Vec<Rational>> = monos_t
                .iter()
                .map(|kt| {
                    monos_x
                        .iter()
                        .map(|kx| match kt.checked_sub(kx) {
                            Some(kq) => q_low.coefficient(&kq),
                            None => Rational::zero(),
                        })
                        .collect()
                })
                .collect();
            let b: Vec<Vec<Rational>> = monos_t
                .iter()
                .map(|kt| residuals.iter().map(|r| r.coefficient(kt)).collect())
                .collect();
            let sol = solve_exact_multi(&a, &b).map_err(|e| match e {
                AlgebraError::InconsistentSystem => {
                    AlgebraError::InconsistentDivision { degree: target }
                }
                other => other,
            })?;
            let mut pieces = vec![MultiPoly::zero(n); ps.len()];
            for (row, kx) in monos_x.iter().enumerate() {
                for j in 0..ps.len() {
                    pieces[j].add_term(kx.clone(), sol[row][j].clone());
                }
            }
            pieces
        };
        for (j, piece) in pieces.iter().enumerate() {
            if piece.is_zero() {
                continue;
            }
            let piece_series = TruncSeries::from_poly(piece, d + d0);
            residuals[j] = &residuals[j] - &(&q_series * &piece_series);
            for (k, c) in piece.terms() {
                xs[j].add_term(k.clone(), c.clone());
            }
        }
    }
    // Final consistency: everything at or below degree d + d0 must be cleared.
    for r in &residuals {
        for (k, c) in r.terms() {
            if !c.is_zero() && k.total_degree() <= d + d0 {
                return Err(AlgebraError::InconsistentDivision {
                    degree: k.total_degree(),
                });
            }
        }
    }
    Ok(xs)
}

fn single_monomial(p: &MultiPoly) -> Option<(ExponentVector, Rational)> {
    if p.num_terms() == 1 {
        p.terms().next().map(|(k, c)| (k.clone(), c.clone()))
    } else {
        None
    }
}

/// Exact polynomial division: returns x with q * x == P as polynomials, or
/// `None` when q does not divide P.
pub fn exact_poly_div(q: &MultiPoly, p: &MultiPoly) -> Option<MultiPoly> {
    if q.is_zero() {
        return None;
    }
    if p.is_zero() {
        return Some(MultiPoly::zero(p.dim()));
    }
    let d0 = q.lowest_degree().expect("nonzero divisor");
    let deg_p = p.total_degree() as u32;
    let deg_needed = deg_p.checked_sub(d0)?;
    let x = series_solve_vanishing_div(q, p, deg_needed).ok()?;
    let x_poly = x.to_poly();
    if &(q * &x_poly) == p {
        Some(x_poly)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::poly_parse;

    #[test]
    fn exact_monomial_division() {
        let q = poly_parse("m1", 1).unwrap();
        let p = poly_parse("m1 + m1^2", 1).unwrap();
        let x = series_solve_vanishing_div(&q, &p, 4).unwrap();
        assert_eq!(x.to_poly(), poly_parse("1 + m1", 1).unwrap());
    }

    #[test]
    fn geometric_expansion_through_truncation() {
        let q = poly_parse("m1*m2*(1 + m1 + m2)", 2).unwrap();
        let p = poly_parse("m1*m2", 2).unwrap();
        let x = series_solve_vanishing_div(&q, &p, 4).unwrap();
        // 1/(1+m1+m2) = sum (-(m1+m2))^j
        let mut expected = MultiPoly::zero(2);
        let s = poly_parse("m1 + m2", 2).unwrap();
        for j in 0..=4u32 {
            let sign = if j % 2 == 0 { "1" } else { "-1" };
            expected = &expected + &s.pow(j).scale(&sign.parse().unwrap());
        }
        let expected = TruncSeries::from_poly(&expected, 4);
        assert_eq!(x, expected);
        // Certificate: q * x - P vanishes through degree d + deg(q_low) = 4 + 2.
        let prod = &TruncSeries::from_poly(&q, 7) * &TruncSeries::from_poly(&x.to_poly(), 7);
        let diff = &prod - &TruncSeries::from_poly(&p, 7);
        assert!(diff.terms().all(|(k, _)| k.total_degree() > 4 + 2));
    }

    #[test]
    fn non_analytic_quotient_is_rejected() {
        let q = poly_parse("m1", 2).unwrap();
        let p = poly_parse("m2", 2).unwrap();
        match series_solve_vanishing_div(&q, &p, 3) {
            Err(AlgebraError::InconsistentDivision { .. }) => {}
            other => panic!("expected inconsistent division, got {other:?}"),
        }
    }

    #[test]
    fn exact_poly_div_detects_divisibility() {
        let q = poly_parse("1 + m1 + m2", 2).unwrap();
        let x = poly_parse("m1^2 - m2 + 3", 2).unwrap();
        let p = &q * &x;
        assert_eq!(exact_poly_div(&q, &p), Some(x));
        let p1 = poly_parse("m1", 2).unwrap();
        assert_eq!(exact_poly_div(&q, &p1), None);
    }
}
