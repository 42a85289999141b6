//! Multivariate Lagrange inversion on truncated series: solve the fixed
//! point h(w) = diag(w) g(h(w)) and extract coefficients of g0(h(w)) through
//! the Jacobian-determinant formula
//!
//! ```text
//!   [w^k] g0(h(w)) = [z^k]( g0(z) g(z)^k D(g)(z) ),
//!   D(g)(z) = det( I_n - [ z_i / g_i(z) * dg_i/dz_j ] ).
//! ```

use num_traits::Zero;

use crate::algebra::{
    series_det, AlgebraError, ExponentVector, Rational, SeriesVector, TruncSeries,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LagrangeError {
    #[error("component {index} of g has zero constant term")]
    ZeroConstantTerm { index: usize },
    #[error("coefficient index has degree {degree} beyond the truncation {trunc}")]
    DegreeBeyondTruncation { degree: u32, trunc: u32 },
    #[error("g must have exactly n = {expected} components, got {got}")]
    ComponentCount { expected: usize, got: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A Lagrange inversion problem: g with unit constant terms, an optional
/// weight g0 (default 1), and the truncation degree carried by the series.
#[derive(Debug, Clone)]
pub struct LagrangeProblem {
    g: SeriesVector,
    g0: TruncSeries,
}

impl LagrangeProblem {
    pub fn new(g: SeriesVector, g0: Option<TruncSeries>) -> Result<Self, LagrangeError> {
        let n = g.dim_outer();
        if g.len() != n {
            return Err(LagrangeError::ComponentCount {
                expected: n,
                got: g.len(),
            });
        }
        for (i, comp) in g.components().iter().enumerate() {
            if comp.constant_term().is_zero() {
                return Err(LagrangeError::ZeroConstantTerm { index: i });
            }
        }
        let g0 = g0.unwrap_or_else(|| TruncSeries::one(n, g.truncation()));
        Ok(LagrangeProblem { g, g0 })
    }

    pub fn dim(&self) -> usize {
        self.g.dim_outer()
    }

    pub fn truncation(&self) -> u32 {
        self.g.truncation()
    }

    pub fn g(&self) -> &SeriesVector {
        &self.g
    }

    pub fn g0(&self) -> &TruncSeries {
        &self.g0
    }
}

/// Solves h = diag(w) g(h) by fixed-point iteration from h = 0. Each pass
/// fixes one more total degree, so D+1 iterations stabilize the truncated
/// solution; the residual invariant certifies the result.
pub fn solve_functional_equation(p: &LagrangeProblem) -> Result<SeriesVector, LagrangeError> {
    let n = p.dim();
    let d = p.truncation();
    let mut h = SeriesVector::zero(n, n, d);
    for _ in 0..=d {
        let mut next = Vec::with_capacity(n);
        for i in 0..n {
            let gi_h = p.g.component(i).compose(&h)?;
            let wi = TruncSeries::var(n, d, i);
            next.push(&wi * &gi_h);
        }
        let next = SeriesVector::new(next)?;
        if next == h {
            break;
        }
        h = next;
    }
    Ok(h)
}

/// The residual h - diag(w) g(h), identically zero through the truncation
/// for a correct solution.
pub fn fixed_point_residual(
    p: &LagrangeProblem,
    h: &SeriesVector,
) -> Result<SeriesVector, LagrangeError> {
    let n = p.dim();
    let d = p.truncation();
    let mut comps = Vec::with_capacity(n);
    for i in 0..n {
        let gi_h = p.g.component(i).compose(h)?;
        let wi = TruncSeries::var(n, d, i);
        comps.push(&h.components()[i].clone() - &(&wi * &gi_h));
    }
    Ok(SeriesVector::new(comps)?)
}

/// D(g)(z) = det(I - [ (z_i/g_i) dg_i/dz_j ]). The z_i d/dz_j operator
/// preserves total degree, so the entries are exact through the truncation.
pub fn jacobian_factor(g: &SeriesVector) -> Result<TruncSeries, LagrangeError> {
    let n = g.len();
    let d = g.truncation();
    let dim = g.dim_outer();
    for (i, comp) in g.components().iter().enumerate() {
        if comp.constant_term().is_zero() {
            return Err(LagrangeError::ZeroConstantTerm { index: i });
        }
    }
    let mut mat = vec![vec![TruncSeries::zero(dim, d); n]; n];
    for i in 0..n {
        let inv_gi = g.component(i).inverse_unit()?;
        for j in 0..n {
            let zi_dgi = g.component(i).mul_var_partial(i, j);
            let entry = &zi_dgi * &inv_gi;
            mat[i][j] = if i == j {
                &TruncSeries::one(dim, d) - &entry
            } else {
                -&entry
            };
        }
    }
    Ok(series_det(&mat)?)
}

/// [z^k]( g0(z) g(z)^k D(g)(z) ), the coefficient of w^k in g0(h(w)).
/// Products are truncated at |k|, which is all the extraction needs.
pub fn lagrange_coefficient(
    p: &LagrangeProblem,
    k: &ExponentVector,
) -> Result<Rational, LagrangeError> {
    let d = p.truncation();
    let deg = k.total_degree();
    if deg > d {
        return Err(LagrangeError::DegreeBeyondTruncation {
            degree: deg,
            trunc: d,
        });
    }
    let jac = jacobian_factor(&p.g)?;
    let mut acc = &p.g0.truncate(deg) * &jac.truncate(deg);
    for i in 0..p.dim() {
        let e = k.get(i);
        if e > 0 {
            let gi = p.g.component(i).truncate(deg);
            acc = &acc * &gi.pow(e);
        }
    }
    Ok(acc.coefficient(k))
}

/// Coefficient table for all |k| <= the truncation, sharing the Jacobian
/// factor and building g^k incrementally along the grlex enumeration.
pub fn lagrange_coefficient_table(
    p: &LagrangeProblem,
) -> Result<Vec<(ExponentVector, Rational)>, LagrangeError> {
    let n = p.dim();
    let d = p.truncation();
    let jac = jacobian_factor(&p.g)?;
    let base = &p.g0 * &jac;
    let mut powers: std::collections::BTreeMap<ExponentVector, TruncSeries> =
        std::collections::BTreeMap::new();
    powers.insert(ExponentVector::zeros(n), TruncSeries::one(n, d));
    let mut out = Vec::new();
    for k in ExponentVector::up_to_degree(n, d) {
        let gk = if k.is_zero() {
            powers[&k].clone()
        } else {
            let i = (0..n).find(|&i| k.get(i) > 0).unwrap();
            let prev = k.lower(i).unwrap();
            let gk = &powers[&prev] * p.g.component(i);
            powers.insert(k.clone(), gk.clone());
            gk
        };
        let coeff = (&base * &gk).coefficient(&k);
        out.push((k, coeff));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::series_parse;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn k1(e: u32) -> ExponentVector {
        ExponentVector::new(vec![e])
    }

    #[test]
    fn tree_function_coefficients() {
        // g = e^z: h = sum k^(k-1)/k! w^k
        let g = SeriesVector::new(vec![series_parse("exp(z1)", 1, 4).unwrap()]).unwrap();
        let p = LagrangeProblem::new(g, None).unwrap();
        let h = solve_functional_equation(&p).unwrap();
        let hc = &h.components()[0];
        assert_eq!(hc.coefficient(&k1(1)), q("1"));
        assert_eq!(hc.coefficient(&k1(2)), q("1"));
        assert_eq!(hc.coefficient(&k1(3)), q("3/2"));
        assert_eq!(hc.coefficient(&k1(4)), q("8/3"));
        let res = fixed_point_residual(&p, &h).unwrap();
        assert!(res.components().iter().all(|c| c.is_zero()));
    }

    #[test]
    fn constant_g_gives_identity() {
        let g = SeriesVector::new(vec![
            TruncSeries::one(2, 3),
            TruncSeries::one(2, 3),
        ])
        .unwrap();
        let p = LagrangeProblem::new(g, None).unwrap();
        let h = solve_functional_equation(&p).unwrap();
        assert_eq!(h, SeriesVector::identity(2, 3));
    }

    #[test]
    fn two_dimensional_residual() {
        let g = SeriesVector::new(vec![
            series_parse("1 + z2", 2, 3).unwrap(),
            series_parse("1 + z1", 2, 3).unwrap(),
        ])
        .unwrap();
        let p = LagrangeProblem::new(g, None).unwrap();
        let h = solve_functional_equation(&p).unwrap();
        let res = fixed_point_residual(&p, &h).unwrap();
        assert!(res.components().iter().all(|c| c.is_zero()));
    }

    #[test]
    fn jacobian_factor_examples() {
        // g = 1 => D = 1
        let g = SeriesVector::new(vec![TruncSeries::one(1, 4)]).unwrap();
        assert_eq!(jacobian_factor(&g).unwrap(), TruncSeries::one(1, 4));
        // g = e^z => D = 1 - z
        let g = SeriesVector::new(vec![series_parse("exp(z1)", 1, 4).unwrap()]).unwrap();
        assert_eq!(
            jacobian_factor(&g).unwrap(),
            series_parse("1 - z1", 1, 4).unwrap()
        );
        // G = (1+s) 1 with s = z1 + z2: D = det(I - m 1^T/(1+s)) = 1/(1+s)
        let one_plus_s = series_parse("1 + z1 + z2", 2, 5).unwrap();
        let g = SeriesVector::new(vec![one_plus_s.clone(), one_plus_s.clone()]).unwrap();
        assert_eq!(
            jacobian_factor(&g).unwrap(),
            one_plus_s.inverse_unit().unwrap()
        );
        // constant term of D(g) is 1 whenever every g_i(0) != 0
        let g = SeriesVector::new(vec![
            series_parse("2 + z1 - z2^2", 2, 4).unwrap(),
            series_parse("1/3 + z2", 2, 4).unwrap(),
        ])
        .unwrap();
        assert_eq!(jacobian_factor(&g).unwrap().constant_term(), q("1"));
    }

    #[test]
    fn coefficient_matches_fixed_point() {
        // with g0 = z (the projection), the formula recovers [w^k] h
        let g = SeriesVector::new(vec![series_parse("exp(z1)", 1, 4).unwrap()]).unwrap();
        let g0 = series_parse("z1", 1, 4).unwrap();
        let p = LagrangeProblem::new(g.clone(), Some(g0)).unwrap();
        let h = solve_functional_equation(&p).unwrap();
        for e in 1..=4u32 {
            let via_formula = lagrange_coefficient(&p, &k1(e)).unwrap();
            assert_eq!(via_formula, h.components()[0].coefficient(&k1(e)));
        }
        // k = 0 gives g0(0)
        assert_eq!(lagrange_coefficient(&p, &k1(0)).unwrap(), q("0"));
        // beyond the truncation errors out
        assert!(lagrange_coefficient(&p, &k1(5)).is_err());
    }

    #[test]
    fn two_sided_identity_small() {
        // direct composition g0(h(w)) coefficient-by-coefficient
        let g = SeriesVector::new(vec![
            series_parse("1 + z1 + 2*z2", 2, 4).unwrap(),
            series_parse("1 - z1*z2", 2, 4).unwrap(),
        ])
        .unwrap();
        let g0 = series_parse("1 + z1^2 - z2", 2, 4).unwrap();
        let p = LagrangeProblem::new(g, Some(g0.clone())).unwrap();
        let h = solve_functional_equation(&p).unwrap();
        let composed = g0.compose(&h).unwrap();
        for (k, coeff) in lagrange_coefficient_table(&p).unwrap() {
            assert_eq!(coeff, composed.coefficient(&k), "k = {k}");
        }
    }

    #[test]
    fn exp_minus_one_weight_matches_composition() {
        // g0 = e^z - 1 composed with the tree fixed point equals the
        // coefficient extraction route.
        let d = 4u32;
        let g = SeriesVector::new(vec![series_parse("exp(z1)", 1, d).unwrap()]).unwrap();
        let g0 = series_parse("exp(z1) - 1", 1, d).unwrap();
        let p = LagrangeProblem::new(g, Some(g0.clone())).unwrap();
        let h = solve_functional_equation(&p).unwrap();
        let composed = g0.compose(&h).unwrap();
        for e in 0..=d {
            let k = k1(e);
            assert_eq!(
                lagrange_coefficient(&p, &k).unwrap(),
                composed.coefficient(&k)
            );
        }
    }

    #[test]
    fn rejects_vanishing_constant_terms() {
        let g = SeriesVector::new(vec![series_parse("z1", 1, 3).unwrap()]).unwrap();
        assert!(matches!(
            LagrangeProblem::new(g, None),
            Err(LagrangeError::ZeroConstantTerm { index: 0 })
        ));
    }
}
