//! The group G = GL(n+1) acting by homographies, its subgroup structure, and
//! the constructive rank-one decompositions used by the transform machinery.
//!
//! Elements are (n+1)x(n+1) rational matrices read in blocks
//! `[[A, b], [c^T, d]]` with A of order n. Block extraction is row-major: c is
//! the first n entries of the last row, d the corner.

pub mod float;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::linalg::{self, RatMatrix};
use crate::algebra::{
    poly::{poly_mat_adjugate, poly_mat_det},
    rational_parse, rational_to_string, AlgebraError, MultiPoly, Rational,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("matrix is singular")]
    Singular,
    #[error("point lies on the hyperplane c^T m + d = 0")]
    Hyperplane,
    #[error("element is not in G_0 (requires c = 0 and d > 0)")]
    NotInG0,
    #[error("element does not have the g_(b,c) form")]
    NotGbcForm,
    #[error("invalid transposition indices")]
    BadIndices,
    #[error("rank-one decomposition requires c != 0")]
    RankOneNeedsC,
    #[error("exact factorizer declines (A singular): use the float branch")]
    RequiresFloat,
    #[error("float decomposition failure: {0}")]
    DecompositionFailure(String),
    #[error("malformed group element file: {0}")]
    File(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// An element g of GL(n+1) over the rationals; nonsingularity is checked
/// exactly at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupElement {
    n: usize,
    rows: RatMatrix,
}

impl GroupElement {
    pub fn new(rows: RatMatrix) -> Result<Self, GroupError> {
        let m = rows.len();
        if m < 2 {
            return Err(GroupError::File("matrix must be at least 2x2".into()));
        }
        for r in &rows {
            if r.len() != m {
                return Err(GroupError::File("matrix must be square".into()));
            }
        }
        if linalg::mat_det(&rows).is_zero() {
            return Err(GroupError::Singular);
        }
        Ok(GroupElement { n: m - 1, rows })
    }

    pub fn identity(n: usize) -> Self {
        GroupElement {
            n,
            rows: linalg::mat_identity(n + 1),
        }
    }

    /// The Jorgensen element J_lambda = [[I, 0], [0, lambda]].
    pub fn jorgensen(n: usize, lambda: Rational) -> Result<Self, GroupError> {
        let mut rows = linalg::mat_identity(n + 1);
        rows[n][n] = lambda;
        Self::new(rows)
    }

    /// The affine element [[A, b], [0, 1]].
    pub fn affine(a: RatMatrix, b: Vec<Rational>) -> Result<Self, GroupError> {
        let n = b.len();
        assert_eq!(a.len(), n);
        let mut rows = linalg::mat_identity(n + 1);
        for i in 0..n {
            for j in 0..n {
                rows[i][j] = a[i][j].clone();
            }
            rows[i][n] = b[i].clone();
        }
        Self::new(rows)
    }

    /// g_c = [[I, 0], [c^T, 1]].
    pub fn gc(c: &[Rational]) -> Self {
        let n = c.len();
        let mut rows = linalg::mat_identity(n + 1);
        for j in 0..n {
            rows[n][j] = c[j].clone();
        }
        GroupElement { n, rows }
    }

    /// g_(b,c) = [[I + b c^T, b], [c^T, 1]].
    pub fn gbc(b: &[Rational], c: &[Rational]) -> Result<Self, GroupError> {
        let n = b.len();
        assert_eq!(c.len(), n);
        let mut rows = linalg::mat_identity(n + 1);
        for i in 0..n {
            for j in 0..n {
                rows[i][j] += &b[i] * &c[j];
            }
            rows[i][n] = b[i].clone();
            rows[n][i] = c[i].clone();
        }
        Self::new(rows)
    }

    pub fn from_blocks(
        a: &RatMatrix,
        b: &[Rational],
        c: &[Rational],
        d: &Rational,
    ) -> Result<Self, GroupError> {
        let n = b.len();
        let mut rows = vec![vec![Rational::zero(); n + 1]; n + 1];
        for i in 0..n {
            for j in 0..n {
                rows[i][j] = a[i][j].clone();
            }
            rows[i][n] = b[i].clone();
            rows[n][i] = c[i].clone();
        }
        rows[n][n] = d.clone();
        Self::new(rows)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &RatMatrix {
        &self.rows
    }

    pub fn a_block(&self) -> RatMatrix {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.rows[i][j].clone()).collect())
            .collect()
    }

    pub fn b_vec(&self) -> Vec<Rational> {
        (0..self.n).map(|i| self.rows[i][self.n].clone()).collect()
    }

    pub fn c_vec(&self) -> Vec<Rational> {
        (0..self.n).map(|j| self.rows[self.n][j].clone()).collect()
    }

    pub fn d_scalar(&self) -> Rational {
        self.rows[self.n][self.n].clone()
    }

    pub fn det(&self) -> Rational {
        linalg::mat_det(&self.rows)
    }

    pub fn mul(&self, rhs: &GroupElement) -> GroupElement {
        assert_eq!(self.n, rhs.n);
        GroupElement {
            n: self.n,
            rows: linalg::mat_mul(&self.rows, &rhs.rows),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            n: self.n,
            rows: linalg::mat_inverse(&self.rows).expect("group element is invertible"),
        }
    }

    pub fn c_is_zero(&self) -> bool {
        self.c_vec().iter().all(|x| x.is_zero())
    }

    /// True when c = 0 and d > 0.
    pub fn in_g0(&self) -> bool {
        self.c_is_zero() && self.d_scalar().is_positive()
    }

    /// The linear form c^T m + d as a polynomial in m.
    pub fn linear_denominator(&self) -> MultiPoly {
        MultiPoly::linear_form(&self.c_vec(), self.d_scalar())
    }

    /// The matrix N(m) = (c^T m + d) A - (A m + b) c^T, so that
    /// h'_g(m) = N(m) / (c^T m + d)^2.
    pub fn jacobian_numerator(&self) -> Vec<Vec<MultiPoly>> {
        let n = self.n;
        let a = self.a_block();
        let b = self.b_vec();
        let c = self.c_vec();
        let ell = self.linear_denominator();
        // (A m + b)_i as linear polynomials
        let am_b: Vec<MultiPoly> = (0..n)
            .map(|i| MultiPoly::linear_form(&a[i], b[i].clone()))
            .collect();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let first = ell.scale(&a[i][j]);
                        let second = am_b[i].scale(&c[j]);
                        &first - &second
                    })
                    .collect()
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        let file = GroupElementFile {
            n: self.n,
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(rational_to_string).collect())
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, GroupError> {
        let file: GroupElementFile =
            serde_json::from_str(text).map_err(|e| GroupError::File(e.to_string()))?;
        if file.rows.len() != file.n + 1 {
            return Err(GroupError::File(format!(
                "expected {} rows, got {}",
                file.n + 1,
                file.rows.len()
            )));
        }
        let rows = file
            .rows
            .iter()
            .map(|r| {
                if r.len() != file.n + 1 {
                    return Err(GroupError::File(format!(
                        "expected {} entries per row, got {}",
                        file.n + 1,
                        r.len()
                    )));
                }
                r.iter()
                    .map(|s| rational_parse(s).map_err(GroupError::from))
                    .collect()
            })
            .collect::<Result<Vec<Vec<Rational>>, GroupError>>()?;
        Self::new(rows)
    }
}

#[derive(Serialize, Deserialize)]
struct GroupElementFile {
    n: usize,
    rows: Vec<Vec<String>>,
}

/// Evaluates the homography h_g(m) = (A m + b) / (c^T m + d).
pub fn homography_eval(g: &GroupElement, m: &[Rational]) -> Result<Vec<Rational>, GroupError> {
    assert_eq!(m.len(), g.dim());
    let denom = linalg::dot(&g.c_vec(), m) + g.d_scalar();
    if denom.is_zero() {
        return Err(GroupError::Hyperplane);
    }
    let num = linalg::mat_vec(&g.a_block(), m);
    Ok(num
        .into_iter()
        .zip(g.b_vec())
        .map(|(x, b)| (x + b) / &denom)
        .collect())
}

/// The differential h'_g(m) = [(c^T m + d) A - (A m + b) c^T] / (c^T m + d)^2,
/// exactly nonsingular off the hyperplane.
pub fn homography_jacobian(g: &GroupElement, m: &[Rational]) -> Result<RatMatrix, GroupError> {
    let n = g.dim();
    assert_eq!(m.len(), n);
    let denom = linalg::dot(&g.c_vec(), m) + g.d_scalar();
    if denom.is_zero() {
        return Err(GroupError::Hyperplane);
    }
    let a = g.a_block();
    let b = g.b_vec();
    let c = g.c_vec();
    let am_b: Vec<Rational> = linalg::mat_vec(&a, m)
        .into_iter()
        .zip(b)
        .map(|(x, bi)| x + bi)
        .collect();
    let d2 = &denom * &denom;
    let mut out = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = (&denom * &a[i][j] - &am_b[i] * &c[j]) / &d2;
        }
    }
    Ok(out)
}

/// The exact inverse of h'_g(m) as a matrix of rational functions in m:
/// numerators (c^T m + d)^2 * adj(N)(m) over the shared denominator det(N)(m),
/// where N is [`GroupElement::jacobian_numerator`].
pub fn symbolic_jacobian_inverse(g: &GroupElement) -> (Vec<Vec<MultiPoly>>, MultiPoly) {
    let n_mat = g.jacobian_numerator();
    let det = poly_mat_det(&n_mat);
    let adj = poly_mat_adjugate(&n_mat);
    let ell2 = g.linear_denominator().pow(2);
    let nums = adj
        .iter()
        .map(|row| row.iter().map(|p| p * &ell2).collect())
        .collect();
    (nums, det)
}

/// Region tags for the partition of G used by the classification machinery.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupRegion {
    /// c = 0, d > 0: block upper triangular with positive corner.
    G0,
    /// c != 0, factor g_(u,v) with v^T u + 1 > 0.
    HPlus,
    /// c != 0, factor with v^T u + 1 < 0.
    HMinus,
    /// c != 0, factor with v^T u + 1 = 0.
    H0,
    /// In tilde G (c != 0) but the exact factorizer declines (singular A).
    TildeOther,
    /// c = 0 and d <= 0: the set {c^T m + d > 0} is empty.
    NotTilde,
}

/// The constructive rank-one factorization g = g_(v,u) * g0, with g0 block
/// upper triangular and positive corner.
#[derive(Debug, Clone)]
pub struct RankOneFactorization {
    pub u: Vec<Rational>,
    pub v: Vec<Rational>,
    pub g0: GroupElement,
}

impl RankOneFactorization {
    /// The left factor [[I + u v^T, u], [v^T, 1]].
    pub fn left_factor(&self) -> GroupElement {
        GroupElement::gbc(&self.u, &self.v).expect("left factor has determinant 1")
    }

    pub fn reconstruct(&self) -> GroupElement {
        self.left_factor().mul(&self.g0)
    }

    /// v^T u + 1, whose sign classifies the H_eps coset.
    pub fn epsilon(&self) -> Rational {
        linalg::dot(&self.v, &self.u) + Rational::one()
    }
}

fn build_factorization(
    g: &GroupElement,
    u: Vec<Rational>,
    a1: RatMatrix,
    a1_inv: &RatMatrix,
) -> Option<RankOneFactorization> {
    let n = g.dim();
    let c = g.c_vec();
    let b = g.b_vec();
    let d = g.d_scalar();
    // v^T = c^T A1^{-1}
    let v = linalg::mat_vec(&linalg::mat_transpose(a1_inv), &c);
    // b1 = b - u d, d1 = d - v^T b1
    let b1: Vec<Rational> = b.iter().zip(u.iter()).map(|(bi, ui)| bi - ui * &d).collect();
    let d1 = &d - &linalg::dot(&v, &b1);
    if !d1.is_positive() {
        return None;
    }
    let g0 = GroupElement::from_blocks(&a1, &b1, &vec![Rational::zero(); n], &d1).ok()?;
    Some(RankOneFactorization { u, v, g0 })
}

/// Exact constructive rank-one decomposition g = g_(v,u) g0 for c != 0.
///
/// Cases: A = 0 (only possible for n = 1), A invertible with
/// s = d - c^T A^{-1} b positive (u = 0), A invertible with s < 0 and d > 0
/// (u = b/d), A invertible with s < 0 and d <= 0 (u = lambda A c for the
/// smallest positive integer lambda with lambda c^T c > 1, which gives
/// d1 = s / (1 - lambda c^T c) > 0). A singular A is declined in favor of the
/// floating-point branch.
pub fn decompose_rank_one(g: &GroupElement) -> Result<RankOneFactorization, GroupError> {
    let n = g.dim();
    let c = g.c_vec();
    if c.iter().all(|x| x.is_zero()) {
        return Err(GroupError::RankOneNeedsC);
    }
    let a = g.a_block();
    let b = g.b_vec();
    let d = g.d_scalar();

    if a.iter().all(|row| row.iter().all(|x| x.is_zero())) {
        // Invertibility of g forces n = 1 here.
        debug_assert_eq!(n, 1);
        let b1 = b[0].clone();
        let c1 = c[0].clone();
        let u = vec![b1.clone()];
        let v = vec![-b1.recip()];
        let one = Rational::one();
        let g0 = GroupElement::from_blocks(
            &vec![vec![-(&b1 * &c1)]],
            &[&b1 * &(&one - &d)],
            &[Rational::zero()],
            &one,
        )?;
        return Ok(RankOneFactorization { u, v, g0 });
    }

    let Some(a_inv) = linalg::mat_inverse(&a) else {
        return Err(GroupError::RequiresFloat);
    };
    let s = &d - &linalg::dot(&c, &linalg::mat_vec(&a_inv, &b));
    debug_assert!(!s.is_zero(), "det g = det A * s is nonzero");

    if s.is_positive() {
        let u = vec![Rational::zero(); n];
        return build_factorization(g, u, a.clone(), &a_inv)
            .ok_or_else(|| GroupError::DecompositionFailure("s > 0 branch".into()));
    }

    if d.is_positive() {
        // u = b / d, A1 = A - b c^T / d
        let u: Vec<Rational> = b.iter().map(|bi| bi / &d).collect();
        let a1 = sub_outer(&a, &u, &c);
        let a1_inv = linalg::mat_inverse(&a1)
            .expect("A - b c^T / d is invertible when det A * s != 0");
        return build_factorization(g, u, a1, &a1_inv)
            .ok_or_else(|| GroupError::DecompositionFailure("s < 0, d > 0 branch".into()));
    }

    // s < 0, d <= 0: u = lambda A c with the smallest positive integer lambda
    // such that lambda c^T c > 1; then d1 = s / (1 - lambda c^T c) > 0.
    let ctc = linalg::dot(&c, &c);
    let mut lambda = Rational::one();
    loop {
        if (&lambda * &ctc) > Rational::one() {
            let u = linalg::mat_vec(&a, &c)
                .into_iter()
                .map(|x| x * &lambda)
                .collect::<Vec<_>>();
            let a1 = sub_outer(&a, &u, &c);
            if let Some(a1_inv) = linalg::mat_inverse(&a1) {
                if let Some(f) = build_factorization(g, u, a1, &a1_inv) {
                    return Ok(f);
                }
            }
        }
        lambda += Rational::one();
        if lambda > crate::algebra::rat(1_000_000) {
            return Err(GroupError::DecompositionFailure(
                "no admissible lambda found".into(),
            ));
        }
    }
}

fn sub_outer(a: &RatMatrix, u: &[Rational], c: &[Rational]) -> RatMatrix {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| &a[i][j] - &(&u[i] * &c[j]))
                .collect()
        })
        .collect()
}

/// Classifies g into the region tags of the G partition.
pub fn classify_region(g: &GroupElement) -> GroupRegion {
    if g.c_is_zero() {
        return if g.d_scalar().is_positive() {
            GroupRegion::G0
        } else {
            GroupRegion::NotTilde
        };
    }
    // Explicit g_(b,c) pattern first: A = I + b c^T and d = 1. The H_0 members
    // have singular A, so they must be recognized before factorization.
    if let Some((b, c)) = gbc_pattern(g) {
        let eps = linalg::dot(&c, &b) + Rational::one();
        return match eps.signum().numer().sign() {
            num_bigint::Sign::NoSign => GroupRegion::H0,
            num_bigint::Sign::Plus => GroupRegion::HPlus,
            num_bigint::Sign::Minus => GroupRegion::HMinus,
        };
    }
    match decompose_rank_one(g) {
        Ok(f) => {
            let eps = f.epsilon();
            match eps.signum().numer().sign() {
                num_bigint::Sign::NoSign => GroupRegion::H0,
                num_bigint::Sign::Plus => GroupRegion::HPlus,
                num_bigint::Sign::Minus => GroupRegion::HMinus,
            }
        }
        Err(_) => GroupRegion::TildeOther,
    }
}

/// Recognizes the g_(b,c) shape, returning (b, c).
fn gbc_pattern(g: &GroupElement) -> Option<(Vec<Rational>, Vec<Rational>)> {
    if !g.d_scalar().is_one() {
        return None;
    }
    let n = g.dim();
    let a = g.a_block();
    let b = g.b_vec();
    let c = g.c_vec();
    for i in 0..n {
        for j in 0..n {
            let expected = if i == j {
                Rational::one() + &b[i] * &c[j]
            } else {
                &b[i] * &c[j]
            };
            if a[i][j] != expected {
                return None;
            }
        }
    }
    Some((b, c))
}

/// Splits g0 in G_0 as (affine, Jorgensen): [[A, b/d], [0, 1]] * [[I, 0], [0, d]].
pub fn decompose_affine_jorgensen(
    g0: &GroupElement,
) -> Result<(GroupElement, GroupElement), GroupError> {
    if !g0.in_g0() {
        return Err(GroupError::NotInG0);
    }
    let d = g0.d_scalar();
    let b_over_d: Vec<Rational> = g0.b_vec().iter().map(|b| b / &d).collect();
    let affine = GroupElement::affine(g0.a_block(), b_over_d)?;
    let jorgensen = GroupElement::jorgensen(g0.dim(), d)?;
    Ok((affine, jorgensen))
}

/// For g_(b,c) and the transposition (i, j) (1-based, i < j), returns
/// g_(Ab, Ac) where A is the permutation matrix of the transposition.
pub fn permutation_conjugate(
    g_bc: &GroupElement,
    i: usize,
    j: usize,
) -> Result<GroupElement, GroupError> {
    let n = g_bc.dim();
    if i == 0 || j == 0 || i >= j || j > n {
        return Err(GroupError::BadIndices);
    }
    let (mut b, mut c) = gbc_pattern(g_bc).ok_or(GroupError::NotGbcForm)?;
    b.swap(i - 1, j - 1);
    c.swap(i - 1, j - 1);
    GroupElement::gbc(&b, &c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, ratio};

    fn ge(rows: &[&[i64]]) -> GroupElement {
        GroupElement::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| rat(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn construction_rejects_singular() {
        let rows = vec![vec![rat(1), rat(2)], vec![rat(2), rat(4)]];
        assert!(matches!(
            GroupElement::new(rows),
            Err(GroupError::Singular)
        ));
    }

    #[test]
    fn homography_inversion_example() {
        // g = [[0,1],[1,0]] gives h_g(m) = 1/m
        let g = ge(&[&[0, 1], &[1, 0]]);
        let out = homography_eval(&g, &[rat(2)]).unwrap();
        assert_eq!(out, vec![ratio(1, 2)]);
        assert!(matches!(
            homography_eval(&g, &[rat(0)]),
            Err(GroupError::Hyperplane)
        ));
    }

    #[test]
    fn homography_identity() {
        let g = GroupElement::identity(3);
        let m = vec![rat(1), rat(-2), ratio(3, 7)];
        assert_eq!(homography_eval(&g, &m).unwrap(), m);
    }

    #[test]
    fn jacobian_of_inversion() {
        // d/dm (1/m) at m = 2 is -1/4
        let g = ge(&[&[0, 1], &[1, 0]]);
        let jac = homography_jacobian(&g, &[rat(2)]).unwrap();
        assert_eq!(jac[0][0], ratio(-1, 4));
    }

    #[test]
    fn jacobian_of_affine_is_a() {
        let a = vec![vec![rat(2), rat(1)], vec![rat(1), rat(3)]];
        let g = GroupElement::affine(a.clone(), vec![rat(5), rat(-1)]).unwrap();
        for m in [[rat(0), rat(0)], [rat(1), rat(-4)], [ratio(2, 3), rat(7)]] {
            assert_eq!(homography_jacobian(&g, &m).unwrap(), a);
        }
    }

    #[test]
    fn jacobian_numerator_determinant_identity() {
        // det N(m) = det(g) * (c^T m + d)^(n-1), the key simplification used
        // by the transform module; checked symbolically here.
        let samples = [
            ge(&[&[0, 1], &[1, 0]]),
            ge(&[&[2, 1], &[3, -1]]),
            ge(&[&[1, 2, 0], &[0, 1, 1], &[1, 1, 1]]),
            ge(&[&[1, 0, 2, 1], &[0, 1, 1, 0], &[2, 0, 1, -1], &[1, 1, 0, 0]]),
        ];
        for g in samples {
            let n = g.dim();
            let det_n = poly_mat_det(&g.jacobian_numerator());
            let expected = g
                .linear_denominator()
                .pow(n as u32 - 1)
                .scale(&g.det());
            assert_eq!(det_n, expected, "n = {n}");
        }
    }

    #[test]
    fn symbolic_jacobian_inverse_of_gc_matches_closed_form() {
        // [h'_(g_c)]^{-1} = (c^T m + 1)(I + m c^T), compared as rational
        // functions by cross-multiplication.
        let c = [rat(1), rat(-2)];
        let g = GroupElement::gc(&c);
        let (nums, den) = symbolic_jacobian_inverse(&g);
        let ell = g.linear_denominator();
        for i in 0..2 {
            for j in 0..2 {
                let mut closed = if i == j {
                    MultiPoly::one(2)
                } else {
                    MultiPoly::zero(2)
                };
                closed = &closed + &(&MultiPoly::var(2, i) * &MultiPoly::constant(2, c[j].clone()));
                closed = &closed * &ell;
                // nums/den == closed  <=>  nums == closed * den
                assert_eq!(nums[i][j], &closed * &den);
            }
        }
    }

    #[test]
    fn symbolic_jacobian_inverse_times_jacobian_is_identity() {
        // J^{-1} J = I as rational functions: since J = N/L^2 and the
        // inverse is L^2 adj(N)/det(N), this is adj(N) N = det(N) I checked
        // on random elements.
        let mut rng = crate::sampling::seeded_rng(17);
        for case in 0..12 {
            let n = 1 + (case % 3);
            let g = crate::sampling::random_group_element(&mut rng, n, 3);
            let (nums, den) = symbolic_jacobian_inverse(&g);
            let n_mat = g.jacobian_numerator();
            let ell2 = g.linear_denominator().pow(2);
            for i in 0..n {
                for j in 0..n {
                    let mut acc = MultiPoly::zero(n);
                    for k in 0..n {
                        acc.add_assign_ref(&(&nums[i][k] * &n_mat[k][j]));
                    }
                    // (nums/den) * (N/L^2) at (i,j) must be delta_ij
                    let expected = if i == j {
                        &den * &ell2
                    } else {
                        MultiPoly::zero(n)
                    };
                    assert_eq!(acc, expected, "n={n} entry ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn symbolic_jacobian_inverse_of_affine_is_constant() {
        let a = vec![vec![rat(2), rat(0)], vec![rat(0), rat(1)]];
        let g = GroupElement::affine(a, vec![rat(0), rat(0)]).unwrap();
        let (nums, den) = symbolic_jacobian_inverse(&g);
        // inverse should be diag(1/2, 1) as rational functions
        let expected = [[ratio(1, 2), rat(0)], [rat(0), rat(1)]];
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(nums[i][j], den.scale(&expected[i][j]));
            }
        }
    }

    #[test]
    fn affine_jorgensen_split() {
        let g0 = ge(&[&[2, 4], &[0, 2]]);
        let (aff, jor) = decompose_affine_jorgensen(&g0).unwrap();
        assert_eq!(aff, ge(&[&[2, 2], &[0, 1]]));
        assert_eq!(jor, ge(&[&[1, 0], &[0, 2]]));
        assert_eq!(aff.mul(&jor), g0);

        let id = GroupElement::identity(2);
        let (a2, j2) = decompose_affine_jorgensen(&id).unwrap();
        assert_eq!(a2, id);
        assert_eq!(j2, id);

        let j_lambda = GroupElement::jorgensen(2, rat(5)).unwrap();
        let (a3, j3) = decompose_affine_jorgensen(&j_lambda).unwrap();
        assert_eq!(a3, GroupElement::identity(2));
        assert_eq!(j3, j_lambda);

        assert!(decompose_affine_jorgensen(&ge(&[&[0, 1], &[1, 0]])).is_err());
    }

    #[test]
    fn rank_one_a_zero_closed_form() {
        // n=1, A=0: g = [[0,b],[c,d]] factors through [[0,b],[-1/b,1]] and
        // g0 = [[-bc, b(1-d)],[0,1]].
        let g = ge(&[&[0, 3], &[2, 5]]);
        let f = decompose_rank_one(&g).unwrap();
        assert_eq!(f.u, vec![rat(3)]);
        assert_eq!(f.v, vec![ratio(-1, 3)]);
        assert_eq!(f.g0, ge(&[&[-6, -12], &[0, 1]]));
        assert_eq!(f.reconstruct(), g);
    }

    #[test]
    fn rank_one_u_zero_branch() {
        // n=2, A=I, b=0, c=(1,0), d=1: s = 1 > 0, so u = 0 and v = c.
        let g = GroupElement::gc(&[rat(1), rat(0)]);
        let f = decompose_rank_one(&g).unwrap();
        assert_eq!(f.u, vec![rat(0), rat(0)]);
        assert_eq!(f.v, vec![rat(1), rat(0)]);
        assert!(f.g0.in_g0());
        assert_eq!(f.reconstruct(), g);
    }

    #[test]
    fn rank_one_negative_s_branches() {
        // s < 0, d > 0
        let g = ge(&[&[1, 1], &[2, 1]]);
        let f = decompose_rank_one(&g).unwrap();
        assert!(f.g0.in_g0());
        assert_eq!(f.reconstruct(), g);
        // s < 0, d = 0
        let g = ge(&[&[1, 1], &[2, 0]]);
        let f = decompose_rank_one(&g).unwrap();
        assert!(f.g0.in_g0());
        assert_eq!(f.reconstruct(), g);
        // s < 0, d < 0
        let g = ge(&[&[1, 1], &[2, -1]]);
        let f = decompose_rank_one(&g).unwrap();
        assert!(f.g0.in_g0());
        assert_eq!(f.reconstruct(), g);
    }

    #[test]
    fn rank_one_declines_singular_a() {
        let g = ge(&[&[1, 1, 0], &[1, 1, 1], &[1, 0, 0]]);
        assert!(linalg::mat_det(&g.a_block()).is_zero());
        assert!(matches!(
            decompose_rank_one(&g),
            Err(GroupError::RequiresFloat)
        ));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_region(&ge(&[&[2, 1], &[0, 3]])), GroupRegion::G0);
        assert_eq!(
            classify_region(&ge(&[&[1, 0], &[0, -1]])),
            GroupRegion::NotTilde
        );
        // g_(b,c) with c^T b = -1 lands in H_0
        let b = [rat(1), rat(0)];
        let c = [rat(-1), rat(3)];
        let g = GroupElement::gbc(&b, &c).unwrap();
        assert_eq!(classify_region(&g), GroupRegion::H0);
        // g_c itself: eps = 1 > 0
        assert_eq!(
            classify_region(&GroupElement::gc(&[rat(2), rat(0)])),
            GroupRegion::HPlus
        );
        // exact factorizer declines singular A away from the g_(b,c) pattern
        assert_eq!(
            classify_region(&ge(&[&[1, 1, 0], &[1, 1, 1], &[1, 0, 0]])),
            GroupRegion::TildeOther
        );
    }

    #[test]
    fn permutation_conjugate_swaps_b_and_c() {
        let b = [rat(1), rat(0)];
        let c = [rat(0), rat(-1)];
        let g = GroupElement::gbc(&b, &c).unwrap();
        let swapped = permutation_conjugate(&g, 1, 2).unwrap();
        let expected = GroupElement::gbc(&[rat(0), rat(1)], &[rat(-1), rat(0)]).unwrap();
        assert_eq!(swapped, expected);
        assert!(permutation_conjugate(&g, 2, 1).is_err());
        // not of g_(b,c) form: A != I + b c^T
        let not_gbc = ge(&[&[2, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert!(matches!(
            permutation_conjugate(&not_gbc, 1, 2),
            Err(GroupError::NotGbcForm)
        ));
    }

    #[test]
    fn json_round_trip() {
        let g = GroupElement::new(vec![
            vec![ratio(1, 2), rat(1)],
            vec![rat(-3), rat(2)],
        ])
        .unwrap();
        let s = g.to_json();
        assert_eq!(GroupElement::from_json(&s).unwrap(), g);
        assert!(GroupElement::from_json(r#"{"n":1,"rows":[["1","0"]]}"#).is_err());
    }
}
