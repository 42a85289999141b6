//! The action T_g on variance functions: symbolic on polynomial variance
//! matrices, numeric at points, together with the symmetry necessary
//! condition and the cubic-degree structure checks.
//!
//! T_g(V)(m) = 1/(c^T m + d) * (h'_g(m))^{-1} V(h_g(m)) (h'_g(m)^T)^{-1}
//!
//! is produced as an exact matrix of rational functions over a shared
//! denominator; a separate exact-division pass lowers it to a polynomial
//! matrix whenever the denominator divides every numerator.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::linalg::{self, RatMatrix};
use crate::algebra::poly::{poly_mat_adjugate, poly_mat_det, poly_mat_mul, poly_mat_transpose};
use crate::algebra::{
    exact_poly_div, poly_parse, AlgebraError, ExponentVector, MultiPoly, PolyMatrix, Rational,
};
use crate::group::{homography_eval, homography_jacobian, GroupElement, GroupError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    #[error("dimension mismatch between g (n={g}) and V (n={v})")]
    DimensionMismatch { g: usize, v: usize },
    #[error("entry ({row},{col}) is not divisible by the denominator: T_g(V) is not polynomial")]
    NotPolynomial { row: usize, col: usize },
    #[error("polynomial has degree {degree} > 3")]
    DegreeTooHigh { degree: i64 },
    #[error("variance is not of simple quadratic shape: {0}")]
    NotSimpleQuadratic(String),
    #[error("closed-form payload mismatch: {0}")]
    PayloadMismatch(String),
    #[error("malformed variance file: {0}")]
    File(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A variance function: a symmetric polynomial matrix V(m) together with a
/// display-only description of the domain of the means.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarianceSpec {
    pub v: PolyMatrix,
    pub mean_domain: String,
}

impl VarianceSpec {
    pub fn new(v: PolyMatrix, mean_domain: impl Into<String>) -> Self {
        VarianceSpec {
            v,
            mean_domain: mean_domain.into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.v.dim()
    }

    pub fn to_json(&self) -> String {
        let file = VarianceFile {
            n: self.dim(),
            entries: self
                .v
                .rows()
                .iter()
                .map(|row| row.iter().map(|p| p.to_string()).collect())
                .collect(),
            domain: self.mean_domain.clone(),
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, TransformError> {
        let file: VarianceFile =
            serde_json::from_str(text).map_err(|e| TransformError::File(e.to_string()))?;
        if file.entries.len() != file.n {
            return Err(TransformError::File(format!(
                "expected {} rows, got {}",
                file.n,
                file.entries.len()
            )));
        }
        let mut rows = Vec::with_capacity(file.n);
        for row in &file.entries {
            if row.len() != file.n {
                return Err(TransformError::File(format!(
                    "expected {} entries per row, got {}",
                    file.n,
                    row.len()
                )));
            }
            rows.push(
                row.iter()
                    .map(|s| poly_parse(s, file.n).map_err(TransformError::from))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        let v = PolyMatrix::new(rows)?;
        Ok(VarianceSpec::new(v, file.domain))
    }
}

#[derive(Serialize, Deserialize)]
struct VarianceFile {
    n: usize,
    entries: Vec<Vec<String>>,
    domain: String,
}

/// A symmetric matrix of rational functions `num[i][j] / den` with a shared
/// polynomial denominator; the intermediate form of T_g(V).
#[derive(Debug, Clone)]
pub struct RationalMatrixFunction {
    n: usize,
    numerators: Vec<Vec<MultiPoly>>,
    denominator: MultiPoly,
}

impl RationalMatrixFunction {
    pub fn from_poly_matrix(v: &PolyMatrix) -> Self {
        RationalMatrixFunction {
            n: v.dim(),
            numerators: v.rows().clone(),
            denominator: MultiPoly::one(v.dim()),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn numerator(&self, i: usize, j: usize) -> &MultiPoly {
        &self.numerators[i][j]
    }

    pub fn denominator(&self) -> &MultiPoly {
        &self.denominator
    }

    /// Equality as rational functions, by cross-multiplication; no GCD needed.
    pub fn eq_as_function(&self, other: &RationalMatrixFunction) -> bool {
        if self.n != other.n {
            return false;
        }
        for i in 0..self.n {
            for j in i..self.n {
                let lhs = &self.numerators[i][j] * &other.denominator;
                let rhs = &other.numerators[i][j] * &self.denominator;
                if lhs != rhs {
                    return false;
                }
            }
        }
        true
    }

    /// Exact-division pass: returns the polynomial matrix when the denominator
    /// divides every numerator.
    pub fn lower(&self) -> Result<PolyMatrix, TransformError> {
        let mut rows = vec![vec![MultiPoly::zero(self.n); self.n]; self.n];
        for i in 0..self.n {
            for j in i..self.n {
                let q = exact_poly_div(&self.denominator, &self.numerators[i][j])
                    .ok_or(TransformError::NotPolynomial { row: i, col: j })?;
                rows[i][j] = q.clone();
                rows[j][i] = q;
            }
        }
        Ok(PolyMatrix::new(rows)?)
    }

    /// Exact evaluation at a point where the denominator does not vanish.
    pub fn eval(&self, m: &[Rational]) -> Result<RatMatrix, TransformError> {
        let den = self.denominator.eval(m)?;
        if den.is_zero() {
            return Err(TransformError::Group(GroupError::Hyperplane));
        }
        let mut out = vec![vec![Rational::zero(); self.n]; self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                out[i][j] = self.numerators[i][j].eval(m)? / &den;
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        let file = RationalMatrixFile {
            n: self.n,
            numerators: self
                .numerators
                .iter()
                .map(|row| row.iter().map(|p| p.to_string()).collect())
                .collect(),
            denominator: self.denominator.to_string(),
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, TransformError> {
        let file: RationalMatrixFile =
            serde_json::from_str(text).map_err(|e| TransformError::File(e.to_string()))?;
        if file.numerators.len() != file.n
            || file.numerators.iter().any(|row| row.len() != file.n)
        {
            return Err(TransformError::File("numerator matrix shape mismatch".into()));
        }
        let numerators: Vec<Vec<MultiPoly>> = file
            .numerators
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| poly_parse(s, file.n).map_err(TransformError::from))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        for i in 0..file.n {
            for j in (i + 1)..file.n {
                if numerators[i][j] != numerators[j][i] {
                    return Err(TransformError::File(format!(
                        "numerator entry ({i},{j}) breaks symmetry"
                    )));
                }
            }
        }
        let denominator = poly_parse(&file.denominator, file.n)?;
        if denominator.is_zero() {
            return Err(TransformError::File("zero denominator".into()));
        }
        Ok(RationalMatrixFunction {
            n: file.n,
            numerators,
            denominator,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct RationalMatrixFile {
    n: usize,
    numerators: Vec<Vec<String>>,
    denominator: String,
}

/// Substitutes the homography into p with denominators cleared:
/// returns (c^T m + d)^t * p(h_g(m)), requiring t >= deg p.
fn substitute_homogenized(
    p: &MultiPoly,
    lin: &[MultiPoly],
    ell: &MultiPoly,
    t: u32,
) -> MultiPoly {
    let n = lin.len();
    debug_assert!(p.total_degree() <= t as i64);
    if p.is_zero() {
        return MultiPoly::zero(n);
    }
    // Cached powers of the linear forms and of the denominator.
    let mut max_exp = vec![0u32; n];
    for (k, _) in p.terms() {
        for i in 0..n {
            max_exp[i] = max_exp[i].max(k.get(i));
        }
    }
    let lin_pows: Vec<Vec<MultiPoly>> = (0..n)
        .map(|i| {
            let mut v = vec![MultiPoly::one(n)];
            for e in 1..=max_exp[i] {
                let next = &v[(e - 1) as usize] * &lin[i];
                v.push(next);
            }
            v
        })
        .collect();
    let mut ell_pows = vec![MultiPoly::one(n)];
    for e in 1..=t {
        let next = &ell_pows[(e - 1) as usize] * ell;
        ell_pows.push(next);
    }
    let mut out = MultiPoly::zero(n);
    for (k, coeff) in p.terms() {
        let mut term = ell_pows[(t - k.total_degree()) as usize].scale(coeff);
        for i in 0..n {
            let e = k.get(i);
            if e > 0 {
                term = &term * &lin_pows[i][e as usize];
            }
        }
        out.add_assign_ref(&term);
    }
    out
}

/// Applies T_g to a matrix of rational functions. This is the generic engine;
/// [`transform_variance`] is the polynomial-input special case.
///
/// Uses det N(m) = det(g) (c^T m + d)^{n-1} for the Jacobian numerator N, so
/// the result carries the denominator q(h) * (c^T m + d)^k * det(g)^2 with all
/// powers tracked explicitly.
pub fn transform_rational(
    g: &GroupElement,
    r: &RationalMatrixFunction,
) -> Result<RationalMatrixFunction, TransformError> {
    let n = r.n;
    if g.dim() != n {
        return Err(TransformError::DimensionMismatch { g: g.dim(), v: n });
    }
    let ell = g.linear_denominator();
    let n_mat = g.jacobian_numerator();
    let adj = poly_mat_adjugate(&n_mat);
    debug_assert_eq!(
        poly_mat_det(&n_mat),
        ell.pow(n as u32 - 1).scale(&g.det()),
        "det N = det(g) (c^T m + d)^(n-1)"
    );
    // Substitute h_g(m) with denominators cleared at a shared degree.
    let a = g.a_block();
    let b = g.b_vec();
    let lin: Vec<MultiPoly> = (0..n)
        .map(|i| MultiPoly::linear_form(&a[i], b[i].clone()))
        .collect();
    let t = r
        .numerators
        .iter()
        .flat_map(|row| row.iter().map(|p| p.total_degree()))
        .max()
        .unwrap_or(0)
        .max(0) as u32;
    let tq = r.denominator.total_degree().max(0) as u32;
    let w: Vec<Vec<MultiPoly>> = r
        .numerators
        .iter()
        .map(|row| {
            row.iter()
                .map(|p| substitute_homogenized(p, &lin, &ell, t))
                .collect()
        })
        .collect();
    let qh = substitute_homogenized(&r.denominator, &lin, &ell, tq);
    // T_g(R) = adj W adj^T * L^(3 + tq - t) / (det(g)^2 L^(2n-2) qh)
    let core = poly_mat_mul(&poly_mat_mul(&adj, &w), &poly_mat_transpose(&adj));
    let p: i64 = 3 + tq as i64 - t as i64 - 2 * (n as i64) + 2;
    let detg2 = {
        let d = g.det();
        &d * &d
    };
    let (numerators, denominator) = if p >= 0 {
        let extra = ell.pow(p as u32);
        (
            core.iter()
                .map(|row| row.iter().map(|q| q * &extra).collect())
                .collect::<Vec<Vec<MultiPoly>>>(),
            qh.scale(&detg2),
        )
    } else {
        (core, (&qh * &ell.pow((-p) as u32)).scale(&detg2))
    };
    debug_assert!(
        (0..n).all(|i| (i + 1..n).all(|j| numerators[i][j] == numerators[j][i])),
        "adj W adj^T with symmetric W must be symmetric"
    );
    Ok(RationalMatrixFunction {
        n,
        numerators,
        denominator,
    })
}

/// T_g applied to a polynomial variance function.
pub fn transform_variance(
    g: &GroupElement,
    v: &VarianceSpec,
) -> Result<RationalMatrixFunction, TransformError> {
    transform_rational(g, &RationalMatrixFunction::from_poly_matrix(&v.v))
}

/// Pointwise T_g(V)(m) through the numeric homography kernels; used as the
/// cross-check route against the symbolic path.
pub fn transform_pointwise(
    g: &GroupElement,
    v: &VarianceSpec,
    m: &[Rational],
) -> Result<RatMatrix, TransformError> {
    let denom = linalg::dot(&g.c_vec(), m) + g.d_scalar();
    if denom.is_zero() {
        return Err(TransformError::Group(GroupError::Hyperplane));
    }
    let h = homography_eval(g, m)?;
    let jac = homography_jacobian(g, m)?;
    let jac_inv = linalg::mat_inverse(&jac).expect("h'_g is exactly nonsingular off H_g");
    let v_at_h = v.v.eval(&h)?;
    let left = linalg::mat_mul(&jac_inv, &v_at_h);
    let full = linalg::mat_mul(&left, &linalg::mat_transpose(&jac_inv));
    Ok(full
        .into_iter()
        .map(|row| row.into_iter().map(|x| x / &denom).collect())
        .collect())
}

/// The one-dimensional cubic action (c m + d)^3 V((a m + b)/(c m + d)) on a
/// polynomial of degree <= 3.
pub fn transform_variance_cubic_n1(
    g: &GroupElement,
    v: &MultiPoly,
) -> Result<MultiPoly, TransformError> {
    assert_eq!(g.dim(), 1);
    assert_eq!(v.dim(), 1);
    let deg = v.total_degree();
    if deg > 3 {
        return Err(TransformError::DegreeTooHigh { degree: deg });
    }
    let a = g.a_block()[0][0].clone();
    let b = g.b_vec()[0].clone();
    let num = MultiPoly::linear_form(&[a], b); // a m + b
    let ell = g.linear_denominator(); // c m + d
    let mut out = MultiPoly::zero(1);
    for (k, coeff) in v.terms() {
        let e = k.get(0);
        let term = &num.pow(e) * &ell.pow(3 - e);
        out = &out + &term.scale(coeff);
    }
    Ok(out)
}

/// Payload selector for the closed forms of T_(g_c) on the three pieces of a
/// simple quadratic variance.
pub enum ClosedFormPart {
    /// V = m m^T.
    RankOne,
    /// V = B_1 m_1 + ... + B_n m_n with symmetric rational B_i.
    Linear(Vec<RatMatrix>),
    /// V = C constant symmetric.
    Constant(RatMatrix),
}

/// Closed forms of T_(g_c): (c^T m + 1) m m^T for the rank-one part,
/// [I + m c^T] B(m) [I + c m^T] for the linear part, and
/// (c^T m + 1) [I + m c^T] C [I + c m^T] for the constant part.
pub fn transform_closed_form_gc(
    c: &[Rational],
    part: ClosedFormPart,
) -> Result<PolyMatrix, TransformError> {
    let n = c.len();
    let ell = MultiPoly::linear_form(c, Rational::one()); // c^T m + 1
    let i_plus_mct = i_plus_outer(n, c);
    let i_plus_cmt = poly_mat_transpose(&i_plus_mct);
    let rows = match part {
        ClosedFormPart::RankOne => PolyMatrix::outer_mm(n).scale_poly(&ell).rows().clone(),
        ClosedFormPart::Linear(bs) => {
            if bs.len() != n {
                return Err(TransformError::PayloadMismatch(format!(
                    "expected {n} coefficient matrices, got {}",
                    bs.len()
                )));
            }
            let mut b_of_m = vec![vec![MultiPoly::zero(n); n]; n];
            for (idx, bmat) in bs.iter().enumerate() {
                check_symmetric_rat(bmat, n)?;
                for i in 0..n {
                    for j in 0..n {
                        let term = MultiPoly::var(n, idx).scale(&bmat[i][j]);
                        b_of_m[i][j] = &b_of_m[i][j] + &term;
                    }
                }
            }
            poly_mat_mul(&poly_mat_mul(&i_plus_mct, &b_of_m), &i_plus_cmt)
        }
        ClosedFormPart::Constant(cmat) => {
            check_symmetric_rat(&cmat, n)?;
            let c_poly: Vec<Vec<MultiPoly>> = cmat
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|x| MultiPoly::constant(n, x.clone()))
                        .collect()
                })
                .collect();
            let prod = poly_mat_mul(&poly_mat_mul(&i_plus_mct, &c_poly), &i_plus_cmt);
            prod.iter()
                .map(|row| row.iter().map(|p| p * &ell).collect())
                .collect()
        }
    };
    Ok(PolyMatrix::new(rows)?)
}

fn i_plus_outer(n: usize, c: &[Rational]) -> Vec<Vec<MultiPoly>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut p = MultiPoly::var(n, i).scale(&c[j]);
                    if i == j {
                        p = &p + &MultiPoly::one(n);
                    }
                    p
                })
                .collect()
        })
        .collect()
}

fn check_symmetric_rat(m: &RatMatrix, n: usize) -> Result<(), TransformError> {
    if m.len() != n || m.iter().any(|r| r.len() != n) {
        return Err(TransformError::PayloadMismatch(
            "payload matrix has wrong dimensions".into(),
        ));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if m[i][j] != m[j][i] {
                return Err(TransformError::PayloadMismatch(
                    "payload matrix is not symmetric".into(),
                ));
            }
        }
    }
    Ok(())
}

/// Witness of a failed symmetry check: component i of the bilinear map
/// differs between basis directions (delta, delta1) at the given monomial.
#[derive(Debug, Clone)]
pub struct SymmetryWitness {
    pub component: usize,
    pub delta: usize,
    pub delta1: usize,
    pub monomial: ExponentVector,
}

/// Verifies symbolically that the bilinear map
/// f(Delta, Delta1) = V'(m)(V(m) Delta, Delta1) is symmetric: for all basis
/// directions the n polynomial identities
///
/// ```text
///   sum_l V[l][a] dV[i][b]/dm_l == sum_l V[l][b] dV[i][a]/dm_l
/// ```
///
/// hold. Bilinearity makes the basis check sufficient.
pub fn check_symmetry_condition(v: &VarianceSpec) -> Result<(), SymmetryWitness> {
    let n = v.dim();
    let m = &v.v;
    // Precompute all partials.
    let partials: Vec<Vec<Vec<MultiPoly>>> = (0..n)
        .map(|l| {
            (0..n)
                .map(|i| (0..n).map(|j| m.entry(i, j).partial(l)).collect())
                .collect()
        })
        .collect();
    for a in 0..n {
        for b in (a + 1)..n {
            for i in 0..n {
                let mut diff = MultiPoly::zero(n);
                for l in 0..n {
                    let lhs = m.entry(l, a) * &partials[l][i][b];
                    let rhs = m.entry(l, b) * &partials[l][i][a];
                    diff = &diff + &(&lhs - &rhs);
                }
                if !diff.is_zero() {
                    let monomial = diff.terms().next().map(|(k, _)| k.clone()).unwrap();
                    return Err(SymmetryWitness {
                        component: i,
                        delta: a,
                        delta1: b,
                        monomial,
                    });
                }
            }
        }
    }
    Ok(())
}

/// The decomposition V = a m m^T + B(m) + C recovered by degree filtration,
/// with the quadratic part required to be an exact multiple of m m^T.
pub struct SimpleQuadraticParts {
    pub a: Rational,
    pub b_of_m: Vec<Vec<MultiPoly>>,
    pub c: RatMatrix,
}

pub fn split_simple_quadratic(v: &PolyMatrix) -> Result<SimpleQuadraticParts, TransformError> {
    let n = v.dim();
    if v.total_degree() > 2 {
        return Err(TransformError::NotSimpleQuadratic(format!(
            "entries have degree {} > 2",
            v.total_degree()
        )));
    }
    let mut c = vec![vec![Rational::zero(); n]; n];
    let mut b_of_m = vec![vec![MultiPoly::zero(n); n]; n];
    let mut quad = vec![vec![MultiPoly::zero(n); n]; n];
    for i in 0..n {
        for j in 0..n {
            let e = v.entry(i, j);
            c[i][j] = e.constant_term();
            b_of_m[i][j] = e.homogeneous_part(1);
            quad[i][j] = e.homogeneous_part(2);
        }
    }
    // The (1,1) coefficient of m_1^2 fixes a; the whole quadratic part must
    // then equal a m m^T.
    let a = quad[0][0].coefficient(&ExponentVector::new({
        let mut v = vec![0; n];
        v[0] = 2;
        v
    }));
    let mm = PolyMatrix::outer_mm(n);
    for i in 0..n {
        for j in 0..n {
            if quad[i][j] != mm.entry(i, j).scale(&a) {
                return Err(TransformError::NotSimpleQuadratic(format!(
                    "quadratic part of entry ({i},{j}) is not a multiple of m_i m_j"
                )));
            }
        }
    }
    Ok(SimpleQuadraticParts { a, b_of_m, c })
}

/// The degree-three obstruction: T_(g_(b,c))(V) stays quadratic iff
/// a c^T m * m m^T + m (c^T B(m) c) m^T + c^T m (c^T C c) m m^T == 0.
pub fn check_cubic_condition_no3(
    v: &VarianceSpec,
    c: &[Rational],
) -> Result<bool, TransformError> {
    let n = v.dim();
    assert_eq!(c.len(), n);
    let parts = split_simple_quadratic(&v.v)?;
    let ctm = MultiPoly::linear_form(c, Rational::zero());
    // scalar multiplier of m m^T: a c^T m + c^T B(m) c + (c^T m)(c^T C c)
    let mut scalar = ctm.scale(&parts.a);
    let mut ctbc = MultiPoly::zero(n);
    for i in 0..n {
        for j in 0..n {
            ctbc = &ctbc + &parts.b_of_m[i][j].scale(&(&c[i] * &c[j]));
        }
    }
    scalar = &scalar + &ctbc;
    let ctcc = {
        let mut acc = Rational::zero();
        for i in 0..n {
            for j in 0..n {
                acc += &c[i] * &parts.c[i][j] * &c[j];
            }
        }
        acc
    };
    scalar = &scalar + &ctm.scale(&ctcc);
    Ok(scalar.is_zero())
}
