//! Truncated multivariate formal power series over exact rationals.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::exponent::ExponentVector;
use super::poly::MultiPoly;
use super::{AlgebraError, Rational};

/// Formal power series in n variables truncated at total degree D.
///
/// All stored exponent vectors satisfy |k| <= D, and every ring operation
/// discards terms above the truncation, so coefficients up to degree D are
/// always exact.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncSeries {
    n: usize,
    trunc: u32,
    terms: BTreeMap<ExponentVector, Rational>,
}

impl TruncSeries {
    pub fn zero(n: usize, trunc: u32) -> Self {
        TruncSeries {
            n,
            trunc,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, trunc: u32, c: Rational) -> Self {
        let mut s = Self::zero(n, trunc);
        s.add_term(ExponentVector::zeros(n), c);
        s
    }

    pub fn one(n: usize, trunc: u32) -> Self {
        Self::constant(n, trunc, Rational::one())
    }

    pub fn var(n: usize, trunc: u32, i: usize) -> Self {
        let mut s = Self::zero(n, trunc);
        s.add_term(ExponentVector::unit(n, i), Rational::one());
        s
    }

    pub fn from_poly(p: &MultiPoly, trunc: u32) -> Self {
        let mut s = Self::zero(p.dim(), trunc);
        for (k, c) in p.terms() {
            s.add_term(k.clone(), c.clone());
        }
        s
    }

    /// Reinterprets the stored terms as a polynomial.
    pub fn to_poly(&self) -> MultiPoly {
        MultiPoly::from_terms(self.n, self.terms.iter().map(|(k, c)| (k.clone(), c.clone())))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn truncation(&self) -> u32 {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, k: &ExponentVector) -> Rational {
        self.terms.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&ExponentVector::zeros(self.n))
    }

    pub fn add_term(&mut self, k: ExponentVector, c: Rational) {
        debug_assert_eq!(k.dim(), self.n);
        if c.is_zero() || k.total_degree() > self.trunc {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(k) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    /// In-place sum, for accumulation loops.
    pub fn add_assign_ref(&mut self, rhs: &TruncSeries) {
        check_compat(self, rhs);
        for (k, c) in &rhs.terms {
            self.add_term(k.clone(), c.clone());
        }
    }

    /// Re-truncates to a (lower or equal) degree.
    pub fn truncate(&self, trunc: u32) -> TruncSeries {
        TruncSeries {
            n: self.n,
            trunc,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.total_degree() <= trunc)
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> TruncSeries {
        if c.is_zero() {
            return Self::zero(self.n, self.trunc);
        }
        TruncSeries {
            n: self.n,
            trunc: self.trunc,
            terms: self
                .terms
                .iter()
                .map(|(k, a)| (k.clone(), a * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> TruncSeries {
        // Binary exponentiation; each product truncates, so cost stays bounded.
        let mut base = self.clone();
        let mut acc = Self::one(self.n, self.trunc);
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// The operator z_i * d/dz_j, which preserves total degree and therefore
    /// loses no information at the truncation boundary.
    pub fn mul_var_partial(&self, i: usize, j: usize) -> TruncSeries {
        let mut out = Self::zero(self.n, self.trunc);
        for (k, c) in &self.terms {
            if let Some(kd) = k.lower(j) {
                out.add_term(kd.bump(i, 1), c * Rational::from_integer(k.get(j).into()));
            }
        }
        out
    }

    /// Partial derivative d/dz_j. The result is exact only through degree D-1.
    pub fn partial(&self, j: usize) -> TruncSeries {
        let mut out = Self::zero(self.n, self.trunc);
        for (k, c) in &self.terms {
            if let Some(kd) = k.lower(j) {
                out.add_term(kd, c * Rational::from_integer(k.get(j).into()));
            }
        }
        out
    }

    /// exp(s) for s with zero constant term, via the degree-graded sum of s^j/j!.
    pub fn exp(&self) -> Result<TruncSeries, AlgebraError> {
        if !self.constant_term().is_zero() {
            return Err(AlgebraError::NonzeroConstantTerm);
        }
        let mut acc = Self::one(self.n, self.trunc);
        let mut power = Self::one(self.n, self.trunc);
        let mut factorial = Rational::one();
        for j in 1..=self.trunc {
            power = &power * self;
            if power.is_zero() {
                break;
            }
            factorial *= Rational::from_integer(j.into());
            acc.add_assign_ref(&power.scale(&factorial.recip()));
        }
        Ok(acc)
    }

    /// log(1 + s) for s with zero constant term, via the alternating series.
    pub fn log1p(&self) -> Result<TruncSeries, AlgebraError> {
        if !self.constant_term().is_zero() {
            return Err(AlgebraError::NonzeroConstantTerm);
        }
        let mut acc = Self::zero(self.n, self.trunc);
        let mut power = Self::one(self.n, self.trunc);
        for j in 1..=self.trunc {
            power = &power * self;
            if power.is_zero() {
                break;
            }
            let coeff = Rational::new(
                if j % 2 == 1 { 1.into() } else { (-1).into() },
                j.into(),
            );
            acc.add_assign_ref(&power.scale(&coeff));
        }
        Ok(acc)
    }

    /// Multiplicative inverse of a series with nonzero constant term.
    pub fn inverse_unit(&self) -> Result<TruncSeries, AlgebraError> {
        let a0 = self.constant_term();
        if a0.is_zero() {
            return Err(AlgebraError::ZeroConstantTerm);
        }
        // s = a0 (1 + u)  =>  1/s = (1/a0) sum (-u)^j
        let u = &self.scale(&a0.recip()) - &Self::one(self.n, self.trunc);
        let mut acc = Self::one(self.n, self.trunc);
        let mut power = Self::one(self.n, self.trunc);
        let mut sign = Rational::one();
        for _ in 1..=self.trunc {
            power = &power * &u;
            if power.is_zero() {
                break;
            }
            sign = -sign;
            acc.add_assign_ref(&power.scale(&sign));
        }
        Ok(acc.scale(&a0.recip()))
    }

    /// Composition outer(inner_1, ..., inner_n); every inner component must
    /// have zero constant term so that truncation is exact.
    pub fn compose(&self, inner: &SeriesVector) -> Result<TruncSeries, AlgebraError> {
        if inner.dim_inner() != self.n {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.n,
                got: inner.dim_inner(),
            });
        }
        for comp in inner.components() {
            if !comp.constant_term().is_zero() {
                return Err(AlgebraError::NonzeroConstantTerm);
            }
        }
        let n_out = inner.dim_outer();
        let trunc = inner.truncation();
        // Cache powers of each inner component up to the largest exponent used.
        let mut max_exp = vec![0u32; self.n];
        for k in self.terms.keys() {
            for i in 0..self.n {
                max_exp[i] = max_exp[i].max(k.get(i));
            }
        }
        let powers: Vec<Vec<TruncSeries>> = (0..self.n)
            .map(|i| {
                let mut v = Vec::with_capacity(max_exp[i] as usize + 1);
                v.push(TruncSeries::one(n_out, trunc));
                for e in 1..=max_exp[i] {
                    let next = &v[(e - 1) as usize] * inner.component(i);
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out = TruncSeries::zero(n_out, trunc);
        for (k, c) in &self.terms {
            let mut prod = TruncSeries::constant(n_out, trunc, c.clone());
            for i in 0..self.n {
                let e = k.get(i);
                if e > 0 {
                    prod = &prod * &powers[i][e as usize];
                    if prod.is_zero() {
                        break;
                    }
                }
            }
            out.add_assign_ref(&prod);
        }
        Ok(out)
    }

    pub fn to_string_with_var(&self, prefix: &str) -> String {
        self.to_poly().to_string_with_var(prefix)
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O(deg {})", self.to_string_with_var("z"), self.trunc + 1)
    }
}

fn check_compat(a: &TruncSeries, b: &TruncSeries) {
    assert_eq!(a.n, b.n, "series dimension mismatch");
    assert_eq!(a.trunc, b.trunc, "series truncation mismatch");
}

impl Add for &TruncSeries {
    type Output = TruncSeries;
    fn add(self, rhs: &TruncSeries) -> TruncSeries {
        check_compat(self, rhs);
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }
}

impl Sub for &TruncSeries {
    type Output = TruncSeries;
    fn sub(self, rhs: &TruncSeries) -> TruncSeries {
        check_compat(self, rhs);
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &TruncSeries {
    type Output = TruncSeries;
    fn neg(self) -> TruncSeries {
        TruncSeries {
            n: self.n,
            trunc: self.trunc,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), -c.clone()))
                .collect(),
        }
    }
}

impl Mul for &TruncSeries {
    type Output = TruncSeries;
    fn mul(self, rhs: &TruncSeries) -> TruncSeries {
        check_compat(self, rhs);
        let mut prods: Vec<(ExponentVector, Rational)> = Vec::new();
        for (ka, ca) in &self.terms {
            let da = ka.total_degree();
            if da > self.trunc {
                continue;
            }
            let budget = self.trunc - da;
            for (kb, cb) in &rhs.terms {
                if kb.total_degree() > budget {
                    break; // grlex order: later keys only have higher degree
                }
                prods.push((ka.add(kb), ca * cb));
            }
        }
        TruncSeries {
            n: self.n,
            trunc: self.trunc,
            terms: crate::algebra::poly::merge_sorted_terms(prods),
        }
    }
}

/// A vector of series sharing dimension and truncation, e.g. the components
/// of g = (g_1, ..., g_n) or of a solved fixed point h.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SeriesVector {
    components: Vec<TruncSeries>,
}

impl SeriesVector {
    pub fn new(components: Vec<TruncSeries>) -> Result<Self, AlgebraError> {
        assert!(!components.is_empty(), "empty series vector");
        let (n, trunc) = (components[0].dim(), components[0].truncation());
        for c in &components {
            if c.dim() != n || c.truncation() != trunc {
                return Err(AlgebraError::DimensionMismatch {
                    expected: n,
                    got: c.dim(),
                });
            }
        }
        Ok(SeriesVector { components })
    }

    /// The identity map (w_1, ..., w_n).
    pub fn identity(n: usize, trunc: u32) -> Self {
        SeriesVector {
            components: (0..n).map(|i| TruncSeries::var(n, trunc, i)).collect(),
        }
    }

    pub fn zero(len: usize, n: usize, trunc: u32) -> Self {
        SeriesVector {
            components: vec![TruncSeries::zero(n, trunc); len],
        }
    }

    /// Number of components.
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Dimension of the underlying variable space.
    pub fn dim_outer(&self) -> usize {
        self.components[0].dim()
    }

    /// Alias used when the vector is substituted into an outer series: the
    /// number of components must match the outer series' dimension.
    pub fn dim_inner(&self) -> usize {
        self.len()
    }

    pub fn truncation(&self) -> u32 {
        self.components[0].truncation()
    }

    pub fn component(&self, i: usize) -> &TruncSeries {
        &self.components[i]
    }

    pub fn components(&self) -> &[TruncSeries] {
        &self.components
    }

    pub fn into_components(self) -> Vec<TruncSeries> {
        self.components
    }
}

/// Determinant of a square array of series by cofactor expansion along the
/// first row, truncating at every product. Intended for n <= 6.
pub fn series_det(mat: &[Vec<TruncSeries>]) -> Result<TruncSeries, AlgebraError> {
    let n = mat.len();
    for row in mat {
        if row.len() != n {
            return Err(AlgebraError::DimensionMismatch {
                expected: n,
                got: row.len(),
            });
        }
    }
    if n == 0 {
        return Err(AlgebraError::DimensionMismatch {
            expected: 1,
            got: 0,
        });
    }
    fn det_rec(mat: &[Vec<TruncSeries>], cols: &[usize], row: usize) -> TruncSeries {
        let dim = mat[0][0].dim();
        let trunc = mat[0][0].truncation();
        if cols.len() == 1 {
            return mat[row][cols[0]].clone();
        }
        let mut acc = TruncSeries::zero(dim, trunc);
        for idx in 0..cols.len() {
            let c = cols[idx];
            if mat[row][c].is_zero() {
                continue;
            }
            let mut sub = cols.to_vec();
            sub.remove(idx);
            let minor = det_rec(mat, &sub, row + 1);
            let signed = if idx % 2 == 0 {
                &mat[row][c] * &minor
            } else {
                -&(&mat[row][c] * &minor)
            };
            acc.add_assign_ref(&signed);
        }
        acc
    }
    let cols: Vec<usize> = (0..n).collect();
    Ok(det_rec(mat, &cols, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::series_parse;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn k(v: Vec<u32>) -> ExponentVector {
        ExponentVector::new(v)
    }

    #[test]
    fn exp_of_z1() {
        let s = TruncSeries::var(1, 3, 0).exp().unwrap();
        assert_eq!(s.coefficient(&k(vec![0])), q("1"));
        assert_eq!(s.coefficient(&k(vec![1])), q("1"));
        assert_eq!(s.coefficient(&k(vec![2])), q("1/2"));
        assert_eq!(s.coefficient(&k(vec![3])), q("1/6"));
    }

    #[test]
    fn exp_of_zero_is_one() {
        let s = TruncSeries::zero(2, 4).exp().unwrap();
        assert_eq!(s, TruncSeries::one(2, 4));
    }

    #[test]
    fn exp_rejects_nonzero_constant() {
        assert!(TruncSeries::one(1, 3).exp().is_err());
    }

    #[test]
    fn log1p_of_z1() {
        let s = TruncSeries::var(1, 3, 0).log1p().unwrap();
        assert_eq!(s.coefficient(&k(vec![1])), q("1"));
        assert_eq!(s.coefficient(&k(vec![2])), q("-1/2"));
        assert_eq!(s.coefficient(&k(vec![3])), q("1/3"));
        assert!(TruncSeries::zero(1, 3).log1p().unwrap().is_zero());
    }

    #[test]
    fn log1p_two_vars_matches_expansion() {
        let s = series_parse("log1p(z1 + z2)", 2, 2).unwrap();
        let direct = series_parse("z1 + z2 - 1/2*(z1 + z2)^2", 2, 2).unwrap();
        assert_eq!(s, direct);
    }

    #[test]
    fn exp_log_round_trip_to_truncation() {
        let s = series_parse("z1 + 2*z2 - 3/5*z1*z2 + z1^3", 2, 6).unwrap();
        let round = s.log1p().unwrap().exp().unwrap();
        let expected = &TruncSeries::one(2, 6) + &s;
        assert_eq!(round, expected);
    }

    #[test]
    fn compose_identity_is_identity() {
        let outer = series_parse("1 + z1^2*z2 - 4*z2^3", 2, 5).unwrap();
        let id = SeriesVector::identity(2, 5);
        assert_eq!(outer.compose(&id).unwrap(), outer);
    }

    #[test]
    fn compose_square_of_sum() {
        let outer = series_parse("z1^2", 1, 4).unwrap();
        let inner = SeriesVector::new(vec![series_parse("z1 + z2", 2, 4).unwrap()]).unwrap();
        let got = outer.compose(&inner).unwrap();
        assert_eq!(got, series_parse("(z1 + z2)^2", 2, 4).unwrap());
    }

    #[test]
    fn det_of_identity_and_diagonal() {
        let one = TruncSeries::one(2, 4);
        let zero = TruncSeries::zero(2, 4);
        let id = vec![vec![one.clone(), zero.clone()], vec![zero.clone(), one.clone()]];
        assert_eq!(series_det(&id).unwrap(), one);

        let d = vec![
            vec![series_parse("1 + z1", 2, 4).unwrap(), zero.clone()],
            vec![zero.clone(), series_parse("1 + z2", 2, 4).unwrap()],
        ];
        assert_eq!(
            series_det(&d).unwrap(),
            series_parse("1 + z1 + z2 + z1*z2", 2, 4).unwrap()
        );
    }

    #[test]
    fn inverse_unit_times_self_is_one() {
        let s = series_parse("2 + z1 - 3*z2^2 + z1*z2", 2, 6).unwrap();
        let inv = s.inverse_unit().unwrap();
        assert_eq!(&s * &inv, TruncSeries::one(2, 6));
    }

    #[test]
    fn mul_var_partial_preserves_degree_information() {
        // z1 * d/dz2 applied to z2^3 gives 3 z1 z2^2: degree preserved at the boundary.
        let s = series_parse("z2^3", 2, 3).unwrap();
        let t = s.mul_var_partial(0, 1);
        assert_eq!(t, series_parse("3*z1*z2^2", 2, 3).unwrap());
    }
}
