//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::exponent::ExponentVector;
use super::{AlgebraError, Rational};

/// Multivariate polynomial in n variables over the rationals.
///
/// Canonical form: no stored zero coefficients, so structural equality of the
/// term maps is polynomial equality. Terms are kept in grlex order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiPoly {
    n: usize,
    terms: BTreeMap<ExponentVector, Rational>,
}

impl MultiPoly {
    pub fn zero(n: usize) -> Self {
        MultiPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, Rational::one())
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        let mut p = Self::zero(n);
        p.add_term(ExponentVector::zeros(n), c);
        p
    }

    /// The variable x_{i+1} (0-based index `i`).
    pub fn var(n: usize, i: usize) -> Self {
        let mut p = Self::zero(n);
        p.add_term(ExponentVector::unit(n, i), Rational::one());
        p
    }

    /// A degree-1 polynomial a^T x + b.
    pub fn linear_form(coeffs: &[Rational], constant: Rational) -> Self {
        let n = coeffs.len();
        let mut p = Self::constant(n, constant);
        for (i, a) in coeffs.iter().enumerate() {
            p.add_term(ExponentVector::unit(n, i), a.clone());
        }
        p
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (ExponentVector, Rational)>) -> Self {
        let mut p = Self::zero(n);
        for (k, c) in terms {
            p.add_term(k, c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, k: &ExponentVector) -> Rational {
        self.terms.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&ExponentVector::zeros(self.n))
    }

    /// Accumulates `c` onto the coefficient of `k`, dropping it if the sum is zero.
    pub fn add_term(&mut self, k: ExponentVector, c: Rational) {
        debug_assert_eq!(k.dim(), self.n);
        if c.is_zero() {
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

    /// In-place sum, avoiding the clone of the accumulator that `&a + &b`
    /// would make in accumulation loops.
    pub fn add_assign_ref(&mut self, rhs: &MultiPoly) {
        assert_eq!(self.n, rhs.n, "polynomial dimension mismatch");
        for (k, c) in &rhs.terms {
            self.add_term(k.clone(), c.clone());
        }
    }

    /// Total degree; the zero polynomial has degree -1 by convention.
    pub fn total_degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|k| k.total_degree() as i64)
            .max()
            .unwrap_or(-1)
    }

    /// Lowest total degree among stored terms; `None` for the zero polynomial.
    pub fn lowest_degree(&self) -> Option<u32> {
        // First key in grlex order has minimal degree.
        self.terms.keys().next().map(|k| k.total_degree())
    }

    /// The homogeneous component of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> MultiPoly {
        MultiPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.total_degree() == d)
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        MultiPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(k, a)| (k.clone(), a * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut acc = Self::one(self.n);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative with respect to variable `i` (0-based).
    pub fn partial(&self, i: usize) -> MultiPoly {
        let mut out = Self::zero(self.n);
        for (k, c) in &self.terms {
            if let Some(k1) = k.lower(i) {
                out.add_term(k1, c * Rational::from_integer((k.get(i)).into()));
            }
        }
        out
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, point: &[Rational]) -> Result<Rational, AlgebraError> {
        if point.len() != self.n {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.n,
                got: point.len(),
            });
        }
        // Cache powers of each coordinate up to the largest exponent used.
        let mut max_exp = vec![0u32; self.n];
        for k in self.terms.keys() {
            for i in 0..self.n {
                max_exp[i] = max_exp[i].max(k.get(i));
            }
        }
        let powers: Vec<Vec<Rational>> = (0..self.n)
            .map(|i| {
                let mut v = Vec::with_capacity(max_exp[i] as usize + 1);
                v.push(Rational::one());
                for e in 1..=max_exp[i] {
                    let prev = v[(e - 1) as usize].clone();
                    v.push(prev * &point[i]);
                }
                v
            })
            .collect();
        let mut sum = Rational::zero();
        for (k, c) in &self.terms {
            let mut t = c.clone();
            for i in 0..self.n {
                let e = k.get(i);
                if e > 0 {
                    t *= &powers[i][e as usize];
                }
            }
            sum += t;
        }
        Ok(sum)
    }

    /// Renders with the given variable prefix, e.g. "m" or "z" (1-indexed).
    pub fn to_string_with_var(&self, prefix: &str) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (k, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || k.is_zero() {
                factors.push(abs.to_string());
            }
            for i in 0..self.n {
                let e = k.get(i);
                if e == 1 {
                    factors.push(format!("{prefix}{}", i + 1));
                } else if e > 1 {
                    factors.push(format!("{prefix}{}^{e}", i + 1));
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_with_var("m"))
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.n, rhs.n, "polynomial dimension mismatch");
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.n, rhs.n, "polynomial dimension mismatch");
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), -c.clone()))
                .collect(),
        }
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.n, rhs.n, "polynomial dimension mismatch");
        // Collect all products, then sort-merge: much cheaper than a map
        // insertion per term pair.
        let mut prods: Vec<(ExponentVector, Rational)> =
            Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                prods.push((ka.add(kb), ca * cb));
            }
        }
        MultiPoly {
            n: self.n,
            terms: merge_sorted_terms(prods),
        }
    }
}

pub(crate) fn merge_sorted_terms(
    mut prods: Vec<(ExponentVector, Rational)>,
) -> BTreeMap<ExponentVector, Rational> {
    prods.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    let mut out = BTreeMap::new();
    let mut iter = prods.into_iter();
    let Some((mut cur_k, mut cur_c)) = iter.next() else {
        return out;
    };
    for (k, c) in iter {
        if k == cur_k {
            cur_c += c;
        } else {
            if !cur_c.is_zero() {
                out.insert(cur_k, cur_c);
            }
            cur_k = k;
            cur_c = c;
        }
    }
    if !cur_c.is_zero() {
        out.insert(cur_k, cur_c);
    }
    out
}

/// Symmetric n x n matrix of polynomials; the shape of a variance function V(m).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyMatrix {
    n: usize,
    entries: Vec<Vec<MultiPoly>>,
}

impl PolyMatrix {
    /// Builds from entries, checking squareness and symmetry.
    pub fn new(entries: Vec<Vec<MultiPoly>>) -> Result<Self, AlgebraError> {
        let n = entries.len();
        for row in &entries {
            if row.len() != n {
                return Err(AlgebraError::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            for p in row {
                if p.dim() != n {
                    return Err(AlgebraError::DimensionMismatch {
                        expected: n,
                        got: p.dim(),
                    });
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if entries[i][j] != entries[j][i] {
                    return Err(AlgebraError::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(PolyMatrix { n, entries })
    }

    pub fn zero(n: usize) -> Self {
        PolyMatrix {
            n,
            entries: vec![vec![MultiPoly::zero(n); n]; n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.entries[i][i] = MultiPoly::one(n);
        }
        m
    }

    /// diag(d_1, ..., d_n).
    pub fn diagonal(diag: Vec<MultiPoly>) -> Self {
        let n = diag.len();
        let mut m = Self::zero(n);
        for (i, p) in diag.into_iter().enumerate() {
            assert_eq!(p.dim(), n);
            m.entries[i][i] = p;
        }
        m
    }

    /// The rank-one matrix m m^T of quadratic monomials.
    pub fn outer_mm(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                m.entries[i][j] = &MultiPoly::var(n, i) * &MultiPoly::var(n, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &MultiPoly {
        &self.entries[i][j]
    }

    pub fn rows(&self) -> &Vec<Vec<MultiPoly>> {
        &self.entries
    }

    pub fn set_entry(&mut self, i: usize, j: usize, p: MultiPoly) {
        assert_eq!(p.dim(), self.n);
        self.entries[i][j] = p.clone();
        self.entries[j][i] = p;
    }

    pub fn add(&self, rhs: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.n, rhs.n);
        let entries = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| &self.entries[i][j] + &rhs.entries[i][j])
                    .collect()
            })
            .collect();
        PolyMatrix {
            n: self.n,
            entries,
        }
    }

    pub fn scale(&self, c: &Rational) -> PolyMatrix {
        PolyMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .map(|row| row.iter().map(|p| p.scale(c)).collect())
                .collect(),
        }
    }

    pub fn scale_poly(&self, p: &MultiPoly) -> PolyMatrix {
        PolyMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .map(|row| row.iter().map(|q| q * p).collect())
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|row| row.iter().all(|p| p.is_zero()))
    }

    /// Maximum total degree over entries (-1 if all entries are zero).
    pub fn total_degree(&self) -> i64 {
        self.entries
            .iter()
            .flat_map(|row| row.iter().map(|p| p.total_degree()))
            .max()
            .unwrap_or(-1)
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, point: &[Rational]) -> Result<Vec<Vec<Rational>>, AlgebraError> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|p| p.eval(point)).collect())
            .collect()
    }
}

/// Product of two general (not necessarily symmetric) arrays of polynomials.
pub fn poly_mat_mul(a: &[Vec<MultiPoly>], b: &[Vec<MultiPoly>]) -> Vec<Vec<MultiPoly>> {
    let (ra, ca) = (a.len(), a[0].len());
    let cb = b[0].len();
    assert_eq!(ca, b.len(), "polynomial matrix product dimension mismatch");
    let n = a[0][0].dim();
    (0..ra)
        .map(|i| {
            (0..cb)
                .map(|j| {
                    let mut acc = MultiPoly::zero(n);
                    for k in 0..ca {
                        if a[i][k].is_zero() || b[k][j].is_zero() {
                            continue;
                        }
                        acc.add_assign_ref(&(&a[i][k] * &b[k][j]));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn poly_mat_transpose(a: &[Vec<MultiPoly>]) -> Vec<Vec<MultiPoly>> {
    let (r, c) = (a.len(), a[0].len());
    (0..c)
        .map(|j| (0..r).map(|i| a[i][j].clone()).collect())
        .collect()
}

/// Exact determinant of a square array of polynomials by cofactor expansion.
pub fn poly_mat_det(a: &[Vec<MultiPoly>]) -> MultiPoly {
    let m = a.len();
    let n = a[0][0].dim();
    fn det_rec(a: &[Vec<MultiPoly>], cols: &[usize], row: usize, n: usize) -> MultiPoly {
        if cols.len() == 1 {
            return a[row][cols[0]].clone();
        }
        let mut acc = MultiPoly::zero(n);
        for (idx, &c) in cols.iter().enumerate() {
            if a[row][c].is_zero() {
                continue;
            }
            let sub: Vec<usize> = cols
                .iter()
                .copied()
                .filter(|&x| x != c)
                .collect();
            let minor = det_rec(a, &sub, row + 1, n);
            let term = &a[row][c] * &minor;
            if idx % 2 == 0 {
                acc.add_assign_ref(&term);
            } else {
                acc.add_assign_ref(&-&term);
            }
        }
        acc
    }
    let cols: Vec<usize> = (0..m).collect();
    det_rec(a, &cols, 0, n)
}

/// Adjugate (transpose of the cofactor matrix), so that A * adj(A) = det(A) I.
pub fn poly_mat_adjugate(a: &[Vec<MultiPoly>]) -> Vec<Vec<MultiPoly>> {
    let m = a.len();
    let n = a[0][0].dim();
    if m == 1 {
        return vec![vec![MultiPoly::one(n)]];
    }
    let mut adj = vec![vec![MultiPoly::zero(n); m]; m];
    for i in 0..m {
        for j in 0..m {
            let rows: Vec<usize> = (0..m).filter(|&r| r != i).collect();
            let cols: Vec<usize> = (0..m).filter(|&c| c != j).collect();
            let minor: Vec<Vec<MultiPoly>> = rows
                .iter()
                .map(|&r| cols.iter().map(|&c| a[r][c].clone()).collect())
                .collect();
            let d = poly_mat_det(&minor);
            adj[j][i] = if (i + j) % 2 == 0 { d } else { -&d };
        }
    }
    adj
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::poly_parse;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn eval_examples() {
        let p = poly_parse("m1 - m1^2", 1).unwrap();
        assert_eq!(p.eval(&[q("1/2")]).unwrap(), q("1/4"));
        let z = MultiPoly::zero(2);
        assert_eq!(z.eval(&[q("7"), q("-3")]).unwrap(), q("0"));
        let p = poly_parse("m1*m2", 2).unwrap();
        assert_eq!(p.eval(&[q("2"), q("3")]).unwrap(), q("6"));
    }

    #[test]
    fn degree_conventions() {
        assert_eq!(MultiPoly::zero(2).total_degree(), -1);
        assert_eq!(MultiPoly::one(2).total_degree(), 0);
        let p = poly_parse("m1^2*m2 + m1", 2).unwrap();
        assert_eq!(p.total_degree(), 3);
        assert_eq!(p.lowest_degree(), Some(1));
    }

    #[test]
    fn display_round_trips_through_parser() {
        let p = poly_parse("-3/2*m1^2*m2 + m1 - 7", 2).unwrap();
        let s = p.to_string();
        assert_eq!(poly_parse(&s, 2).unwrap(), p);
    }

    #[test]
    fn symmetry_enforced() {
        let bad = vec![
            vec![MultiPoly::one(2), MultiPoly::var(2, 0)],
            vec![MultiPoly::var(2, 1), MultiPoly::one(2)],
        ];
        assert!(PolyMatrix::new(bad).is_err());
    }

    #[test]
    fn adjugate_identity() {
        let a = vec![
            vec![poly_parse("1 + m1", 2).unwrap(), poly_parse("m2", 2).unwrap()],
            vec![poly_parse("m1*m2", 2).unwrap(), poly_parse("2", 2).unwrap()],
        ];
        let det = poly_mat_det(&a);
        let adj = poly_mat_adjugate(&a);
        let prod = poly_mat_mul(&a, &adj);
        for i in 0..2 {
            for j in 0..2 {
                let expected = if i == j { det.clone() } else { MultiPoly::zero(2) };
                assert_eq!(prod[i][j], expected);
            }
        }
    }
}
