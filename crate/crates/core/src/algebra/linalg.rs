//! Dense exact linear algebra over the rationals: determinants, inverses,
//! and (possibly overdetermined) linear systems by Gaussian elimination.

use num_traits::{One, Signed, Zero};

use super::{AlgebraError, Rational};

pub type RatMatrix = Vec<Vec<Rational>>;

pub fn mat_identity(n: usize) -> RatMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let (ra, ca) = (a.len(), a[0].len());
    let cb = b[0].len();
    assert_eq!(ca, b.len(), "matrix product dimension mismatch");
    let mut out = vec![vec![Rational::zero(); cb]; ra];
    for i in 0..ra {
        for (k, aik) in a[i].iter().enumerate() {
            if aik.is_zero() {
                continue;
            }
            for j in 0..cb {
                if !b[k][j].is_zero() {
                    out[i][j] += aik * &b[k][j];
                }
            }
        }
    }
    out
}

pub fn mat_vec(a: &RatMatrix, x: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(x.iter())
                .map(|(a, b)| a * b)
                .fold(Rational::zero(), |acc, t| acc + t)
        })
        .collect()
}

pub fn mat_transpose(a: &RatMatrix) -> RatMatrix {
    let (r, c) = (a.len(), a[0].len());
    (0..c)
        .map(|j| (0..r).map(|i| a[i][j].clone()).collect())
        .collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| x * y)
        .fold(Rational::zero(), |acc, t| acc + t)
}

/// Exact determinant by fraction-free-ish Gaussian elimination.
pub fn mat_det(a: &RatMatrix) -> Rational {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = Rational::one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero());
        let Some(p) = pivot else {
            return Rational::zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        let pv = m[col][col].clone();
        det *= &pv;
        for r in (col + 1)..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &pv;
            for c in col..n {
                let sub = &f * &m[col][c];
                m[r][c] -= sub;
            }
        }
    }
    det
}

/// Exact inverse; `None` if singular.
pub fn mat_inverse(a: &RatMatrix) -> Option<RatMatrix> {
    let n = a.len();
    let mut m = a.to_vec();
    let mut inv = mat_identity(n);
    for col in 0..n {
        let p = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(p, col);
        inv.swap(p, col);
        let pv = m[col][col].clone();
        for c in 0..n {
            m[col][c] /= &pv;
            inv[col][c] /= &pv;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for c in 0..n {
                let s1 = &f * &m[col][c];
                m[r][c] -= s1;
                let s2 = &f * &inv[col][c];
                inv[r][c] -= s2;
            }
        }
    }
    Some(inv)
}

/// Solves an (m x n) system A X = B exactly for possibly many right-hand
/// sides, where the solution is required to be unique if it exists.
///
/// Returns `Inconsistent` when elimination exposes a contradictory row and
/// `Underdetermined` when A does not have full column rank.
pub fn solve_exact_multi(a: &RatMatrix, b: &RatMatrix) -> Result<RatMatrix, AlgebraError> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let nrhs = if b.is_empty() { 0 } else { b[0].len() };
    assert_eq!(b.len(), rows, "rhs row count mismatch");
    let mut m = a.to_vec();
    let mut rhs = b.to_vec();
    let mut pivot_row_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut next_row = 0usize;
    for col in 0..cols {
        // Prefer a pivot with small numerator/denominator to limit growth.
        let p = (next_row..rows)
            .filter(|&r| !m[r][col].is_zero())
            .min_by_key(|&r| {
                let v = &m[r][col];
                v.numer().abs().bits() + v.denom().bits()
            });
        let Some(p) = p else {
            continue;
        };
        m.swap(p, next_row);
        rhs.swap(p, next_row);
        let pv = m[next_row][col].clone();
        for c in col..cols {
            m[next_row][c] /= &pv;
        }
        for c in 0..nrhs {
            rhs[next_row][c] /= &pv;
        }
        for r in 0..rows {
            if r == next_row || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for c in col..cols {
                let s = &f * &m[next_row][c];
                m[r][c] -= s;
            }
            for c in 0..nrhs {
                let s = &f * &rhs[next_row][c];
                rhs[r][c] -= s;
            }
        }
        pivot_row_of_col[col] = Some(next_row);
        next_row += 1;
        if next_row == rows {
            break;
        }
    }
    // Rows beyond the pivot rows must be all-zero on both sides.
    for r in next_row..rows {
        if rhs[r].iter().any(|v| !v.is_zero()) {
            return Err(AlgebraError::InconsistentSystem);
        }
    }
    if pivot_row_of_col.iter().any(|p| p.is_none()) {
        return Err(AlgebraError::UnderdeterminedSystem);
    }
    let mut x = vec![vec![Rational::zero(); nrhs]; cols];
    for (col, p) in pivot_row_of_col.iter().enumerate() {
        let r = p.unwrap();
        x[col] = rhs[r].clone();
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn m(rows: &[&[&str]]) -> RatMatrix {
        rows.iter()
            .map(|r| r.iter().map(|s| q(s)).collect())
            .collect()
    }

    #[test]
    fn det_and_inverse() {
        let a = m(&[&["1", "2"], &["3", "4"]]);
        assert_eq!(mat_det(&a), q("-2"));
        let inv = mat_inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), mat_identity(2));
        let sing = m(&[&["1", "2"], &["2", "4"]]);
        assert_eq!(mat_det(&sing), q("0"));
        assert!(mat_inverse(&sing).is_none());
    }

    #[test]
    fn overdetermined_consistent_and_not() {
        // x = 3 from two consistent equations
        let a = m(&[&["1"], &["2"]]);
        let b = m(&[&["3"], &["6"]]);
        let x = solve_exact_multi(&a, &b).unwrap();
        assert_eq!(x[0][0], q("3"));
        let b_bad = m(&[&["3"], &["7"]]);
        assert!(matches!(
            solve_exact_multi(&a, &b_bad),
            Err(AlgebraError::InconsistentSystem)
        ));
    }
}
