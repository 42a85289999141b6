//! Floating-point branch of the rank-one decomposition, for elements whose A
//! block has numerical rank n-1. Exact singular-value factorization over the
//! rationals is not practical, so this branch works in f64 and certifies the
//! result by the Frobenius reconstruction residual.

use super::GroupError;

pub type FloatMatrix = Vec<Vec<f64>>;

const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct FloatRankOneFactorization {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub g0: FloatMatrix,
}

impl FloatRankOneFactorization {
    /// [[I + u v^T, u], [v^T, 1]] as an (n+1)x(n+1) matrix.
    pub fn left_factor(&self) -> FloatMatrix {
        let n = self.u.len();
        let mut m = vec![vec![0.0; n + 1]; n + 1];
        for i in 0..n {
            for j in 0..n {
                m[i][j] = if i == j { 1.0 } else { 0.0 };
                m[i][j] += self.u[i] * self.v[j];
            }
            m[i][n] = self.u[i];
            m[n][i] = self.v[i];
        }
        m[n][n] = 1.0;
        m
    }

    pub fn reconstruct(&self) -> FloatMatrix {
        fmat_mul(&self.left_factor(), &self.g0)
    }

    pub fn residual(&self, g: &FloatMatrix) -> f64 {
        frobenius_distance(&self.reconstruct(), g)
    }
}

pub fn fmat_mul(a: &FloatMatrix, b: &FloatMatrix) -> FloatMatrix {
    let (ra, ca, cb) = (a.len(), a[0].len(), b[0].len());
    let mut out = vec![vec![0.0; cb]; ra];
    for i in 0..ra {
        for k in 0..ca {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..cb {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn frobenius_distance(a: &FloatMatrix, b: &FloatMatrix) -> f64 {
    let mut sum = 0.0;
    for (ra, rb) in a.iter().zip(b.iter()) {
        for (x, y) in ra.iter().zip(rb.iter()) {
            sum += (x - y) * (x - y);
        }
    }
    sum.sqrt()
}

fn fmat_transpose(a: &FloatMatrix) -> FloatMatrix {
    let (r, c) = (a.len(), a[0].len());
    (0..c)
        .map(|j| (0..r).map(|i| a[i][j]).collect())
        .collect()
}

fn fmat_vec(a: &FloatMatrix, x: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

fn fdot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn fmat_det(a: &FloatMatrix) -> f64 {
    let n = a.len();
    let mut m = a.clone();
    let mut det = 1.0;
    for col in 0..n {
        let p = (col..n)
            .max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))
            .unwrap();
        if m[p][col].abs() < 1e-300 {
            return 0.0;
        }
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        det *= m[col][col];
        for r in (col + 1)..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    det
}

fn fmat_inverse(a: &FloatMatrix) -> Option<FloatMatrix> {
    let n = a.len();
    let mut m = a.clone();
    let mut inv: FloatMatrix = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for col in 0..n {
        let p = (col..n)
            .max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))
            .unwrap();
        if m[p][col].abs() < 1e-300 {
            return None;
        }
        m.swap(p, col);
        inv.swap(p, col);
        let pv = m[col][col];
        for c in 0..n {
            m[col][c] /= pv;
            inv[col][c] /= pv;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m[r][col];
            if f == 0.0 {
                continue;
            }
            for c in 0..n {
                m[r][c] -= f * m[col][c];
                inv[r][c] -= f * inv[col][c];
            }
        }
    }
    Some(inv)
}

/// One-sided Jacobi SVD: A = U diag(sigma) V^T with singular values sorted in
/// decreasing order. Columns with negligible norm get their U columns from an
/// orthonormal completion.
pub fn svd_jacobi(a: &FloatMatrix) -> (FloatMatrix, Vec<f64>, FloatMatrix) {
    let n = a.len();
    // Work on columns: w_j is the j-th column of A * V.
    let mut w = fmat_transpose(a); // w[j] = column j
    let mut v: FloatMatrix = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect(); // v[j] = column j of V
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = fdot(&w[p], &w[p]);
                let beta = fdot(&w[q], &w[q]);
                let gamma = fdot(&w[p], &w[q]);
                if gamma.abs() <= 1e-30 + 1e-16 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for i in 0..n {
                    let (wp, wq) = (w[p][i], w[q][i]);
                    w[p][i] = cs * wp - sn * wq;
                    w[q][i] = sn * wp + cs * wq;
                    let (vp, vq) = (v[p][i], v[q][i]);
                    v[p][i] = cs * vp - sn * vq;
                    v[q][i] = sn * vp + cs * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = w.iter().map(|col| fdot(col, col).sqrt()).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    for &j in &order {
        if norms[j] > 1e-14 * norms[order[0]].max(1.0) {
            u_cols.push(w[j].iter().map(|x| x / norms[j]).collect());
        } else {
            u_cols.push(vec![0.0; n]); // placeholder, completed below
        }
    }
    // Orthonormal completion for the null columns.
    for idx in 0..n {
        if u_cols[idx].iter().any(|&x| x != 0.0) {
            continue;
        }
        for basis in 0..n {
            let mut cand = vec![0.0; n];
            cand[basis] = 1.0;
            for filled in u_cols.iter().filter(|c| c.iter().any(|&x| x != 0.0)) {
                let proj = fdot(&cand, filled);
                for i in 0..n {
                    cand[i] -= proj * filled[i];
                }
            }
            let norm = fdot(&cand, &cand).sqrt();
            if norm > 1e-8 {
                u_cols[idx] = cand.iter().map(|x| x / norm).collect();
                break;
            }
        }
    }
    let u = fmat_transpose(&u_cols); // u[i][j] = j-th column's i-th entry
    let v_sorted: Vec<Vec<f64>> = order.iter().map(|&j| v[j].clone()).collect();
    let v_mat = fmat_transpose(&v_sorted);
    (u, sigma, v_mat)
}

fn extract_blocks(g: &FloatMatrix) -> (FloatMatrix, Vec<f64>, Vec<f64>, f64) {
    let n = g.len() - 1;
    let a = (0..n)
        .map(|i| (0..n).map(|j| g[i][j]).collect())
        .collect();
    let b = (0..n).map(|i| g[i][n]).collect();
    let c = (0..n).map(|j| g[n][j]).collect();
    (a, b, c, g[n][n])
}

fn assemble(
    g: &FloatMatrix,
    u: Vec<f64>,
    a1: FloatMatrix,
    b1: Vec<f64>,
    d1: f64,
) -> Result<FloatRankOneFactorization, GroupError> {
    let n = u.len();
    let (_, _, c, _) = extract_blocks(g);
    let a1_inv = fmat_inverse(&a1).ok_or_else(|| {
        GroupError::DecompositionFailure("A1 numerically singular".into())
    })?;
    let v = fmat_vec(&fmat_transpose(&a1_inv), &c);
    let mut g0 = vec![vec![0.0; n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            g0[i][j] = a1[i][j];
        }
        g0[i][n] = b1[i];
    }
    g0[n][n] = d1;
    Ok(FloatRankOneFactorization { u, v, g0 })
}

/// Rank-one decomposition in floating point. Handles numerically invertible A
/// through the same case split as the exact path, and A of numerical rank n-1
/// through a polar/singular-value factorization. A block of rank below n-1 is
/// reported as a failure (the input could not come from an invertible g).
pub fn decompose_rank_one_float(
    g: &FloatMatrix,
) -> Result<FloatRankOneFactorization, GroupError> {
    let n = g.len() - 1;
    let (a, b, c, d) = extract_blocks(g);
    if c.iter().all(|&x| x.abs() < 1e-300) {
        return Err(GroupError::RankOneNeedsC);
    }
    let (u_svd, sigma, v_svd) = svd_jacobi(&a);
    let smax = sigma[0].max(1e-300);

    if sigma[n - 1] > RANK_TOL * smax {
        // A numerically invertible: mirror the exact branches.
        let a_inv = fmat_inverse(&a)
            .ok_or_else(|| GroupError::DecompositionFailure("inconsistent rank".into()))?;
        let s = d - fdot(&c, &fmat_vec(&a_inv, &b));
        if s > 0.0 {
            // u = 0, A1 = A, b1 = b, d1 = s
            let b1 = b.clone();
            return assemble(g, vec![0.0; n], a, b1, s);
        }
        if d > 0.0 {
            let u: Vec<f64> = b.iter().map(|bi| bi / d).collect();
            let a1 = sub_outer_f(&a, &u, &c);
            let b1 = vec![0.0; n];
            return assemble(g, u, a1, b1, d);
        }
        // d <= 0: u = lambda A c with lambda c^T c > 1 gives d1 = s/(1 - lambda c^T c) > 0
        let ctc = fdot(&c, &c);
        let lambda = (1.0 / ctc).max(1.0) * 2.0;
        let u: Vec<f64> = fmat_vec(&a, &c).iter().map(|x| lambda * x).collect();
        let a1 = sub_outer_f(&a, &u, &c);
        let b1: Vec<f64> = b.iter().zip(&u).map(|(bi, ui)| bi - ui * d).collect();
        let d1 = s / (1.0 - lambda * ctc);
        return assemble(g, u, a1, b1, d1);
    }

    if sigma.len() >= 2 && sigma[n.saturating_sub(2)] <= RANK_TOL * smax {
        return Err(GroupError::DecompositionFailure(
            "numerical rank below n-1".into(),
        ));
    }

    // Rank n-1 branch.
    if d.abs() > RANK_TOL * smax {
        // u = b/d works without any diagonalization; fix the corner sign by
        // the adjugate direction if d < 0.
        if d > 0.0 {
            let u: Vec<f64> = b.iter().map(|bi| bi / d).collect();
            let a1 = sub_outer_f(&a, &u, &c);
            let b1 = vec![0.0; n];
            return assemble(g, u, a1, b1, d);
        }
        let adj_t_c = adjugate_transpose_times(&a, &c);
        let tau = -fmat_det(g).signum();
        let u: Vec<f64> = adj_t_c.iter().map(|x| tau * x).collect();
        let a1 = sub_outer_f(&a, &u, &c);
        let b1: Vec<f64> = b.iter().zip(&u).map(|(bi, ui)| bi - ui * d).collect();
        let a1_inv = fmat_inverse(&a1).ok_or_else(|| {
            GroupError::DecompositionFailure("A1 numerically singular".into())
        })?;
        let v = fmat_vec(&fmat_transpose(&a1_inv), &c);
        let d1 = d - fdot(&v, &b1);
        return assemble(g, u, a1, b1, d1);
    }

    // Rank n-1 and d = 0: the polar/singular-value construction. In the
    // diagonalized frame g' = [[D, b'], [c'^T, 0]] with D = diag(D1, 0),
    // choose u' along e_n and pick lambda so that the corner d1 is positive.
    let b_p = fmat_vec(&fmat_transpose(&u_svd), &b); // U^T b
    let c_p = fmat_vec(&fmat_transpose(&v_svd), &c); // V^T c
    let bn = b_p[n - 1];
    let cn = c_p[n - 1];
    if bn.abs() < 1e-12 * smax || cn.abs() < 1e-12 {
        return Err(GroupError::DecompositionFailure(
            "degenerate last coordinate in the diagonal frame".into(),
        ));
    }
    let mut d_mat = vec![vec![0.0; n]; n];
    for i in 0..(n - 1) {
        d_mat[i][i] = sigma[i];
    }
    // In the diagonal frame v' = (0, ..., 0, -1/lambda) exactly, so the corner
    // is d1 = b'_n / lambda; lambda = b'_n makes it 1.
    let lambda = bn;
    let mut u_p = vec![0.0; n];
    u_p[n - 1] = lambda;
    let a1_p = sub_outer_f(&d_mat, &u_p, &c_p);
    let v_p = {
        let a1_p_inv = fmat_inverse(&a1_p).ok_or_else(|| {
            GroupError::DecompositionFailure("diagonal-frame A1 singular".into())
        })?;
        fmat_vec(&fmat_transpose(&a1_p_inv), &c_p)
    };
    let d1 = -fdot(&v_p, &b_p);
    if d1 <= 0.0 {
        return Err(GroupError::DecompositionFailure(
            "could not make the corner positive".into(),
        ));
    }
    // Undiagonalize: g = g_(U u', U v') * [[U A1' V^T, U b1'], [0, d1]].
    let u_final = fmat_vec(&u_svd, &u_p);
    let a1_final = fmat_mul(&fmat_mul(&u_svd, &a1_p), &fmat_transpose(&v_svd));
    let b1_final = fmat_vec(&u_svd, &b_p);
    let n_rows = n;
    let mut g0 = vec![vec![0.0; n_rows + 1]; n_rows + 1];
    for i in 0..n_rows {
        for j in 0..n_rows {
            g0[i][j] = a1_final[i][j];
        }
        g0[i][n_rows] = b1_final[i];
    }
    g0[n_rows][n_rows] = d1;
    let a1_inv = fmat_inverse(&a1_final)
        .ok_or_else(|| GroupError::DecompositionFailure("A1 numerically singular".into()))?;
    let v_final = fmat_vec(&fmat_transpose(&a1_inv), &c);
    Ok(FloatRankOneFactorization {
        u: u_final,
        v: v_final,
        g0,
    })
}

fn sub_outer_f(a: &FloatMatrix, u: &[f64], c: &[f64]) -> FloatMatrix {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| a[i][j] - u[i] * c[j]).collect())
        .collect()
}

/// adj(A)^T c computed from cofactors; valid for singular A as well.
fn adjugate_transpose_times(a: &FloatMatrix, c: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut adj_t = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: FloatMatrix = (0..n)
                .filter(|&r| r != i)
                .map(|r| {
                    (0..n)
                        .filter(|&cc| cc != j)
                        .map(|cc| a[r][cc])
                        .collect()
                })
                .collect();
            let m = if minor.is_empty() { 1.0 } else { fmat_det(&minor) };
            let cof = if (i + j) % 2 == 0 { m } else { -m };
            // adj[j][i] = cof; adj^T[i][j] = cof
            adj_t[i][j] = cof;
        }
    }
    fmat_vec(&adj_t, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svd_reconstructs() {
        let a = vec![
            vec![1.0, 2.0, 0.5],
            vec![-1.0, 0.25, 3.0],
            vec![0.0, 1.0, 1.0],
        ];
        let (u, s, v) = svd_jacobi(&a);
        let mut usv = vec![vec![0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    usv[i][j] += u[i][k] * s[k] * v[j][k];
                }
            }
        }
        assert!(frobenius_distance(&a, &usv) < 1e-10);
        assert!(s[0] >= s[1] && s[1] >= s[2]);
    }

    #[test]
    fn rank_deficient_d_zero_decomposition() {
        // A = rank-1 2x2 block, d = 0
        let g = vec![
            vec![1.0, 2.0, 1.0],
            vec![2.0, 4.0, -1.0],
            vec![0.5, 1.5, 0.0],
        ];
        let f = decompose_rank_one_float(&g).unwrap();
        assert!(f.residual(&g) < 1e-9, "residual {}", f.residual(&g));
        assert!(f.g0[2][2] > 0.0);
    }

    #[test]
    fn invertible_float_matches_branches() {
        let g = vec![
            vec![1.0, 1.0],
            vec![2.0, -1.0],
        ];
        let f = decompose_rank_one_float(&g).unwrap();
        assert!(f.residual(&g) < 1e-12);
        assert!(f.g0[1][1] > 0.0);
    }
}
