//! Seeded random generators for the property suites. All randomness flows
//! through a ChaCha stream cipher keyed by the caller's seed, so every suite
//! run is reproducible.

use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{ExponentVector, MultiPoly, Rational, SeriesVector, TruncSeries};
use crate::group::GroupElement;
use crate::lagrange::LagrangeProblem;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Integer rational in [-max_abs, max_abs].
pub fn small_int(rng: &mut ChaCha8Rng, max_abs: i64) -> Rational {
    Rational::from_integer(rng.random_range(-max_abs..=max_abs).into())
}

/// Rational with numerator in [-max_abs, max_abs] and denominator in [1, den_max].
pub fn small_rational(rng: &mut ChaCha8Rng, max_abs: i64, den_max: i64) -> Rational {
    let num = rng.random_range(-max_abs..=max_abs);
    let den = rng.random_range(1..=den_max);
    Rational::new(num.into(), den.into())
}

/// Random exact point with small rational coordinates.
pub fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    (0..n).map(|_| small_rational(rng, 5, 3)).collect()
}

/// Random invertible group element with integer entries in [-max_abs, max_abs].
pub fn random_group_element(rng: &mut ChaCha8Rng, n: usize, max_abs: i64) -> GroupElement {
    loop {
        let rows: Vec<Vec<Rational>> = (0..=n)
            .map(|_| (0..=n).map(|_| small_int(rng, max_abs)).collect())
            .collect();
        if let Ok(g) = GroupElement::new(rows) {
            return g;
        }
    }
}

/// Random invertible group element with small rational entries.
pub fn random_group_element_rational(
    rng: &mut ChaCha8Rng,
    n: usize,
    max_abs: i64,
    den_max: i64,
) -> GroupElement {
    loop {
        let rows: Vec<Vec<Rational>> = (0..=n)
            .map(|_| {
                (0..=n)
                    .map(|_| small_rational(rng, max_abs, den_max))
                    .collect()
            })
            .collect();
        if let Ok(g) = GroupElement::new(rows) {
            return g;
        }
    }
}

/// Random nonzero c vector with small integer entries.
pub fn random_c(rng: &mut ChaCha8Rng, n: usize, max_abs: i64) -> Vec<Rational> {
    loop {
        let c: Vec<Rational> = (0..n).map(|_| small_int(rng, max_abs)).collect();
        if c.iter().any(|x| !x.is_zero()) {
            return c;
        }
    }
}

/// Random polynomial with bounded degree and term count.
pub fn random_poly(
    rng: &mut ChaCha8Rng,
    n: usize,
    max_deg: u32,
    max_terms: usize,
    coeff_abs: i64,
) -> MultiPoly {
    let mut p = MultiPoly::zero(n);
    let monomials = ExponentVector::up_to_degree(n, max_deg);
    for _ in 0..max_terms {
        let k = monomials[rng.random_range(0..monomials.len())].clone();
        p.add_term(k, small_rational(rng, coeff_abs, 2));
    }
    p
}

/// Random Lagrange problem: components 1 + (terms of degree >= 1), a random
/// polynomial weight g0 with small coefficients.
pub fn random_lagrange_problem(rng: &mut ChaCha8Rng, n: usize, d: u32) -> LagrangeProblem {
    let comps: Vec<TruncSeries> = (0..n)
        .map(|_| {
            let mut p = MultiPoly::one(n);
            let monomials: Vec<ExponentVector> = ExponentVector::up_to_degree(n, 3)
                .into_iter()
                .filter(|k| k.total_degree() >= 1)
                .collect();
            for _ in 0..3 {
                let k = monomials[rng.random_range(0..monomials.len())].clone();
                p.add_term(k, small_rational(rng, 2, 2));
            }
            TruncSeries::from_poly(&p, d)
        })
        .collect();
    let g = SeriesVector::new(comps).expect("components share (n, d)");
    let g0 = TruncSeries::from_poly(&random_poly(rng, n, 3, 3, 2), d);
    LagrangeProblem::new(g, Some(g0)).expect("constant terms are 1")
}

/// Random float matrix of rank exactly n-1 in the (n+1)-dimensional block
/// layout with d = 0, for the float decomposition branch.
pub fn random_rank_deficient_float(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    loop {
        // A = U diag(sigma_1..sigma_(n-1), 0) V^T from random rotations
        let mut u = identity_f(n);
        let mut v = identity_f(n);
        for _ in 0..(3 * n) {
            let (i, j) = pick_pair(rng, n);
            rotate(&mut u, i, j, rng.random_range(-3.0..3.0));
            let (i, j) = pick_pair(rng, n);
            rotate(&mut v, i, j, rng.random_range(-3.0..3.0));
        }
        let mut sigma: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..3.0)).collect();
        sigma[n - 1] = 0.0;
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                for (k, s) in sigma.iter().enumerate() {
                    a[i][j] += u[i][k] * s * v[j][k];
                }
            }
        }
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let c: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        if c.iter().all(|x| x.abs() < 0.1) {
            continue;
        }
        let mut g = vec![vec![0.0; n + 1]; n + 1];
        for i in 0..n {
            for j in 0..n {
                g[i][j] = a[i][j];
            }
            g[i][n] = b[i];
            g[n][i] = c[i];
        }
        g[n][n] = 0.0;
        // the full matrix must be comfortably invertible for a stable test
        if fdet(&g).abs() > 1e-3 {
            return g;
        }
    }
}

fn identity_f(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

fn pick_pair(rng: &mut ChaCha8Rng, n: usize) -> (usize, usize) {
    let i = rng.random_range(0..n);
    let mut j = rng.random_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    (i, j)
}

fn rotate(m: &mut [Vec<f64>], p: usize, q: usize, angle: f64) {
    let (c, s) = (angle.cos(), angle.sin());
    for row in m.iter_mut() {
        let (a, b) = (row[p], row[q]);
        row[p] = c * a - s * b;
        row[q] = s * a + c * b;
    }
}

fn fdet(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
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
