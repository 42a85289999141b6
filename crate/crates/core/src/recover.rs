//! Recovery of the lattice generating measure from a variance function: from
//! V(m) compute phi' = V^{-1} m, integrate to phi, solve the radial equation
//! for K, set G = e^K, and extract the masses mu_k = [z^k] e^phi G^k D(G) by
//! the Lagrange formula. The normalization phi(0) = 0 pins mu_0 = 1.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::algebra::poly::{poly_mat_adjugate, poly_mat_det};
use crate::algebra::{
    series_det, series_solve_vanishing_div_multi, AlgebraError, ExponentVector, MultiPoly,
    Rational, SeriesVector, TruncSeries,
};
use crate::lagrange;
use crate::transform::VarianceSpec;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RecoverError {
    #[error("V^{{-1}} m is not analytic at 0 (inconsistent division at degree {degree})")]
    NotAnalytic { degree: u32 },
    #[error("phi'(0) = {got} differs from 1 in component {component}: the family is not of normalized lattice type")]
    NotLatticeType { component: usize, got: String },
    #[error("mixed partials differ: d phi'_{i}/dz_{j} != d phi'_{j}/dz_{i}")]
    NotAGradient { i: usize, j: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Lagrange(#[from] lagrange::LagrangeError),
}

/// Lattice masses indexed by the exponent vector, exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureTable {
    n: usize,
    masses: BTreeMap<ExponentVector, Rational>,
}

impl MeasureTable {
    pub fn new(n: usize) -> Self {
        MeasureTable {
            n,
            masses: BTreeMap::new(),
        }
    }

    pub fn from_masses(
        n: usize,
        masses: impl IntoIterator<Item = (ExponentVector, Rational)>,
    ) -> Self {
        MeasureTable {
            n,
            masses: masses.into_iter().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mass(&self, k: &ExponentVector) -> Rational {
        self.masses.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ExponentVector, &Rational)> {
        self.masses.iter()
    }

    pub fn insert(&mut self, k: ExponentVector, mass: Rational) {
        self.masses.insert(k, mass);
    }

    /// The truncated generating function f(z) = sum mu_k z^k.
    pub fn generating_series(&self, trunc: u32) -> TruncSeries {
        let mut f = TruncSeries::zero(self.n, trunc);
        for (k, mu) in &self.masses {
            f.add_term(k.clone(), mu.clone());
        }
        f
    }
}

/// All intermediate stages of a successful recovery.
#[derive(Debug, Clone)]
pub struct Recovery {
    pub phi_prime: SeriesVector,
    pub phi: TruncSeries,
    pub k: SeriesVector,
    pub g: SeriesVector,
    pub jacobian_factor: TruncSeries,
    pub measure: MeasureTable,
    /// Nonempty when some mu_(e_i) <= 0: the table is reported anyway since
    /// positivity admits no constructive criterion at the variance level.
    pub warnings: Vec<String>,
}

/// phi'(m) = V(m)^{-1} m as a truncated series vector, computed through
/// adj(V) m over det(V) with the vanishing-division kernel, then checked to
/// satisfy phi'(0) = 1 componentwise.
pub fn phi_prime_from_variance(
    v: &VarianceSpec,
    trunc: u32,
) -> Result<SeriesVector, RecoverError> {
    let n = v.dim();
    let det = poly_mat_det(v.v.rows());
    let adj = poly_mat_adjugate(v.v.rows());
    // (adj(V) m)_i
    let targets: Vec<MultiPoly> = (0..n)
        .map(|i| {
            let mut acc = MultiPoly::zero(n);
            for j in 0..n {
                acc = &acc + &(&adj[i][j] * &MultiPoly::var(n, j));
            }
            acc
        })
        .collect();
    let comps = series_solve_vanishing_div_multi(&det, &targets, trunc).map_err(|e| match e {
        AlgebraError::InconsistentDivision { degree } => RecoverError::NotAnalytic { degree },
        other => RecoverError::Algebra(other),
    })?;
    for (i, comp) in comps.iter().enumerate() {
        let c0 = comp.constant_term();
        if !c0.is_one() {
            return Err(RecoverError::NotLatticeType {
                component: i,
                got: crate::algebra::rational_to_string(&c0),
            });
        }
    }
    Ok(SeriesVector::new(comps)?)
}

/// Integrates a gradient field: the unique phi with phi(0) = 0 and
/// d phi/dz_i = phi'_i, after checking mixed-partial symmetry through
/// degree D-1.
pub fn integrate_phi(phi_prime: &SeriesVector) -> Result<TruncSeries, RecoverError> {
    let n = phi_prime.len();
    let d = phi_prime.truncation();
    for i in 0..n {
        for j in (i + 1)..n {
            let dij = phi_prime.component(i).partial(j);
            let dji = phi_prime.component(j).partial(i);
            let diff = &dij - &dji;
            if diff.terms().any(|(k, _)| k.total_degree() < d) {
                return Err(RecoverError::NotAGradient { i, j });
            }
        }
    }
    let mut phi = TruncSeries::zero(n, d);
    for k in ExponentVector::up_to_degree(n, d) {
        if k.is_zero() {
            continue;
        }
        let i = (0..n).find(|&i| k.get(i) > 0).unwrap();
        let prev = k.lower(i).unwrap();
        let c = phi_prime.component(i).coefficient(&prev);
        if !c.is_zero() {
            let ki = Rational::from_integer(k.get(i).into());
            phi.add_term(k, c / ki);
        }
    }
    Ok(phi)
}

/// Solves the radial equation sum_j z_j dK_i/dz_j = 1 - phi'_i for the unique
/// K with K(0) = 0: the coefficient at z^k is [z^k](1 - phi'_i)/|k|.
pub fn solve_k(phi_prime: &SeriesVector) -> Result<SeriesVector, RecoverError> {
    let n = phi_prime.len();
    let d = phi_prime.truncation();
    let mut comps = Vec::with_capacity(n);
    for i in 0..n {
        let rhs = &TruncSeries::one(n, d) - phi_prime.component(i);
        if !rhs.constant_term().is_zero() {
            return Err(RecoverError::NotLatticeType {
                component: i,
                got: crate::algebra::rational_to_string(&phi_prime.component(i).constant_term()),
            });
        }
        let mut ki = TruncSeries::zero(n, d);
        for (k, c) in rhs.terms() {
            let deg = k.total_degree();
            if deg == 0 {
                continue;
            }
            ki.add_term(k.clone(), c / Rational::from_integer(deg.into()));
        }
        comps.push(ki);
    }
    Ok(SeriesVector::new(comps)?)
}

/// Full pipeline: variance to lattice masses for all |k| <= trunc.
pub fn recover_measure(v: &VarianceSpec, trunc: u32) -> Result<Recovery, RecoverError> {
    let n = v.dim();
    let phi_prime = phi_prime_from_variance(v, trunc)?;
    let phi = integrate_phi(&phi_prime)?;
    let k = solve_k(&phi_prime)?;
    let g_comps: Vec<TruncSeries> = k
        .components()
        .iter()
        .map(|ki| ki.exp())
        .collect::<Result<_, _>>()?;
    let g = SeriesVector::new(g_comps)?;
    let jac = lagrange::jacobian_factor(&g)?;
    let e_phi = phi.exp()?;
    let base = &e_phi * &jac;
    // mu_k = [z^k](e^phi G^k D(G)), with G^k built along the grlex order.
    let mut powers: BTreeMap<ExponentVector, TruncSeries> = BTreeMap::new();
    powers.insert(ExponentVector::zeros(n), TruncSeries::one(n, trunc));
    let mut measure = MeasureTable::new(n);
    for kvec in ExponentVector::up_to_degree(n, trunc) {
        let gk = if kvec.is_zero() {
            powers[&kvec].clone()
        } else {
            let i = (0..n).find(|&i| kvec.get(i) > 0).unwrap();
            let prev = kvec.lower(i).unwrap();
            let gk = &powers[&prev] * g.component(i);
            powers.insert(kvec.clone(), gk.clone());
            gk
        };
        measure.insert(kvec.clone(), (&base * &gk).coefficient(&kvec));
    }
    debug_assert!(measure.mass(&ExponentVector::zeros(n)).is_one());
    let mut warnings = Vec::new();
    for i in 0..n {
        let ei = ExponentVector::unit(n, i);
        let mu = measure.mass(&ei);
        if !mu.is_positive() {
            warnings.push(format!(
                "mu_(e_{}) = {} is not positive; the table does not generate a lattice family",
                i + 1,
                crate::algebra::rational_to_string(&mu)
            ));
        }
    }
    Ok(Recovery {
        phi_prime,
        phi,
        k,
        g,
        jacobian_factor: jac,
        measure,
        warnings,
    })
}

/// The reverse direction used as an independent oracle: from a mass table,
/// build f(z) = sum mu_k z^k, solve h(m) = diag(m) g(h(m)) for
/// g_i = f / (df/dz_i), and reconstruct the variance as
/// V(m) = (h'(m))^{-1} diag(h(m)), a matrix of truncated series in m.
pub fn variance_from_measure(
    table: &MeasureTable,
    trunc: u32,
) -> Result<Vec<Vec<TruncSeries>>, RecoverError> {
    let n = table.dim();
    let f = table.generating_series(trunc);
    let g_comps: Vec<TruncSeries> = (0..n)
        .map(|i| {
            // g_i = f / (df/dz_i); df/dz_i(0) = mu_(e_i) must be nonzero
            let dfi = f.partial(i);
            dfi.inverse_unit().map(|inv| &f * &inv)
        })
        .collect::<Result<_, _>>()?;
    let g = SeriesVector::new(g_comps)?;
    let problem = lagrange::LagrangeProblem::new(g, None)?;
    let h = lagrange::solve_functional_equation(&problem)?;
    // h'(m): Jacobian matrix of the solved map.
    let hp: Vec<Vec<TruncSeries>> = (0..n)
        .map(|i| (0..n).map(|j| h.components()[i].partial(j)).collect())
        .collect();
    // invert via adjugate / determinant (det has unit constant term).
    let det = series_det(&hp)?;
    let det_inv = det.inverse_unit()?;
    let adj = series_adjugate(&hp)?;
    let mut out = vec![vec![TruncSeries::zero(n, trunc); n]; n];
    for i in 0..n {
        for j in 0..n {
            // (h')^{-1} diag(h): column j scaled by h_j
            let entry = &(&adj[i][j] * &det_inv) * &h.components()[j];
            out[i][j] = entry;
        }
    }
    Ok(out)
}

fn series_adjugate(a: &[Vec<TruncSeries>]) -> Result<Vec<Vec<TruncSeries>>, AlgebraError> {
    let m = a.len();
    let n = a[0][0].dim();
    let d = a[0][0].truncation();
    if m == 1 {
        return Ok(vec![vec![TruncSeries::one(n, d)]]);
    }
    let mut adj = vec![vec![TruncSeries::zero(n, d); m]; m];
    for i in 0..m {
        for j in 0..m {
            let minor: Vec<Vec<TruncSeries>> = (0..m)
                .filter(|&r| r != i)
                .map(|r| {
                    (0..m)
                        .filter(|&c| c != j)
                        .map(|c| a[r][c].clone())
                        .collect()
                })
                .collect();
            let det = series_det(&minor)?;
            adj[j][i] = if (i + j) % 2 == 0 { det } else { -&det };
        }
    }
    Ok(adj)
}
