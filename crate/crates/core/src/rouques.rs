//! Tilted density constructions for the subgroup H of homographies
//! [[I, 0], [c^T, lambda]]: continuous densities p(lambda, c, x), discrete
//! masses p_k(lambda, c), the convolution and cumulant functional equations,
//! and the named transformed variance functions.
//!
//! The construction turns a convolution semigroup with densities f(lambda, .)
//! into
//!
//! ```text
//!   p(lambda, c, x) = lambda/(lambda + <c,x>) f(lambda + <c,x>, x) 1_(0,inf)(lambda + <c,x>)
//! ```
//!
//! and analogously on the lattice. Everything here is floating point except
//! the named variance functions, which stay exact.

use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{rational_to_string, ExponentVector, MultiPoly, PolyMatrix, Rational};
use crate::group::GroupElement;
use crate::transform::{transform_variance, TransformError, VarianceSpec};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RouquesError {
    #[error("operation '{op}' does not support this semigroup")]
    UnsupportedSemigroup { op: String },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("truncated sum appears divergent (mass growth detected)")]
    DivergentSum,
    #[error("closed form disagrees with the transform path for {0}")]
    ClosedFormMismatch(String),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

/// The convolution semigroups with closed-form densities used by the
/// constructions.
#[derive(Debug, Clone, PartialEq)]
pub enum Semigroup {
    /// N(0, lambda) on R.
    Gaussian,
    /// Gamma(lambda) on (0, inf).
    Gamma,
    /// Poisson(lambda) on N.
    Poisson,
    /// Negative multinomial on N^n with parameter vector p, sum p_i < 1.
    NegBinomial { p: Vec<f64> },
}

impl Semigroup {
    pub fn neg_binomial(p: Vec<f64>) -> Result<Self, RouquesError> {
        if p.is_empty() || p.iter().any(|&x| x <= 0.0) {
            return Err(RouquesError::InvalidParams(
                "p must be a nonempty vector of positive numbers".into(),
            ));
        }
        if p.iter().sum::<f64>() >= 1.0 {
            return Err(RouquesError::InvalidParams(
                "sum of p must be < 1 for normalization at theta = 0".into(),
            ));
        }
        Ok(Semigroup::NegBinomial { p })
    }

    pub fn dim(&self) -> usize {
        match self {
            Semigroup::Gaussian | Semigroup::Gamma | Semigroup::Poisson => 1,
            Semigroup::NegBinomial { p } => p.len(),
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, Semigroup::Poisson | Semigroup::NegBinomial { .. })
    }

    /// Continuous density f(lambda, x) of the semigroup member.
    pub fn density(&self, lambda: f64, x: f64) -> Result<f64, RouquesError> {
        match self {
            Semigroup::Gaussian => {
                if lambda <= 0.0 {
                    return Ok(0.0);
                }
                Ok((-x * x / (2.0 * lambda)).exp() / (2.0 * std::f64::consts::PI * lambda).sqrt())
            }
            Semigroup::Gamma => {
                if lambda <= 0.0 || x <= 0.0 {
                    return Ok(0.0);
                }
                // x^(lambda-1)/Gamma(lambda)
                Ok(((lambda - 1.0) * x.ln() - libm::lgamma(lambda)).exp())
            }
            _ => Err(RouquesError::UnsupportedSemigroup {
                op: "density".into(),
            }),
        }
    }

    /// Lattice mass f(lambda, k). The lambda -> 0+ limit is the point mass at
    /// the origin.
    pub fn mass(&self, lambda: f64, k: &ExponentVector) -> Result<f64, RouquesError> {
        if !self.is_discrete() {
            return Err(RouquesError::UnsupportedSemigroup { op: "mass".into() });
        }
        if lambda == 0.0 {
            return Ok(if k.is_zero() { 1.0 } else { 0.0 });
        }
        if lambda < 0.0 {
            return Ok(0.0);
        }
        match self {
            Semigroup::Poisson => {
                let kk = k.get(0) as f64;
                Ok((-lambda + kk * lambda.ln() - libm::lgamma(kk + 1.0)).exp())
            }
            Semigroup::NegBinomial { p } => {
                // f(lambda, k) = (lambda)_(|k|) p^k / prod k_i!
                let total = k.total_degree() as f64;
                let mut logmass = libm::lgamma(lambda + total) - libm::lgamma(lambda);
                for (i, pi) in p.iter().enumerate() {
                    let ki = k.get(i) as f64;
                    logmass += ki * pi.ln() - libm::lgamma(ki + 1.0);
                }
                Ok(logmass.exp())
            }
            _ => unreachable!(),
        }
    }

    /// Closed-form cumulant k_(mu_lambda)(theta).
    pub fn cumulant(&self, lambda: f64, theta: &[f64]) -> Result<f64, RouquesError> {
        match self {
            Semigroup::Gaussian => Ok(lambda * theta[0] * theta[0] / 2.0),
            Semigroup::Gamma => {
                if theta[0] >= 0.0 {
                    return Err(RouquesError::InvalidParams("theta must be negative".into()));
                }
                Ok(-lambda * (-theta[0]).ln())
            }
            // probability normalization: L_lambda(theta) = e^(lambda (e^theta - 1))
            Semigroup::Poisson => Ok(lambda * (theta[0].exp() - 1.0)),
            Semigroup::NegBinomial { p } => {
                let inner: f64 = p
                    .iter()
                    .zip(theta)
                    .map(|(pi, ti)| pi * ti.exp())
                    .sum();
                if inner >= 1.0 {
                    return Err(RouquesError::InvalidParams(
                        "theta outside the cumulant domain".into(),
                    ));
                }
                Ok(-lambda * (1.0 - inner).ln())
            }
        }
    }
}

/// An element of H: lambda > 0 and the tilt direction c, kept as exact
/// rationals so the symbolic branch can reuse them.
#[derive(Debug, Clone, PartialEq)]
pub struct HElement {
    lambda: Rational,
    c: Vec<Rational>,
}

impl HElement {
    pub fn new(lambda: Rational, c: Vec<Rational>) -> Result<Self, RouquesError> {
        if lambda <= Rational::zero() {
            return Err(RouquesError::InvalidParams("lambda must be positive".into()));
        }
        Ok(HElement { lambda, c })
    }

    pub fn from_f64(lambda: f64, c: &[f64]) -> Result<Self, RouquesError> {
        let lam = Rational::from_float(lambda)
            .ok_or_else(|| RouquesError::InvalidParams("lambda must be finite".into()))?;
        let c = c
            .iter()
            .map(|&x| {
                Rational::from_float(x)
                    .ok_or_else(|| RouquesError::InvalidParams("c must be finite".into()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(lam, c)
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn c(&self) -> &[Rational] {
        &self.c
    }

    pub fn lambda_f64(&self) -> f64 {
        rational_to_f64(&self.lambda)
    }

    pub fn c_f64(&self) -> Vec<f64> {
        self.c.iter().map(rational_to_f64).collect()
    }

    /// The group element g_c J_lambda = [[I, 0], [c^T, lambda]].
    pub fn group_element(&self) -> GroupElement {
        let n = self.c.len();
        GroupElement::from_blocks(
            &crate::algebra::linalg::mat_identity(n),
            &vec![Rational::zero(); n],
            &self.c,
            &self.lambda,
        )
        .expect("lambda > 0 makes the element invertible")
    }
}

fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// A semigroup tilted by an H element.
#[derive(Debug, Clone)]
pub struct TiltedDensity {
    pub semigroup: Semigroup,
    pub h: HElement,
}

impl TiltedDensity {
    pub fn new(semigroup: Semigroup, h: HElement) -> Result<Self, RouquesError> {
        if h.c().len() != semigroup.dim() {
            return Err(RouquesError::InvalidParams(format!(
                "c has length {}, semigroup dimension is {}",
                h.c().len(),
                semigroup.dim()
            )));
        }
        Ok(TiltedDensity { semigroup, h })
    }

    /// p(lambda, c, x) for the continuous semigroups.
    pub fn continuous_density(&self, x: &[f64]) -> Result<f64, RouquesError> {
        if self.semigroup.is_discrete() {
            return Err(RouquesError::UnsupportedSemigroup {
                op: "continuous_density".into(),
            });
        }
        let lambda = self.h.lambda_f64();
        let c = self.h.c_f64();
        let cx: f64 = c.iter().zip(x).map(|(a, b)| a * b).sum();
        let shifted = lambda + cx;
        if shifted <= 0.0 {
            return Ok(0.0);
        }
        Ok(lambda / shifted * self.semigroup.density(shifted, x[0])?)
    }

    /// p_k(lambda, c) for the lattice semigroups.
    pub fn discrete_mass(&self, k: &ExponentVector) -> Result<f64, RouquesError> {
        if !self.semigroup.is_discrete() {
            return Err(RouquesError::UnsupportedSemigroup {
                op: "discrete_mass".into(),
            });
        }
        let lambda = self.h.lambda_f64();
        let c = self.h.c_f64();
        tilted_mass(&self.semigroup, lambda, &c, k)
    }
}

/// p_k(lambda, c) with an explicit lambda, including the lambda = 0 point
/// mass convention needed inside convolution sums.
fn tilted_mass(
    semigroup: &Semigroup,
    lambda: f64,
    c: &[f64],
    k: &ExponentVector,
) -> Result<f64, RouquesError> {
    if lambda == 0.0 {
        return Ok(if k.is_zero() { 1.0 } else { 0.0 });
    }
    let ck: f64 = c
        .iter()
        .enumerate()
        .map(|(i, ci)| ci * k.get(i) as f64)
        .sum();
    let shifted = lambda + ck;
    if shifted <= 0.0 {
        return Ok(0.0);
    }
    Ok(lambda / shifted * semigroup.mass(shifted, k)?)
}

/// Residual of the lattice convolution identity at k:
///
/// ```text
///   p_k(lambda, c) 1_[0,inf)(<c,k>) = sum_(k' <= k) p_(k')(lambda, 0) p_(k-k')(<c,k'>, c)
/// ```
pub fn convolution_identity_residual(
    t: &TiltedDensity,
    k: &ExponentVector,
) -> Result<f64, RouquesError> {
    if !t.semigroup.is_discrete() {
        return Err(RouquesError::UnsupportedSemigroup {
            op: "convolution_identity_residual".into(),
        });
    }
    let n = t.semigroup.dim();
    let lambda = t.h.lambda_f64();
    let c = t.h.c_f64();
    let ck: f64 = c
        .iter()
        .enumerate()
        .map(|(i, ci)| ci * k.get(i) as f64)
        .sum();
    if ck < 0.0 {
        return Err(RouquesError::InvalidParams("<c,k> must be >= 0".into()));
    }
    let lhs = tilted_mass(&t.semigroup, lambda, &c, k)?;
    let mut rhs = 0.0;
    for kp in sub_indices(k) {
        let f_term = tilted_mass(&t.semigroup, lambda, &vec![0.0; n], &kp)?;
        if f_term == 0.0 {
            continue;
        }
        let ckp: f64 = c
            .iter()
            .enumerate()
            .map(|(i, ci)| ci * kp.get(i) as f64)
            .sum();
        let rest = k.checked_sub(&kp).expect("kp <= k");
        rhs += f_term * tilted_mass(&t.semigroup, ckp, &c, &rest)?;
    }
    Ok((lhs - rhs).abs())
}

/// All k' with 0 <= k' <= k componentwise.
fn sub_indices(k: &ExponentVector) -> Vec<ExponentVector> {
    let n = k.dim();
    let mut out = vec![Vec::with_capacity(n)];
    for i in 0..n {
        let mut next = Vec::new();
        for prefix in &out {
            for e in 0..=k.get(i) {
                let mut p = prefix.clone();
                p.push(e);
                next.push(p);
            }
        }
        out = next;
    }
    out.into_iter().map(ExponentVector::new).collect()
}

/// Residual of the continuous convolution identity for the Gaussian
/// semigroup at (lambda, c, x) with c x > 0, by adaptive quadrature:
///
/// ```text
///   p(lambda, c, x) = int f(lambda, y) (y/x) f(c x, x - y) dy
/// ```
pub fn gaussian_convolution_residual(lambda: f64, c: f64, x: f64) -> Result<f64, RouquesError> {
    if c * x <= 0.0 {
        return Err(RouquesError::InvalidParams("c x must be positive".into()));
    }
    let t = TiltedDensity::new(
        Semigroup::Gaussian,
        HElement::from_f64(lambda, &[c])?,
    )?;
    let lhs = t.continuous_density(&[x])?;
    let cx = c * x;
    let semigroup = Semigroup::Gaussian;
    let integrand = |y: f64| -> f64 {
        let fy = semigroup.density(lambda, y).unwrap();
        let fxy = semigroup.density(cx, x - y).unwrap();
        fy * (y / x) * fxy
    };
    // The integrand is a product of two Gaussians: integrate over the
    // effective support of the combined bell.
    let var = lambda * cx / (lambda + cx);
    let mean = x * lambda / (lambda + cx);
    let half_width = 12.0 * var.sqrt() + 1.0;
    let rhs = adaptive_simpson(
        &integrand,
        mean - half_width,
        mean + half_width,
        1e-11,
        24,
    );
    Ok((lhs - rhs).abs())
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    rec(f, a, b, fa, fm, fb, whole, tol, depth)
}

/// z(theta) = k_(mu_(1,c))(theta) = log sum_(|k| <= kmax) p_k(1, c) e^(<k, theta>).
pub fn cumulant_z(t: &TiltedDensity, theta: &[f64], kmax: u32) -> Result<f64, RouquesError> {
    log_tilted_sum(&t.semigroup, 1.0, &t.h.c_f64(), theta, kmax)
}

fn log_tilted_sum(
    semigroup: &Semigroup,
    lambda: f64,
    c: &[f64],
    theta: &[f64],
    kmax: u32,
) -> Result<f64, RouquesError> {
    let n = semigroup.dim();
    let mut sum = 0.0;
    let mut last_shell = 0.0;
    for k in ExponentVector::up_to_degree(n, kmax) {
        let kth: f64 = theta
            .iter()
            .enumerate()
            .map(|(i, ti)| ti * k.get(i) as f64)
            .sum();
        let term = tilted_mass(semigroup, lambda, c, &k)? * kth.exp();
        sum += term;
        if k.total_degree() == kmax {
            last_shell += term;
        }
    }
    // Geometric-tail heuristic: the top shell must be negligible.
    if last_shell > 1e-6 * sum.max(1e-300) {
        return Err(RouquesError::DivergentSum);
    }
    Ok(sum.ln())
}

/// Residual of the cumulant functional equation
/// k_(mu_(lambda,c))(theta) = k_(mu_lambda)(theta + c z(theta)).
pub fn cumulant_equation_residual(
    t: &TiltedDensity,
    theta: &[f64],
    kmax: u32,
) -> Result<f64, RouquesError> {
    let lambda = t.h.lambda_f64();
    let c = t.h.c_f64();
    let z = cumulant_z(t, theta, kmax)?;
    let lhs = log_tilted_sum(&t.semigroup, lambda, &c, theta, kmax)?;
    let shifted: Vec<f64> = theta
        .iter()
        .zip(&c)
        .map(|(ti, ci)| ti + ci * z)
        .collect();
    let rhs = t.semigroup.cumulant(lambda, &shifted)?;
    Ok((lhs - rhs).abs())
}

/// |z - e^(theta + c z)| for the Poisson tilt. The Abel fixed point
/// z = e^(theta + c z) is the cumulant of the tilt of the semigroup generated
/// by sum lambda^k/k! delta_k (Laplace transform e^(lambda e^theta)), whose
/// tilted masses are lambda (lambda + c k)^(k-1)/k!.
pub fn poisson_z_residual(theta: f64, c: f64, kmax: u32) -> Result<f64, RouquesError> {
    let mut sum = 0.0;
    let mut last = 0.0;
    for k in 0..=kmax {
        let kf = k as f64;
        let log_term = if k == 0 {
            0.0
        } else {
            (kf - 1.0) * (1.0 + c * kf).ln() + kf * theta - libm::lgamma(kf + 1.0)
        };
        last = log_term.exp();
        sum += last;
    }
    if last > 1e-9 * sum {
        return Err(RouquesError::DivergentSum);
    }
    let z = sum.ln();
    Ok((z - (theta + c * z).exp()).abs())
}

/// |e^(-z) - (1 - sum p_i e^(theta_i + c_i z))| for the negative multinomial tilt.
pub fn negbin_z_residual(
    p: &[f64],
    theta: &[f64],
    c: &[f64],
    kmax: u32,
) -> Result<f64, RouquesError> {
    let sg = Semigroup::neg_binomial(p.to_vec())?;
    let t = TiltedDensity::new(sg, HElement::from_f64(1.0, c)?)?;
    let z = cumulant_z(&t, theta, kmax)?;
    let inner: f64 = p
        .iter()
        .zip(theta)
        .zip(c)
        .map(|((pi, ti), ci)| pi * (ti + ci * z).exp())
        .sum();
    Ok(((-z).exp() - (1.0 - inner)).abs())
}

/// Partial sum of the tilted Poisson masses, which must approach 1 from
/// below for 0 <= c < 1.
pub fn poisson_normalization_sum(lambda: f64, c: f64, kmax: u32) -> Result<f64, RouquesError> {
    let t = TiltedDensity::new(Semigroup::Poisson, HElement::from_f64(lambda, &[c])?)?;
    let mut sum = 0.0;
    for e in 0..=kmax {
        sum += t.discrete_mass(&ExponentVector::new(vec![e]))?;
    }
    Ok(sum)
}

/// Jorgensen consistency for the Poisson tilt:
/// |k_(mu_(lambda,c))(theta) - lambda k_(mu_(1,c))(theta)|.
pub fn poisson_jorgensen_residual(
    lambda: f64,
    c: f64,
    theta: f64,
    kmax: u32,
) -> Result<f64, RouquesError> {
    let sg = Semigroup::Poisson;
    let big = log_tilted_sum(&sg, lambda, &[c], &[theta], kmax)?;
    let one = log_tilted_sum(&sg, 1.0, &[c], &[theta], kmax)?;
    Ok((big - lambda * one).abs())
}

/// The closed form of the tilted Gaussian density,
/// lambda e^(-x^2/(2(lambda+cx))) / (sqrt(2 pi) (lambda + c x)^(3/2)).
pub fn gaussian_tilted_closed_form(lambda: f64, c: f64, x: f64) -> f64 {
    let s = lambda + c * x;
    if s <= 0.0 {
        return 0.0;
    }
    lambda * (-x * x / (2.0 * s)).exp() / ((2.0 * std::f64::consts::PI).sqrt() * s.powf(1.5))
}

/// The named transformed variance functions, exact: Gamma tilts to the
/// Kendall-Ressel variance m^2 (lambda + c m)/lambda^3 and Poisson to the
/// Abel variance m (1 + c m/lambda)^2. The closed form is checked against
/// the transform module before being returned.
pub fn transformed_variance_named(
    semigroup: &Semigroup,
    h: &HElement,
) -> Result<MultiPoly, RouquesError> {
    if semigroup.dim() != 1 || h.c().len() != 1 {
        return Err(RouquesError::UnsupportedSemigroup {
            op: "transformed_variance_named".into(),
        });
    }
    let lambda = h.lambda().clone();
    let c = h.c()[0].clone();
    let m = MultiPoly::var(1, 0);
    let (base, closed) = match semigroup {
        Semigroup::Gamma => {
            let base = (&m * &m).scale(&lambda.recip());
            // m^2 (lambda + c m) / lambda^3
            let lin = MultiPoly::linear_form(std::slice::from_ref(&c), lambda.clone());
            let closed = (&(&m * &m) * &lin).scale(&(&lambda * &lambda * &lambda).recip());
            (base, closed)
        }
        Semigroup::Poisson => {
            let base = m.clone();
            // m (1 + c m / lambda)^2
            let lin = MultiPoly::linear_form(&[&c / &lambda], Rational::from_integer(1.into()));
            let closed = &m * &lin.pow(2);
            (base, closed)
        }
        _ => {
            return Err(RouquesError::UnsupportedSemigroup {
                op: "transformed_variance_named".into(),
            })
        }
    };
    let spec = VarianceSpec::new(
        PolyMatrix::new(vec![vec![base]]).expect("1x1 is symmetric"),
        "(0,inf)",
    );
    let transformed = transform_variance(&h.group_element(), &spec)?
        .lower()?
        .entry(0, 0)
        .clone();
    if transformed != closed {
        return Err(RouquesError::ClosedFormMismatch(format!(
            "lambda={}, c={}",
            rational_to_string(&lambda),
            rational_to_string(&c)
        )));
    }
    Ok(closed)
}

/// Empirical moments of the tilted Poisson family by inverse-CDF sampling
/// over the truncated table; deterministic given the seed.
pub struct MomentCheck {
    pub mean: f64,
    pub variance: f64,
    pub predicted_variance: f64,
    pub residual: f64,
    pub tolerance: f64,
}

pub fn poisson_moment_check(
    lambda: f64,
    c: f64,
    samples: usize,
    kmax: u32,
    seed: u64,
) -> Result<MomentCheck, RouquesError> {
    let t = TiltedDensity::new(Semigroup::Poisson, HElement::from_f64(lambda, &[c])?)?;
    let mut cdf = Vec::with_capacity(kmax as usize + 1);
    let mut acc = 0.0;
    for e in 0..=kmax {
        acc += t.discrete_mass(&ExponentVector::new(vec![e]))?;
        cdf.push(acc);
    }
    if 1.0 - acc > 1e-9 {
        return Err(RouquesError::DivergentSum);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    let mut sum3 = 0.0;
    let mut sum4 = 0.0;
    for _ in 0..samples {
        let u: f64 = rng.random::<f64>() * acc;
        let k = cdf.partition_point(|&x| x < u) as f64;
        sum += k;
        sum2 += k * k;
        sum3 += k * k * k;
        sum4 += k * k * k * k;
    }
    let nf = samples as f64;
    let mean = sum / nf;
    let m2 = sum2 / nf - mean * mean;
    let variance = m2 * nf / (nf - 1.0);
    // central fourth moment for the standard error of the sample variance
    let m4 = sum4 / nf - 4.0 * mean * sum3 / nf + 6.0 * mean * mean * sum2 / nf
        - 3.0 * mean.powi(4);
    let se_var = ((m4 - m2 * m2).max(0.0) / nf).sqrt();
    let predict = |m: f64| m * (1.0 + c * m / lambda) * (1.0 + c * m / lambda);
    let predicted_variance = predict(mean);
    // first-order propagation of the mean's error through the prediction
    let dpred = (predict(mean + 1e-5) - predict(mean - 1e-5)) / 2e-5;
    let se_mean = (m2 / nf).sqrt();
    let tolerance = 5.0 * (se_var + dpred.abs() * se_mean);
    Ok(MomentCheck {
        mean,
        variance,
        predicted_variance,
        residual: (variance - predicted_variance).abs(),
        tolerance,
    })
}

/// Sampler yielding tilted-Poisson tables for the CLI.
pub fn poisson_table(lambda: f64, c: f64, kmax: u32) -> Result<Vec<(u32, f64)>, RouquesError> {
    let t = TiltedDensity::new(Semigroup::Poisson, HElement::from_f64(lambda, &[c])?)?;
    (0..=kmax)
        .map(|e| {
            t.discrete_mass(&ExponentVector::new(vec![e]))
                .map(|m| (e, m))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, ratio};

    fn k1(e: u32) -> ExponentVector {
        ExponentVector::new(vec![e])
    }

    #[test]
    fn gaussian_density_examples() {
        // c = 0 reduces to the base density
        let t = TiltedDensity::new(Semigroup::Gaussian, HElement::from_f64(1.0, &[0.0]).unwrap())
            .unwrap();
        let got = t.continuous_density(&[0.0]).unwrap();
        assert!((got - 0.3989422804014327).abs() < 1e-12);
        // lambda = c = x = 1: lambda/(sqrt(2 pi) 2^(3/2)) e^(-1/4) = 0.109848...
        let t = TiltedDensity::new(Semigroup::Gaussian, HElement::from_f64(1.0, &[1.0]).unwrap())
            .unwrap();
        let got = t.continuous_density(&[1.0]).unwrap();
        let expected = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * 2f64.powf(1.5))
            * (-0.25f64).exp();
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
        assert!((got - 0.109848).abs() < 1e-6);
        // closed form matches the generic evaluation at 100 seeded samples
        // with lambda + c x > 0, to relative error 1e-12
        use rand::Rng;
        let mut rng = crate::sampling::seeded_rng(23);
        let mut checked = 0;
        while checked < 100 {
            let lam = rng.random_range(0.2..3.0);
            let c = rng.random_range(-1.5..1.5);
            let x = rng.random_range(-3.0..3.0);
            if lam + c * x <= 0.05 {
                continue;
            }
            let t =
                TiltedDensity::new(Semigroup::Gaussian, HElement::from_f64(lam, &[c]).unwrap())
                    .unwrap();
            let generic = t.continuous_density(&[x]).unwrap();
            let closed = gaussian_tilted_closed_form(lam, c, x);
            assert!(
                (generic - closed).abs() <= 1e-12 * closed.abs().max(1e-300),
                "({lam}, {c}, {x}): {generic} vs {closed}"
            );
            checked += 1;
        }
    }

    #[test]
    fn gamma_indicator_cuts_off() {
        let t = TiltedDensity::new(Semigroup::Gamma, HElement::from_f64(1.0, &[-1.0]).unwrap())
            .unwrap();
        // lambda + c x = 1 - 2 < 0
        assert_eq!(t.continuous_density(&[2.0]).unwrap(), 0.0);
    }

    #[test]
    fn poisson_masses() {
        // c = 0: plain Poisson
        let t = TiltedDensity::new(Semigroup::Poisson, HElement::from_f64(2.0, &[0.0]).unwrap())
            .unwrap();
        let got = t.discrete_mass(&k1(3)).unwrap();
        let expected = (-2.0f64).exp() * 8.0 / 6.0;
        assert!((got - expected).abs() < 1e-14);
        // lambda = 1, c = 1, k = 2: (3/2) e^(-3)
        let t = TiltedDensity::new(Semigroup::Poisson, HElement::from_f64(1.0, &[1.0]).unwrap())
            .unwrap();
        let got = t.discrete_mass(&k1(2)).unwrap();
        let expected = 1.5 * (-3.0f64).exp();
        assert!((got - expected).abs() < 1e-14, "{got} vs {expected}");
        assert!((got - 0.074681).abs() < 1e-6);
    }

    #[test]
    fn negbin_masses_match_convolution_powers() {
        // Dynamic programming over nu^(*i) as an independent route.
        let p = vec![0.3, 0.2];
        let sg = Semigroup::neg_binomial(p.clone()).unwrap();
        let lambda = 1.7;
        // masses of nu^(*i) on |k| = i by repeated convolution
        let kmax = 5u32;
        let mut conv: Vec<std::collections::HashMap<(u32, u32), f64>> = vec![Default::default()];
        conv[0].insert((0, 0), 1.0);
        for i in 1..=kmax {
            let mut next: std::collections::HashMap<(u32, u32), f64> = Default::default();
            for ((a, b), w) in &conv[(i - 1) as usize] {
                *next.entry((a + 1, *b)).or_insert(0.0) += w * p[0];
                *next.entry((*a, b + 1)).or_insert(0.0) += w * p[1];
            }
            conv.push(next);
        }
        // mu_lambda = sum_i (lambda)_i / i! nu^(*i)
        let mut poch = 1.0;
        for i in 0..=kmax {
            if i > 0 {
                poch *= (lambda + (i - 1) as f64) / i as f64;
            }
            for ((a, b), w) in &conv[i as usize] {
                let expected = poch * w;
                let got = sg
                    .mass(lambda, &ExponentVector::new(vec![*a, *b]))
                    .unwrap();
                assert!(
                    (got - expected).abs() < 1e-12 * expected.max(1.0),
                    "k=({a},{b}): {got} vs {expected}"
                );
            }
        }
    }

    #[test]
    fn convolution_identity_poisson() {
        let t = TiltedDensity::new(
            Semigroup::Poisson,
            HElement::from_f64(1.0, &[0.5]).unwrap(),
        )
        .unwrap();
        let res = convolution_identity_residual(&t, &k1(3)).unwrap();
        assert!(res < 1e-12, "residual {res}");
        // c = 0 degenerates cleanly
        let t = TiltedDensity::new(
            Semigroup::Poisson,
            HElement::from_f64(1.5, &[0.0]).unwrap(),
        )
        .unwrap();
        let res = convolution_identity_residual(&t, &k1(4)).unwrap();
        assert!(res < 1e-12, "residual {res}");
    }

    #[test]
    fn convolution_identity_negbinomial_two_dim() {
        let sg = Semigroup::neg_binomial(vec![0.3, 0.2]).unwrap();
        let t = TiltedDensity::new(sg, HElement::from_f64(1.2, &[0.4, 0.1]).unwrap()).unwrap();
        for k in [vec![2, 1], vec![0, 3], vec![3, 2]] {
            let res = convolution_identity_residual(&t, &ExponentVector::new(k.clone())).unwrap();
            assert!(res < 1e-12, "k={k:?}: residual {res}");
        }
    }

    #[test]
    fn gaussian_quadrature_identity() {
        let res = gaussian_convolution_residual(1.0, 0.7, 1.3).unwrap();
        assert!(res < 1e-6, "residual {res}");
    }

    #[test]
    fn poisson_fixed_point() {
        let res = poisson_z_residual(-2.0, 0.3, 200).unwrap();
        assert!(res < 1e-8, "residual {res}");
    }

    #[test]
    fn cumulant_equation_c_zero_is_trivial() {
        let t = TiltedDensity::new(
            Semigroup::Poisson,
            HElement::from_f64(2.0, &[0.0]).unwrap(),
        )
        .unwrap();
        let res = cumulant_equation_residual(&t, &[-1.0], 150).unwrap();
        assert!(res < 1e-10, "residual {res}");
    }

    #[test]
    fn negbin_cumulant_fixed_point() {
        let p = [0.25, 0.25];
        let theta = [-2.0, -2.5];
        let c = [0.4, 0.2];
        let res = negbin_z_residual(&p, &theta, &c, 60).unwrap();
        assert!(res < 1e-6, "residual {res}");
    }

    #[test]
    fn normalization_partial_sums() {
        // tail decay rate is c - 1 - ln c: fast for c <= 0.5, slow at c = 0.9
        for c in [0.0, 0.2, 0.5] {
            let s = poisson_normalization_sum(1.0, c, 200).unwrap();
            assert!(s <= 1.0 + 1e-12, "c={c}: sum {s}");
            assert!(s >= 1.0 - 1e-8, "c={c}: sum {s}");
        }
        // at c = 0.9 the rate is ~0.00536 per term, so K must grow accordingly
        let s200 = poisson_normalization_sum(1.0, 0.9, 200).unwrap();
        let s3000 = poisson_normalization_sum(1.0, 0.9, 3000).unwrap();
        assert!(s200 <= s3000 && s3000 <= 1.0 + 1e-12);
        assert!(s200 >= 1.0 - 1e-2, "sum at K=200 is {s200}");
        assert!(s3000 >= 1.0 - 1e-8, "sum at K=3000 is {s3000}");
    }

    #[test]
    fn named_variances() {
        // Gamma, lambda=1, c=1: m^2 (1 + m)
        let h = HElement::new(rat(1), vec![rat(1)]).unwrap();
        let v = transformed_variance_named(&Semigroup::Gamma, &h).unwrap();
        assert_eq!(v, crate::algebra::poly_parse("m1^2*(1 + m1)", 1).unwrap());
        // Poisson, c=0: m
        let h = HElement::new(rat(2), vec![rat(0)]).unwrap();
        let v = transformed_variance_named(&Semigroup::Poisson, &h).unwrap();
        assert_eq!(v, crate::algebra::poly_parse("m1", 1).unwrap());
        // Poisson, lambda=2, c=1: m (1 + m/2)^2
        let h = HElement::new(rat(2), vec![rat(1)]).unwrap();
        let v = transformed_variance_named(&Semigroup::Poisson, &h).unwrap();
        assert_eq!(
            v,
            crate::algebra::poly_parse("m1*(1 + 1/2*m1)^2", 1).unwrap()
        );
        // rational parameters stay exact
        let h = HElement::new(ratio(3, 2), vec![ratio(-1, 3)]).unwrap();
        assert!(transformed_variance_named(&Semigroup::Gamma, &h).is_ok());
        assert!(transformed_variance_named(&Semigroup::Gaussian, &h).is_err());
    }

    #[test]
    fn jorgensen_relation() {
        let res = poisson_jorgensen_residual(2.5, 0.3, -2.0, 250).unwrap();
        assert!(res < 1e-8, "residual {res}");
    }

    #[test]
    fn moment_check_runs_deterministically() {
        let a = poisson_moment_check(1.0, 0.4, 1_000_000, 400, 42).unwrap();
        let b = poisson_moment_check(1.0, 0.4, 1_000_000, 400, 42).unwrap();
        assert_eq!(a.variance, b.variance);
        assert!(a.residual < a.tolerance, "{} vs {}", a.residual, a.tolerance);
    }
}
