//! Canonical variance functions: the six one-dimensional quadratic
//! representatives, the 2n+4 simple quadratic representatives in dimension n,
//! the four cubic orbit classes with an exact root-pattern classifier, and
//! the explicit group elements witnessing orbit collisions.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::algebra::{rat, ExponentVector, MultiPoly, PolyMatrix, Rational};
use crate::group::{GroupElement, GroupError};
use crate::transform::VarianceSpec;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CatalogError {
    #[error("invalid family for n={n}: {reason}")]
    InvalidTag { n: usize, reason: String },
    #[error("cannot classify the zero polynomial")]
    ZeroPolynomial,
    #[error("degree {degree} exceeds 3")]
    DegreeTooHigh { degree: i64 },
    #[error("the chain parameter c1 must be negative")]
    C1NotNegative,
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// The simple quadratic representatives: I_k (0 <= k <= n), II, III,
/// IV_k (1 <= k <= n), and V, in total 2n+4 classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CasalisFamily {
    I(usize),
    II,
    III,
    IV(usize),
    V,
}

impl fmt::Display for CasalisFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CasalisFamily::I(k) => write!(f, "I_{k}"),
            CasalisFamily::II => write!(f, "II"),
            CasalisFamily::III => write!(f, "III"),
            CasalisFamily::IV(k) => write!(f, "IV_{k}"),
            CasalisFamily::V => write!(f, "V"),
        }
    }
}

impl CasalisFamily {
    /// Parses tags like "I_2", "II", "IV_1", "V".
    pub fn parse(s: &str) -> Option<CasalisFamily> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("I_") {
            return rest.parse().ok().map(CasalisFamily::I);
        }
        if let Some(rest) = s.strip_prefix("IV_") {
            return rest.parse().ok().map(CasalisFamily::IV);
        }
        match s {
            "II" => Some(CasalisFamily::II),
            "III" => Some(CasalisFamily::III),
            "V" => Some(CasalisFamily::V),
            _ => None,
        }
    }
}

/// The representative variance function of the family in dimension n.
pub fn casalis_representative(
    family: CasalisFamily,
    n: usize,
) -> Result<VarianceSpec, CatalogError> {
    if n == 0 {
        return Err(CatalogError::InvalidTag {
            n,
            reason: "dimension must be positive".into(),
        });
    }
    let mm = PolyMatrix::outer_mm(n);
    let diag_m = PolyMatrix::diagonal((0..n).map(|i| MultiPoly::var(n, i)).collect());
    match family {
        CasalisFamily::I(k) => {
            if k > n {
                return Err(CatalogError::InvalidTag {
                    n,
                    reason: format!("I_k requires 0 <= k <= n, got k={k}"),
                });
            }
            let diag = (0..n)
                .map(|i| {
                    if i < k {
                        MultiPoly::var(n, i)
                    } else {
                        MultiPoly::one(n)
                    }
                })
                .collect();
            Ok(VarianceSpec::new(
                PolyMatrix::diagonal(diag),
                domain_power(k, n),
            ))
        }
        CasalisFamily::II => Ok(VarianceSpec::new(
            mm.scale(&rat(-1)).add(&diag_m),
            "interior of the simplex conv(0, e_1, ..., e_n)".to_string(),
        )),
        CasalisFamily::III => Ok(VarianceSpec::new(
            mm.add(&diag_m),
            format!("(0,inf)^{n}"),
        )),
        CasalisFamily::IV(k) => {
            if k == 0 || k > n {
                return Err(CatalogError::InvalidTag {
                    n,
                    reason: format!("IV_k requires 1 <= k <= n, got k={k}"),
                });
            }
            // diag(0, m_2, ..., m_k, m_1, ..., m_1)
            let diag = (0..n)
                .map(|i| {
                    if i == 0 {
                        MultiPoly::zero(n)
                    } else if i < k {
                        MultiPoly::var(n, i)
                    } else {
                        MultiPoly::var(n, 0)
                    }
                })
                .collect();
            Ok(VarianceSpec::new(
                mm.add(&PolyMatrix::diagonal(diag)),
                domain_power(k, n),
            ))
        }
        CasalisFamily::V => {
            // diag(m_1, ..., m_{n-1}, 1 + m_1 + ... + m_{n-1})
            let mut last = MultiPoly::one(n);
            for i in 0..(n - 1) {
                last = &last + &MultiPoly::var(n, i);
            }
            let diag = (0..n)
                .map(|i| {
                    if i + 1 < n {
                        MultiPoly::var(n, i)
                    } else {
                        last.clone()
                    }
                })
                .collect();
            Ok(VarianceSpec::new(
                mm.add(&PolyMatrix::diagonal(diag)),
                format!("(0,inf)^{} x R", n - 1),
            ))
        }
    }
}

fn domain_power(k: usize, n: usize) -> String {
    format!("(0,inf)^{k} x R^{}", n - k)
}

/// All 2n+4 representatives in dimension n.
pub fn all_casalis(n: usize) -> Vec<(CasalisFamily, VarianceSpec)> {
    let mut out = Vec::with_capacity(2 * n + 4);
    for k in 0..=n {
        out.push((
            CasalisFamily::I(k),
            casalis_representative(CasalisFamily::I(k), n).unwrap(),
        ));
    }
    out.push((
        CasalisFamily::II,
        casalis_representative(CasalisFamily::II, n).unwrap(),
    ));
    out.push((
        CasalisFamily::III,
        casalis_representative(CasalisFamily::III, n).unwrap(),
    ));
    for k in 1..=n {
        out.push((
            CasalisFamily::IV(k),
            casalis_representative(CasalisFamily::IV(k), n).unwrap(),
        ));
    }
    out.push((
        CasalisFamily::V,
        casalis_representative(CasalisFamily::V, n).unwrap(),
    ));
    out
}

/// The six one-dimensional quadratic representatives with their domains.
pub fn morris_representatives() -> Vec<(VarianceSpec, &'static str)> {
    let entries: [(&str, &str, &str); 6] = [
        ("1", "R", "Normal"),
        ("m1", "(0,inf)", "Poisson"),
        ("m1^2", "(0,inf)", "Gamma"),
        ("m1 - m1^2", "(0,1)", "Binomial"),
        ("m1 + m1^2", "(0,inf)", "NegativeBinomial"),
        ("m1^2 + 1", "R", "Hyperbolic"),
    ];
    entries
        .iter()
        .map(|(poly, domain, name)| {
            let p = crate::algebra::poly_parse(poly, 1).unwrap();
            (
                VarianceSpec::new(PolyMatrix::new(vec![vec![p]]).unwrap(), *domain),
                *name,
            )
        })
        .collect()
}

/// The four projective orbit classes of nonzero real polynomials of degree
/// at most 3 under the cubic action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CubicOrbit {
    X3,
    X2,
    XXp1,
    X2p1,
}

impl fmt::Display for CubicOrbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CubicOrbit::X3 => "X^3",
            CubicOrbit::X2 => "X^2",
            CubicOrbit::XXp1 => "X(X+1)",
            CubicOrbit::X2p1 => "X^2+1",
        };
        f.write_str(s)
    }
}

impl CubicOrbit {
    pub fn parse(s: &str) -> Option<CubicOrbit> {
        match s.trim() {
            "X^3" => Some(CubicOrbit::X3),
            "X^2" => Some(CubicOrbit::X2),
            "X(X+1)" => Some(CubicOrbit::XXp1),
            "X^2+1" => Some(CubicOrbit::X2p1),
            _ => None,
        }
    }
}

/// Classifies a nonzero polynomial of degree <= 3 by the projective root
/// pattern of its homogenization b(X,Y) = Y^3 V(X/Y), computed exactly from
/// rational coefficients. Degree < 3 contributes a root at infinity with
/// multiplicity 3 - deg.
pub fn classify_cubic_orbit_n1(v: &MultiPoly) -> Result<CubicOrbit, CatalogError> {
    assert_eq!(v.dim(), 1);
    if v.is_zero() {
        return Err(CatalogError::ZeroPolynomial);
    }
    let deg = v.total_degree();
    if deg > 3 {
        return Err(CatalogError::DegreeTooHigh { degree: deg });
    }
    let coeff = |e: u32| v.coefficient(&ExponentVector::new(vec![e]));
    match deg {
        0 => Ok(CubicOrbit::X3), // triple root at infinity
        1 => Ok(CubicOrbit::X2), // double root at infinity + one simple
        2 => {
            // one simple root at infinity + quadratic factor
            let (a, b, c) = (coeff(2), coeff(1), coeff(0));
            let disc = &b * &b - rat(4) * &a * &c;
            if disc.is_zero() {
                Ok(CubicOrbit::X2)
            } else if disc.is_positive() {
                Ok(CubicOrbit::XXp1)
            } else {
                Ok(CubicOrbit::X2p1)
            }
        }
        3 => {
            let (a, b, c, d) = (coeff(3), coeff(2), coeff(1), coeff(0));
            let disc = rat(18) * &a * &b * &c * &d - rat(4) * &b * &b * &b * &d
                + &b * &b * &c * &c
                - rat(4) * &a * &c * &c * &c
                - rat(27) * &a * &a * &d * &d;
            if disc.is_positive() {
                Ok(CubicOrbit::XXp1)
            } else if disc.is_negative() {
                Ok(CubicOrbit::X2p1)
            } else {
                // repeated roots: triple iff additionally b^2 = 3ac
                let d0 = &b * &b - rat(3) * &a * &c;
                if d0.is_zero() {
                    Ok(CubicOrbit::X3)
                } else {
                    Ok(CubicOrbit::X2)
                }
            }
        }
        _ => unreachable!("degree bounded above"),
    }
}

/// The invariants separating the six quadratic representatives: degree, the
/// projective root pattern, and the sign of the m^2 coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MorrisFingerprint {
    pub degree: i64,
    pub orbit: CubicOrbit,
    pub m2_sign: i8,
}

pub fn morris_fingerprint(v: &MultiPoly) -> Result<MorrisFingerprint, CatalogError> {
    let orbit = classify_cubic_orbit_n1(v)?;
    let m2 = v.coefficient(&ExponentVector::new(vec![2]));
    let m2_sign = if m2.is_zero() {
        0
    } else if m2.is_positive() {
        1
    } else {
        -1
    };
    Ok(MorrisFingerprint {
        degree: v.total_degree(),
        orbit,
        m2_sign,
    })
}

/// The group element g_c with c = (1, ..., 1), which maps the multinomial
/// representative II exactly onto the negative multinomial representative III.
pub fn witness_ii_to_iii(n: usize) -> GroupElement {
    GroupElement::gc(&vec![Rational::one(); n])
}

/// The three-stage chain carrying I_k onto the IV_k pattern, with the exact
/// expected final matrix m m^T + diag(0, m_2..m_k, c_1 m_1, ..., c_1 m_1).
#[derive(Debug, Clone)]
pub struct WitnessChain {
    pub g_bc: GroupElement,
    pub g1: GroupElement,
    pub g2: GroupElement,
    pub expected: PolyMatrix,
}

pub fn witness_ik_chain(n: usize, k: usize, c1: &Rational) -> Result<WitnessChain, CatalogError> {
    if k == 0 || k > n {
        return Err(CatalogError::InvalidTag {
            n,
            reason: format!("chain requires 1 <= k <= n, got k={k}"),
        });
    }
    if !c1.is_negative() {
        return Err(CatalogError::C1NotNegative);
    }
    let mut c = vec![Rational::zero(); n];
    c[0] = c1.clone();
    let mut b = vec![Rational::zero(); n];
    b[0] = -c1.recip(); // c^T b = -1, so g_(b,c) is an H_0 element
    let g_bc = GroupElement::gbc(&b, &c)?;
    let g1 = GroupElement::jorgensen(n, c1.abs())?;
    let mut e1 = vec![Rational::zero(); n];
    e1[0] = Rational::one();
    let g2 = GroupElement::affine(crate::algebra::linalg::mat_identity(n), e1)?;
    // expected: m m^T + diag(0, m_2, ..., m_k, c_1 m_1, ..., c_1 m_1)
    let diag = (0..n)
        .map(|i| {
            if i == 0 {
                MultiPoly::zero(n)
            } else if i < k {
                MultiPoly::var(n, i)
            } else {
                MultiPoly::var(n, 0).scale(c1)
            }
        })
        .collect();
    let expected = PolyMatrix::outer_mm(n).add(&PolyMatrix::diagonal(diag));
    Ok(WitnessChain {
        g_bc,
        g1,
        g2,
        expected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{poly_parse, ratio};
    use crate::transform::{check_symmetry_condition, transform_variance};

    #[test]
    fn casalis_examples_from_the_list() {
        // I_2 at n=3: diag(m1, m2, 1)
        let v = casalis_representative(CasalisFamily::I(2), 3).unwrap();
        assert_eq!(v.v.entry(0, 0), &poly_parse("m1", 3).unwrap());
        assert_eq!(v.v.entry(1, 1), &poly_parse("m2", 3).unwrap());
        assert_eq!(v.v.entry(2, 2), &poly_parse("1", 3).unwrap());
        assert!(v.v.entry(0, 1).is_zero());

        // II at n=2: -mm^T + diag(m)
        let v = casalis_representative(CasalisFamily::II, 2).unwrap();
        assert_eq!(v.v.entry(0, 0), &poly_parse("m1 - m1^2", 2).unwrap());
        assert_eq!(v.v.entry(0, 1), &poly_parse("-m1*m2", 2).unwrap());

        // V at n=2: mm^T + diag(m1, 1 + m1)
        let v = casalis_representative(CasalisFamily::V, 2).unwrap();
        assert_eq!(v.v.entry(0, 0), &poly_parse("m1^2 + m1", 2).unwrap());
        assert_eq!(v.v.entry(1, 1), &poly_parse("m2^2 + 1 + m1", 2).unwrap());

        // IV_1 at n=1 is the Gamma variance
        let v = casalis_representative(CasalisFamily::IV(1), 1).unwrap();
        assert_eq!(v.v.entry(0, 0), &poly_parse("m1^2", 1).unwrap());

        assert_eq!(all_casalis(2).len(), 8);
        assert_eq!(all_casalis(3).len(), 10);
        assert!(casalis_representative(CasalisFamily::I(4), 3).is_err());
        assert!(casalis_representative(CasalisFamily::IV(0), 3).is_err());
    }

    #[test]
    fn morris_list_and_fingerprints() {
        let morris = morris_representatives();
        assert_eq!(morris.len(), 6);
        assert_eq!(morris[3].1, "Binomial");
        assert_eq!(morris[3].0.v.entry(0, 0), &poly_parse("m1 - m1^2", 1).unwrap());
        assert_eq!(morris[3].0.mean_domain, "(0,1)");
        assert_eq!(morris[0].0.v.entry(0, 0), &poly_parse("1", 1).unwrap());
        assert_eq!(morris[0].0.mean_domain, "R");
        // all six pass the symmetry necessary condition
        for (v, name) in &morris {
            assert!(check_symmetry_condition(v).is_ok(), "{name}");
        }
        // the six fingerprints are pairwise distinct
        let prints: Vec<MorrisFingerprint> = morris
            .iter()
            .map(|(v, _)| morris_fingerprint(v.v.entry(0, 0)).unwrap())
            .collect();
        for i in 0..6 {
            for j in (i + 1)..6 {
                assert_ne!(prints[i], prints[j], "{} vs {}", morris[i].1, morris[j].1);
            }
        }
    }

    #[test]
    fn classifier_maps_morris_to_arnold_classes() {
        let expect = [
            CubicOrbit::X3,   // Normal
            CubicOrbit::X2,   // Poisson
            CubicOrbit::X2,   // Gamma
            CubicOrbit::XXp1, // Binomial
            CubicOrbit::XXp1, // Negative binomial
            CubicOrbit::X2p1, // Hyperbolic
        ];
        for ((v, name), want) in morris_representatives().iter().zip(expect) {
            let got = classify_cubic_orbit_n1(v.v.entry(0, 0)).unwrap();
            assert_eq!(got, want, "{name}");
        }
        // degenerate inputs
        assert!(classify_cubic_orbit_n1(&MultiPoly::zero(1)).is_err());
        assert!(classify_cubic_orbit_n1(&poly_parse("m1^4", 1).unwrap()).is_err());
        // full cubics
        assert_eq!(
            classify_cubic_orbit_n1(&poly_parse("m1^3", 1).unwrap()).unwrap(),
            CubicOrbit::X3
        );
        assert_eq!(
            classify_cubic_orbit_n1(&poly_parse("m1^2*(m1+1)", 1).unwrap()).unwrap(),
            CubicOrbit::X2
        );
        assert_eq!(
            classify_cubic_orbit_n1(&poly_parse("m1*(m1+1)*(m1+2)", 1).unwrap()).unwrap(),
            CubicOrbit::XXp1
        );
        assert_eq!(
            classify_cubic_orbit_n1(&poly_parse("m1*(m1^2+1)", 1).unwrap()).unwrap(),
            CubicOrbit::X2p1
        );
    }

    #[test]
    fn witness_ii_to_iii_is_exact() {
        for n in 1..=3 {
            let g = witness_ii_to_iii(n);
            let v2 = casalis_representative(CasalisFamily::II, n).unwrap();
            let v3 = casalis_representative(CasalisFamily::III, n).unwrap();
            let out = transform_variance(&g, &v2).unwrap().lower().unwrap();
            assert_eq!(out, v3.v, "n = {n}");
        }
    }

    #[test]
    fn partial_ones_obstruction() {
        // c with k < n ones: the (k,k+1) 2x2 block of T_g(V_II) has opposite
        // m^2 coefficients, so the output is not simple quadratic.
        let n = 2;
        let c = vec![Rational::one(), Rational::zero()];
        let g = GroupElement::gc(&c);
        let v2 = casalis_representative(CasalisFamily::II, n).unwrap();
        let out = transform_variance(&g, &v2).unwrap().lower().unwrap();
        let sq = crate::transform::split_simple_quadratic(&out);
        assert!(sq.is_err(), "partial ones must break the simple quadratic shape");
        // the diagonal m_k^2 coefficients have opposite signs
        let c11 = out
            .entry(0, 0)
            .coefficient(&ExponentVector::new(vec![2, 0]));
        let c22 = out
            .entry(1, 1)
            .coefficient(&ExponentVector::new(vec![0, 2]));
        assert_eq!(c11, -c22);
    }

    #[test]
    fn witness_chain_holds_for_other_c1() {
        // c1 is a free negative parameter; the chain must be exact away from
        // the default -1 as well.
        for (n, k) in [(2usize, 1usize), (3, 2)] {
            for c1 in [rat(-2), ratio(-1, 2)] {
                let chain = witness_ik_chain(n, k, &c1).unwrap();
                let v = casalis_representative(CasalisFamily::I(k), n).unwrap();
                let s1 = transform_variance(&chain.g_bc, &v).unwrap().lower().unwrap();
                let s2 = transform_variance(&chain.g1, &VarianceSpec::new(s1, ""))
                    .unwrap()
                    .lower()
                    .unwrap();
                let s3 = transform_variance(&chain.g2, &VarianceSpec::new(s2, ""))
                    .unwrap()
                    .lower()
                    .unwrap();
                assert_eq!(s3, chain.expected, "n={n} k={k} c1={c1}");
            }
        }
    }

    #[test]
    fn witness_chain_shapes() {
        let chain = witness_ik_chain(2, 1, &rat(-1)).unwrap();
        // expected = mm^T + diag(0, -m1)
        assert_eq!(
            chain.expected.entry(1, 1),
            &poly_parse("m2^2 - m1", 2).unwrap()
        );
        assert!(witness_ik_chain(2, 1, &rat(1)).is_err());
        assert!(witness_ik_chain(2, 0, &rat(-1)).is_err());
        assert!(witness_ik_chain(2, 3, &rat(-1)).is_err());
        // b is set to -1/c1 e_1
        let chain = witness_ik_chain(3, 2, &ratio(-2, 1)).unwrap();
        assert_eq!(chain.g_bc.b_vec()[0], ratio(1, 2));
    }
}
