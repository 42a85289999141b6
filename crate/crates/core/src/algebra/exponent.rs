//! Multi-index exponent vectors with graded lexicographic ordering.

use std::cmp::Ordering;
use std::fmt;

/// The exponent vector k = (k_1, ..., k_n) of a monomial x^k = x_1^{k_1}...x_n^{k_n}.
///
/// Ordering is graded lexicographic: total degree first, then lex. Keying a
/// `BTreeMap` by `ExponentVector` therefore enumerates monomials in grlex
/// order, which is the canonical order used everywhere in this crate.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExponentVector(Vec<u32>);

impl ExponentVector {
    pub fn new(exps: Vec<u32>) -> Self {
        ExponentVector(exps)
    }

    /// The zero multi-index in dimension `n` (the constant monomial).
    pub fn zeros(n: usize) -> Self {
        ExponentVector(vec![0; n])
    }

    /// The multi-index e_i (0-based `i`), i.e. the variable x_{i+1}.
    pub fn unit(n: usize, i: usize) -> Self {
        assert!(i < n, "variable index {i} out of range for dimension {n}");
        let mut exps = vec![0; n];
        exps[i] = 1;
        ExponentVector(exps)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, u32> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Componentwise sum (monomial product).
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        ExponentVector(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Componentwise difference, `None` if any component would go negative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<u32>>>()
            .map(ExponentVector)
    }

    /// Adds `delta` to component `i`.
    pub fn bump(&self, i: usize, delta: u32) -> Self {
        let mut exps = self.0.clone();
        exps[i] += delta;
        ExponentVector(exps)
    }

    /// Subtracts 1 from component `i`; `None` if it is already 0.
    pub fn lower(&self, i: usize) -> Option<Self> {
        if self.0[i] == 0 {
            return None;
        }
        let mut exps = self.0.clone();
        exps[i] -= 1;
        Some(ExponentVector(exps))
    }

    /// All multi-indices of dimension `n` with total degree exactly `d`, in lex order.
    pub fn homogeneous(n: usize, d: u32) -> Vec<Self> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; n];
        fn rec(out: &mut Vec<ExponentVector>, cur: &mut Vec<u32>, pos: usize, left: u32) {
            if pos + 1 == cur.len() {
                cur[pos] = left;
                out.push(ExponentVector(cur.clone()));
                return;
            }
            for e in (0..=left).rev() {
                cur[pos] = e;
                rec(out, cur, pos + 1, left - e);
            }
        }
        if n == 0 {
            if d == 0 {
                out.push(ExponentVector(Vec::new()));
            }
            return out;
        }
        rec(&mut out, &mut cur, 0, d);
        out
    }

    /// All multi-indices of dimension `n` with total degree at most `d`, in grlex order.
    pub fn up_to_degree(n: usize, d: u32) -> Vec<Self> {
        (0..=d).flat_map(|t| Self::homogeneous(n, t)).collect()
    }
}

impl Ord for ExponentVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for ExponentVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}
