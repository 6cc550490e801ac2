use std::fmt;

use serde::{Deserialize, Serialize};

/// Exponent vector of a monomial `x_1^a_1 ... x_d^a_d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex {
    exponents: Vec<u32>,
}

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self { exponents }
    }

    pub fn zeros(len: usize) -> Self {
        Self::new(vec![0; len])
    }

    /// `k * e_i` in `len` variables.
    pub fn axis(len: usize, i: usize, k: u32) -> Self {
        let mut exponents = vec![0; len];
        exponents[i] = k;
        Self::new(exponents)
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    pub fn is_even(&self) -> bool {
        self.exponents.iter().all(|a| a % 2 == 0)
    }

    /// The half-index `alpha / 2`, defined only when every exponent is even.
    pub fn half(&self) -> Option<Vec<u32>> {
        self.is_even()
            .then(|| self.exponents.iter().map(|a| a / 2).collect())
    }

    /// Splits into the leading `m` exponents and the rest.
    pub fn split_at(&self, m: usize) -> (MultiIndex, MultiIndex) {
        let (a, b) = self.exponents.split_at(m);
        (MultiIndex::new(a.to_vec()), MultiIndex::new(b.to_vec()))
    }

    /// Evaluates the monomial at `x`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.len());
        self.exponents
            .iter()
            .zip(x)
            .map(|(&a, &xi)| xi.powi(a as i32))
            .product()
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(exponents: Vec<u32>) -> Self {
        Self::new(exponents)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.exponents.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// Every multi-index in `len` variables with total degree at most `max_degree`,
/// in graded lexicographic order (degree 0 first).
pub fn multi_indices_up_to(len: usize, max_degree: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for degree in 0..=max_degree {
        multi_indices_of_degree(len, degree, &mut out);
    }
    out
}

/// Appends every multi-index in `len` variables of total degree exactly `degree`.
pub fn multi_indices_of_degree(len: usize, degree: u32, out: &mut Vec<MultiIndex>) {
    if len == 0 {
        if degree == 0 {
            out.push(MultiIndex::new(Vec::new()));
        }
        return;
    }
    let mut current = vec![0u32; len];
    fill(&mut current, 0, degree, out);
}

fn fill(current: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(MultiIndex::new(current.to_vec()));
        return;
    }
    for a in (0..=remaining).rev() {
        current[pos] = a;
        fill(current, pos + 1, remaining - a, out);
    }
    current[pos] = 0;
}
