//! Equal-weight (Chebyshev-type) quadratures for the Jacobi weights `w_{m,n}`.
//!
//! A rule `T = {t_1..t_K}` has degree `t` when `(1/K) sum_k p(t_k)` equals the
//! normalized integral `int p w / int w` for every polynomial of degree `<= t`.
//! Exactness is measured in the orthonormal basis of the weight, where every
//! target moment beyond degree 0 vanishes.

mod gauss;
mod solver;

pub use gauss::gauss_jacobi_init;
pub use solver::{solve_equal_weight, solve_with_k, SolverOptions};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_moments::{to_f64, JacobiWeight};
use crate::numeric::CompensatedSum;
use crate::orthopoly::JacobiRecurrence;

pub const DEFAULT_QUAD_TOLERANCE: f64 = 1e-12;

/// A multiset of `K` nodes in `[-1, 1]`, each carrying weight `1/K`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    weight: JacobiWeight,
    degree: u32,
    nodes: Vec<f64>,
    certified: bool,
    tolerance: f64,
    max_abs_residual: f64,
}

impl Quadrature {
    /// Uncertified rule. Nodes are stored in ascending order.
    pub fn new(weight: JacobiWeight, degree: u32, mut nodes: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::invalid("a quadrature needs at least one node"));
        }
        if let Some(bad) = nodes
            .iter()
            .find(|x| !x.is_finite() || !(-1.0..=1.0).contains(*x))
        {
            return Err(Error::invalid(format!("node {bad} lies outside [-1, 1]")));
        }
        nodes.sort_by(f64::total_cmp);
        Ok(Self {
            weight,
            degree,
            nodes,
            certified: false,
            tolerance: f64::NAN,
            max_abs_residual: f64::NAN,
        })
    }

    pub fn weight(&self) -> JacobiWeight {
        self.weight
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn k(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    /// Tolerance of the last certification (NaN if never certified).
    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Residual from the last certification (NaN if never certified).
    pub fn max_abs_residual(&self) -> f64 {
        self.max_abs_residual
    }

    /// Normalized discrete average `(1/K) sum_k f(t_k)`.
    pub fn average(&self, f: impl Fn(f64) -> f64) -> f64 {
        let sum: CompensatedSum = self.nodes.iter().map(|&x| f(x)).collect();
        sum.value() / self.k() as f64
    }

    /// Same weight and degree with every node repeated `times` times.
    pub fn replicated(&self, times: usize) -> Self {
        let nodes = self
            .nodes
            .iter()
            .flat_map(|&x| std::iter::repeat_n(x, times))
            .collect();
        Quadrature::new(self.weight, self.degree, nodes).expect("replicating valid nodes")
    }

    pub(crate) fn set_certification(&mut self, report: &QuadratureReport) {
        self.certified = report.certified;
        self.tolerance = report.tolerance;
        self.max_abs_residual = report.max_abs_residual;
    }

    /// Restores a rule from serialized parts without re-certifying.
    pub(crate) fn from_parts(
        weight: JacobiWeight,
        degree: u32,
        nodes: Vec<f64>,
        certified: bool,
        tolerance: f64,
        max_abs_residual: f64,
    ) -> Result<Self> {
        let mut q = Quadrature::new(weight, degree, nodes)?;
        q.certified = certified;
        q.tolerance = tolerance;
        q.max_abs_residual = max_abs_residual;
        Ok(q)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureReport {
    /// One entry per degree `0..=t`; entry 0 is always exactly 0.
    pub residuals: Vec<f64>,
    pub max_abs_residual: f64,
    #[serde(rename = "K")]
    pub k: usize,
    pub iterations: usize,
    pub certified: bool,
    pub tolerance: f64,
}

/// Orthonormal-basis residuals `r_d = (1/K) sum_k p_d(t_k)` for `d = 0..=t`,
/// with the degree-0 target subtracted so `r_0 = 0`. Double precision.
pub fn residual_vector(q: &Quadrature) -> Vec<f64> {
    let t = q.degree as usize;
    let rec = JacobiRecurrence::new(q.weight, t.max(1));
    let mut sums = vec![CompensatedSum::new(); t + 1];
    let mut vals = vec![0.0; t + 1];
    for &x in &q.nodes {
        rec.orthonormal(x, &mut vals);
        for (s, &v) in sums.iter_mut().zip(&vals) {
            s.add(v);
        }
    }
    let k = q.k() as f64;
    let mut out: Vec<f64> = sums.iter().map(|s| s.value() / k).collect();
    out[0] = 0.0;
    out
}

/// Recomputes the residuals with exact rational arithmetic on the stored
/// nodes and updates the rule's certified flag.
///
/// `max_abs_residual` ranges over degrees `1..=t`; a degree-0 rule always
/// certifies.
pub fn certify(q: &mut Quadrature, tol: f64) -> QuadratureReport {
    let residuals = exact_residuals(q);
    let max_abs_residual = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let report = QuadratureReport {
        residuals,
        max_abs_residual,
        k: q.k(),
        iterations: 0,
        certified: max_abs_residual <= tol,
        tolerance: tol,
    };
    q.set_certification(&report);
    report
}

fn exact_residuals(q: &Quadrature) -> Vec<f64> {
    let t = q.degree as usize;
    let rec = JacobiRecurrence::new(q.weight, t.max(1));
    let sums = rec.monic_sums_exact(&q.nodes, t);
    let norms = rec.monic_norms_exact(t);
    let k = BigRational::from_integer(BigInt::from(q.k()));
    let mut out = Vec::with_capacity(t + 1);
    out.push(0.0);
    for d in 1..=t {
        let mean = &sums[d] / &k;
        out.push(to_f64(&mean) / to_f64(&norms[d]).sqrt());
    }
    out
}
