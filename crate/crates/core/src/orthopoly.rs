//! Three-term recurrence for the Jacobi weights `w_{m,n}`.
//!
//! Coefficients are kept both as exact rationals (monic recurrence) and as
//! doubles (orthonormal recurrence with respect to the probability measure
//! `w(x) dx / int w`).

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::exact_moments::{rational, to_f64, ExactRational, JacobiWeight};

#[derive(Debug, Clone)]
pub struct JacobiRecurrence {
    weight: JacobiWeight,
    /// Monic recurrence `pi_{k+1} = (x - a_k) pi_k - b_k pi_{k-1}`; `a` has
    /// entries `0..max_degree`, `b` has entries `1..max_degree` stored at
    /// index `k - 1`.
    a_exact: Vec<ExactRational>,
    b_exact: Vec<ExactRational>,
    a: Vec<f64>,
    sqrt_b: Vec<f64>,
}

impl JacobiRecurrence {
    /// Coefficients sufficient to evaluate polynomials up to `max_degree`.
    pub fn new(weight: JacobiWeight, max_degree: usize) -> Self {
        let alpha = weight.alpha_exact();
        let beta = weight.beta_exact();
        let ab = &alpha + &beta;
        let one = ExactRational::one();
        let two = rational(2, 1);
        let four = rational(4, 1);

        let mut a_exact = Vec::with_capacity(max_degree);
        let mut b_exact = Vec::with_capacity(max_degree);
        for k in 0..max_degree {
            let a_k = if k == 0 {
                (&beta - &alpha) / (&ab + &two)
            } else {
                let s = rational(2 * k as i64, 1) + &ab;
                (&beta * &beta - &alpha * &alpha) / (&s * (&s + &two))
            };
            a_exact.push(a_k);

            // b_{k+1}
            let j = k + 1;
            let b_j = if j == 1 {
                &four * (&one + &alpha) * (&one + &beta)
                    / ((&ab + &two) * (&ab + &two) * (&ab + rational(3, 1)))
            } else {
                let jr = rational(j as i64, 1);
                let s = rational(2 * j as i64, 1) + &ab;
                &four * &jr * (&jr + &alpha) * (&jr + &beta) * (&jr + &ab)
                    / (&s * &s * (&s + &one) * (&s - &one))
            };
            b_exact.push(b_j);
        }
        let a = a_exact.iter().map(to_f64).collect();
        let sqrt_b = b_exact.iter().map(|b| to_f64(b).sqrt()).collect();
        Self {
            weight,
            a_exact,
            b_exact,
            a,
            sqrt_b,
        }
    }

    pub fn weight(&self) -> JacobiWeight {
        self.weight
    }

    pub fn max_degree(&self) -> usize {
        self.a.len()
    }

    /// Diagonal of the symmetric Jacobi matrix of order `n`.
    pub fn diagonal(&self, n: usize) -> &[f64] {
        &self.a[..n]
    }

    /// Off-diagonal of the Jacobi matrix of order `n` (length `n - 1`).
    pub fn off_diagonal(&self, n: usize) -> &[f64] {
        &self.sqrt_b[..n.saturating_sub(1)]
    }

    /// Orthonormal values `p_0(x) .. p_D(x)` written into `out` (`out.len() - 1 = D`).
    pub fn orthonormal(&self, x: f64, out: &mut [f64]) {
        let Some(first) = out.first_mut() else { return };
        *first = 1.0;
        if out.len() == 1 {
            return;
        }
        assert!(out.len() - 1 <= self.max_degree(), "recurrence too short");
        out[1] = (x - self.a[0]) / self.sqrt_b[0];
        for k in 1..out.len() - 1 {
            out[k + 1] =
                ((x - self.a[k]) * out[k] - self.sqrt_b[k - 1] * out[k - 1]) / self.sqrt_b[k];
        }
    }

    /// Orthonormal values and their first derivatives.
    pub fn orthonormal_with_derivative(&self, x: f64, vals: &mut [f64], ders: &mut [f64]) {
        debug_assert_eq!(vals.len(), ders.len());
        if vals.is_empty() {
            return;
        }
        vals[0] = 1.0;
        ders[0] = 0.0;
        if vals.len() == 1 {
            return;
        }
        assert!(vals.len() - 1 <= self.max_degree(), "recurrence too short");
        vals[1] = (x - self.a[0]) / self.sqrt_b[0];
        ders[1] = 1.0 / self.sqrt_b[0];
        for k in 1..vals.len() - 1 {
            let s = self.sqrt_b[k];
            vals[k + 1] = ((x - self.a[k]) * vals[k] - self.sqrt_b[k - 1] * vals[k - 1]) / s;
            ders[k + 1] =
                (vals[k] + (x - self.a[k]) * ders[k] - self.sqrt_b[k - 1] * ders[k - 1]) / s;
        }
    }

    /// Exact sums `sum_k pi_d(x_k)` of the monic polynomials for `d = 0..=degree`,
    /// with every node converted to its exact binary rational value.
    pub fn monic_sums_exact(&self, nodes: &[f64], degree: usize) -> Vec<ExactRational> {
        assert!(degree <= self.max_degree(), "recurrence too short");
        let mut sums = vec![ExactRational::zero(); degree + 1];
        for &x in nodes {
            let x = BigRational::from_float(x).expect("finite node");
            let mut prev = ExactRational::zero();
            let mut cur = ExactRational::one();
            sums[0] += &cur;
            for d in 0..degree {
                let next = if d == 0 {
                    (&x - &self.a_exact[0]) * &cur
                } else {
                    (&x - &self.a_exact[d]) * &cur - &self.b_exact[d - 1] * &prev
                };
                prev = std::mem::replace(&mut cur, next);
                sums[d + 1] += &cur;
            }
        }
        sums
    }

    /// Squared norms `h_d = b_1 ... b_d` of the monic polynomials under the
    /// probability measure; `h_0 = 1`.
    pub fn monic_norms_exact(&self, degree: usize) -> Vec<ExactRational> {
        let mut out = Vec::with_capacity(degree + 1);
        let mut acc = ExactRational::one();
        out.push(acc.clone());
        for b in &self.b_exact[..degree] {
            acc *= b;
            out.push(acc.clone());
        }
        out
    }
}
