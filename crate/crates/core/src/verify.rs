//! Certification of the spherical design property.
//!
//! Two independent criteria:
//! * monomial: the design average of every monomial of degree `<= t` against
//!   its exact sphere moment;
//! * Gegenbauer: for `k = 1..=t`, the pair sum `sum_{i,j} P_k(<x_i, x_j>)`
//!   with `P_k` the Gegenbauer polynomial normalized to `P_k(1) = 1`. This sum
//!   is a non-negative quadratic form in the harmonic moments, so the reported
//!   residual is `sqrt(|sum|) / N` to keep it on the same linear scale as the
//!   monomial residual. Pair sums are accumulated in double-double.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::construct::Design;
use crate::error::{Error, Result};
use crate::exact_moments::{sphere_monomial_moment, to_f64};
use crate::multi_index::{multi_indices_up_to, MultiIndex};
use crate::numeric::{CompensatedSum, DoubleDouble};

pub const DEFAULT_DESIGN_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Monomial,
    Gegenbauer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub method: Method,
    pub degree_checked: u32,
    pub max_abs_residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_monomial: Option<MultiIndex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_degree: Option<u32>,
    pub tolerance: f64,
    pub passed: bool,
}

/// Checks every monomial of total degree `<= t`.
pub fn verify_monomials(design: &Design, t: u32, tol: f64) -> VerificationReport {
    let dim = design.ambient_dim();
    let stride = t as usize + 1;
    // powers[(p * dim + i) * stride + e] = x_{p,i}^e
    let mut powers = Vec::with_capacity(design.len() * dim * stride);
    for p in design.points() {
        for &x in p {
            let mut acc = 1.0;
            for _ in 0..stride {
                powers.push(acc);
                acc *= x;
            }
        }
    }
    let n = design.len() as f64;
    let mut worst = (0.0f64, MultiIndex::zeros(dim));
    for alpha in multi_indices_up_to(dim, t) {
        let exact = to_f64(&sphere_monomial_moment(dim, &alpha).expect("length matches"));
        let mut sum = CompensatedSum::new();
        for p in 0..design.len() {
            let base = p * dim * stride;
            let v: f64 = alpha
                .exponents()
                .iter()
                .enumerate()
                .map(|(i, &e)| powers[base + i * stride + e as usize])
                .product();
            sum.add(v);
        }
        let residual = (sum.value() / n - exact).abs();
        if residual > worst.0 || residual.is_nan() {
            worst = (residual, alpha);
        }
    }
    VerificationReport {
        method: Method::Monomial,
        degree_checked: t,
        max_abs_residual: worst.0,
        worst_monomial: Some(worst.1),
        worst_degree: None,
        tolerance: tol,
        passed: worst.0 <= tol,
    }
}

/// Normalized Gegenbauer pair-sum criterion; needs `ambient_dim >= 2`.
pub fn verify_gegenbauer(design: &Design, t: u32, tol: f64) -> Result<VerificationReport> {
    let dim = design.ambient_dim();
    if dim < 2 {
        return Err(Error::Unsupported(
            "the Gegenbauer criterion needs ambient dimension >= 2; use the monomial check".into(),
        ));
    }
    let sums = gegenbauer_pair_sums(design, t as usize);
    let n = design.len() as f64;
    let mut worst = (0.0f64, 0u32);
    for (k, s) in sums.iter().enumerate().skip(1) {
        let residual = s.to_f64().abs().sqrt() / n;
        if residual > worst.0 || residual.is_nan() {
            worst = (residual, k as u32);
        }
    }
    Ok(VerificationReport {
        method: Method::Gegenbauer,
        degree_checked: t,
        max_abs_residual: worst.0,
        worst_monomial: None,
        worst_degree: (t > 0).then_some(worst.1.max(1)),
        tolerance: tol,
        passed: worst.0 <= tol,
    })
}

/// `S_k = sum_{i,j} P_k(<x_i, x_j>)` for `k = 0..=t`.
fn gegenbauer_pair_sums(design: &Design, t: usize) -> Vec<DoubleDouble> {
    let dim = design.ambient_dim() as f64;
    let mut sums = vec![DoubleDouble::ZERO; t + 1];
    let mut vals = vec![DoubleDouble::ZERO; t + 1];
    let points: Vec<&[f64]> = design.points().collect();
    let dot = |a: &[f64], b: &[f64]| {
        a.iter().zip(b).fold(DoubleDouble::ZERO, |acc, (&x, &y)| {
            acc + DoubleDouble::product(x, y)
        })
    };
    let inv_norms: Vec<DoubleDouble> = points.iter().map(|x| dot(x, x).recip_sqrt()).collect();
    for (i, xi) in points.iter().enumerate() {
        for (j, xj) in points.iter().enumerate().skip(i) {
            let cos = if i == j {
                DoubleDouble::ONE
            } else {
                dot(xi, xj) * (inv_norms[i] * inv_norms[j])
            };
            normalized_gegenbauer(cos, dim, &mut vals);
            let mult = if i == j { 1.0 } else { 2.0 };
            for (s, v) in sums.iter_mut().zip(&vals) {
                *s = *s + v.mul_f64(mult);
            }
        }
    }
    sums
}

/// `P_0..P_t` at `x`, where `P_k` is the degree-`k` Gegenbauer polynomial for
/// `S^(dim-1)` scaled so `P_k(1) = 1`:
/// `P_{k+1} = ((2k + dim - 2) x P_k - k P_{k-1}) / (k + dim - 2)`.
fn normalized_gegenbauer(x: DoubleDouble, dim: f64, out: &mut [DoubleDouble]) {
    out[0] = DoubleDouble::ONE;
    if out.len() == 1 {
        return;
    }
    out[1] = x;
    for k in 1..out.len() - 1 {
        let kf = k as f64;
        let next = (x * out[k]).mul_f64(2.0 * kf + dim - 2.0) - out[k - 1].mul_f64(kf);
        out[k + 1] = next.div_f64(kf + dim - 2.0);
    }
}

/// Largest `C(d + t, t) * N` for which the monomial check runs by default.
const MONOMIAL_WORK_LIMIT: f64 = 5e8;
/// Largest `N^2 * t / 2` for which the Gegenbauer check runs by default.
const GEGENBAUER_WORK_LIMIT: f64 = 2e9;

/// Runs every criterion that is feasible for this design. The monomial check
/// is authoritative up to ambient dimension 6, the Gegenbauer check beyond.
pub fn verify_auto(design: &Design, t: u32, tol: f64) -> Vec<VerificationReport> {
    let dim = design.ambient_dim();
    let n = design.len() as f64;
    let monomials = crate::construct::binomial(dim as u64 + t as u64, t as u64);
    let monomial_work = num_traits::ToPrimitive::to_f64(&monomials).unwrap_or(f64::INFINITY) * n;
    let gegenbauer_work = n * n * t as f64 / 2.0;

    let mut want_monomial = monomial_work <= MONOMIAL_WORK_LIMIT;
    let mut want_gegenbauer = dim >= 2 && gegenbauer_work <= GEGENBAUER_WORK_LIMIT;
    if !want_monomial && !want_gegenbauer {
        if dim <= 6 || dim < 2 {
            want_monomial = true;
        } else {
            want_gegenbauer = true;
        }
    }
    let mut out = Vec::new();
    if want_monomial {
        out.push(verify_monomials(design, t, tol));
    }
    if want_gegenbauer {
        out.push(verify_gegenbauer(design, t, tol).expect("dimension checked"));
    }
    out
}

/// Monte Carlo estimate of the normalized sphere moment of `x^alpha` using
/// normalized Gaussian vectors. Returns `(estimate, standard_error)`.
pub fn mc_moment_oracle(dim: usize, alpha: &MultiIndex, samples: usize, seed: u64) -> (f64, f64) {
    assert!(samples >= 1, "need at least one sample");
    assert_eq!(alpha.len(), dim, "multi-index length must equal dim");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = vec![0.0; dim];
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for i in 0..samples {
        loop {
            for v in x.iter_mut() {
                *v = StandardNormal.sample(&mut rng);
            }
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                x.iter_mut().for_each(|v| *v /= norm);
                break;
            }
        }
        let value = alpha.eval(&x);
        let delta = value - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (value - mean);
    }
    let std_error = if samples > 1 {
        (m2 / (samples - 1) as f64 / samples as f64).sqrt()
    } else {
        f64::INFINITY
    };
    (mean, std_error)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::base_s1;

    #[test]
    fn triangle_is_two_design_not_three() {
        let tri = base_s1(2, 0.0);
        let r = verify_monomials(&tri, 2, 1e-12);
        assert!(r.passed && r.max_abs_residual <= 1e-15, "{r:?}");
        let r = verify_monomials(&tri, 3, 1e-12);
        assert!(!r.passed);
        assert_eq!(r.worst_monomial.as_ref().unwrap().degree(), 3);
    }

    #[test]
    fn single_point_fails_degree_one() {
        let d = Design::new(3, 1, vec![1.0, 0.0, 0.0]).unwrap();
        let r = verify_monomials(&d, 1, 1e-12);
        assert!(!r.passed);
        assert!((r.max_abs_residual - 1.0).abs() < 1e-15);
        assert_eq!(r.worst_monomial, Some(MultiIndex::new(vec![1, 0, 0])));
    }

    #[test]
    fn square_gegenbauer() {
        let sq = base_s1(3, 0.0);
        assert!(verify_gegenbauer(&sq, 3, 1e-12).unwrap().passed);
        let r = verify_gegenbauer(&sq, 4, 1e-12).unwrap();
        assert!(!r.passed);
        assert_eq!(r.worst_degree, Some(4));
    }

    #[test]
    fn antipodal_pair_is_one_design() {
        let d = Design::new(3, 1, vec![0.0, 0.0, 1.0, 0.0, 0.0, -1.0]).unwrap();
        let r = verify_gegenbauer(&d, 1, 1e-12).unwrap();
        assert!(r.passed);
        assert_eq!(r.max_abs_residual, 0.0);
    }

    #[test]
    fn gegenbauer_rejects_s0() {
        let d = crate::construct::base_s0(3);
        assert!(matches!(
            verify_gegenbauer(&d, 1, 1e-9),
            Err(Error::Unsupported(_))
        ));
        assert!(verify_monomials(&d, 9, 1e-15).passed);
    }

    #[test]
    fn normalized_gegenbauer_matches_legendre() {
        let mut out = vec![DoubleDouble::ZERO; 4];
        let x = 0.3;
        normalized_gegenbauer(DoubleDouble::from_f64(x), 3.0, &mut out);
        let p3 = 0.5 * (5.0 * x * x * x - 3.0 * x);
        assert!((out[3].to_f64() - p3).abs() < 1e-16);
        normalized_gegenbauer(DoubleDouble::ONE, 7.0, &mut out);
        assert!(out.iter().all(|v| (v.to_f64() - 1.0).abs() < 1e-15));
    }

    #[test]
    fn oracle_is_deterministic() {
        let a = MultiIndex::new(vec![2, 0, 0]);
        assert_eq!(
            mc_moment_oracle(3, &a, 1000, 5),
            mc_moment_oracle(3, &a, 1000, 5)
        );
    }
}
