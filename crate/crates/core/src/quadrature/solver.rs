//! Damped least-squares search for equal-weight nodes.
//!
//! Nodes are parameterized as `t_k = cos(theta_k)` so they never leave
//! `[-1, 1]`. The residual is the orthonormal-basis moment vector of degrees
//! `1..=t`; the Jacobian comes from the derivative recurrence.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{certify, gauss_jacobi_init, Quadrature, QuadratureReport, DEFAULT_QUAD_TOLERANCE};
use crate::error::{Error, Result};
use crate::exact_moments::JacobiWeight;
use crate::orthopoly::JacobiRecurrence;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Certification bound on the max absolute orthonormal residual.
    pub tolerance: f64,
    /// Levenberg-Marquardt iterations per attempt.
    pub max_iterations: usize,
    pub max_k: usize,
    /// Attempts per trial `K`; attempt 0 is deterministic, later ones jitter.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_QUAD_TOLERANCE,
            max_iterations: 400,
            max_k: 2048,
            restarts: 4,
            seed: 0,
        }
    }
}

/// Searches for a certified equal-weight rule of degree `t`, starting from
/// `K = min(ceil((t+1)/2), max_k)` and growing `K` by a factor 1.5 on failure.
pub fn solve_equal_weight(
    w: JacobiWeight,
    t: u32,
    opts: &SolverOptions,
) -> Result<(Quadrature, QuadratureReport)> {
    validate(opts)?;
    let mut k = ((t as usize + 2) / 2).min(opts.max_k);
    let mut best: Option<(Quadrature, QuadratureReport)> = None;
    let mut iterations = 0;
    while k <= opts.max_k {
        match attempt_k(w, t, k, opts) {
            Ok((q, mut report)) => {
                report.iterations += iterations;
                return Ok((q, report));
            }
            Err(Attempt {
                best: b,
                iterations: it,
            }) => {
                iterations += it;
                if best
                    .as_ref()
                    .is_none_or(|(_, r)| b.1.max_abs_residual < r.max_abs_residual)
                {
                    best = Some(*b);
                }
            }
        }
        log::debug!(
            "equal-weight solve (m={}, n={}, t={t}) failed at K={k}",
            w.m(),
            w.n()
        );
        k = ((k * 3).div_ceil(2)).max(k + 1);
    }
    Err(no_convergence(w, t, opts.max_k, best))
}

/// Runs the solver at a fixed node count.
pub fn solve_with_k(
    w: JacobiWeight,
    t: u32,
    k: usize,
    opts: &SolverOptions,
) -> Result<(Quadrature, QuadratureReport)> {
    validate(opts)?;
    if k == 0 {
        return Err(Error::invalid("node count must be >= 1"));
    }
    attempt_k(w, t, k, opts).map_err(|a| no_convergence(w, t, k, Some(*a.best)))
}

fn validate(opts: &SolverOptions) -> Result<()> {
    if !(opts.tolerance > 0.0) {
        return Err(Error::invalid("solver tolerance must be positive"));
    }
    if opts.max_k == 0 {
        return Err(Error::invalid("max_K must be >= 1"));
    }
    Ok(())
}

fn no_convergence(
    w: JacobiWeight,
    t: u32,
    max_k: usize,
    best: Option<(Quadrature, QuadratureReport)>,
) -> Error {
    let best_residual = best
        .as_ref()
        .map_or(f64::INFINITY, |(_, r)| r.max_abs_residual);
    Error::NoConvergence {
        m: w.m(),
        n: w.n(),
        degree: t,
        max_k,
        best_residual,
        best: best.map(|(q, _)| Box::new(q)),
    }
}

struct Attempt {
    best: Box<(Quadrature, QuadratureReport)>,
    iterations: usize,
}

fn attempt_k(
    w: JacobiWeight,
    t: u32,
    k: usize,
    opts: &SolverOptions,
) -> std::result::Result<(Quadrature, QuadratureReport), Attempt> {
    let mut best: Option<(Quadrature, QuadratureReport)> = None;
    let mut iterations = 0;
    for attempt in 0..opts.restarts.max(1) {
        let theta = initial_angles(w, t, k, attempt, opts.seed);
        let (theta, it) = levenberg_marquardt(w, t, theta, opts);
        iterations += it;
        let nodes = theta.iter().map(|th| th.cos()).collect();
        let mut q = Quadrature::new(w, t, nodes).expect("cosines lie in [-1, 1]");
        let mut report = certify(&mut q, opts.tolerance);
        if report.certified {
            report.iterations = iterations;
            return Ok((q, report));
        }
        if best
            .as_ref()
            .is_none_or(|(_, r)| report.max_abs_residual < r.max_abs_residual)
        {
            best = Some((q, report));
        }
    }
    let (q, mut report) = best.expect("at least one attempt");
    report.iterations = iterations;
    Err(Attempt {
        best: Box::new((q, report)),
        iterations,
    })
}

/// Gauss-Jacobi nodes replicated with multiplicity proportional to their
/// Gaussian weights (largest-remainder rounding to `k`), copies spread over
/// the node's neighbourhood in angle space.
fn initial_angles(w: JacobiWeight, t: u32, k: usize, attempt: usize, seed: u64) -> Vec<f64> {
    let gauss_count = ((t as usize + 2) / 2).clamp(1, k);
    let (nodes, weights) =
        gauss_jacobi_init(w, gauss_count).expect("Gauss-Jacobi matrix of small order");
    let counts = largest_remainder(&weights, k);

    // nodes ascending => angles descending; work in ascending angle order
    let angles: Vec<f64> = nodes.iter().rev().map(|x| x.acos()).collect();
    let counts: Vec<usize> = counts.into_iter().rev().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(
        seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (attempt as u64) << 48,
    );

    let mut theta = Vec::with_capacity(k);
    for (i, (&a, &c)) in angles.iter().zip(&counts).enumerate() {
        if c == 0 {
            continue;
        }
        let lo = if i == 0 {
            0.0
        } else {
            0.5 * (angles[i - 1] + a)
        };
        let hi = if i + 1 == angles.len() {
            std::f64::consts::PI
        } else {
            0.5 * (a + angles[i + 1])
        };
        let left = a - lo;
        let right = hi - a;
        for j in 0..c {
            // position in (-1, 1) within the cell
            let mut s = if c == 1 {
                0.0
            } else {
                (2.0 * j as f64 + 1.0) / c as f64 - 1.0
            };
            if attempt > 0 {
                s += rng.random_range(-0.5..0.5) / c as f64;
            }
            let s = s.clamp(-0.95, 0.95);
            theta.push(if s < 0.0 { a + s * left } else { a + s * right });
        }
    }
    theta
}

fn largest_remainder(weights: &[f64], k: usize) -> Vec<usize> {
    let total: f64 = weights.iter().sum();
    let quotas: Vec<f64> = weights.iter().map(|w| w / total * k as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().take(k.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

struct Residuals {
    rec: JacobiRecurrence,
    t: usize,
    vals: Vec<f64>,
    ders: Vec<f64>,
}

impl Residuals {
    fn new(w: JacobiWeight, t: usize) -> Self {
        Self {
            rec: JacobiRecurrence::new(w, t.max(1)),
            t,
            vals: vec![0.0; t + 1],
            ders: vec![0.0; t + 1],
        }
    }

    fn residual(&mut self, theta: &[f64]) -> DVector<f64> {
        let k = theta.len() as f64;
        let mut r = DVector::zeros(self.t);
        for &th in theta {
            self.rec.orthonormal(th.cos(), &mut self.vals);
            for d in 0..self.t {
                r[d] += self.vals[d + 1];
            }
        }
        r / k
    }

    fn jacobian(&mut self, theta: &[f64]) -> DMatrix<f64> {
        let k = theta.len() as f64;
        let mut jac = DMatrix::zeros(self.t, theta.len());
        for (col, &th) in theta.iter().enumerate() {
            self.rec
                .orthonormal_with_derivative(th.cos(), &mut self.vals, &mut self.ders);
            let s = -th.sin() / k;
            for d in 0..self.t {
                jac[(d, col)] = self.ders[d + 1] * s;
            }
        }
        jac
    }
}

fn max_abs(r: &DVector<f64>) -> f64 {
    r.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Returns the final angles and the number of iterations used.
fn levenberg_marquardt(
    w: JacobiWeight,
    t: u32,
    mut theta: Vec<f64>,
    opts: &SolverOptions,
) -> (Vec<f64>, usize) {
    let t = t as usize;
    if t == 0 {
        return (theta, 0);
    }
    let target = 1e-2 * opts.tolerance;
    let mut model = Residuals::new(w, t);
    let mut r = model.residual(&theta);
    let mut cost = 0.5 * r.norm_squared();
    let mut lambda = f64::NAN;
    let mut nu = 2.0;
    let mut rejected = 0;

    for iter in 0..opts.max_iterations {
        if max_abs(&r) <= target {
            return (theta, iter);
        }
        let jac = model.jacobian(&theta);
        let gram = &jac * jac.transpose();
        if lambda.is_nan() {
            lambda = 1e-3 * gram.diagonal().max().max(f64::MIN_POSITIVE);
        }
        // (J J^T + lambda I) y = r, step = -J^T y  (equivalent to the normal
        // equations of the K-dimensional problem, but only t x t)
        let mut damped = gram.clone();
        for i in 0..t {
            damped[(i, i)] += lambda;
        }
        let Some(chol) = damped.cholesky() else {
            lambda *= nu;
            nu *= 2.0;
            continue;
        };
        let y = chol.solve(&r);
        let step = -(jac.transpose() * &y);
        let candidate: Vec<f64> = theta.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
        let r_new = model.residual(&candidate);
        let cost_new = 0.5 * r_new.norm_squared();

        let grad = jac.transpose() * &r;
        let predicted = 0.5 * step.dot(&(lambda * &step - grad));
        let rho = if predicted > 0.0 {
            (cost - cost_new) / predicted
        } else {
            -1.0
        };
        if rho > 0.0 && cost_new.is_finite() {
            theta = candidate;
            r = r_new;
            cost = cost_new;
            lambda *= (1.0f64 / 3.0).max(1.0 - (2.0 * rho - 1.0).powi(3));
            nu = 2.0;
            rejected = 0;
        } else {
            lambda *= nu;
            nu *= 2.0;
            rejected += 1;
            if rejected > 40 || !lambda.is_finite() {
                return (theta, iter + 1);
            }
        }
    }
    (theta, opts.max_iterations)
}
