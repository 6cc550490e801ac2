//! Exact rational moments of sphere monomials and of Jacobi weights.
//!
//! Every value here is a ratio of Gamma functions whose arguments differ by
//! integers, so the `sqrt(pi)` factors cancel and the result is rational.
//! These are the ground-truth targets for the verifiers and the quadrature
//! certifier.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multi_index::MultiIndex;

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type ExactRational = BigRational;

pub fn rational(numer: i64, denom: i64) -> ExactRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn to_f64(q: &ExactRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Jacobi weight `(1-x)^((m-2)/2) (1+x)^((n-2)/2)` on `[-1, 1]`.
///
/// `m` and `n` are the ambient dimensions of the two sphere factors joined by
/// the product construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct JacobiWeight {
    m: u32,
    n: u32,
}

impl JacobiWeight {
    pub fn new(m: u32, n: u32) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::invalid(format!(
                "Jacobi weight needs m, n >= 1 (got m={m}, n={n})"
            )));
        }
        Ok(Self { m, n })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Exponent of `(1 - x)`.
    pub fn alpha(&self) -> f64 {
        (self.m as f64 - 2.0) / 2.0
    }

    /// Exponent of `(1 + x)`.
    pub fn beta(&self) -> f64 {
        (self.n as f64 - 2.0) / 2.0
    }

    pub fn alpha_exact(&self) -> ExactRational {
        rational(self.m as i64 - 2, 2)
    }

    pub fn beta_exact(&self) -> ExactRational {
        rational(self.n as i64 - 2, 2)
    }

    /// The weight reflected by `x -> -x`.
    pub fn swapped(&self) -> Self {
        Self {
            m: self.n,
            n: self.m,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (1.0 - x).powf(self.alpha()) * (1.0 + x).powf(self.beta())
    }

    /// Total mass `int_{-1}^{1} w(x) dx`.
    pub fn mass(&self) -> f64 {
        let (m, n) = (self.m, self.n);
        let gm = HalfGamma::of(m);
        let gn = HalfGamma::of(n);
        let gmn = HalfGamma::of(m + n);
        let coeff = to_f64(&(gm.coeff * gn.coeff / gmn.coeff));
        let sqrt_pi_power = gm.sqrt_pi as i32 + gn.sqrt_pi as i32 - gmn.sqrt_pi as i32;
        let pi_factor = std::f64::consts::PI.powf(sqrt_pi_power as f64 / 2.0);
        2f64.powf((m + n) as f64 / 2.0 - 1.0) * coeff * pi_factor
    }
}

/// `Gamma(k/2) = coeff * sqrt(pi)^(sqrt_pi as u8)`.
#[derive(Debug, Clone)]
struct HalfGamma {
    coeff: ExactRational,
    sqrt_pi: bool,
}

impl HalfGamma {
    fn of(k: u32) -> Self {
        assert!(k >= 1, "Gamma(k/2) needs k >= 1");
        if k.is_multiple_of(2) {
            // (k/2 - 1)!
            let mut acc = BigInt::one();
            for j in 2..(k / 2) {
                acc *= j;
            }
            Self {
                coeff: BigRational::from_integer(acc),
                sqrt_pi: false,
            }
        } else {
            // Gamma(j + 1/2) = (2j - 1)!! / 2^j * sqrt(pi)
            let j = (k - 1) / 2;
            let mut num = BigInt::one();
            for i in 0..j {
                num *= 2 * i + 1;
            }
            Self {
                coeff: BigRational::new(num, BigInt::one() << j),
                sqrt_pi: true,
            }
        }
    }
}

/// Surface measure of `S^(dim-1)` in `R^dim`; `S^0` carries counting measure.
pub fn sphere_area(dim: u32) -> f64 {
    assert!(dim >= 1, "sphere_area needs dim >= 1");
    if dim == 1 {
        return 2.0;
    }
    let g = HalfGamma::of(dim);
    let pi = std::f64::consts::PI;
    let pi_half_dim = pi.powf(dim as f64 / 2.0) / if g.sqrt_pi { pi.sqrt() } else { 1.0 };
    2.0 * pi_half_dim / to_f64(&g.coeff)
}

fn double_factorial_odd(beta: u32) -> BigInt {
    // (2*beta - 1)!!
    let mut acc = BigInt::one();
    for i in 0..beta {
        acc *= 2 * i + 1;
    }
    acc
}

/// Normalized moment `(1 / |S^(dim-1)|) * int x^alpha` over the unit sphere in `R^dim`.
///
/// For even `alpha = 2 beta` this equals
/// `prod_i (2 beta_i - 1)!! / prod_{j < |beta|} (dim + 2 j)`; any odd exponent gives 0.
pub fn sphere_monomial_moment(dim: usize, alpha: &MultiIndex) -> Result<ExactRational> {
    if dim == 0 {
        return Err(Error::invalid("sphere dimension must be >= 1"));
    }
    if alpha.len() != dim {
        return Err(Error::invalid(format!(
            "multi-index has {} entries but the sphere lives in R^{dim}",
            alpha.len()
        )));
    }
    let Some(beta) = alpha.half() else {
        return Ok(ExactRational::zero());
    };
    let mut numer = BigInt::one();
    for &b in &beta {
        numer *= double_factorial_odd(b);
    }
    let total: u32 = beta.iter().sum();
    let mut denom = BigInt::one();
    for j in 0..total {
        denom *= dim as u64 + 2 * j as u64;
    }
    Ok(BigRational::new(numer, denom))
}

/// Rising factorial of `x/2` over `k` steps, times `2^k`: `prod_{j<k} (x + 2 j)`.
fn doubled_pochhammer(x: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for j in 0..k {
        acc *= x as u64 + 2 * j as u64;
    }
    acc
}

/// `int ((1-t)/2)^a ((1+t)/2)^b w(t) dt / int w(t) dt`
/// `= B(a + m/2, b + n/2) / B(m/2, n/2)`.
pub fn jacobi_moment_ratio(w: JacobiWeight, a: u32, b: u32) -> ExactRational {
    let numer = doubled_pochhammer(w.m, a) * doubled_pochhammer(w.n, b);
    let denom = doubled_pochhammer(w.m + w.n, a + b);
    BigRational::new(numer, denom)
}

/// Normalized power moment `int t^d w(t) dt / int w(t) dt`, obtained by
/// expanding `t = 2 u - 1` with `u = (1+t)/2`.
pub fn power_moment(w: JacobiWeight, d: u32) -> ExactRational {
    let mut acc = ExactRational::zero();
    let mut binom = BigInt::one();
    for k in 0..=d {
        // C(d, k) 2^k (-1)^(d-k) E[u^k]
        let term = BigRational::from_integer(&binom << k) * jacobi_moment_ratio(w, 0, k);
        if (d - k).is_multiple_of(2) {
            acc += term;
        } else {
            acc -= term;
        }
        binom = binom * (d - k) / (k + 1);
    }
    acc
}
