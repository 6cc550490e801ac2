use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Exponent `a_n` with `a_1 = 1`, `a_2 = 3`, `a_{2k-1} = 2 a_{k-1} + k` and
/// `a_{2k} = a_{k-1} + a_k + k + 1`.
pub fn a_sequence(n: u64) -> u64 {
    assert!(n >= 1, "a_n is defined for n >= 1");
    consecutive(n).1
}

/// `(a_{n-1}, a_n)` with the convention `a_0 = 0`, which reproduces both
/// seed values through the recursion.
fn consecutive(n: u64) -> (u64, u64) {
    if n == 1 {
        return (0, 1);
    }
    let k = n / 2;
    let (prev, cur) = consecutive(k);
    let odd = 2 * prev + k; // a_{2k-1}
    let even = prev + cur + k + 1; // a_{2k}
    if n.is_multiple_of(2) {
        (odd, even)
    } else {
        (even, 2 * cur + k + 1) // a_{2k+1}
    }
}

/// Exact check of `a_n < (n/2) log2(2n)`, i.e. `2^(2 a_n) < (2n)^n`.
pub fn exponent_below_log_bound(n: u64) -> bool {
    let lhs = BigUint::one() << (2 * a_sequence(n));
    let rhs = BigUint::from(2 * n).pow(n as u32);
    lhs < rhs
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Delsarte-Goethals-Seidel lower bound on the size of a `t`-design on `S^n`.
pub fn lower_bound(n: u64, t: u64) -> BigUint {
    let k = t / 2;
    if t.is_multiple_of(2) {
        binomial(n + k, n)
            + if n + k >= 1 {
                binomial(n + k - 1, n)
            } else {
                BigUint::zero()
            }
    } else {
        binomial(n + k, n) * 2u32
    }
}
