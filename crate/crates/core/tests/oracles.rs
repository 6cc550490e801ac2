//! Exact moments against independent numerical oracles.

use designforge::exact_moments::{
    jacobi_moment_ratio, power_moment, sphere_monomial_moment, to_f64, JacobiWeight,
};
use designforge::multi_index::{multi_indices_up_to, MultiIndex};
use designforge::numeric::CompensatedSum;
use designforge::quadrature::gauss_jacobi_init;
use designforge::verify::mc_moment_oracle;

fn exact(dim: usize, alpha: &[u32]) -> f64 {
    to_f64(&sphere_monomial_moment(dim, &MultiIndex::new(alpha.to_vec())).unwrap())
}

/// Composite Simpson rule on `[a, b]` with `panels` (even) subintervals.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    assert!(panels.is_multiple_of(2));
    let h = (b - a) / panels as f64;
    let mut sum = CompensatedSum::new();
    sum.add(f(a));
    sum.add(f(b));
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum.add(w * f(a + i as f64 * h));
    }
    sum.value() * h / 3.0
}

/// With `x = cos(2 phi)` the weight `w_{m,n}(x) dx` becomes a multiple of
/// `sin^(m-1) phi cos^(n-1) phi dphi` on `[0, pi/2]`, with no endpoint singularity.
fn ratio_by_quadrature(m: u32, n: u32, a: u32, b: u32) -> f64 {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let integrand =
        |p: u32, q: u32| move |phi: f64| phi.sin().powi(p as i32) * phi.cos().powi(q as i32);
    let num = simpson(
        integrand(2 * a + m - 1, 2 * b + n - 1),
        0.0,
        half_pi,
        20_000,
    );
    let den = simpson(integrand(m - 1, n - 1), 0.0, half_pi, 20_000);
    num / den
}

#[test]
fn mc_fourth_moment_on_s2() {
    let (est, se) = mc_moment_oracle(3, &MultiIndex::new(vec![4, 0, 0]), 10_000_000, 7);
    assert!((est - 0.2).abs() <= 3.0 * se, "estimate {est} +- {se}");
    assert!(se < 1e-4);
}

#[test]
fn mc_sweep_small_dimensions() {
    let mut seed = 100;
    let mut outside = 0;
    let mut total = 0;
    for dim in 1..=4usize {
        for alpha in multi_indices_up_to(dim, 6) {
            seed += 1;
            let (est, se) = mc_moment_oracle(dim, &alpha, 200_000, seed);
            let want = exact(dim, alpha.exponents());
            total += 1;
            if (est - want).abs() > 3.0 * se.max(1e-15) {
                outside += 1;
            }
            assert!(
                (est - want).abs() <= 5.0 * se.max(1e-15),
                "{alpha} in dim {dim}: {est} vs {want} (se {se})"
            );
        }
    }
    // About 0.3% of honest 3-sigma intervals miss; allow a handful.
    assert!(
        outside * 100 <= total * 2,
        "{outside} of {total} outside 3 sigma"
    );
}

#[test]
fn circle_moments_match_trapezoid_rule() {
    // The trapezoid rule with 64 points is exact for trigonometric degree < 64.
    let n = 64;
    for a in 0..=12u32 {
        for b in 0..=12 - a {
            let mut sum = CompensatedSum::new();
            for k in 0..n {
                let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                sum.add(th.cos().powi(a as i32) * th.sin().powi(b as i32));
            }
            let avg = sum.value() / n as f64;
            let want = exact(2, &[a, b]);
            assert!((avg - want).abs() <= 1e-14, "x^{a} y^{b}: {avg} vs {want}");
        }
    }
}

#[test]
fn jacobi_ratios_match_numerical_integration() {
    for m in 1..=6u32 {
        for n in 1..=6u32 {
            let w = JacobiWeight::new(m, n).unwrap();
            for a in 0..=5u32 {
                for b in 0..=5 - a {
                    let want = ratio_by_quadrature(m, n, a, b);
                    let got = to_f64(&jacobi_moment_ratio(w, a, b));
                    assert!(
                        (got - want).abs() <= 1e-12,
                        "({m},{n},{a},{b}): {got} vs {want}"
                    );
                }
            }
        }
    }
}

#[test]
fn power_moments_match_gauss_rules() {
    for m in 1..=5u32 {
        for n in 1..=5u32 {
            let w = JacobiWeight::new(m, n).unwrap();
            let (nodes, weights) = gauss_jacobi_init(w, 8).unwrap();
            let mass: f64 = weights.iter().sum();
            for d in 0..=15u32 {
                let q: f64 = nodes
                    .iter()
                    .zip(&weights)
                    .map(|(x, c)| c * x.powi(d as i32))
                    .sum::<f64>()
                    / mass;
                let want = to_f64(&power_moment(w, d));
                assert!(
                    (q - want).abs() <= 1e-13,
                    "m={m} n={n} d={d}: {q} vs {want}"
                );
            }
        }
    }
}

#[test]
fn second_moment_matches_uniform_variance() {
    // E[x_1^2] = 1/dim on S^(dim-1).
    for dim in 1..=10usize {
        let mut alpha = vec![0; dim];
        alpha[0] = 2;
        assert!((exact(dim, &alpha) - 1.0 / dim as f64).abs() < 1e-16);
    }
}
