//! Shared oracles for the integration and acceptance suites. Everything
//! here deliberately takes a different route than the code under test.

use mcvd::channel::{self, SystemParams};
use mcvd::mathkit::integrate;

/// Numeric Laplace transform of the conditional received-count intensity
/// for current bit 1 at distance `rd`:
/// `L(rho) = exp(-rho N f(ts, rd) - 4 pi lambda p1
///            int_a^inf (1 - exp(-rho N f(ts, z))) z^2 dz)`.
pub fn laplace_transform_bit1(rho: f64, rd: f64, p: &SystemParams) -> f64 {
    let n = p.n as f64;
    let nf_rd = n * channel::absorb_fraction(p.ts, rd, p).unwrap();
    let r_max = channel::truncation_radius(p, p.ts).unwrap();
    let field = integrate(
        |z| {
            let f = channel::absorb_fraction(p.ts, z, p).unwrap_or(1.0);
            (1.0 - (-rho * n * f).exp()) * z * z
        },
        p.a,
        r_max,
        1e-12,
    )
    .unwrap();
    (-rho * nf_rd - 4.0 * std::f64::consts::PI * p.lambda * p.p1 * field).exp()
}

/// `d^n/drho^n` of [`laplace_transform_bit1`] at `rho = 1` by central finite
/// differences, for `n = 0..=3`.
pub fn laplace_derivative_fd(n: usize, rd: f64, p: &SystemParams) -> f64 {
    let l = |rho: f64| laplace_transform_bit1(rho, rd, p);
    let h = 0.02;
    match n {
        0 => l(1.0),
        1 => (l(1.0 + h) - l(1.0 - h)) / (2.0 * h),
        2 => (l(1.0 + h) - 2.0 * l(1.0) + l(1.0 - h)) / (h * h),
        3 => {
            (l(1.0 + 2.0 * h) - 2.0 * l(1.0 + h) + 2.0 * l(1.0 - h) - l(1.0 - 2.0 * h))
                / (2.0 * h * h * h)
        }
        _ => panic!("finite differences implemented for n <= 3"),
    }
}

/// Checks `analytic` against a Monte-Carlo mean with standard error `se` at
/// the 3-sigma gate.
pub fn within_3_sigma(analytic: f64, mc_mean: f64, se: f64) -> bool {
    (analytic - mc_mean).abs() <= 3.0 * se
}

/// Asserts a sequence falls to a single minimum and rises after it.
pub fn assert_unimodal(values: &[f64], label: &str) {
    let argmin = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap()
        .0;
    for i in 0..argmin {
        assert!(
            values[i] >= values[i + 1] - 1e-15,
            "{label}: not decreasing before the minimum at index {i}: {values:?}"
        );
    }
    for i in argmin..values.len() - 1 {
        assert!(
            values[i + 1] >= values[i] - 1e-15,
            "{label}: not increasing after the minimum at index {i}: {values:?}"
        );
    }
}
