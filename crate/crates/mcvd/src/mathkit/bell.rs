//! Complete exponential Bell polynomials.
//!
//! `B_n(a_1, ..., a_n)` is evaluated through the binomial recurrence
//! `B_{n+1} = sum_{i=0..n} C(n,i) a_{i+1} B_{n-i}` (O(n^2) instead of
//! enumerating set partitions). A log-domain variant serves the probability
//! assemblies whose terms would otherwise overflow while their weighted sum
//! stays tiny.

use crate::{Error, Result};

/// Evaluates `B_0..B_{n_max}` for the coefficient vector `a` (missing
/// entries are treated as zero).
pub fn bell_sequence(a: &[f64], n_max: usize) -> Result<Vec<f64>> {
    if let Some(bad) = a.iter().find(|v| !v.is_finite()) {
        return Err(Error::Domain(format!(
            "bell_sequence requires finite coefficients, got {bad}"
        )));
    }
    let coeff = |j: usize| -> f64 {
        // a_1-based indexing
        a.get(j - 1).copied().unwrap_or(0.0)
    };
    let mut b = Vec::with_capacity(n_max + 1);
    b.push(1.0);
    // binom holds row n of Pascal's triangle while computing B_{n+1}
    let mut binom: Vec<f64> = vec![1.0];
    for n in 0..n_max {
        let mut next = 0.0;
        for i in 0..=n {
            next += binom[i] * coeff(i + 1) * b[n - i];
        }
        b.push(next);
        // extend Pascal's row: C(n+1, k) = C(n, k-1) + C(n, k)
        let mut row = Vec::with_capacity(n + 2);
        row.push(1.0);
        for k in 1..=n {
            row.push(binom[k - 1] + binom[k]);
        }
        row.push(1.0);
        binom = row;
    }
    Ok(b)
}

/// Log-domain Bell sequence for non-negative coefficients.
///
/// Takes `ln a_i` (use `-inf` for zero coefficients) and returns
/// `ln B_0..ln B_{n_max}`. All recurrence terms are non-negative so the sum
/// can be done by log-sum-exp without cancellation.
pub fn log_bell_sequence(log_a: &[f64], n_max: usize) -> Vec<f64> {
    use super::special::ln_factorial;
    let log_coeff = |j: usize| -> f64 { log_a.get(j - 1).copied().unwrap_or(f64::NEG_INFINITY) };
    let ln_binom = |n: u64, k: u64| ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k);
    let mut lb = Vec::with_capacity(n_max + 1);
    lb.push(0.0); // ln B_0 = 0
    let mut terms = Vec::new();
    for n in 0..n_max {
        terms.clear();
        for i in 0..=n {
            let t = ln_binom(n as u64, i as u64) + log_coeff(i + 1) + lb[n - i];
            if t > f64::NEG_INFINITY {
                terms.push(t);
            }
        }
        lb.push(log_sum_exp(&terms));
    }
    lb
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let s: f64 = terms.iter().map(|t| (t - m).exp()).sum();
    m + s.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Partition-sum oracle: B_n = sum over (j_1,...,j_n) with
    /// sum v*j_v = n of n!/(prod j_v! (v!)^{j_v}) * prod a_v^{j_v}.
    fn bell_by_partitions(a: &[f64], n: usize) -> f64 {
        fn factorial(n: usize) -> f64 {
            (1..=n).fold(1.0, |acc, k| acc * k as f64)
        }
        fn recurse(a: &[f64], remaining: usize, v: usize, weight: f64, acc: &mut f64) {
            if remaining == 0 {
                *acc += weight;
                return;
            }
            if v > remaining {
                return;
            }
            let av = a.get(v - 1).copied().unwrap_or(0.0);
            let mut w = weight;
            let mut used = 0;
            // j_v = 0, 1, 2, ... copies of part v
            recurse(a, remaining, v + 1, w, acc);
            let mut jv = 0usize;
            while used + v <= remaining {
                used += v;
                jv += 1;
                w *= av / (factorial(v) * jv as f64);
                recurse(a, remaining - used, v + 1, w, acc);
            }
        }
        let mut acc = 0.0;
        recurse(a, n, 1, 1.0, &mut acc);
        acc * factorial(n)
    }

    #[test]
    fn single_part() {
        let b = bell_sequence(&[3.25], 1).unwrap();
        assert_eq!(b, vec![1.0, 3.25]);
    }

    #[test]
    fn bell_numbers_from_unit_coefficients() {
        // a = (1,1,...) yields the Bell numbers 1, 1, 2, 5, 15, 52
        let b = bell_sequence(&[1.0; 5], 5).unwrap();
        assert_eq!(b, vec![1.0, 1.0, 2.0, 5.0, 15.0, 52.0]);
    }

    #[test]
    fn two_part_partition_sum() {
        // B_2(a1, a2) = a1^2 + a2
        let b = bell_sequence(&[2.0, 3.0], 2).unwrap();
        assert_eq!(b[2], 7.0);
    }

    #[test]
    fn n_zero_is_permitted() {
        let b = bell_sequence(&[], 0).unwrap();
        assert_eq!(b, vec![1.0]);
    }

    #[test]
    fn non_finite_coefficient_rejected() {
        assert!(bell_sequence(&[1.0, f64::NAN], 2).is_err());
        assert!(bell_sequence(&[f64::INFINITY], 1).is_err());
    }

    #[test]
    fn recurrence_matches_partition_oracle() {
        let b = bell_sequence(&[0.7, -1.3, 2.0, 0.1, -0.5, 1.9, -2.0, 0.3], 8).unwrap();
        for n in 0..=8 {
            let want = bell_by_partitions(&[0.7, -1.3, 2.0, 0.1, -0.5, 1.9, -2.0, 0.3], n);
            let denom = want.abs().max(1e-12);
            assert!(
                ((b[n] - want) / denom).abs() < 1e-10,
                "n={n}: recurrence {} vs partitions {want}",
                b[n]
            );
        }
    }

    #[test]
    fn log_domain_agrees_with_linear() {
        let a: [f64; 4] = [0.8, 0.0, 2.5, 0.3];
        let log_a: Vec<f64> = a.iter().map(|v| v.ln()).collect();
        let lin = bell_sequence(&a, 6).unwrap();
        let log = log_bell_sequence(&log_a, 6);
        for n in 0..=6 {
            let back = log[n].exp();
            let denom = lin[n].max(1e-300);
            assert!(
                ((back - lin[n]) / denom).abs() < 1e-12,
                "n={n}: {back} vs {}",
                lin[n]
            );
        }
    }

    #[test]
    fn log_domain_handles_huge_values() {
        // coefficients large enough that linear B_40 would overflow
        let log_a: Vec<f64> = [800.0_f64, 1600.0, 100.0].iter().map(|v| v.ln()).collect();
        let lb = log_bell_sequence(&log_a, 40);
        assert!(lb.iter().all(|v| v.is_finite()));
        // B_40 >= a_1^40 => ln B_40 >= 40 ln 800
        assert!(lb[40] >= 40.0 * 800.0_f64.ln());
    }

    proptest! {
        #[test]
        fn random_coefficients_match_oracle(
            coeffs in proptest::collection::vec(-2.0f64..2.0, 8)
        ) {
            let b = bell_sequence(&coeffs, 8).unwrap();
            for n in 0..=8 {
                let want = bell_by_partitions(&coeffs, n);
                let denom = want.abs().max(1e-9);
                prop_assert!(((b[n] - want) / denom).abs() < 1e-10);
            }
        }

        #[test]
        fn nonnegative_coefficients_give_nonnegative_bell(
            coeffs in proptest::collection::vec(0.0f64..3.0, 6)
        ) {
            let b = bell_sequence(&coeffs, 6).unwrap();
            prop_assert!(b.iter().all(|v| *v >= 0.0));
        }
    }
}
