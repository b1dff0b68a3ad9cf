//! Analytical bit-error probability.
//!
//! Detection is `y >= eta` decodes 1, `y < eta` decodes 0, so the bit-0
//! correct region is `{0..eta-1}`. The error probabilities come from
//! Laplace-functional derivatives of the marked interferer field, assembled
//! with complete Bell polynomials:
//!
//! - no ISI, fixed distance ([`ber_no_isi_fixed`]), plus the equiprobable
//!   `eta = 1` closed form ([`ber_no_isi_eta1_equiprobable`]);
//! - no ISI, random distance ([`ber_no_isi_random`]);
//! - ISI over `L` slots, fixed distance ([`ber_isi_fixed`]);
//! - threshold optimisation ([`optimal_threshold`]) and the adaptive
//!   decoding table ([`build_threshold_table`]).

mod distance;
mod isi;
mod no_isi;
mod threshold;

pub use distance::DistanceDistribution;
pub use isi::{ber_isi_fixed, e_lk, epsilon_coeffs, epsilon_zero, COMPOSITION_BUDGET};
pub use no_isi::{alpha_coeffs, ber_no_isi_eta1_equiprobable, ber_no_isi_fixed, ber_no_isi_random};
pub use threshold::{build_threshold_table, optimal_threshold, ThresholdTable};

use crate::channel::SystemParams;
use crate::mathkit::{bell_sequence, ln_factorial, log_bell_sequence};

/// How a [`BerResult`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BerMethod {
    AnalyticNoIsi,
    AnalyticIsi,
    MonteCarlo,
}

/// Analytic model selector for threshold scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalyticModel {
    /// Theorem for the ISI-free system.
    NoIsi,
    /// ISI over `slots` consecutive slots (`slots = 1` collapses to no ISI).
    Isi { slots: usize },
}

/// Bit-error probabilities at one operating point.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BerResult {
    /// P(decode 1 | bit 0).
    pub peb0: f64,
    /// P(decode 0 | bit 1).
    pub peb1: f64,
    /// Total error probability `p0 peb0 + p1 peb1`.
    pub pe: f64,
    /// Detection threshold the result refers to.
    pub eta: u32,
    pub method: BerMethod,
}

impl BerResult {
    pub(crate) fn analytic(
        peb0: f64,
        peb1: f64,
        eta: u32,
        method: BerMethod,
        p: &SystemParams,
    ) -> Self {
        let peb0 = peb0.clamp(0.0, 1.0);
        let peb1 = peb1.clamp(0.0, 1.0);
        BerResult {
            peb0,
            peb1,
            pe: total_ber(peb0, peb1, p),
            eta,
            method,
        }
    }
}

/// Total error probability `p0 peb0 + p1 peb1`.
pub fn total_ber(peb0: f64, peb1: f64, p: &SystemParams) -> f64 {
    p.p0() * peb0 + p.p1 * peb1
}

/// Full scan `eta = 0..=eta_max` at a fixed distance, computing the field
/// coefficients once for the whole sweep.
pub fn ber_scan_fixed(
    rd: f64,
    slots: usize,
    eta_max: u32,
    p: &SystemParams,
) -> crate::Result<Vec<BerResult>> {
    if slots <= 1 {
        let nf_rd = p.n as f64 * crate::channel::absorb_fraction(p.ts, rd, p)?;
        let coeffs = no_isi::NoIsiCoeffs::compute(eta_max, p)?;
        Ok((0..=eta_max)
            .map(|eta| {
                let (peb0, peb1) = coeffs.evaluate(nf_rd, eta);
                BerResult::analytic(peb0, peb1, eta, BerMethod::AnalyticNoIsi, p)
            })
            .collect())
    } else {
        let coeffs = isi::IsiCoeffs::compute(eta_max, slots, p)?;
        let evaluator = isi::IsiEvaluator::new(&coeffs, rd, eta_max, p)?;
        Ok((0..=eta_max)
            .map(|eta| {
                let (peb0, peb1) = evaluator.evaluate(eta);
                BerResult::analytic(peb0, peb1, eta, BerMethod::AnalyticIsi, p)
            })
            .collect())
    }
}

/// Full scan `eta = 0..=eta_max` for a random transmitter distance,
/// computing the field coefficients and density moments once.
pub fn ber_random_scan(
    dist: &DistanceDistribution,
    eta_max: u32,
    p: &SystemParams,
) -> crate::Result<Vec<BerResult>> {
    dist.validate(p)?;
    if let DistanceDistribution::Fixed(rd) = dist {
        return ber_scan_fixed(*rd, 1, eta_max, p);
    }
    let coeffs = no_isi::RandomNoIsiCoeffs::compute(dist, eta_max, p)?;
    Ok((0..=eta_max)
        .map(|eta| {
            let (peb0, peb1) = coeffs.evaluate(eta);
            BerResult::analytic(peb0, peb1, eta, BerMethod::AnalyticNoIsi, p)
        })
        .collect())
}

/// BER at one threshold across a distance grid, computing the
/// distance-independent field coefficients once. The outer `Result` carries
/// coefficient failures; per-point results carry distance-domain errors.
pub fn ber_distance_sweep(
    grid: &[f64],
    eta: u32,
    slots: usize,
    p: &SystemParams,
) -> crate::Result<Vec<crate::Result<BerResult>>> {
    if slots <= 1 {
        let coeffs = no_isi::NoIsiCoeffs::compute(eta.max(1), p)?;
        Ok(grid
            .iter()
            .map(|&rd| {
                let nf_rd = p.n as f64 * crate::channel::absorb_fraction(p.ts, rd, p)?;
                let (peb0, peb1) = coeffs.evaluate(nf_rd, eta);
                Ok(BerResult::analytic(
                    peb0,
                    peb1,
                    eta,
                    BerMethod::AnalyticNoIsi,
                    p,
                ))
            })
            .collect())
    } else {
        let coeffs = isi::IsiCoeffs::compute(eta.max(1), slots, p)?;
        Ok(grid
            .iter()
            .map(|&rd| {
                let evaluator = isi::IsiEvaluator::new(&coeffs, rd, eta.max(1), p)?;
                let (peb0, peb1) = evaluator.evaluate(eta);
                Ok(BerResult::analytic(
                    peb0,
                    peb1,
                    eta,
                    BerMethod::AnalyticIsi,
                    p,
                ))
            })
            .collect())
    }
}

/// Exponent size beyond which probability assemblies switch to per-term
/// log-domain evaluation: `B_n` grows combinatorially while `exp(-alpha_0)`
/// underflows, so their product must be formed in log space.
pub(crate) const LOG_DOMAIN_THRESHOLD: f64 = 50.0;

/// `exp(-neg_exponent) * sum_{n=0}^{eta-1} B_n(coeffs) / n!` for
/// non-negative coefficients.
///
/// Besides the large-exponent case, the log path also covers large `eta`:
/// `B_n <= n! exp(sum a_i/i!)` and `sum alpha_i/i! = alpha_0 <= neg_exponent`
/// here, so `ln n! + neg_exponent` bounds the largest linear-domain value.
pub(crate) fn weighted_bell_sum(coeffs: &[f64], eta: u32, neg_exponent: f64) -> f64 {
    if eta == 0 {
        return 0.0;
    }
    let n_max = (eta - 1) as usize;
    let linear_overflow = ln_factorial(n_max as u64) + neg_exponent > 600.0;
    if neg_exponent <= LOG_DOMAIN_THRESHOLD && !linear_overflow {
        let b = bell_sequence(coeffs, n_max).expect("finite coefficients");
        let mut factorial = 1.0;
        let mut sum = b[0];
        for (n, bn) in b.iter().enumerate().skip(1) {
            factorial *= n as f64;
            sum += bn / factorial;
        }
        (-neg_exponent).exp() * sum
    } else {
        let log_coeffs: Vec<f64> = coeffs.iter().map(|v| v.ln()).collect();
        let lb = log_bell_sequence(&log_coeffs, n_max);
        let terms: Vec<f64> = lb
            .iter()
            .enumerate()
            .map(|(n, lbn)| lbn - ln_factorial(n as u64))
            .collect();
        let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return 0.0;
        }
        let s: f64 = terms.iter().map(|t| (t - m).exp()).sum();
        (m + s.ln() - neg_exponent).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p_with(p1: f64) -> SystemParams {
        SystemParams {
            p1,
            ..SystemParams::reference()
        }
    }

    #[test]
    fn total_ber_mixtures() {
        assert_eq!(total_ber(1.0, 0.0, &p_with(0.5)), 0.5);
        assert_eq!(total_ber(0.0, 0.0, &p_with(0.3)), 0.0);
        let peb1 = 0.37;
        assert_eq!(total_ber(0.9, peb1, &p_with(1.0)), peb1);
    }

    #[test]
    fn weighted_bell_sum_poisson_identity() {
        // coeffs = [m, 0, 0, ...]: B_n = m^n, so the sum is the Poisson CDF
        let m = 7.3;
        for eta in [1u32, 3, 10, 25] {
            let got = weighted_bell_sum(&[m], eta, m);
            let want = crate::mathkit::poisson_cdf(eta as i64 - 1, m).unwrap();
            assert!(
                ((got - want) / want).abs() < 1e-12,
                "eta={eta}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn log_domain_path_matches_linear_near_threshold() {
        let coeffs = [8.0, 3.0, 1.0, 0.25];
        for eta in [1u32, 2, 5] {
            let lin = weighted_bell_sum(&coeffs, eta, LOG_DOMAIN_THRESHOLD - 1e-9);
            let log = weighted_bell_sum(&coeffs, eta, LOG_DOMAIN_THRESHOLD + 1e-9);
            // the two exponents differ by 2e-9; so must the results
            let adjusted = log * (2e-9_f64).exp();
            assert!(
                ((lin - adjusted) / lin).abs() < 1e-9,
                "eta={eta}: linear {lin} vs log {log}"
            );
        }
    }

    #[test]
    fn log_domain_handles_dense_fields() {
        // exp(-700) underflows to zero, so the linear path would return 0
        // while the true weighted sum is ~exp(-646)
        let coeffs = [650.0, 10.0];
        let v = weighted_bell_sum(&coeffs, 12, 700.0);
        assert!(v.is_finite() && v > 0.0 && v < 1.0, "got {v}");
        assert!(v.ln() < -600.0 && v.ln() > -700.0, "ln v = {}", v.ln());
    }

    #[test]
    fn large_eta_switches_to_log_domain() {
        // B_170 ~ 170! overflows f64 even though every B_n/n! is tame;
        // compare against the Poisson identity with m = 20
        let m = 20.0;
        let got = weighted_bell_sum(&[m], 180, m);
        let want = crate::mathkit::poisson_cdf(179, m).unwrap();
        assert!(
            ((got - want) / want).abs() < 1e-11,
            "got {got}, want {want}"
        );
    }
}
