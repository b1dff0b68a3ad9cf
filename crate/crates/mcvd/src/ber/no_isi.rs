//! Bit-error probability without ISI: fixed distance, the equiprobable
//! `eta = 1` closed form, and random distance.

use super::{weighted_bell_sum, BerMethod, BerResult, DistanceDistribution, LOG_DOMAIN_THRESHOLD};
use crate::channel::{self, SystemParams};
use crate::mathkit::{
    bell_sequence, integrate, integrate_radial, ln_factorial, log_bell_sequence, DEFAULT_QUAD_TOL,
};
use crate::{Error, Result};

fn field_absorb(ts: f64, z: f64, p: &SystemParams) -> f64 {
    // quadrature nodes are strictly inside (a, r_max); the z -> a limit is 1
    channel::absorb_fraction(ts, z, p).unwrap_or(1.0)
}

/// `exp(-u) u^i` without intermediate overflow (`u^i` alone can exceed f64
/// range while the product stays representable).
fn exp_weighted_power(u: f64, i: u32) -> f64 {
    if i == 0 {
        return (-u).exp();
    }
    if u <= 0.0 {
        return 0.0;
    }
    (i as f64 * u.ln() - u).exp()
}

/// Interference coefficients of the ISI-free error formula:
/// `alpha_0 = 4 pi lambda p1 int_a^inf [1 - exp(-N f(ts, z))] z^2 dz` and
/// `alpha_i = 4 pi lambda p1 int_a^inf exp(-N f(ts, z)) (N f(ts, z))^i z^2 dz`
/// for `i = 1..eta-1`.
pub fn alpha_coeffs(eta: u32, p: &SystemParams) -> Result<(f64, Vec<f64>)> {
    if eta < 1 {
        return Err(Error::Domain("alpha coefficients need eta >= 1".into()));
    }
    let r_max = channel::truncation_radius(p, p.ts)?;
    let n = p.n as f64;
    let scale = 4.0 * std::f64::consts::PI * p.lambda * p.p1;
    let alpha0 = scale
        * integrate_radial(
            |z| 1.0 - (-n * field_absorb(p.ts, z, p)).exp(),
            p.a,
            r_max,
            DEFAULT_QUAD_TOL,
        )?;
    let mut alphas = Vec::with_capacity(eta as usize - 1);
    for i in 1..eta {
        alphas.push(
            scale
                * integrate_radial(
                    |z| exp_weighted_power(n * field_absorb(p.ts, z, p), i),
                    p.a,
                    r_max,
                    DEFAULT_QUAD_TOL,
                )?,
        );
    }
    Ok((alpha0, alphas))
}

/// Precomputed coefficients reusable across thresholds and distances.
pub(crate) struct NoIsiCoeffs {
    pub alpha0: f64,
    pub alphas: Vec<f64>,
}

impl NoIsiCoeffs {
    pub fn compute(eta_max: u32, p: &SystemParams) -> Result<Self> {
        let (alpha0, alphas) = alpha_coeffs(eta_max.max(1), p)?;
        Ok(NoIsiCoeffs { alpha0, alphas })
    }

    /// `(peb0, peb1)` at threshold `eta <= eta_max` for a transmitter whose
    /// desired-signal mean is `nf_rd = N f(ts, rd)`.
    pub fn evaluate(&self, nf_rd: f64, eta: u32) -> (f64, f64) {
        if eta == 0 {
            // the receiver always decodes 1
            return (1.0, 0.0);
        }
        debug_assert!((eta as usize) <= self.alphas.len() + 1);
        let peb0 = 1.0 - weighted_bell_sum(&self.alphas, eta, self.alpha0);
        let mut beta = self.alphas.clone();
        if beta.is_empty() {
            beta.push(nf_rd);
        } else {
            beta[0] += nf_rd;
        }
        let peb1 = weighted_bell_sum(&beta, eta, self.alpha0 + nf_rd);
        (peb0, peb1)
    }
}

/// Error probability with no ISI and a fixed transmitter distance.
pub fn ber_no_isi_fixed(rd: f64, eta: u32, p: &SystemParams) -> Result<BerResult> {
    let nf_rd = p.n as f64 * channel::absorb_fraction(p.ts, rd, p)?;
    if eta == 0 {
        return Ok(BerResult::analytic(
            1.0,
            0.0,
            0,
            BerMethod::AnalyticNoIsi,
            p,
        ));
    }
    let coeffs = NoIsiCoeffs::compute(eta, p)?;
    let (peb0, peb1) = coeffs.evaluate(nf_rd, eta);
    Ok(BerResult::analytic(
        peb0,
        peb1,
        eta,
        BerMethod::AnalyticNoIsi,
        p,
    ))
}

/// Closed form for `eta = 1` with equiprobable bits:
/// `pe = (1/2)[1 - exp(-2 pi lambda I) (1 - exp(-N f(ts, rd)))]` with
/// `I = int_a^inf [1 - exp(-N f(ts, z))] z^2 dz`.
pub fn ber_no_isi_eta1_equiprobable(rd: f64, p: &SystemParams) -> Result<f64> {
    if p.p1 != 0.5 {
        return Err(Error::Domain(format!(
            "the eta = 1 closed form assumes equiprobable bits, got p1 = {}",
            p.p1
        )));
    }
    let nf_rd = p.n as f64 * channel::absorb_fraction(p.ts, rd, p)?;
    let r_max = channel::truncation_radius(p, p.ts)?;
    let n = p.n as f64;
    let field = integrate_radial(
        |z| 1.0 - (-n * field_absorb(p.ts, z, p)).exp(),
        p.a,
        r_max,
        DEFAULT_QUAD_TOL,
    )?;
    let shell = (-2.0 * std::f64::consts::PI * p.lambda * field).exp();
    Ok(0.5 * (1.0 - shell * (1.0 - (-nf_rd).exp())))
}

/// Precomputed coefficients for the random-distance theorem: the field part
/// plus the density moments
/// `M_i = int exp(-N f(ts, r)) (N f(ts, r))^i dF(r)`.
pub(crate) struct RandomNoIsiCoeffs {
    base: NoIsiCoeffs,
    moments: Vec<f64>,
}

impl RandomNoIsiCoeffs {
    pub fn compute(dist: &DistanceDistribution, eta_max: u32, p: &SystemParams) -> Result<Self> {
        let base = NoIsiCoeffs::compute(eta_max, p)?;
        let (lo, hi) = dist.support();
        let n = p.n as f64;
        let mut moments = Vec::with_capacity(eta_max.max(1) as usize);
        for i in 0..eta_max.max(1) {
            moments.push(integrate(
                |r| exp_weighted_power(n * field_absorb(p.ts, r, p), i) * dist.density(r),
                lo,
                hi,
                DEFAULT_QUAD_TOL,
            )?);
        }
        Ok(RandomNoIsiCoeffs { base, moments })
    }

    /// `(peb0, peb1)` at threshold `eta <= eta_max`.
    pub fn evaluate(&self, eta: u32) -> (f64, f64) {
        if eta == 0 {
            return (1.0, 0.0);
        }
        let alpha0 = self.base.alpha0;
        let alphas = &self.base.alphas;
        let peb0 = 1.0 - weighted_bell_sum(alphas, eta, alpha0);

        // peb1 = exp(-alpha0) sum over i + j <= eta-1 of B_j(alpha)/j! M_i/i!
        let n_max = (eta - 1) as usize;
        let linear_overflow = ln_factorial(n_max as u64) + alpha0 > 600.0;
        let peb1 = if alpha0 <= LOG_DOMAIN_THRESHOLD && !linear_overflow {
            let b = bell_sequence(alphas, n_max).expect("finite coefficients");
            let mut sum = 0.0;
            let mut fact_i = 1.0;
            for i in 0..=n_max {
                if i > 0 {
                    fact_i *= i as f64;
                }
                let mut fact_j = 1.0;
                for j in 0..=(n_max - i) {
                    if j > 0 {
                        fact_j *= j as f64;
                    }
                    sum += b[j] / fact_j * self.moments[i] / fact_i;
                }
            }
            (-alpha0).exp() * sum
        } else {
            let log_alphas: Vec<f64> = alphas.iter().map(|v| v.ln()).collect();
            let lb = log_bell_sequence(&log_alphas, n_max);
            let mut terms = Vec::new();
            for i in 0..=n_max {
                if self.moments[i] <= 0.0 {
                    continue;
                }
                let log_mi = self.moments[i].ln() - ln_factorial(i as u64);
                for j in 0..=(n_max - i) {
                    let t = lb[j] - ln_factorial(j as u64) + log_mi;
                    if t.is_finite() {
                        terms.push(t);
                    }
                }
            }
            let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if m == f64::NEG_INFINITY {
                0.0
            } else {
                let s: f64 = terms.iter().map(|t| (t - m).exp()).sum();
                (m + s.ln() - alpha0).exp()
            }
        };
        (peb0, peb1)
    }
}

/// Error probability with no ISI and a random transmitter distance.
///
/// `peb0` does not depend on the distance and equals the fixed-distance
/// expression; `peb1` averages the conditional Bell assembly over the
/// distance density.
pub fn ber_no_isi_random(
    dist: &DistanceDistribution,
    eta: u32,
    p: &SystemParams,
) -> Result<BerResult> {
    dist.validate(p)?;
    if let DistanceDistribution::Fixed(rd) = dist {
        return ber_no_isi_fixed(*rd, eta, p);
    }
    if eta == 0 {
        return Ok(BerResult::analytic(
            1.0,
            0.0,
            0,
            BerMethod::AnalyticNoIsi,
            p,
        ));
    }
    let coeffs = RandomNoIsiCoeffs::compute(dist, eta, p)?;
    let (peb0, peb1) = coeffs.evaluate(eta);
    Ok(BerResult::analytic(
        peb0,
        peb1,
        eta,
        BerMethod::AnalyticNoIsi,
        p,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mathkit::poisson_cdf;
    use std::sync::Arc;

    fn fig5_params() -> SystemParams {
        SystemParams {
            mu: 5.0,
            ..SystemParams::reference()
        }
    }

    #[test]
    fn eta_zero_always_decodes_one() {
        let p = fig5_params();
        let r = ber_no_isi_fixed(10.0, 0, &p).unwrap();
        assert_eq!((r.peb0, r.peb1), (1.0, 0.0));
        assert_eq!(r.pe, p.p0());
    }

    #[test]
    fn no_interferers_reduce_to_poisson_tail() {
        let mut p = fig5_params();
        p.lambda = 0.0;
        for &eta in &[1u32, 5, 10, 20] {
            for &rd in &[6.0, 10.0, 15.0] {
                let r = ber_no_isi_fixed(rd, eta, &p).unwrap();
                let nf = p.n as f64 * channel::absorb_fraction(p.ts, rd, &p).unwrap();
                let want = poisson_cdf(eta as i64 - 1, nf).unwrap();
                assert!(r.peb0.abs() < 1e-12, "peb0 = {}", r.peb0);
                assert!(
                    (r.peb1 - want).abs() < 1e-12,
                    "eta={eta} rd={rd}: {} vs {want}",
                    r.peb1
                );
            }
        }
    }

    #[test]
    fn frozen_reference_point() {
        // mpmath oracle at mu=5, lambda=1e-5, rd=10, eta=5:
        // peb0 = 0.033725514027334591, peb1 = 0.076308090336896472
        let r = ber_no_isi_fixed(10.0, 5, &fig5_params()).unwrap();
        assert!(
            ((r.peb0 - 0.033_725_514_027_334_59) / r.peb0).abs() < 1e-8,
            "peb0 = {}",
            r.peb0
        );
        assert!(
            ((r.peb1 - 0.076_308_090_336_896_47) / r.peb1).abs() < 1e-8,
            "peb1 = {}",
            r.peb1
        );
    }

    #[test]
    fn alpha_coefficients_vanish_without_interferers_and_stay_nonnegative() {
        let mut p = fig5_params();
        p.lambda = 0.0;
        let (alpha0, alphas) = alpha_coeffs(8, &p).unwrap();
        assert_eq!(alpha0, 0.0);
        assert!(alphas.iter().all(|&a| a == 0.0));

        let (alpha0, alphas) = alpha_coeffs(5, &fig5_params()).unwrap();
        assert!(alpha0 > 0.0);
        assert!(alphas.iter().all(|&a| a > 0.0 && a.is_finite()));
    }

    #[test]
    fn alpha_coefficients_match_composite_simpson() {
        // fixed 8000-panel Simpson on [a, 300], independent of the adaptive
        // Gauss-Kronrod path (mu = 5 decays within ~40 um)
        let p = fig5_params();
        let (_, alphas) = alpha_coeffs(5, &p).unwrap();
        let n = p.n as f64;
        let (a, b, panels) = (p.a, 300.0, 8000usize);
        let h = (b - a) / panels as f64;
        for (idx, &alpha) in alphas.iter().enumerate() {
            let i = idx as u32 + 1;
            let integrand = |z: f64| {
                let nf = n * field_absorb(p.ts, z, &p);
                exp_weighted_power(nf, i) * z * z
            };
            let mut acc = integrand(a) + integrand(b);
            for j in 1..panels {
                let w = if j % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * integrand(a + j as f64 * h);
            }
            let simpson = 4.0 * std::f64::consts::PI * p.lambda * p.p1 * acc * h / 3.0;
            let rel = ((alpha - simpson) / simpson).abs();
            assert!(rel < 1e-6, "alpha_{i}: {alpha} vs simpson {simpson}");
        }
    }

    #[test]
    fn conditional_errors_are_monotone_in_eta() {
        let p = fig5_params();
        let coeffs = NoIsiCoeffs::compute(40, &p).unwrap();
        let nf = p.n as f64 * channel::absorb_fraction(p.ts, 10.0, &p).unwrap();
        let mut prev = (1.0, 0.0);
        for eta in 1..=40 {
            let (peb0, peb1) = coeffs.evaluate(nf, eta);
            assert!(peb0 <= prev.0 + 1e-12, "peb0 rose at eta={eta}");
            assert!(peb1 >= prev.1 - 1e-12, "peb1 fell at eta={eta}");
            prev = (peb0, peb1);
        }
    }

    #[test]
    fn random_distance_conditional_errors_are_monotone_in_eta() {
        let p = fig5_params();
        let dist = DistanceDistribution::Uniform { b: 4.1, c: 10.0 };
        let coeffs = RandomNoIsiCoeffs::compute(&dist, 40, &p).unwrap();
        let mut prev = (1.0, 0.0);
        for eta in 1..=40 {
            let (peb0, peb1) = coeffs.evaluate(eta);
            assert!(peb0 <= prev.0 + 1e-12, "peb0 rose at eta={eta}");
            assert!(peb1 >= prev.1 - 1e-12, "peb1 fell at eta={eta}");
            prev = (peb0, peb1);
        }
    }

    #[test]
    fn peb1_grows_with_distance_for_long_slots() {
        let mut p = fig5_params();
        p.ts = 2.0;
        let eta = 5;
        let mut prev = 0.0;
        for &rd in &[6.0, 8.0, 10.0, 12.0, 15.0] {
            let r = ber_no_isi_fixed(rd, eta, &p).unwrap();
            assert!(r.peb1 >= prev - 1e-12, "peb1 not non-decreasing at rd={rd}");
            prev = r.peb1;
        }
    }

    #[test]
    fn corollary_matches_theorem_at_eta_one() {
        let p = fig5_params();
        let closed = ber_no_isi_eta1_equiprobable(10.0, &p).unwrap();
        let thm = ber_no_isi_fixed(10.0, 1, &p).unwrap();
        assert!(
            (closed - thm.pe).abs() < 1e-12,
            "corollary {closed} vs theorem {}",
            thm.pe
        );
    }

    #[test]
    fn corollary_requires_equiprobable_bits() {
        let mut p = fig5_params();
        p.p1 = 0.6;
        assert!(ber_no_isi_eta1_equiprobable(10.0, &p).is_err());
    }

    #[test]
    fn corollary_no_signal_is_coin_flip() {
        let mut p = fig5_params();
        p.lambda = 0.0;
        p.n = 0;
        let pe = ber_no_isi_eta1_equiprobable(10.0, &p).unwrap();
        assert!((pe - 0.5).abs() < 1e-12, "got {pe}");
    }

    #[test]
    fn random_distance_point_mass_degenerates() {
        let p = fig5_params();
        let fixed = ber_no_isi_fixed(10.0, 5, &p).unwrap();
        let via_dist = ber_no_isi_random(&DistanceDistribution::Fixed(10.0), 5, &p).unwrap();
        assert_eq!(fixed, via_dist);
    }

    #[test]
    fn random_distance_narrow_uniform_converges_to_fixed() {
        let p = fig5_params();
        let b = 10.0;
        let narrow = DistanceDistribution::Uniform { b, c: b + 1e-3 };
        let r = ber_no_isi_random(&narrow, 5, &p).unwrap();
        let fixed = ber_no_isi_fixed(b, 5, &p).unwrap();
        assert!((r.pe - fixed.pe).abs() < 1e-4, "{} vs {}", r.pe, fixed.pe);
        assert_eq!(r.peb0, fixed.peb0);
    }

    #[test]
    fn random_distance_frozen_reference() {
        // scipy oracle, uniform(4.1, 10), mu=5, eta=5:
        //   lambda=1e-5: peb1 = 0.0057083214525144, pe = 0.0197169177399245
        //   lambda=1e-4: peb1 = 0.0022399749932370, pe = 0.1709228462494863
        let dist = DistanceDistribution::Uniform { b: 4.1, c: 10.0 };
        let mut p = fig5_params();
        let r5 = ber_no_isi_random(&dist, 5, &p).unwrap();
        assert!(
            ((r5.pe - 0.019_716_917_739_924_5) / r5.pe).abs() < 1e-8,
            "{}",
            r5.pe
        );
        p.lambda = 1e-4;
        let r4 = ber_no_isi_random(&dist, 5, &p).unwrap();
        assert!(
            ((r4.pe - 0.170_922_846_249_486_3) / r4.pe).abs() < 1e-8,
            "{}",
            r4.pe
        );
        assert!(r4.pe > r5.pe, "denser field must raise pe");
    }

    #[test]
    fn random_distance_custom_density_matches_uniform() {
        // a custom density that happens to be the uniform one
        let p = fig5_params();
        let custom = DistanceDistribution::Custom {
            density: Arc::new(|_| 1.0 / 5.9),
            support: (4.1, 10.0),
        };
        let uniform = DistanceDistribution::Uniform { b: 4.1, c: 10.0 };
        let rc = ber_no_isi_random(&custom, 4, &p).unwrap();
        let ru = ber_no_isi_random(&uniform, 4, &p).unwrap();
        assert!((rc.pe - ru.pe).abs() < 1e-10);
    }

    #[test]
    fn random_distance_rejects_unnormalized_density() {
        let p = fig5_params();
        let bad = DistanceDistribution::Custom {
            density: Arc::new(|_| 0.5),
            support: (4.1, 10.0),
        };
        assert!(ber_no_isi_random(&bad, 4, &p).is_err());
    }

    #[test]
    fn random_distance_log_path_is_continuous_at_the_switch() {
        // synthetic coefficients straddling the log-domain threshold: the
        // two evaluation paths must agree where both are representable
        let alphas = vec![6.0, 2.5, 0.8, 0.2];
        let moments = vec![0.3, 0.25, 0.22, 0.1, 0.05];
        for eta in [1u32, 3, 5] {
            let lin = RandomNoIsiCoeffs {
                base: NoIsiCoeffs {
                    alpha0: crate::ber::LOG_DOMAIN_THRESHOLD - 1e-9,
                    alphas: alphas.clone(),
                },
                moments: moments.clone(),
            }
            .evaluate(eta)
            .1;
            let log = RandomNoIsiCoeffs {
                base: NoIsiCoeffs {
                    alpha0: crate::ber::LOG_DOMAIN_THRESHOLD + 1e-9,
                    alphas: alphas.clone(),
                },
                moments: moments.clone(),
            }
            .evaluate(eta)
            .1;
            let adjusted = log * (2e-9_f64).exp();
            assert!(
                ((lin - adjusted) / lin).abs() < 1e-9,
                "eta={eta}: linear {lin} vs log {log}"
            );
        }
    }
}
