//! Bit-error probability with ISI from `L - 1` previous slots at a fixed
//! transmitter distance.
//!
//! The Laplace functional factors into per-slot terms; its n-th derivative is
//! a Leibniz sum over weak compositions `(m_1..m_L)` of `n`, with a Bell
//! polynomial carrying the interferer-field part (`m_L`) and per-slot factors
//! `e_{l,k}` carrying the tagged transmitter's ISI (`m_1..m_{L-1}`).

use super::{weighted_bell_sum, BerMethod, BerResult, LOG_DOMAIN_THRESHOLD};
use crate::channel::{self, SystemParams};
use crate::mathkit::{
    bell_sequence, integrate_radial, ln_factorial, log_bell_sequence, weak_composition_count,
    weak_compositions, DEFAULT_QUAD_TOL,
};
use crate::{Error, Result};

/// Weak-composition enumeration budget for one ISI evaluation. The term
/// count is `C(eta - 1 + L, L)`, which explodes in `eta` and `L` together.
pub const COMPOSITION_BUDGET: u128 = 20_000_000;

/// Slot taps with the `z -> a` limit (all mass absorbed in the first slot)
/// standing in for the out-of-domain error; quadrature never lands there.
fn field_taps(z: f64, slots: usize, p: &SystemParams) -> Vec<f64> {
    match channel::slot_response(z, slots, p) {
        Ok(sr) => sr.taps,
        Err(_) => {
            let mut taps = vec![0.0; slots];
            taps[0] = 1.0;
            taps
        }
    }
}

fn e_from_tap(tap: f64, k: u32, p: &SystemParams) -> f64 {
    let hn = tap * p.n as f64;
    // exp(-hn) hn^k without intermediate overflow
    let weighted = if k == 0 {
        (-hn).exp()
    } else if hn <= 0.0 {
        0.0
    } else {
        (k as f64 * hn.ln() - hn).exp()
    };
    let mut v = p.p1 * weighted;
    if k == 0 {
        v += p.p0();
    }
    v
}

/// Bit-averaged `k`-th derivative factor of the per-slot Laplace term for a
/// transmitter at distance `z`:
/// `e_{l,k}(z) = p0 1(k=0) + p1 (h_z[l] N)^k exp(-h_z[l] N)`.
pub fn e_lk(z: f64, l: usize, k: u32, p: &SystemParams) -> Result<f64> {
    let sr = channel::slot_response(z, l + 1, p)?;
    Ok(e_from_tap(sr.taps[l], k, p))
}

/// Exponent of the CCI prefactor,
/// `4 pi lambda int_a^inf (1 - prod_{l=0}^{L-1} e_{l,0}(z)) z^2 dz`.
pub fn epsilon_zero(slots: usize, p: &SystemParams) -> Result<f64> {
    if slots == 0 {
        return Err(Error::Domain("ISI evaluation needs L >= 1".into()));
    }
    let horizon = slots as f64 * p.ts;
    let r_max = channel::truncation_radius(p, horizon)?;
    let integral = integrate_radial(
        |z| {
            let taps = field_taps(z, slots, p);
            let prod: f64 = taps.iter().map(|&h| e_from_tap(h, 0, p)).product();
            1.0 - prod
        },
        p.a,
        r_max,
        DEFAULT_QUAD_TOL,
    )?;
    Ok(4.0 * std::f64::consts::PI * p.lambda * integral)
}

/// Interferer-field coefficients `epsilon_1..epsilon_{eta-1}`:
/// `epsilon_i = 4 pi lambda int_a^inf sum_{|q| = i} i!/(q_0!..q_{L-1}!)
/// prod_l e_{l,q_l}(z) z^2 dz`, the inner sum running over weak compositions
/// of `i` into `L` parts.
pub fn epsilon_coeffs(eta: u32, slots: usize, p: &SystemParams) -> Result<Vec<f64>> {
    if eta < 1 {
        return Err(Error::Domain("epsilon coefficients need eta >= 1".into()));
    }
    if slots == 0 {
        return Err(Error::Domain("ISI evaluation needs L >= 1".into()));
    }
    check_budget(eta, slots)?;
    let horizon = slots as f64 * p.ts;
    let r_max = channel::truncation_radius(p, horizon)?;
    let scale = 4.0 * std::f64::consts::PI * p.lambda;

    let mut eps = Vec::with_capacity(eta as usize - 1);
    for i in 1..eta {
        // enumerate once per coefficient, not once per quadrature node
        let comps: Vec<(Vec<u32>, f64)> = weak_compositions(i, slots)
            .map(|q| {
                let multinomial = factorial_f(i as u64)
                    / q.iter().map(|&x| factorial_f(x as u64)).product::<f64>();
                (q, multinomial)
            })
            .collect();
        let integral = integrate_radial(
            |z| {
                let taps = field_taps(z, slots, p);
                comps
                    .iter()
                    .map(|(q, multinomial)| {
                        multinomial
                            * q.iter()
                                .zip(&taps)
                                .map(|(&k, &h)| e_from_tap(h, k, p))
                                .product::<f64>()
                    })
                    .sum::<f64>()
            },
            p.a,
            r_max,
            DEFAULT_QUAD_TOL,
        )?;
        eps.push(scale * integral);
    }
    Ok(eps)
}

fn factorial_f(n: u64) -> f64 {
    crate::mathkit::factorial(n)
}

fn check_budget(eta: u32, slots: usize) -> Result<()> {
    if eta == 0 {
        return Ok(());
    }
    // sum_{n=0}^{eta-1} C(n + L - 1, L - 1) = C(eta - 1 + L, L)
    let required = weak_composition_count(eta - 1, slots + 1);
    if required > COMPOSITION_BUDGET {
        Err(Error::CompositionBudget {
            required,
            budget: COMPOSITION_BUDGET,
        })
    } else {
        Ok(())
    }
}

/// Distance-independent part of the ISI evaluation, reusable across both a
/// distance grid and a threshold scan.
pub(crate) struct IsiCoeffs {
    pub eps0: f64,
    pub eps: Vec<f64>,
    slots: usize,
}

impl IsiCoeffs {
    pub fn compute(eta_max: u32, slots: usize, p: &SystemParams) -> Result<Self> {
        check_budget(eta_max, slots)?;
        Ok(IsiCoeffs {
            eps0: epsilon_zero(slots, p)?,
            eps: epsilon_coeffs(eta_max.max(1), slots, p)?,
            slots,
        })
    }
}

/// Distance-dependent part: tagged-transmitter taps and the `e_{l,k}` table.
pub(crate) struct IsiEvaluator<'c> {
    coeffs: &'c IsiCoeffs,
    /// e_{l,k}(rd) for l = 1..L-1 (row l-1), k = 0..eta_max-1.
    e_table: Vec<Vec<f64>>,
    h0_n: f64,
}

impl<'c> IsiEvaluator<'c> {
    pub fn new(coeffs: &'c IsiCoeffs, rd: f64, eta_max: u32, p: &SystemParams) -> Result<Self> {
        let sr = channel::slot_response(rd, coeffs.slots, p)?;
        let k_max = eta_max.max(1) - 1;
        let e_table = sr.taps[1..]
            .iter()
            .map(|&h| (0..=k_max).map(|k| e_from_tap(h, k, p)).collect())
            .collect();
        Ok(IsiEvaluator {
            coeffs,
            e_table,
            h0_n: sr.taps[0] * p.n as f64,
        })
    }

    /// `(peb0, peb1)` at threshold `eta`.
    pub fn evaluate(&self, eta: u32) -> (f64, f64) {
        if eta == 0 {
            return (1.0, 0.0);
        }
        let eps = &self.coeffs.eps;
        let mut theta = eps.clone();
        if theta.is_empty() {
            theta.push(self.h0_n);
        } else {
            theta[0] += self.h0_n;
        }
        let sum0 = self.assemble(eps, eta, self.coeffs.eps0);
        let sum1 = self.assemble(&theta, eta, self.coeffs.eps0 + self.h0_n);
        (1.0 - sum0, sum1)
    }

    /// `exp(-neg_exponent) * sum_{n<eta} sum_{|m|=n} B_{m_L}(coeffs)
    /// / (m_1!..m_L!) * prod_{l=1}^{L-1} e_{l,m_l}(rd)`.
    fn assemble(&self, coeffs: &[f64], eta: u32, neg_exponent: f64) -> f64 {
        let slots = self.coeffs.slots;
        if slots == 1 {
            // single composition (n) per n: the plain Bell sum
            return weighted_bell_sum(coeffs, eta, neg_exponent);
        }
        let n_max = (eta - 1) as usize;
        let linear_overflow = ln_factorial(n_max as u64) + neg_exponent > 600.0;
        if neg_exponent <= LOG_DOMAIN_THRESHOLD && !linear_overflow {
            let bell = bell_sequence(coeffs, n_max).expect("finite coefficients");
            let factorials: Vec<f64> = (0..=n_max as u64).map(factorial_f).collect();
            let mut sum = 0.0;
            for n in 0..=n_max as u32 {
                for m in weak_compositions(n, slots) {
                    let m_last = m[slots - 1] as usize;
                    let mut term = bell[m_last];
                    for (l, &ml) in m[..slots - 1].iter().enumerate() {
                        term *= self.e_table[l][ml as usize];
                    }
                    for &ml in &m {
                        term /= factorials[ml as usize];
                    }
                    sum += term;
                }
            }
            (-neg_exponent).exp() * sum
        } else {
            let log_coeffs: Vec<f64> = coeffs.iter().map(|v| v.ln()).collect();
            let log_bell = log_bell_sequence(&log_coeffs, n_max);
            let log_e: Vec<Vec<f64>> = self
                .e_table
                .iter()
                .map(|row| row.iter().map(|v| v.ln()).collect())
                .collect();
            let mut terms = Vec::new();
            for n in 0..=n_max as u32 {
                for m in weak_compositions(n, slots) {
                    let m_last = m[slots - 1] as usize;
                    let mut t = log_bell[m_last];
                    for (l, &ml) in m[..slots - 1].iter().enumerate() {
                        t += log_e[l][ml as usize];
                    }
                    for &ml in &m {
                        t -= ln_factorial(ml as u64);
                    }
                    if t.is_finite() {
                        terms.push(t);
                    }
                }
            }
            let peak = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if peak == f64::NEG_INFINITY {
                return 0.0;
            }
            let s: f64 = terms.iter().map(|t| (t - peak).exp()).sum();
            (peak + s.ln() - neg_exponent).exp()
        }
    }
}

/// Error probability with ISI from `slots - 1` previous slots at a fixed
/// transmitter distance. `slots = 1` reproduces the ISI-free theorem.
pub fn ber_isi_fixed(rd: f64, eta: u32, slots: usize, p: &SystemParams) -> Result<BerResult> {
    if slots == 0 {
        return Err(Error::Domain("ISI evaluation needs L >= 1".into()));
    }
    // distance check applies even to the degenerate threshold
    channel::slot_response(rd, slots, p)?;
    if eta == 0 {
        return Ok(BerResult::analytic(1.0, 0.0, 0, BerMethod::AnalyticIsi, p));
    }
    check_budget(eta, slots)?;
    let coeffs = IsiCoeffs::compute(eta, slots, p)?;
    let evaluator = IsiEvaluator::new(&coeffs, rd, eta, p)?;
    let (peb0, peb1) = evaluator.evaluate(eta);
    Ok(BerResult::analytic(
        peb0,
        peb1,
        eta,
        BerMethod::AnalyticIsi,
        p,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ber::{alpha_coeffs, ber_no_isi_fixed};
    use crate::mathkit::poisson_cdf;

    fn fig8_params(lambda: f64) -> SystemParams {
        SystemParams {
            n: 50,
            mu: 1.0,
            lambda,
            ..SystemParams::reference()
        }
    }

    #[test]
    fn e_lk_matches_direct_formula() {
        let p = fig8_params(1e-5);
        let sr = channel::slot_response(9.0, 4, &p).unwrap();
        for l in 0..4 {
            for k in 0..6u32 {
                let hn = sr.taps[l] * p.n as f64;
                let mut want = p.p1 * hn.powi(k as i32) * (-hn).exp();
                if k == 0 {
                    want += p.p0();
                }
                let got = e_lk(9.0, l, k, &p).unwrap();
                assert!(
                    ((got - want) / want).abs() < 1e-13,
                    "l={l} k={k}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn e_lk_zero_order_is_a_probability() {
        let p = fig8_params(1e-5);
        for l in 0..5 {
            let v = e_lk(10.0, l, 0, &p).unwrap();
            assert!(v > 0.0 && v <= 1.0, "e_({l},0) = {v}");
        }
    }

    #[test]
    fn e_lk_degenerate_emission() {
        let mut p = fig8_params(1e-5);
        p.n = 0;
        assert_eq!(e_lk(10.0, 0, 0, &p).unwrap(), 1.0);
        assert_eq!(e_lk(10.0, 0, 3, &p).unwrap(), 0.0);
    }

    #[test]
    fn epsilon_vanishes_without_interferers() {
        let p = fig8_params(0.0);
        assert_eq!(epsilon_zero(5, &p).unwrap(), 0.0);
        let eps = epsilon_coeffs(6, 5, &p).unwrap();
        assert!(eps.iter().all(|&v| v == 0.0), "{eps:?}");
    }

    #[test]
    fn single_slot_epsilon_reduces_to_alpha() {
        let p = SystemParams {
            mu: 5.0,
            ..SystemParams::reference()
        };
        let (alpha0, alphas) = alpha_coeffs(6, &p).unwrap();
        let eps0 = epsilon_zero(1, &p).unwrap();
        let eps = epsilon_coeffs(6, 1, &p).unwrap();
        assert!(
            ((eps0 - alpha0) / alpha0).abs() < 1e-8,
            "{eps0} vs {alpha0}"
        );
        for (e, a) in eps.iter().zip(&alphas) {
            assert!(((e - a) / a).abs() < 1e-8, "{e} vs {a}");
        }
    }

    #[test]
    fn epsilon_reference_point_is_finite_positive() {
        let p = fig8_params(1e-5);
        let eps = epsilon_coeffs(10, 5, &p).unwrap();
        assert_eq!(eps.len(), 9);
        assert!(eps.iter().all(|&v| v.is_finite() && v > 0.0), "{eps:?}");
    }

    #[test]
    fn epsilon_matches_composite_simpson() {
        // fixed-grid Simpson on [a, 300] with 4000 panels, independent of the
        // adaptive Gauss-Kronrod path
        let p = fig8_params(1e-5);
        let slots = 5;
        let eta = 10u32;
        let eps = epsilon_coeffs(eta, slots, &p).unwrap();
        let (a, b, panels) = (p.a, 300.0, 4000usize);
        let h = (b - a) / panels as f64;
        for i in 1..eta {
            let comps: Vec<(Vec<u32>, f64)> = weak_compositions(i, slots)
                .map(|q| {
                    let c = factorial_f(i as u64)
                        / q.iter().map(|&x| factorial_f(x as u64)).product::<f64>();
                    (q, c)
                })
                .collect();
            let integrand = |z: f64| {
                let taps = field_taps(z, slots, &p);
                comps
                    .iter()
                    .map(|(q, c)| {
                        c * q
                            .iter()
                            .zip(&taps)
                            .map(|(&k, &hh)| e_from_tap(hh, k, &p))
                            .product::<f64>()
                    })
                    .sum::<f64>()
                    * z
                    * z
            };
            let mut acc = integrand(a + 1e-12) + integrand(b);
            for j in 1..panels {
                let w = if j % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * integrand(a + j as f64 * h);
            }
            let simpson = 4.0 * std::f64::consts::PI * p.lambda * acc * h / 3.0;
            let rel = ((eps[i as usize - 1] - simpson) / simpson).abs();
            assert!(
                rel < 1e-5,
                "epsilon_{i}: adaptive {} vs simpson {simpson} (rel {rel})",
                eps[i as usize - 1]
            );
        }
    }

    #[test]
    fn collapses_to_no_isi_theorem_at_single_slot() {
        let p = SystemParams {
            mu: 5.0,
            ..SystemParams::reference()
        };
        let isi = ber_isi_fixed(10.0, 5, 1, &p).unwrap();
        let no_isi = ber_no_isi_fixed(10.0, 5, &p).unwrap();
        assert!(
            (isi.peb0 - no_isi.peb0).abs() < 1e-10,
            "{isi:?} vs {no_isi:?}"
        );
        assert!((isi.peb1 - no_isi.peb1).abs() < 1e-10);
        assert!((isi.pe - no_isi.pe).abs() < 1e-10);
    }

    #[test]
    fn matches_exhaustive_bit_conditioning_without_interferers() {
        // lambda = 0, L = 2: condition on the single previous tagged bit
        let p = fig8_params(0.0);
        let (rd, eta) = (10.0, 10u32);
        let sr = channel::slot_response(rd, 2, &p).unwrap();
        let (h0, h1) = (sr.taps[0], sr.taps[1]);
        let n = p.n as f64;
        let peb1_want = p.p0() * poisson_cdf(eta as i64 - 1, h0 * n).unwrap()
            + p.p1 * poisson_cdf(eta as i64 - 1, (h0 + h1) * n).unwrap();
        let peb0_want = p.p1 * (1.0 - poisson_cdf(eta as i64 - 1, h1 * n).unwrap());
        let got = ber_isi_fixed(rd, eta, 2, &p).unwrap();
        assert!(
            (got.peb0 - peb0_want).abs() < 1e-10,
            "peb0 {} vs {peb0_want}",
            got.peb0
        );
        assert!(
            (got.peb1 - peb1_want).abs() < 1e-10,
            "peb1 {} vs {peb1_want}",
            got.peb1
        );
    }

    #[test]
    fn frozen_reference_point() {
        // scipy oracle at N=50, mu=1, eta=10, L=5, rd=10:
        //   lambda=1e-5: pe = 0.25188126620706275
        //   lambda=1e-4: pe = 0.31294473528947575
        let r5 = ber_isi_fixed(10.0, 10, 5, &fig8_params(1e-5)).unwrap();
        assert!(
            ((r5.pe - 0.251_881_266_207_062_75) / r5.pe).abs() < 1e-7,
            "{}",
            r5.pe
        );
        let r4 = ber_isi_fixed(10.0, 10, 5, &fig8_params(1e-4)).unwrap();
        assert!(
            ((r4.pe - 0.312_944_735_289_475_75) / r4.pe).abs() < 1e-7,
            "{}",
            r4.pe
        );
    }

    #[test]
    fn eta_zero_degenerates() {
        let p = fig8_params(1e-5);
        let r = ber_isi_fixed(10.0, 0, 5, &p).unwrap();
        assert_eq!((r.peb0, r.peb1), (1.0, 0.0));
        assert_eq!(r.pe, p.p0());
    }

    #[test]
    fn conditional_errors_are_monotone_in_eta() {
        let p = fig8_params(1e-5);
        let slots = 3;
        let coeffs = IsiCoeffs::compute(40, slots, &p).unwrap();
        let evaluator = IsiEvaluator::new(&coeffs, 10.0, 40, &p).unwrap();
        let mut prev = (1.0, 0.0);
        for eta in 1..=40 {
            let (peb0, peb1) = evaluator.evaluate(eta);
            assert!(peb0 <= prev.0 + 1e-12, "peb0 rose at eta={eta}");
            assert!(peb1 >= prev.1 - 1e-12, "peb1 fell at eta={eta}");
            prev = (peb0, peb1);
        }
    }

    #[test]
    fn composition_budget_is_enforced() {
        let p = fig8_params(1e-5);
        // C(149 + 8, 8) ~ 3e12 >> 2e7
        match ber_isi_fixed(10.0, 150, 8, &p) {
            Err(Error::CompositionBudget { required, budget }) => {
                assert!(required > budget);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn assembly_log_path_is_continuous_at_the_switch() {
        // straddle the log-domain threshold with the same coefficient data;
        // the evaluator is built once and probed through synthetic exponents
        let p = fig8_params(1e-5);
        let coeffs = IsiCoeffs::compute(8, 3, &p).unwrap();
        let evaluator = IsiEvaluator::new(&coeffs, 10.0, 8, &p).unwrap();
        let eps_scaled: Vec<f64> = coeffs.eps.iter().map(|e| e + 1.0).collect();
        for eta in [2u32, 5, 8] {
            let lin = evaluator.assemble(&eps_scaled, eta, LOG_DOMAIN_THRESHOLD - 1e-9);
            let log = evaluator.assemble(&eps_scaled, eta, LOG_DOMAIN_THRESHOLD + 1e-9);
            let adjusted = log * (2e-9_f64).exp();
            assert!(
                ((lin - adjusted) / lin).abs() < 1e-9,
                "eta={eta}: linear {lin} vs log {log}"
            );
        }
    }
}
