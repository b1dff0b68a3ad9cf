//! Expected molecule counts at the receiver: desired signal, ISI from the
//! tagged transmitter, co-channel interference from the Poisson field, and
//! totals, in steady and transient state.
//!
//! Each closed form has a quadrature twin (`*_campbell`) obtained from the
//! marked Campbell theorem; production code uses the closed forms and the
//! twins back the tests (and cover the transient CCI with degradation, for
//! which no closed form exists).

use crate::channel::{self, SystemParams};
use crate::mathkit::{integrate_radial, DEFAULT_QUAD_TOL};
use crate::{Error, Result};

/// Which observation window the expectation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Transmissions have been running forever.
    Steady,
    /// Only `K - 1` slots were transmitted before the current one.
    Transient(u32),
}

/// Expected molecules absorbed during one slot, split by origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectationBreakdown {
    /// Desired-signal molecules (current slot of the tagged transmitter).
    pub e_s: f64,
    /// ISI molecules (previous slots of the tagged transmitter).
    pub e_i: f64,
    /// CCI molecules (all slots of the interferer field).
    pub e_c: f64,
    /// Total; always `e_s + e_i + e_c` as computed.
    pub e_t: f64,
    pub regime: Regime,
}

/// Expected desired-signal count `p1 N f(ts, rd)`.
pub fn expected_signal(rd: f64, p: &SystemParams) -> Result<f64> {
    Ok(p.p1 * p.n as f64 * channel::absorb_fraction(p.ts, rd, p)?)
}

/// Expected ISI count from the tagged transmitter at steady state,
/// `p1 N (f(inf, rd) - f(ts, rd))`.
pub fn expected_isi(rd: f64, p: &SystemParams) -> Result<f64> {
    let tail = channel::absorb_fraction_inf(rd, p)? - channel::absorb_fraction(p.ts, rd, p)?;
    Ok(p.p1 * p.n as f64 * tail.max(0.0))
}

/// Expected ISI count when only `K - 1` previous slots were transmitted,
/// `p1 N (f(K ts, rd) - f(ts, rd))`.
pub fn expected_isi_transient(rd: f64, k: u32, p: &SystemParams) -> Result<f64> {
    if k < 1 {
        return Err(Error::Domain("transient ISI needs K >= 1".into()));
    }
    let tail =
        channel::absorb_fraction(k as f64 * p.ts, rd, p)? - channel::absorb_fraction(p.ts, rd, p)?;
    Ok(p.p1 * p.n as f64 * tail.max(0.0))
}

/// Expected steady-state CCI count,
/// `4 pi lambda p1 N a (D/mu + a sqrt(D/mu))`. Independent of `rd`.
///
/// Diverges without degradation; callers with `mu = 0` get a typed error
/// steering them to the transient form.
pub fn expected_cci(p: &SystemParams) -> Result<f64> {
    if p.mu <= 0.0 {
        return Err(Error::CciDiverges);
    }
    let ratio = p.d / p.mu;
    Ok(4.0
        * std::f64::consts::PI
        * p.lambda
        * p.p1
        * p.n as f64
        * p.a
        * (ratio + p.a * ratio.sqrt()))
}

/// Expected transient CCI count without degradation,
/// `4 pi lambda p1 N a (D K ts + a sqrt(4 D K ts / pi))`.
///
/// The closed form exists only for `mu = 0`; with degradation use
/// [`expected_cci_campbell`] over a finite horizon instead.
pub fn expected_cci_transient(k: u32, p: &SystemParams) -> Result<f64> {
    if k < 1 {
        return Err(Error::Domain("transient CCI needs K >= 1".into()));
    }
    if p.mu != 0.0 {
        return Err(Error::Domain(
            "the transient CCI closed form holds for mu = 0 only; \
             use expected_cci_campbell for mu > 0"
                .into(),
        ));
    }
    let kts = k as f64 * p.ts;
    Ok(4.0
        * std::f64::consts::PI
        * p.lambda
        * p.p1
        * p.n as f64
        * p.a
        * (p.d * kts + p.a * (4.0 * p.d * kts / std::f64::consts::PI).sqrt()))
}

/// CCI by direct Campbell integration,
/// `4 pi lambda p1 N int_a^inf f(horizon, z) z^2 dz`.
///
/// `Regime::Steady` uses `f(inf, z)` (requires `mu > 0`);
/// `Regime::Transient(K)` uses `f(K ts, z)` and works for any `mu`.
pub fn expected_cci_campbell(regime: Regime, p: &SystemParams) -> Result<f64> {
    let horizon = match regime {
        Regime::Steady => {
            if p.mu <= 0.0 {
                return Err(Error::CciDiverges);
            }
            f64::INFINITY
        }
        Regime::Transient(k) => {
            if k < 1 {
                return Err(Error::Domain("transient CCI needs K >= 1".into()));
            }
            k as f64 * p.ts
        }
    };
    let r_max = channel::truncation_radius(p, horizon)?;
    // quadrature nodes are strictly inside (a, r_max); the z -> a limit is 1
    let integral = integrate_radial(
        |z| channel::absorb_fraction(horizon, z, p).unwrap_or(1.0),
        p.a,
        r_max,
        DEFAULT_QUAD_TOL,
    )?;
    Ok(4.0 * std::f64::consts::PI * p.lambda * p.p1 * p.n as f64 * integral)
}

/// Steady-state expectation breakdown at distance `rd` (requires `mu > 0`).
pub fn expected_total(rd: f64, p: &SystemParams) -> Result<ExpectationBreakdown> {
    let e_s = expected_signal(rd, p)?;
    let e_i = expected_isi(rd, p)?;
    let e_c = expected_cci(p)?;
    Ok(ExpectationBreakdown {
        e_s,
        e_i,
        e_c,
        e_t: e_s + e_i + e_c,
        regime: Regime::Steady,
    })
}

/// Closed form of the steady-state total,
/// `p1 N a (exp(-sqrt(mu/D)(rd-a))/rd + 4 pi lambda (D/mu + a sqrt(D/mu)))`.
/// Used to cross-check that the component sum telescopes.
pub fn expected_total_closed_form(rd: f64, p: &SystemParams) -> Result<f64> {
    if p.mu <= 0.0 {
        return Err(Error::CciDiverges);
    }
    if rd <= p.a {
        return Err(Error::Domain(format!("need rd > a, got rd = {rd}")));
    }
    let ratio = p.d / p.mu;
    Ok(p.p1
        * p.n as f64
        * p.a
        * ((-(p.mu / p.d).sqrt() * (rd - p.a)).exp() / rd
            + 4.0 * std::f64::consts::PI * p.lambda * (ratio + p.a * ratio.sqrt())))
}

/// Transient breakdown after `K - 1` previous slots, for `mu = 0`.
pub fn expected_total_transient(rd: f64, k: u32, p: &SystemParams) -> Result<ExpectationBreakdown> {
    let e_s = expected_signal(rd, p)?;
    let e_i = expected_isi_transient(rd, k, p)?;
    let e_c = expected_cci_transient(k, p)?;
    Ok(ExpectationBreakdown {
        e_s,
        e_i,
        e_c,
        e_t: e_s + e_i + e_c,
        regime: Regime::Transient(k),
    })
}
