//! Optimal detection thresholds and the adaptive-decoding table.

use super::isi::{IsiCoeffs, IsiEvaluator};
use super::no_isi::NoIsiCoeffs;
use super::{total_ber, AnalyticModel};
use crate::channel::{self, SystemParams};
use crate::mathkit::{integrate_radial, DEFAULT_QUAD_TOL};
use crate::{Error, Result};

/// Map from a distance grid to the threshold minimising the analytic error
/// probability at each grid point (the adaptive-decoding database).
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdTable {
    /// Ascending distances, um, at a fixed step.
    pub rd_grid: Vec<f64>,
    /// Optimal threshold per grid point.
    pub eta_opt: Vec<u32>,
    /// Analytic error probability at the optimal threshold.
    pub pe_min: Vec<f64>,
    /// Fingerprint of the generating [`SystemParams`].
    pub params_hash: u64,
}

impl ThresholdTable {
    /// Threshold for an estimated distance: nearest grid point, clamped to
    /// the grid ends.
    pub fn lookup(&self, rd: f64) -> u32 {
        let first = self.rd_grid[0];
        let last = *self.rd_grid.last().expect("non-empty grid");
        if rd <= first {
            return self.eta_opt[0];
        }
        if rd >= last {
            return *self.eta_opt.last().expect("non-empty grid");
        }
        let step = (last - first) / (self.rd_grid.len() - 1) as f64;
        let idx = ((rd - first) / step).round() as usize;
        self.eta_opt[idx.min(self.eta_opt.len() - 1)]
    }
}

/// FNV-1a over the parameter bit patterns; stable for a fixed build.
fn params_hash(p: &SystemParams) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |v: u64| {
        h ^= v;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    };
    eat(p.d.to_bits());
    eat(p.mu.to_bits());
    eat(p.a.to_bits());
    eat(u64::from(p.n));
    eat(p.ts.to_bits());
    eat(p.lambda.to_bits());
    eat(p.p1.to_bits());
    h
}

/// Exhaustive scan of `eta = 0..=eta_max` under the chosen analytic model.
/// Returns the minimising threshold (smallest on ties) and its `pe`.
pub fn optimal_threshold(
    rd: f64,
    p: &SystemParams,
    model: AnalyticModel,
    eta_max: u32,
) -> Result<(u32, f64)> {
    if eta_max < 1 {
        return Err(Error::Domain("threshold scan needs eta_max >= 1".into()));
    }
    let scan = threshold_scan(rd, p, model, eta_max)?;
    Ok(scan
        .into_iter()
        .enumerate()
        .map(|(eta, pe)| (eta as u32, pe))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty scan"))
}

/// `pe` at every threshold `0..=eta_max`, computing the field coefficients
/// once for the whole scan.
pub fn threshold_scan(
    rd: f64,
    p: &SystemParams,
    model: AnalyticModel,
    eta_max: u32,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(eta_max as usize + 1);
    match model {
        AnalyticModel::NoIsi => {
            let nf_rd = p.n as f64 * channel::absorb_fraction(p.ts, rd, p)?;
            let coeffs = NoIsiCoeffs::compute(eta_max, p)?;
            for eta in 0..=eta_max {
                let (peb0, peb1) = coeffs.evaluate(nf_rd, eta);
                out.push(total_ber(peb0.clamp(0.0, 1.0), peb1.clamp(0.0, 1.0), p));
            }
        }
        AnalyticModel::Isi { slots } => {
            let coeffs = IsiCoeffs::compute(eta_max, slots, p)?;
            let evaluator = IsiEvaluator::new(&coeffs, rd, eta_max, p)?;
            for eta in 0..=eta_max {
                let (peb0, peb1) = evaluator.evaluate(eta);
                out.push(total_ber(peb0.clamp(0.0, 1.0), peb1.clamp(0.0, 1.0), p));
            }
        }
    }
    Ok(out)
}

/// Threshold ceiling covering the received-count distribution at the
/// closest grid distance: mean-given-1 plus three standard deviations. Past
/// that point `peb1` is essentially 1 and `pe` has left its minimum behind.
/// The hard cap keeps the `alpha_i ~ i!` coefficient scale inside f64 range.
fn default_eta_max(b: f64, p: &SystemParams) -> Result<u32> {
    let nf = p.n as f64 * channel::absorb_fraction(p.ts, b, p)?;
    let r_max = channel::truncation_radius(p, p.ts)?;
    let slot_cci = 4.0
        * std::f64::consts::PI
        * p.lambda
        * p.p1
        * p.n as f64
        * integrate_radial(
            |z| channel::absorb_fraction(p.ts, z, p).unwrap_or(1.0),
            p.a,
            r_max,
            DEFAULT_QUAD_TOL,
        )?;
    let mean = nf + slot_cci;
    Ok(((mean + 3.0 * (mean + 1.0).sqrt() + 10.0).ceil() as u32).min(140))
}

/// Builds the adaptive-decoding table on the grid `b, b+step, ..., c` using
/// the ISI-free analytic model.
pub fn build_threshold_table(
    b: f64,
    c: f64,
    step: f64,
    p: &SystemParams,
) -> Result<ThresholdTable> {
    if !(p.a < b && b < c) || !(step > 0.0) {
        return Err(Error::Domain(format!(
            "threshold table needs a < b < c and step > 0, got a={}, b={b}, c={c}, step={step}",
            p.a
        )));
    }
    let points = ((c - b) / step + 1e-9).floor() as usize + 1;
    let rd_grid: Vec<f64> = (0..points).map(|i| b + i as f64 * step).collect();

    let eta_max = default_eta_max(b, p)?;
    let nf: Result<Vec<f64>> = rd_grid
        .iter()
        .map(|&rd| Ok(p.n as f64 * channel::absorb_fraction(p.ts, rd, p)?))
        .collect();
    let nf = nf?;
    let coeffs = NoIsiCoeffs::compute(eta_max, p)?;

    let mut eta_opt = Vec::with_capacity(points);
    let mut pe_min = Vec::with_capacity(points);
    for &nf_rd in &nf {
        let mut best = (0u32, f64::INFINITY);
        for eta in 0..=eta_max {
            let (peb0, peb1) = coeffs.evaluate(nf_rd, eta);
            let pe = total_ber(peb0.clamp(0.0, 1.0), peb1.clamp(0.0, 1.0), p);
            if pe < best.1 {
                best = (eta, pe);
            }
        }
        eta_opt.push(best.0);
        pe_min.push(best.1);
    }
    Ok(ThresholdTable {
        rd_grid,
        eta_opt,
        pe_min,
        params_hash: params_hash(p),
    })
}
