//! Adaptive Gauss-Kronrod (G7/K15) quadrature.
//!
//! Radial integrals `int_a^inf g(z) z^2 dz` are evaluated on a truncated
//! interval `[a, r_max]`; callers pick `r_max` from an analytic envelope of
//! their integrand (see `channel::truncation_radius`) so that the discarded
//! tail is far below the requested tolerance.

use crate::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Default relative tolerance used by the analytic modules.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

const MAX_SEGMENTS: usize = 4000;

// 15-point Kronrod abscissae (positive half), Gauss points at odd indices.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_64,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_17,
    0.207_784_955_007_898_47,
    0.0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_69,
    0.279_705_391_489_276_67,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

struct K15 {
    integral: f64,
    error: f64,
}

fn kronrod_15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> K15 {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);

    let mut fv1 = [0.0_f64; 7];
    let mut fv2 = [0.0_f64; 7];
    for j in 0..7 {
        fv1[j] = f(center - half * XGK[j]);
        fv2[j] = f(center + half * XGK[j]);
    }

    let mut resg = WG[3] * fc;
    for j in 0..3 {
        let jtw = 2 * j + 1;
        resg += WG[j] * (fv1[jtw] + fv2[jtw]);
    }
    let mut resk = WGK[7] * fc;
    let mut resabs = WGK[7] * fc.abs();
    for j in 0..7 {
        resk += WGK[j] * (fv1[j] + fv2[j]);
        resabs += WGK[j] * (fv1[j].abs() + fv2[j].abs());
    }
    let reskh = resk * 0.5;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }

    let integral = resk * half;
    resabs *= half.abs();
    resasc *= half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * 1.0_f64.min((200.0 * err / resasc).powf(1.5));
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    K15 {
        integral,
        error: err,
    }
}

struct Segment {
    lo: f64,
    hi: f64,
    integral: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive quadrature of `f` over `[lo, hi]` to relative tolerance `tol`,
/// with at most `max_segments` subdivisions.
pub fn integrate_with_limit<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    tol: f64,
    max_segments: usize,
) -> Result<f64> {
    if !(lo.is_finite() && hi.is_finite()) || hi < lo {
        return Err(Error::Domain(format!(
            "integration bounds must be finite with lo <= hi, got [{lo}, {hi}]"
        )));
    }
    if lo == hi {
        return Ok(0.0);
    }
    let mut heap = BinaryHeap::new();
    let first = kronrod_15(&f, lo, hi);
    let mut total = first.integral;
    let mut total_err = first.error;
    heap.push(Segment {
        lo,
        hi,
        integral: first.integral,
        error: first.error,
    });

    let converged = |total: f64, err: f64| err <= tol * total.abs().max(1e-300);
    while !converged(total, total_err) {
        if heap.len() >= max_segments {
            return Err(Error::QuadratureNonConvergence {
                partial: total,
                error: total_err,
                subdivisions: heap.len(),
            });
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // interval no longer splittable in f64; accept its estimate
            total_err -= worst.error;
            heap.push(Segment {
                error: 0.0,
                ..worst
            });
            continue;
        }
        let left = kronrod_15(&f, worst.lo, mid);
        let right = kronrod_15(&f, mid, worst.hi);
        total += left.integral + right.integral - worst.integral;
        total_err += left.error + right.error - worst.error;
        heap.push(Segment {
            lo: worst.lo,
            hi: mid,
            integral: left.integral,
            error: left.error,
        });
        heap.push(Segment {
            lo: mid,
            hi: worst.hi,
            integral: right.integral,
            error: right.error,
        });
    }
    Ok(total)
}

/// Adaptive quadrature of `f` over `[lo, hi]` to relative tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    integrate_with_limit(f, lo, hi, tol, MAX_SEGMENTS)
}

/// Radial integral `int_a^{r_max} g(z) z^2 dz` to relative tolerance `tol`.
///
/// `r_max` stands in for the semi-infinite upper limit; pick it so the
/// integrand's tail envelope beyond `r_max` is negligible at `tol`.
pub fn integrate_radial<F: Fn(f64) -> f64>(g: F, a: f64, r_max: f64, tol: f64) -> Result<f64> {
    if a < 0.0 {
        return Err(Error::Domain(format!(
            "radial integrals start at a >= 0, got {a}"
        )));
    }
    integrate(|z| g(z) * z * z, a, r_max, tol)
}
