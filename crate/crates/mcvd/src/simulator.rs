//! Marked-PPP Monte-Carlo ground truth.
//!
//! Molecules are never random-walked individually: conditioned on the
//! transmitter field and its bits, the absorbed count in a slot is Poisson
//! with intensity `sum over transmitters and slots of h_r[l] N bit`, which is
//! exactly the model the analytic module describes. Interferer positions are
//! drawn as a homogeneous PPP in the spherical shell `a < r < r_max` (only
//! radii matter), every transmitter carries independent per-slot bits, and
//! detection compares the count against the threshold.
//!
//! Determinism: every realization derives its own counter-based RNG stream
//! from `(seed, realization index)`, so results are bit-identical for a
//! fixed seed regardless of how many worker threads run the loop. All
//! accumulation is over integers (counts), which makes the reduction
//! order-independent.

use crate::ber::{BerMethod, BerResult, DistanceDistribution, ThresholdTable};
use crate::channel::{self, SystemParams};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

/// Detection threshold policy.
#[derive(Debug, Clone)]
pub enum ThresholdPolicy {
    /// One threshold for every realization.
    Fixed(u32),
    /// Distance-adaptive threshold from the analytic table (the decoder is
    /// assumed to know an estimate of `rd`).
    Adaptive(ThresholdTable),
}

/// Bits of everything except the tagged transmitter's current slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BackgroundBits {
    /// Independent Bernoulli(p1) marks everywhere (the model under study).
    #[default]
    Random,
    /// All interferer bits and all previous tagged bits pinned to 0.
    AllZero,
    /// All interferer bits and all previous tagged bits pinned to 1.
    AllOne,
}

/// Monte-Carlo experiment description.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub params: SystemParams,
    pub rd_dist: DistanceDistribution,
    pub threshold: ThresholdPolicy,
    /// Simulated ISI memory in slots (current slot included). Matches the
    /// analytic `L` under test; raise it to quantify truncation error.
    pub slots: usize,
    /// Simulation region radius, um.
    pub r_max: f64,
    pub realizations: usize,
    pub seed: u64,
    pub background: BackgroundBits,
}

impl SimConfig {
    /// Fixed-threshold config over the reference region (150 um).
    pub fn new(params: SystemParams, rd_dist: DistanceDistribution, eta: u32) -> Self {
        SimConfig {
            params,
            rd_dist,
            threshold: ThresholdPolicy::Fixed(eta),
            slots: 1,
            r_max: 150.0,
            realizations: 10_000,
            seed: 0x6d63_7664,
            background: BackgroundBits::Random,
        }
    }

    fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.rd_dist.validate(&self.params)?;
        if !(self.r_max > self.params.a) {
            return Err(Error::Domain(format!(
                "simulation region must exceed the receiver radius, got r_max = {}",
                self.r_max
            )));
        }
        if self.slots == 0 {
            return Err(Error::Domain("simulation needs at least one slot".into()));
        }
        if self.realizations == 0 {
            return Err(Error::Domain(
                "simulation needs at least one realization".into(),
            ));
        }
        Ok(())
    }
}

/// Sample-mean estimate with a 95% confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub half_width_95: f64,
    pub n: usize,
    pub seed: u64,
}

impl McEstimate {
    fn bernoulli(successes: u64, n: usize, seed: u64) -> Self {
        let mean = successes as f64 / n as f64;
        McEstimate {
            mean,
            half_width_95: 1.96 * (mean * (1.0 - mean) / n as f64).sqrt(),
            n,
            seed,
        }
    }

    fn from_sums(sum: u128, sum_sq: u128, n: usize, seed: u64) -> Self {
        let nf = n as f64;
        let mean = sum as f64 / nf;
        let var = ((sum_sq as f64) - nf * mean * mean) / (nf - 1.0).max(1.0);
        McEstimate {
            mean,
            half_width_95: 1.96 * (var.max(0.0) / nf).sqrt(),
            n,
            seed,
        }
    }

    /// One standard error (the half-width is 1.96 of these).
    pub fn std_error(&self) -> f64 {
        self.half_width_95 / 1.96
    }
}

/// Monte-Carlo BER estimate with per-conditional confidence intervals.
#[derive(Debug, Clone)]
pub struct McBer {
    pub result: BerResult,
    /// `None` when natural sampling produced no realizations of that bit.
    pub peb0: Option<McEstimate>,
    pub peb1: Option<McEstimate>,
    pub pe: McEstimate,
}

/// How the tagged transmitter's current bit is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingMode {
    /// Two pinned-bit batches (`realizations` each) estimate the two
    /// conditional errors directly, halving their variance.
    ForcedConditional,
    /// Bernoulli(p1) current bit; conditional estimates may be undefined.
    Natural,
}

// stream-id tags keep batches on disjoint counter-based substreams
const STREAM_NATURAL: u64 = 0;
const STREAM_FORCED0: u64 = 1;
const STREAM_FORCED1: u64 = 2;
const STREAM_COUNTS: u64 = 3;

fn realization_rng(seed: u64, tag: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((tag << 48) | index as u64);
    rng
}

/// Interferer radial distances of one PPP realization in the shell
/// `a < r < r_max`: the count is Poisson in the shell volume and each radius
/// follows the volume-weighted inverse CDF `(a^3 + U (r_max^3 - a^3))^{1/3}`.
pub fn sample_ppp(lambda: f64, a: f64, r_max: f64, rng: &mut impl Rng) -> Vec<f64> {
    let count = sample_ppp_count(lambda, a, r_max, rng);
    (0..count)
        .map(|_| sample_shell_radius(a, r_max, rng))
        .collect()
}

fn sample_ppp_count(lambda: f64, a: f64, r_max: f64, rng: &mut impl Rng) -> usize {
    let volume = 4.0 / 3.0 * std::f64::consts::PI * (r_max.powi(3) - a.powi(3));
    let nu = lambda * volume;
    if nu <= 0.0 {
        return 0;
    }
    Poisson::new(nu).expect("positive intensity").sample(rng) as usize
}

fn sample_shell_radius(a: f64, r_max: f64, rng: &mut impl Rng) -> f64 {
    let u: f64 = rng.gen();
    (a.powi(3) + u * (r_max.powi(3) - a.powi(3))).cbrt()
}

/// Distance sampler resolved from a [`DistanceDistribution`] (custom
/// densities get a tabulated inverse CDF).
enum DistanceSampler {
    Fixed(f64),
    Uniform { b: f64, c: f64 },
    Table { xs: Vec<f64>, cdf: Vec<f64> },
}

impl DistanceSampler {
    fn build(dist: &DistanceDistribution) -> Self {
        match dist {
            DistanceDistribution::Fixed(rd) => DistanceSampler::Fixed(*rd),
            DistanceDistribution::Uniform { b, c } => DistanceSampler::Uniform { b: *b, c: *c },
            DistanceDistribution::Custom { density, support } => {
                const CELLS: usize = 2048;
                let (lo, hi) = *support;
                let h = (hi - lo) / CELLS as f64;
                let xs: Vec<f64> = (0..=CELLS).map(|i| lo + i as f64 * h).collect();
                let mut cdf = vec![0.0; CELLS + 1];
                for i in 1..=CELLS {
                    cdf[i] = cdf[i - 1] + 0.5 * h * (density(xs[i - 1]) + density(xs[i]));
                }
                let total = cdf[CELLS];
                cdf.iter_mut().for_each(|v| *v /= total);
                DistanceSampler::Table { xs, cdf }
            }
        }
    }

    fn sample(&self, rng: &mut impl Rng) -> f64 {
        match self {
            DistanceSampler::Fixed(rd) => *rd,
            DistanceSampler::Uniform { b, c } => b + rng.gen::<f64>() * (c - b),
            DistanceSampler::Table { xs, cdf } => {
                let u: f64 = rng.gen();
                let i = cdf.partition_point(|&v| v < u).clamp(1, cdf.len() - 1);
                let span = cdf[i] - cdf[i - 1];
                let frac = if span > 0.0 {
                    (u - cdf[i - 1]) / span
                } else {
                    0.5
                };
                xs[i - 1] + frac * (xs[i] - xs[i - 1])
            }
        }
    }
}

fn sample_bit(p1: f64, rng: &mut impl Rng) -> u8 {
    u8::from(rng.gen::<f64>() < p1)
}

fn background_bit(mode: BackgroundBits, p1: f64, rng: &mut impl Rng) -> u8 {
    match mode {
        BackgroundBits::Random => sample_bit(p1, rng),
        BackgroundBits::AllZero => 0,
        BackgroundBits::AllOne => 1,
    }
}

/// Poisson intensity split of one realization.
struct IntensityParts {
    rd: f64,
    tagged_bit: u8,
    signal: f64,
    isi: f64,
    cci: f64,
}

fn draw_intensity(
    cfg: &SimConfig,
    sampler: &DistanceSampler,
    force_bit: Option<u8>,
    rng: &mut impl Rng,
) -> IntensityParts {
    let p = &cfg.params;
    let n = p.n as f64;
    let slots = cfg.slots;

    let rd = sampler.sample(rng);
    let tagged_bit = force_bit.unwrap_or_else(|| sample_bit(p.p1, rng));

    // tagged transmitter: current slot plus slots-1 previous bits
    let taps = channel::slot_response(rd, slots, p).expect("rd inside support");
    let signal = tagged_bit as f64 * n * taps.taps[0];
    let mut isi = 0.0;
    for l in 1..slots {
        isi += background_bit(cfg.background, p.p1, rng) as f64 * n * taps.taps[l];
    }

    // interferer field: Poisson count, then per-interferer radius and bits
    let mut cci = 0.0;
    let count = sample_ppp_count(p.lambda, p.a, cfg.r_max, rng);
    for _ in 0..count {
        let r = sample_shell_radius(p.a, cfg.r_max, rng);
        let mut f_prev = 0.0;
        for l in 0..slots {
            let f_next = channel::absorb_fraction((l + 1) as f64 * p.ts, r, p)
                .expect("interferer outside receiver");
            let tap = (f_next - f_prev).max(0.0);
            f_prev = f_next;
            cci += background_bit(cfg.background, p.p1, rng) as f64 * n * tap;
        }
    }
    IntensityParts {
        rd,
        tagged_bit,
        signal,
        isi,
        cci,
    }
}

fn poisson_draw(nu: f64, rng: &mut impl Rng) -> u64 {
    if nu <= 0.0 {
        0
    } else {
        Poisson::new(nu).expect("positive intensity").sample(rng) as u64
    }
}

/// One realization: absorbed count in the current slot and the tagged bit.
pub fn simulate_realization(cfg: &SimConfig, rng: &mut impl Rng) -> Result<(u64, u8)> {
    cfg.validate()?;
    let sampler = DistanceSampler::build(&cfg.rd_dist);
    let parts = draw_intensity(cfg, &sampler, None, rng);
    let y = poisson_draw(parts.signal + parts.isi + parts.cci, rng);
    Ok((y, parts.tagged_bit))
}

/// Per-realization outcome of a batch.
struct Outcome {
    y: u64,
    rd: f64,
    bit: u8,
}

fn run_batch(cfg: &SimConfig, tag: u64, force_bit: Option<u8>) -> Vec<Outcome> {
    let sampler = DistanceSampler::build(&cfg.rd_dist);
    (0..cfg.realizations)
        .into_par_iter()
        .map(|i| {
            let mut rng = realization_rng(cfg.seed, tag, i);
            let parts = draw_intensity(cfg, &sampler, force_bit, &mut rng);
            // component draws: the sum of independent Poissons matches the
            // total-intensity draw in distribution
            let y = poisson_draw(parts.signal, &mut rng)
                + poisson_draw(parts.isi, &mut rng)
                + poisson_draw(parts.cci, &mut rng);
            Outcome {
                y,
                rd: parts.rd,
                bit: parts.tagged_bit,
            }
        })
        .collect()
}

fn eta_for(cfg: &SimConfig, rd: f64) -> u32 {
    match &cfg.threshold {
        ThresholdPolicy::Fixed(eta) => *eta,
        ThresholdPolicy::Adaptive(table) => table.lookup(rd),
    }
}

/// Estimates the bit-error probability of `cfg`.
///
/// `ForcedConditional` runs two pinned-bit batches of `cfg.realizations`
/// each and combines them as `p0 peb0 + p1 peb1`; `Natural` samples the
/// current bit and counts decode errors directly.
pub fn estimate_ber(cfg: &SimConfig, mode: SamplingMode) -> Result<McBer> {
    cfg.validate()?;
    match mode {
        SamplingMode::ForcedConditional => {
            let batch0 = run_batch(cfg, STREAM_FORCED0, Some(0));
            let batch1 = run_batch(cfg, STREAM_FORCED1, Some(1));
            let err0 = batch0
                .iter()
                .filter(|o| o.y >= u64::from(eta_for(cfg, o.rd)))
                .count() as u64;
            let err1 = batch1
                .iter()
                .filter(|o| o.y < u64::from(eta_for(cfg, o.rd)))
                .count() as u64;
            let n = cfg.realizations;
            let peb0 = McEstimate::bernoulli(err0, n, cfg.seed);
            let peb1 = McEstimate::bernoulli(err1, n, cfg.seed);
            let p = &cfg.params;
            let pe_mean = p.p0() * peb0.mean + p.p1 * peb1.mean;
            let pe_hw = (p.p0().powi(2) * peb0.half_width_95.powi(2)
                + p.p1.powi(2) * peb1.half_width_95.powi(2))
            .sqrt();
            let eta = match &cfg.threshold {
                ThresholdPolicy::Fixed(eta) => *eta,
                ThresholdPolicy::Adaptive(_) => 0,
            };
            Ok(McBer {
                result: BerResult {
                    peb0: peb0.mean,
                    peb1: peb1.mean,
                    pe: pe_mean,
                    eta,
                    method: BerMethod::MonteCarlo,
                },
                peb0: Some(peb0),
                peb1: Some(peb1),
                pe: McEstimate {
                    mean: pe_mean,
                    half_width_95: pe_hw,
                    n: 2 * n,
                    seed: cfg.seed,
                },
            })
        }
        SamplingMode::Natural => {
            let batch = run_batch(cfg, STREAM_NATURAL, None);
            let (mut n0, mut err0, mut err1) = (0u64, 0u64, 0u64);
            for o in &batch {
                let decoded_one = o.y >= u64::from(eta_for(cfg, o.rd));
                if o.bit == 0 {
                    n0 += 1;
                    err0 += u64::from(decoded_one);
                } else {
                    err1 += u64::from(!decoded_one);
                }
            }
            let n = cfg.realizations;
            let n1 = n as u64 - n0;
            let peb0 = (n0 > 0).then(|| McEstimate::bernoulli(err0, n0 as usize, cfg.seed));
            let peb1 = (n1 > 0).then(|| McEstimate::bernoulli(err1, n1 as usize, cfg.seed));
            let pe = McEstimate::bernoulli(err0 + err1, n, cfg.seed);
            let eta = match &cfg.threshold {
                ThresholdPolicy::Fixed(eta) => *eta,
                ThresholdPolicy::Adaptive(_) => 0,
            };
            Ok(McBer {
                result: BerResult {
                    peb0: peb0.as_ref().map_or(f64::NAN, |e| e.mean),
                    peb1: peb1.as_ref().map_or(f64::NAN, |e| e.mean),
                    pe: pe.mean,
                    eta,
                    method: BerMethod::MonteCarlo,
                },
                peb0,
                peb1,
                pe,
            })
        }
    }
}

/// Scores one pair of forced-bit batches against many thresholds at once
/// (the draws do not depend on the threshold).
pub fn estimate_ber_sweep(cfg: &SimConfig, etas: &[u32]) -> Result<Vec<McBer>> {
    cfg.validate()?;
    let mut ys0: Vec<u64> = run_batch(cfg, STREAM_FORCED0, Some(0))
        .into_iter()
        .map(|o| o.y)
        .collect();
    let mut ys1: Vec<u64> = run_batch(cfg, STREAM_FORCED1, Some(1))
        .into_iter()
        .map(|o| o.y)
        .collect();
    ys0.sort_unstable();
    ys1.sort_unstable();
    let n = cfg.realizations;
    let p = &cfg.params;
    Ok(etas
        .iter()
        .map(|&eta| {
            let cut = u64::from(eta);
            // errors given 0: y >= eta; errors given 1: y < eta
            let err0 = (n - ys0.partition_point(|&y| y < cut)) as u64;
            let err1 = ys1.partition_point(|&y| y < cut) as u64;
            let peb0 = McEstimate::bernoulli(err0, n, cfg.seed);
            let peb1 = McEstimate::bernoulli(err1, n, cfg.seed);
            let pe_mean = p.p0() * peb0.mean + p.p1 * peb1.mean;
            let pe_hw = (p.p0().powi(2) * peb0.half_width_95.powi(2)
                + p.p1.powi(2) * peb1.half_width_95.powi(2))
            .sqrt();
            McBer {
                result: BerResult {
                    peb0: peb0.mean,
                    peb1: peb1.mean,
                    pe: pe_mean,
                    eta,
                    method: BerMethod::MonteCarlo,
                },
                peb0: Some(peb0),
                peb1: Some(peb1),
                pe: McEstimate {
                    mean: pe_mean,
                    half_width_95: pe_hw,
                    n: 2 * n,
                    seed: cfg.seed,
                },
            }
        })
        .collect())
}

/// Mean absorbed-count estimates per component `(signal, isi, cci)`.
///
/// Components are drawn as independent Poisson counts from their partial
/// intensities; their sum matches the total count in distribution.
pub fn estimate_mean_counts(cfg: &SimConfig) -> Result<(McEstimate, McEstimate, McEstimate)> {
    cfg.validate()?;
    let sampler = DistanceSampler::build(&cfg.rd_dist);
    // (sum, sum of squares) per component, accumulated exactly in integers
    let sums = (0..cfg.realizations)
        .into_par_iter()
        .map(|i| {
            let mut rng = realization_rng(cfg.seed, STREAM_COUNTS, i);
            let parts = draw_intensity(cfg, &sampler, None, &mut rng);
            let ys = poisson_draw(parts.signal, &mut rng) as u128;
            let yi = poisson_draw(parts.isi, &mut rng) as u128;
            let yc = poisson_draw(parts.cci, &mut rng) as u128;
            [ys, ys * ys, yi, yi * yi, yc, yc * yc]
        })
        .reduce(
            || [0u128; 6],
            |mut acc, row| {
                for (a, r) in acc.iter_mut().zip(row) {
                    *a += r;
                }
                acc
            },
        );
    let n = cfg.realizations;
    Ok((
        McEstimate::from_sums(sums[0], sums[1], n, cfg.seed),
        McEstimate::from_sums(sums[2], sums[3], n, cfg.seed),
        McEstimate::from_sums(sums[4], sums[5], n, cfg.seed),
    ))
}
