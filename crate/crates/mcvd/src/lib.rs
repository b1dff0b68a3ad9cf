//! Analytical performance of diffusive molecular communication with a
//! fully-absorbing spherical receiver and a Poisson field of interfering
//! transmitters, validated by an independent marked-PPP Monte-Carlo
//! simulator.
//!
//! The crate is organised around the quantities a link designer needs:
//!
//! - [`channel`] — hitting rate, cumulative absorption fraction (with and
//!   without molecular degradation) and per-slot channel taps of the
//!   absorbing-sphere diffusion channel.
//! - [`expectations`] — expected molecule counts at the receiver split into
//!   desired signal, inter-symbol interference (ISI) and co-channel
//!   interference (CCI), in steady and transient state.
//! - [`ber`] — analytical bit-error probability with and without ISI, for
//!   fixed and random transmitter distance, optimal detection thresholds and
//!   the adaptive-threshold table.
//! - [`simulator`] — Monte-Carlo ground truth: interferers sampled as a
//!   homogeneous PPP in a spherical shell, random per-slot bits, conditional
//!   Poisson absorbed counts, threshold detection, confidence intervals.
//! - [`mathkit`] — shared numerics: complete exponential Bell polynomials,
//!   weak compositions, erfc/erfcx, log-domain Poisson tails and adaptive
//!   semi-infinite radial quadrature.
//! - [`cli`] — batch front-end reading flat JSON experiment configs and
//!   emitting CSV/JSON sweep data, including figure presets.

pub mod ber;
pub mod channel;
pub mod cli;
pub mod expectations;
pub mod mathkit;
pub mod simulator;

pub use ber::{BerMethod, BerResult, DistanceDistribution, ThresholdTable};
pub use channel::{SlotResponse, SystemParams};
pub use expectations::ExpectationBreakdown;
pub use simulator::{McEstimate, SimConfig};

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument violated a mathematical or physical precondition.
    #[error("domain error: {0}")]
    Domain(String),
    /// Adaptive quadrature failed to reach the requested tolerance. The
    /// partial estimate and its error bound are carried for diagnostics.
    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
             (partial estimate {partial:e}, error bound {error:e})"
    )]
    QuadratureNonConvergence {
        partial: f64,
        error: f64,
        subdivisions: usize,
    },
    /// Steady-state CCI diverges without molecular degradation.
    #[error("expected CCI diverges at steady state for mu = 0; use the transient form")]
    CciDiverges,
    /// An ISI evaluation would enumerate more weak compositions than the
    /// configured budget allows.
    #[error(
        "composition enumeration needs {required} terms, exceeding the budget of {budget}; \
             reduce eta or the ISI memory L"
    )]
    CompositionBudget { required: u128, budget: u128 },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
