//! Shared numerics: special functions, Bell-polynomial combinatorics, weak
//! compositions and adaptive radial quadrature.
//!
//! Everything here is a pure function of its inputs and safe to call from
//! multiple threads.

mod bell;
mod compositions;
mod quad;
mod special;

pub use bell::{bell_sequence, log_bell_sequence};
pub use compositions::{weak_composition_count, weak_compositions, WeakComposition};
pub use quad::{integrate, integrate_radial, DEFAULT_QUAD_TOL};
pub use special::{erf, erfc, erfcx, factorial, ln_factorial, ln_gamma, poisson_cdf};
