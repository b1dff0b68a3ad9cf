//! Distance distributions for the tagged transmitter.

use crate::channel::SystemParams;
use crate::mathkit::integrate;
use crate::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// Distribution of the tagged transmitter's distance from the receiver
/// centre, supported inside `(a, inf)`.
#[derive(Clone)]
pub enum DistanceDistribution {
    /// Point mass at a known distance (um).
    Fixed(f64),
    /// Uniform between `b` and `c` (um), `a < b < c`.
    Uniform { b: f64, c: f64 },
    /// Arbitrary density over a finite support; must integrate to one.
    Custom {
        density: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        support: (f64, f64),
    },
}

impl fmt::Debug for DistanceDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistanceDistribution::Fixed(rd) => write!(f, "Fixed({rd})"),
            DistanceDistribution::Uniform { b, c } => write!(f, "Uniform({b}, {c})"),
            DistanceDistribution::Custom { support, .. } => {
                write!(f, "Custom(support {support:?})")
            }
        }
    }
}

impl DistanceDistribution {
    /// Smallest and largest distances with non-zero density.
    pub fn support(&self) -> (f64, f64) {
        match self {
            DistanceDistribution::Fixed(rd) => (*rd, *rd),
            DistanceDistribution::Uniform { b, c } => (*b, *c),
            DistanceDistribution::Custom { support, .. } => *support,
        }
    }

    /// Density at `r` (a point mass reports `inf` at its atom).
    pub fn density(&self, r: f64) -> f64 {
        match self {
            DistanceDistribution::Fixed(rd) => {
                if r == *rd {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            DistanceDistribution::Uniform { b, c } => {
                if (*b..=*c).contains(&r) {
                    1.0 / (c - b)
                } else {
                    0.0
                }
            }
            DistanceDistribution::Custom { density, support } => {
                if (support.0..=support.1).contains(&r) {
                    density(r)
                } else {
                    0.0
                }
            }
        }
    }

    /// Checks the support lies outside the receiver and, for custom
    /// densities, that the density integrates to one within 1e-8.
    pub fn validate(&self, p: &SystemParams) -> Result<()> {
        let (lo, _hi) = self.support();
        if !(lo > p.a) || !lo.is_finite() {
            return Err(Error::Domain(format!(
                "distance support must start beyond the receiver radius {}, got {lo}",
                p.a
            )));
        }
        match self {
            DistanceDistribution::Fixed(_) => Ok(()),
            DistanceDistribution::Uniform { b, c } => {
                if c > b {
                    Ok(())
                } else {
                    Err(Error::Domain(format!(
                        "uniform distance needs b < c, got b = {b}, c = {c}"
                    )))
                }
            }
            DistanceDistribution::Custom { density, support } => {
                if !support.1.is_finite() || support.1 <= support.0 {
                    return Err(Error::Domain(format!(
                        "custom distance support must be a finite interval, got {support:?}"
                    )));
                }
                let density = Arc::clone(density);
                let mass = integrate(move |r| density(r), support.0, support.1, 1e-10)?;
                if (mass - 1.0).abs() <= 1e-8 {
                    Ok(())
                } else {
                    Err(Error::Domain(format!(
                        "custom distance density integrates to {mass}, expected 1 within 1e-8"
                    )))
                }
            }
        }
    }
}
