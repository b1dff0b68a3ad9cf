//! Flat JSON experiment configuration and its resolution into runs.

use crate::ber::DistanceDistribution;
use crate::channel::SystemParams;
use serde::Deserialize;
use std::path::PathBuf;

/// Experiment mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Expectations,
    BerAnalytic,
    BerMc,
    ThresholdTable,
    Figure,
}

/// Figure preset identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
}

impl FigureId {
    pub fn all() -> [FigureId; 6] {
        [
            FigureId::Fig3,
            FigureId::Fig4,
            FigureId::Fig5,
            FigureId::Fig6,
            FigureId::Fig7,
            FigureId::Fig8,
        ]
    }

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7 => "fig7",
            FigureId::Fig8 => "fig8",
        }
    }
}

/// Swept axis variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVar {
    Ts,
    Rd,
    Eta,
    Lambda,
    Mu,
}

impl SweepVar {
    /// Units-suffixed CSV column name for the sweep axis.
    pub fn column(self) -> &'static str {
        match self {
            SweepVar::Ts => "ts_s",
            SweepVar::Rd => "rd_um",
            SweepVar::Eta => "eta",
            SweepVar::Lambda => "lambda_per_um3",
            SweepVar::Mu => "mu_per_s",
        }
    }
}

/// Output serialization format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutFormat {
    #[default]
    Csv,
    Json,
}

/// The flat on-disk config. Unknown keys are rejected with the offending
/// key named in the error.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    /// Required when `mode = "figure"`.
    pub figure: Option<FigureId>,

    // physical parameters; unset fields take the reference values
    pub d: Option<f64>,
    pub mu: Option<f64>,
    pub a: Option<f64>,
    pub n: Option<u32>,
    pub ts: Option<f64>,
    pub lambda: Option<f64>,
    pub p1: Option<f64>,

    /// Fixed tagged-transmitter distance, um.
    pub rd: Option<f64>,
    /// Uniformly distributed distance `[b, c]`, um (mutually exclusive
    /// with `rd`).
    pub rd_uniform: Option<[f64; 2]>,

    pub eta: Option<u32>,
    /// Analytic ISI memory `L` in slots; 1 (default) means no ISI.
    pub isi_slots: Option<usize>,
    /// Simulated ISI memory; defaults to `isi_slots`.
    pub sim_slots: Option<usize>,

    pub sweep_var: Option<SweepVar>,
    pub sweep_grid: Option<Vec<f64>>,

    pub output: Option<PathBuf>,
    pub format: Option<OutFormat>,
    pub seed: Option<u64>,
    pub realizations: Option<usize>,
    pub r_max: Option<f64>,

    // threshold_table mode grid
    pub rd_min: Option<f64>,
    pub rd_max: Option<f64>,
    pub rd_step: Option<f64>,
}

impl ExperimentConfig {
    pub fn params(&self) -> SystemParams {
        let d = SystemParams::reference();
        SystemParams {
            d: self.d.unwrap_or(d.d),
            mu: self.mu.unwrap_or(d.mu),
            a: self.a.unwrap_or(d.a),
            n: self.n.unwrap_or(d.n),
            ts: self.ts.unwrap_or(d.ts),
            lambda: self.lambda.unwrap_or(d.lambda),
            p1: self.p1.unwrap_or(d.p1),
        }
    }
}

/// One materialised computation producing one output file.
#[derive(Debug, Clone)]
pub struct ResolvedRun {
    /// Output-file suffix distinguishing sibling runs of one figure.
    pub label: String,
    pub kind: RunKind,
}

/// What the tagged transmitter's distance is for a BER run.
#[derive(Debug, Clone)]
pub enum BerTarget {
    Fixed(f64),
    Uniform { b: f64, c: f64 },
}

impl BerTarget {
    pub fn distribution(&self) -> DistanceDistribution {
        match self {
            BerTarget::Fixed(rd) => DistanceDistribution::Fixed(*rd),
            BerTarget::Uniform { b, c } => DistanceDistribution::Uniform { b: *b, c: *c },
        }
    }
}

#[derive(Debug, Clone)]
pub struct Sweep {
    pub var: SweepVar,
    pub grid: Vec<f64>,
}

#[derive(Debug, Clone)]
pub enum RunKind {
    Expectations {
        params: SystemParams,
        rd: f64,
        sweep: Sweep,
    },
    BerAnalytic {
        params: SystemParams,
        target: BerTarget,
        slots: usize,
        eta: u32,
        sweep: Sweep,
    },
    BerMc {
        params: SystemParams,
        target: BerTarget,
        slots: usize,
        eta: u32,
        sweep: Sweep,
        realizations: usize,
        seed: u64,
        r_max: f64,
    },
    ThresholdTable {
        params: SystemParams,
        b: f64,
        c: f64,
        step: f64,
    },
}

/// Config-level error: maps to exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

fn require<T>(v: Option<T>, what: &str) -> Result<T, ConfigError> {
    v.ok_or_else(|| ConfigError(format!("missing required field `{what}` for this mode")))
}

fn validated_sweep(cfg: &ExperimentConfig) -> Result<Sweep, ConfigError> {
    let var = require(cfg.sweep_var, "sweep_var")?;
    let grid = require(cfg.sweep_grid.clone(), "sweep_grid")?;
    if grid.is_empty() {
        return Err(ConfigError("sweep_grid must be non-empty".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ConfigError("sweep_grid must be strictly ascending".into()));
    }
    Ok(Sweep { var, grid })
}

fn ber_target(cfg: &ExperimentConfig, sweep: &Sweep) -> Result<BerTarget, ConfigError> {
    match (cfg.rd, cfg.rd_uniform) {
        (Some(_), Some(_)) => Err(ConfigError(
            "`rd` and `rd_uniform` are mutually exclusive".into(),
        )),
        (Some(rd), None) => Ok(BerTarget::Fixed(rd)),
        (None, Some([b, c])) => {
            if sweep.var == SweepVar::Rd {
                Err(ConfigError(
                    "cannot sweep `rd` while `rd_uniform` is set".into(),
                ))
            } else {
                Ok(BerTarget::Uniform { b, c })
            }
        }
        (None, None) => {
            if sweep.var == SweepVar::Rd {
                // the sweep supplies the distance
                Ok(BerTarget::Fixed(f64::NAN))
            } else {
                Err(ConfigError("set `rd` or `rd_uniform`".into()))
            }
        }
    }
}

/// Expands a parsed config into concrete runs (several for figure presets).
pub fn resolve(cfg: &ExperimentConfig) -> Result<Vec<ResolvedRun>, ConfigError> {
    match cfg.mode {
        Mode::Figure => {
            let id = require(cfg.figure, "figure")?;
            Ok(super::presets::expand(id, cfg))
        }
        Mode::Expectations => {
            let sweep = validated_sweep(cfg)?;
            if sweep.var == SweepVar::Eta {
                return Err(ConfigError(
                    "expectations mode has no `eta` axis to sweep".into(),
                ));
            }
            let rd = if sweep.var == SweepVar::Rd {
                f64::NAN
            } else {
                require(cfg.rd, "rd")?
            };
            Ok(vec![ResolvedRun {
                label: String::new(),
                kind: RunKind::Expectations {
                    params: cfg.params(),
                    rd,
                    sweep,
                },
            }])
        }
        Mode::BerAnalytic => {
            let sweep = validated_sweep(cfg)?;
            let target = ber_target(cfg, &sweep)?;
            let slots = cfg.isi_slots.unwrap_or(1);
            if slots > 1 && matches!(target, BerTarget::Uniform { .. }) {
                return Err(ConfigError(
                    "analytic BER with ISI is available for fixed `rd` only".into(),
                ));
            }
            let eta = if sweep.var == SweepVar::Eta {
                0
            } else {
                require(cfg.eta, "eta")?
            };
            Ok(vec![ResolvedRun {
                label: String::new(),
                kind: RunKind::BerAnalytic {
                    params: cfg.params(),
                    target,
                    slots,
                    eta,
                    sweep,
                },
            }])
        }
        Mode::BerMc => {
            let sweep = validated_sweep(cfg)?;
            let target = ber_target(cfg, &sweep)?;
            let slots = cfg.sim_slots.or(cfg.isi_slots).unwrap_or(1);
            let eta = if sweep.var == SweepVar::Eta {
                0
            } else {
                require(cfg.eta, "eta")?
            };
            Ok(vec![ResolvedRun {
                label: String::new(),
                kind: RunKind::BerMc {
                    params: cfg.params(),
                    target,
                    slots,
                    eta,
                    sweep,
                    realizations: cfg.realizations.unwrap_or(10_000),
                    seed: cfg.seed.unwrap_or(0),
                    r_max: cfg.r_max.unwrap_or(150.0),
                },
            }])
        }
        Mode::ThresholdTable => Ok(vec![ResolvedRun {
            label: String::new(),
            kind: RunKind::ThresholdTable {
                params: cfg.params(),
                b: require(cfg.rd_min, "rd_min")?,
                c: require(cfg.rd_max, "rd_max")?,
                step: require(cfg.rd_step, "rd_step")?,
            },
        }]),
    }
}
