//! Figure presets: ready-made runs reproducing the reference numerical
//! studies at desk scale. Multi-curve figures expand to one run (and one
//! output file) per curve.

use super::config::{BerTarget, ExperimentConfig, FigureId, ResolvedRun, RunKind, Sweep, SweepVar};
use crate::channel::SystemParams;

fn eta_grid(hi: u32) -> Vec<f64> {
    (1..=hi).map(f64::from).collect()
}

/// Human-readable descriptions for `presets list`.
pub fn describe(id: FigureId) -> &'static str {
    match id {
        FigureId::Fig3 => {
            "expected counts vs slot duration ts in [0.1, 10] s (mu=1, rd=10, lambda=1e-5)"
        }
        FigureId::Fig4 => {
            "expected counts vs transmitter distance rd in [4.1, 30] um (mu=1, lambda=1e-5)"
        }
        FigureId::Fig5 => {
            "analytic BER vs threshold, fixed rd in {8, 10, 12} um (mu=5, lambda=1e-5)"
        }
        FigureId::Fig6 => {
            "analytic BER vs threshold, rd uniform(4.1, 10) um, lambda in {1e-5, 1e-4} (mu=5)"
        }
        FigureId::Fig7 => {
            "adaptive-decoding threshold table on rd 4.1..10 um step 0.1 (mu=5), \
             lambda in {1e-5, 1e-4}"
        }
        FigureId::Fig8 => {
            "analytic BER vs distance with and without ISI (N=50, mu=1, eta=10, L=5), \
             lambda in {1e-5, 1e-4}"
        }
    }
}

/// Expands a figure into its runs. The config may override the seed,
/// realization count and physical parameters where it makes sense.
pub fn expand(id: FigureId, cfg: &ExperimentConfig) -> Vec<ResolvedRun> {
    let base = SystemParams::reference();
    match id {
        FigureId::Fig3 => {
            let params = SystemParams {
                mu: cfg.mu.unwrap_or(1.0),
                ..base
            };
            vec![ResolvedRun {
                label: String::new(),
                kind: RunKind::Expectations {
                    params,
                    rd: cfg.rd.unwrap_or(10.0),
                    sweep: Sweep {
                        var: SweepVar::Ts,
                        grid: vec![
                            0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 7.5, 10.0,
                        ],
                    },
                },
            }]
        }
        FigureId::Fig4 => {
            let params = SystemParams {
                mu: cfg.mu.unwrap_or(1.0),
                ..base
            };
            vec![ResolvedRun {
                label: String::new(),
                kind: RunKind::Expectations {
                    params,
                    rd: f64::NAN,
                    sweep: Sweep {
                        var: SweepVar::Rd,
                        grid: vec![4.1, 5.0, 6.0, 7.0, 8.0, 10.0, 12.0, 15.0, 20.0, 25.0, 30.0],
                    },
                },
            }]
        }
        FigureId::Fig5 => {
            let params = SystemParams {
                mu: cfg.mu.unwrap_or(5.0),
                ..base
            };
            [8.0, 10.0, 12.0]
                .iter()
                .map(|&rd| ResolvedRun {
                    label: format!("rd{rd:.0}"),
                    kind: RunKind::BerAnalytic {
                        params,
                        target: BerTarget::Fixed(rd),
                        slots: 1,
                        eta: 0,
                        sweep: Sweep {
                            var: SweepVar::Eta,
                            grid: eta_grid(30),
                        },
                    },
                })
                .collect()
        }
        FigureId::Fig6 => {
            let params = SystemParams {
                mu: cfg.mu.unwrap_or(5.0),
                ..base
            };
            [1e-5, 1e-4]
                .iter()
                .map(|&lambda| ResolvedRun {
                    label: format!("lam{lambda:e}"),
                    kind: RunKind::BerAnalytic {
                        params: SystemParams { lambda, ..params },
                        target: BerTarget::Uniform { b: 4.1, c: 10.0 },
                        slots: 1,
                        eta: 0,
                        sweep: Sweep {
                            var: SweepVar::Eta,
                            grid: eta_grid(30),
                        },
                    },
                })
                .collect()
        }
        FigureId::Fig7 => {
            let params = SystemParams {
                mu: cfg.mu.unwrap_or(5.0),
                ..base
            };
            [1e-5, 1e-4]
                .iter()
                .map(|&lambda| ResolvedRun {
                    label: format!("lam{lambda:e}"),
                    kind: RunKind::ThresholdTable {
                        params: SystemParams { lambda, ..params },
                        b: 4.1,
                        c: 10.0,
                        step: 0.1,
                    },
                })
                .collect()
        }
        FigureId::Fig8 => {
            let params = SystemParams {
                n: cfg.n.unwrap_or(50),
                mu: cfg.mu.unwrap_or(1.0),
                ..base
            };
            let grid: Vec<f64> = (2..=15).map(|i| params.a + i as f64).collect();
            let mut runs = Vec::new();
            for &lambda in &[1e-5, 1e-4] {
                for (suffix, slots) in [("isi", 5usize), ("noisi", 1usize)] {
                    runs.push(ResolvedRun {
                        label: format!("lam{lambda:e}_{suffix}"),
                        kind: RunKind::BerAnalytic {
                            params: SystemParams { lambda, ..params },
                            target: BerTarget::Fixed(f64::NAN),
                            slots,
                            eta: cfg.eta.unwrap_or(10),
                            sweep: Sweep {
                                var: SweepVar::Rd,
                                grid: grid.clone(),
                            },
                        },
                    });
                }
            }
            runs
        }
    }
}
