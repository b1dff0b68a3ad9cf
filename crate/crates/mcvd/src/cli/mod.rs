//! Batch front-end: flat JSON experiment configs in, CSV/JSON sweep data
//! out.
//!
//! Exit codes: 0 success, 2 config error, 3 numeric error (partial results
//! are still flushed, with an `error` column naming the failing points).

mod compare;
mod config;
mod output;
mod presets;

pub use compare::{compare_files, CompareError, CompareReport, PointStatus};
pub use config::{
    BerTarget, ExperimentConfig, FigureId, Mode, OutFormat, ResolvedRun, RunKind, Sweep, SweepVar,
};
pub use output::{labelled_path, Cell, Row, Table};

use crate::ber::{
    self, ber_isi_fixed, ber_no_isi_fixed, ber_no_isi_random, build_threshold_table,
    DistanceDistribution,
};
use crate::channel::SystemParams;
use crate::simulator::{estimate_ber, estimate_ber_sweep, SamplingMode, SimConfig};
use rayon::prelude::*;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub realizations: Option<usize>,
}

/// Executes a config file; returns the process exit code.
pub fn run(config_path: &Path, overrides: &Overrides) -> i32 {
    let text = match std::fs::read_to_string(config_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("config error: cannot read {}: {e}", config_path.display());
            return EXIT_CONFIG;
        }
    };
    let mut cfg: ExperimentConfig = match serde_json::from_str(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return EXIT_CONFIG;
        }
    };
    if let Some(seed) = overrides.seed {
        cfg.seed = Some(seed);
    }
    if let Some(realizations) = overrides.realizations {
        cfg.realizations = Some(realizations);
    }
    if let Some(out) = &overrides.out {
        cfg.output = Some(out.clone());
    }
    if let Err(e) = cfg.params().validate() {
        eprintln!("config error: {e}");
        return EXIT_CONFIG;
    }
    let runs = match config::resolve(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("config error: {e}");
            return EXIT_CONFIG;
        }
    };
    let Some(out_base) = cfg.output.clone() else {
        eprintln!("config error: no output path (set `output` in the config or pass --out)");
        return EXIT_CONFIG;
    };
    let format = cfg.format.unwrap_or_default();

    let mut exit = EXIT_OK;
    for run in &runs {
        let table = execute(run);
        let path = labelled_path(&out_base, &run.label);
        if table.any_error() {
            exit = EXIT_NUMERIC;
            eprintln!(
                "numeric error in at least one sweep point (see the error column in {})",
                path.display()
            );
        }
        if let Err(e) = table.write(&path, format) {
            eprintln!("cannot write {}: {e}", path.display());
            return EXIT_NUMERIC;
        }
        println!("wrote {}", path.display());
    }
    exit
}

/// Runs the comparison subcommand; returns the process exit code.
pub fn compare(analytic: &Path, mc: &Path) -> i32 {
    match compare_files(analytic, mc) {
        Ok(report) => {
            print!("{}", report.render());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("compare error: {e}");
            EXIT_CONFIG
        }
    }
}

/// Renders the preset listing.
pub fn presets_list() -> String {
    let mut out = String::from("available figure presets:\n");
    for id in FigureId::all() {
        out.push_str(&format!("  {:5} {}\n", id.name(), presets::describe(id)));
    }
    out.push_str(
        "run one with: {\"mode\": \"figure\", \"figure\": \"fig3\", \"output\": \"fig3.csv\"}\n",
    );
    out
}

fn apply_sweep(
    params: &SystemParams,
    target: &BerTarget,
    eta: u32,
    var: SweepVar,
    x: f64,
) -> (SystemParams, BerTarget, u32) {
    let mut p = *params;
    let mut t = target.clone();
    let mut e = eta;
    match var {
        SweepVar::Ts => p.ts = x,
        SweepVar::Rd => t = BerTarget::Fixed(x),
        SweepVar::Eta => e = x.round() as u32,
        SweepVar::Lambda => p.lambda = x,
        SweepVar::Mu => p.mu = x,
    }
    (p, t, e)
}

fn axis_cell(var: SweepVar, x: f64) -> Cell {
    match var {
        SweepVar::Eta => Cell::Int(x.round() as i64),
        _ => Cell::Float(x),
    }
}

fn err_row(var: SweepVar, x: f64, message: String) -> Row {
    Row {
        cells: vec![axis_cell(var, x)],
        error: Some(message),
    }
}

fn execute(run: &ResolvedRun) -> Table {
    match &run.kind {
        RunKind::Expectations { params, rd, sweep } => execute_expectations(params, *rd, sweep),
        RunKind::BerAnalytic {
            params,
            target,
            slots,
            eta,
            sweep,
        } => execute_ber_analytic(params, target, *slots, *eta, sweep),
        RunKind::BerMc {
            params,
            target,
            slots,
            eta,
            sweep,
            realizations,
            seed,
            r_max,
        } => execute_ber_mc(
            params,
            target,
            *slots,
            *eta,
            sweep,
            *realizations,
            *seed,
            *r_max,
        ),
        RunKind::ThresholdTable { params, b, c, step } => {
            execute_threshold_table(params, *b, *c, *step)
        }
    }
}

fn execute_expectations(params: &SystemParams, rd: f64, sweep: &Sweep) -> Table {
    let header = vec![
        sweep.var.column().to_string(),
        "e_s".into(),
        "e_i".into(),
        "e_c".into(),
        "e_t".into(),
    ];
    let rows = sweep
        .grid
        .par_iter()
        .map(|&x| {
            let mut p = *params;
            let mut point_rd = rd;
            match sweep.var {
                SweepVar::Ts => p.ts = x,
                SweepVar::Rd => point_rd = x,
                SweepVar::Lambda => p.lambda = x,
                SweepVar::Mu => p.mu = x,
                SweepVar::Eta => unreachable!("rejected at resolve time"),
            }
            match crate::expectations::expected_total(point_rd, &p) {
                Ok(b) => Row {
                    cells: vec![
                        Cell::Float(x),
                        Cell::Float(b.e_s),
                        Cell::Float(b.e_i),
                        Cell::Float(b.e_c),
                        Cell::Float(b.e_t),
                    ],
                    error: None,
                },
                Err(e) => err_row(sweep.var, x, e.to_string()),
            }
        })
        .collect();
    Table { header, rows }
}

fn ber_header(var: SweepVar, with_se: bool) -> Vec<String> {
    let mut h = vec![
        var.column().to_string(),
        "peb0".into(),
        "peb1".into(),
        "pe".into(),
    ];
    if with_se {
        h.push("se_pe".into());
    }
    h
}

fn ber_row(var: SweepVar, x: f64, r: &crate::ber::BerResult) -> Row {
    Row {
        cells: vec![
            axis_cell(var, x),
            Cell::Float(r.peb0),
            Cell::Float(r.peb1),
            Cell::Float(r.pe),
        ],
        error: None,
    }
}

fn execute_ber_analytic(
    params: &SystemParams,
    target: &BerTarget,
    slots: usize,
    eta: u32,
    sweep: &Sweep,
) -> Table {
    let header = ber_header(sweep.var, false);
    let rows: Vec<Row> = match (sweep.var, target) {
        // the field coefficients do not depend on eta (beyond length) or rd;
        // compute them once for the whole sweep
        (SweepVar::Eta, BerTarget::Fixed(rd)) => {
            let eta_max = sweep.grid.last().copied().unwrap_or(1.0).round() as u32;
            match eta_sweep_fixed(*rd, slots, eta_max, params, &sweep.grid) {
                Ok(rows) => rows,
                Err(e) => sweep
                    .grid
                    .iter()
                    .map(|&x| err_row(sweep.var, x, e.to_string()))
                    .collect(),
            }
        }
        (SweepVar::Eta, BerTarget::Uniform { b, c }) => {
            let eta_max = sweep.grid.last().copied().unwrap_or(1.0).round() as u32;
            let dist = DistanceDistribution::Uniform { b: *b, c: *c };
            match ber::ber_random_scan(&dist, eta_max, params) {
                Ok(results) => sweep
                    .grid
                    .iter()
                    .map(|&x| {
                        let eta = x.round() as u32;
                        ber_row(SweepVar::Eta, x, &results[eta as usize])
                    })
                    .collect(),
                Err(e) => sweep
                    .grid
                    .iter()
                    .map(|&x| err_row(sweep.var, x, e.to_string()))
                    .collect(),
            }
        }
        (SweepVar::Rd, _) => rd_sweep(slots, eta, params, &sweep.grid),
        _ => sweep
            .grid
            .par_iter()
            .map(|&x| {
                let (p, t, e) = apply_sweep(params, target, eta, sweep.var, x);
                let result = match (&t, slots) {
                    (BerTarget::Fixed(rd), 1) => ber_no_isi_fixed(*rd, e, &p),
                    (BerTarget::Fixed(rd), l) => ber_isi_fixed(*rd, e, l, &p),
                    (BerTarget::Uniform { b, c }, 1) => {
                        ber_no_isi_random(&DistanceDistribution::Uniform { b: *b, c: *c }, e, &p)
                    }
                    (BerTarget::Uniform { .. }, _) => Err(crate::Error::Domain(
                        "analytic ISI needs a fixed distance".into(),
                    )),
                };
                match result {
                    Ok(r) => ber_row(sweep.var, x, &r),
                    Err(err) => err_row(sweep.var, x, err.to_string()),
                }
            })
            .collect(),
    };
    Table { header, rows }
}

fn eta_sweep_fixed(
    rd: f64,
    slots: usize,
    eta_max: u32,
    params: &SystemParams,
    grid: &[f64],
) -> crate::Result<Vec<Row>> {
    let results = ber::ber_scan_fixed(rd, slots, eta_max, params)?;
    Ok(grid
        .iter()
        .map(|&x| {
            let eta = x.round() as u32;
            ber_row(SweepVar::Eta, x, &results[eta as usize])
        })
        .collect())
}

fn rd_sweep(slots: usize, eta: u32, params: &SystemParams, grid: &[f64]) -> Vec<Row> {
    match ber::ber_distance_sweep(grid, eta, slots, params) {
        Ok(results) => grid
            .iter()
            .zip(results)
            .map(|(&x, r)| match r {
                Ok(res) => ber_row(SweepVar::Rd, x, &res),
                Err(e) => err_row(SweepVar::Rd, x, e.to_string()),
            })
            .collect(),
        Err(e) => grid
            .iter()
            .map(|&x| err_row(SweepVar::Rd, x, e.to_string()))
            .collect(),
    }
}

#[allow(clippy::too_many_arguments)]
fn execute_ber_mc(
    params: &SystemParams,
    target: &BerTarget,
    slots: usize,
    eta: u32,
    sweep: &Sweep,
    realizations: usize,
    seed: u64,
    r_max: f64,
) -> Table {
    let header = ber_header(sweep.var, true);
    let make_cfg = |p: &SystemParams, t: &BerTarget, e: u32| -> SimConfig {
        let mut cfg = SimConfig::new(*p, t.distribution(), e);
        cfg.slots = slots;
        cfg.realizations = realizations;
        cfg.seed = seed;
        cfg.r_max = r_max;
        cfg
    };
    let mc_row = |x: f64, est: &crate::simulator::McBer| -> Row {
        Row {
            cells: vec![
                axis_cell(sweep.var, x),
                Cell::Float(est.result.peb0),
                Cell::Float(est.result.peb1),
                Cell::Float(est.result.pe),
                Cell::Float(est.pe.std_error()),
            ],
            error: None,
        }
    };
    let rows: Vec<Row> = if sweep.var == SweepVar::Eta {
        // one pair of forced-bit batches scores every threshold
        let etas: Vec<u32> = sweep.grid.iter().map(|&x| x.round() as u32).collect();
        let cfg = make_cfg(params, target, 0);
        match estimate_ber_sweep(&cfg, &etas) {
            Ok(ests) => sweep
                .grid
                .iter()
                .zip(&ests)
                .map(|(&x, est)| mc_row(x, est))
                .collect(),
            Err(e) => sweep
                .grid
                .iter()
                .map(|&x| err_row(sweep.var, x, e.to_string()))
                .collect(),
        }
    } else {
        sweep
            .grid
            .iter()
            .map(|&x| {
                let (p, t, e) = apply_sweep(params, target, eta, sweep.var, x);
                match estimate_ber(&make_cfg(&p, &t, e), SamplingMode::ForcedConditional) {
                    Ok(est) => mc_row(x, &est),
                    Err(err) => err_row(sweep.var, x, err.to_string()),
                }
            })
            .collect()
    };
    Table { header, rows }
}

fn execute_threshold_table(params: &SystemParams, b: f64, c: f64, step: f64) -> Table {
    let header = vec!["rd_um".into(), "eta_opt".into(), "pe_min".into()];
    match build_threshold_table(b, c, step, params) {
        Ok(table) => Table {
            header,
            rows: (0..table.rd_grid.len())
                .map(|i| Row {
                    cells: vec![
                        Cell::Float(table.rd_grid[i]),
                        Cell::Int(i64::from(table.eta_opt[i])),
                        Cell::Float(table.pe_min[i]),
                    ],
                    error: None,
                })
                .collect(),
        },
        Err(e) => Table {
            header,
            rows: vec![Row {
                cells: vec![Cell::Float(b)],
                error: Some(e.to_string()),
            }],
        },
    }
}
