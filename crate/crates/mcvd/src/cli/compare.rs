//! Analytic-vs-Monte-Carlo sweep comparison: per-point z-scores at the
//! 3-sigma gate.

use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointStatus {
    Pass,
    Fail,
    /// Zero standard error: the z-score is undefined (flagged, non-fatal).
    Undefined,
}

#[derive(Debug, Clone)]
pub struct PointReport {
    pub x: f64,
    pub analytic: f64,
    pub mc: f64,
    pub se: f64,
    pub z: Option<f64>,
    pub status: PointStatus,
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub points: Vec<PointReport>,
}

impl CompareReport {
    pub fn counts(&self) -> (usize, usize, usize) {
        let mut pass = 0;
        let mut fail = 0;
        let mut undefined = 0;
        for p in &self.points {
            match p.status {
                PointStatus::Pass => pass += 1,
                PointStatus::Fail => fail += 1,
                PointStatus::Undefined => undefined += 1,
            }
        }
        (pass, fail, undefined)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for p in &self.points {
            let verdict = match p.status {
                PointStatus::Pass => "PASS",
                PointStatus::Fail => "FAIL",
                PointStatus::Undefined => "UNDEFINED",
            };
            let z =
                p.z.map(|z| format!("{z:+.3}"))
                    .unwrap_or_else(|| "n/a".into());
            out.push_str(&format!(
                "x={:<10} analytic={:<12.6e} mc={:<12.6e} se={:<10.4e} z={z:<8} {verdict}\n",
                p.x, p.analytic, p.mc, p.se
            ));
        }
        let (pass, fail, undefined) = self.counts();
        let gated = pass + fail;
        let rate = if gated > 0 {
            100.0 * pass as f64 / gated as f64
        } else {
            100.0
        };
        out.push_str(&format!(
            "summary: {pass}/{gated} pass ({rate:.1}%), {fail} fail, {undefined} undefined\n"
        ));
        out
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CompareError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    #[error("sweep grids differ at point {index}: {a} vs {b}")]
    GridMismatch { index: usize, a: f64, b: f64 },
    #[error("sweep lengths differ: {a} vs {b} points")]
    LengthMismatch { a: usize, b: usize },
}

struct SweepFile {
    xs: Vec<f64>,
    pe: Vec<f64>,
    se: Option<Vec<f64>>,
}

fn read_sweep(path: &Path) -> Result<SweepFile, CompareError> {
    let display = path.display().to_string();
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => CompareError::Io {
            path: display.clone(),
            source: std::io::Error::other(e.to_string()),
        },
        _ => CompareError::Format {
            path: display.clone(),
            message: e.to_string(),
        },
    })?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| CompareError::Format {
            path: display.clone(),
            message: e.to_string(),
        })?
        .iter()
        .map(str::to_owned)
        .collect();
    let pe_col = headers
        .iter()
        .position(|h| h == "pe")
        .ok_or_else(|| CompareError::Format {
            path: display.clone(),
            message: "no `pe` column".into(),
        })?;
    let se_col = headers.iter().position(|h| h == "se_pe");
    let mut xs = Vec::new();
    let mut pe = Vec::new();
    let mut se = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CompareError::Format {
            path: display.clone(),
            message: e.to_string(),
        })?;
        let parse = |idx: usize| -> Result<f64, CompareError> {
            record
                .get(idx)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| CompareError::Format {
                    path: display.clone(),
                    message: format!("row {}: column {idx} is not a number", i + 1),
                })
        };
        xs.push(parse(0)?);
        pe.push(parse(pe_col)?);
        if let Some(c) = se_col {
            se.push(parse(c)?);
        }
    }
    Ok(SweepFile {
        xs,
        pe,
        se: se_col.map(|_| se),
    })
}

/// Compares the `pe` column of an analytic sweep against a Monte-Carlo
/// sweep with a `se_pe` column, point by point at |z| <= 3.
pub fn compare_files(analytic: &Path, mc: &Path) -> Result<CompareReport, CompareError> {
    let a = read_sweep(analytic)?;
    let b = read_sweep(mc)?;
    if a.xs.len() != b.xs.len() {
        return Err(CompareError::LengthMismatch {
            a: a.xs.len(),
            b: b.xs.len(),
        });
    }
    for (i, (&xa, &xb)) in a.xs.iter().zip(&b.xs).enumerate() {
        if xa != xb {
            return Err(CompareError::GridMismatch {
                index: i,
                a: xa,
                b: xb,
            });
        }
    }
    let ses = b.se.unwrap_or_else(|| vec![0.0; b.xs.len()]);
    let points =
        a.xs.iter()
            .zip(&a.pe)
            .zip(b.pe.iter().zip(&ses))
            .map(|((&x, &pa), (&pm, &se))| {
                if se > 0.0 {
                    let z = (pa - pm) / se;
                    PointReport {
                        x,
                        analytic: pa,
                        mc: pm,
                        se,
                        z: Some(z),
                        status: if z.abs() <= 3.0 {
                            PointStatus::Pass
                        } else {
                            PointStatus::Fail
                        },
                    }
                } else {
                    PointReport {
                        x,
                        analytic: pa,
                        mc: pm,
                        se,
                        z: None,
                        status: PointStatus::Undefined,
                    }
                }
            })
            .collect();
    Ok(CompareReport { points })
}
