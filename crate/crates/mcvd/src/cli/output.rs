//! Sweep-result tables and their CSV/JSON serialization.
//!
//! Floats are written with 17 significant digits so that files round-trip
//! exactly; integer-valued columns (thresholds) stay plain integers.

use super::config::OutFormat;
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Int(v) => serde_json::Value::from(*v),
            Cell::Float(v) => serde_json::Value::from(*v),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Row {
    pub cells: Vec<Cell>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Row>,
}

impl Table {
    pub fn any_error(&self) -> bool {
        self.rows.iter().any(|r| r.error.is_some())
    }

    /// Writes the table. On clean runs the header is exactly the per-mode
    /// contract; when any row failed, a trailing `error` column carries the
    /// message and the numeric cells of failed rows stay empty.
    pub fn write(&self, path: &Path, format: OutFormat) -> std::io::Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(file);
        match format {
            OutFormat::Csv => self.write_csv(&mut w),
            OutFormat::Json => self.write_json(&mut w),
        }
    }

    fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        let with_error = self.any_error();
        let mut header = self.header.join(",");
        if with_error {
            header.push_str(",error");
        }
        writeln!(w, "{header}")?;
        for row in &self.rows {
            let mut cols: Vec<String> = row.cells.iter().map(Cell::render).collect();
            while cols.len() < self.header.len() {
                cols.push(String::new());
            }
            if with_error {
                cols.push(row.error.clone().unwrap_or_default().replace(',', ";"));
            }
            writeln!(w, "{}", cols.join(","))?;
        }
        Ok(())
    }

    fn write_json(&self, w: &mut impl Write) -> std::io::Result<()> {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = serde_json::Map::new();
                for (name, cell) in self.header.iter().zip(&row.cells) {
                    obj.insert(name.clone(), cell.json());
                }
                if let Some(err) = &row.error {
                    obj.insert("error".into(), serde_json::Value::from(err.clone()));
                }
                serde_json::Value::Object(obj)
            })
            .collect();
        let doc = serde_json::json!({ "rows": rows });
        writeln!(w, "{}", serde_json::to_string_pretty(&doc)?)
    }
}

/// Inserts a run label before the file extension:
/// `fig5.csv` + `rd8` -> `fig5_rd8.csv`.
pub fn labelled_path(base: &Path, label: &str) -> std::path::PathBuf {
    if label.is_empty() {
        return base.to_path_buf();
    }
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let ext = base.extension().and_then(|s| s.to_str());
    let name = match ext {
        Some(ext) => format!("{stem}_{label}.{ext}"),
        None => format!("{stem}_{label}"),
    };
    base.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_cells_carry_17_significant_digits() {
        let s = Cell::Float(std::f64::consts::PI).render();
        assert_eq!(s, "3.1415926535897931e0");
        let back: f64 = s.parse().unwrap();
        assert_eq!(back, std::f64::consts::PI);
    }

    #[test]
    fn label_insertion() {
        assert_eq!(
            labelled_path(Path::new("out/fig5.csv"), "rd8"),
            Path::new("out/fig5_rd8.csv")
        );
        assert_eq!(
            labelled_path(Path::new("fig5.csv"), ""),
            Path::new("fig5.csv")
        );
    }

    #[test]
    fn csv_error_column_only_when_needed() {
        let clean = Table {
            header: vec!["x".into(), "y".into()],
            rows: vec![Row {
                cells: vec![Cell::Int(1), Cell::Float(2.0)],
                error: None,
            }],
        };
        let mut buf = Vec::new();
        clean.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x,y\n"));

        let dirty = Table {
            header: vec!["x".into(), "y".into()],
            rows: vec![Row {
                cells: vec![Cell::Int(1)],
                error: Some("boom".into()),
            }],
        };
        let mut buf = Vec::new();
        dirty.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x,y,error\n"));
        assert!(text.contains("1,,boom"));
    }
}
