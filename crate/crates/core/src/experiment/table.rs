//! Aggregated sweep results and their CSV form.
//!
//! The CSV schema is `task,omega_il,layer,metric,mean,std,n,flags` with rows
//! sorted by that same key order. Means and standard deviations are printed
//! with 12 significant digits, so emitting, parsing, and re-emitting a table
//! is byte-stable.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Metric {
    Ase,
    Ud,
    Log10Kappa,
    TestMseLms,
    TestMseDirect,
}

impl Metric {
    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::Ase => "ase",
            Metric::Ud => "ud",
            Metric::Log10Kappa => "log10_kappa",
            Metric::TestMseLms => "test_mse_lms",
            Metric::TestMseDirect => "test_mse_direct",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ase" => Ok(Metric::Ase),
            "ud" => Ok(Metric::Ud),
            "log10_kappa" => Ok(Metric::Log10Kappa),
            "test_mse_lms" => Ok(Metric::TestMseLms),
            "test_mse_direct" => Ok(Metric::TestMseDirect),
            other => Err(Error::InvalidArgument(format!("unknown metric {other:?}"))),
        }
    }
}

/// One aggregated `(task, omega_il, layer, metric)` group.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub task: String,
    pub omega_il: f64,
    pub layer: usize,
    pub metric: Metric,
    pub mean: f64,
    pub std: f64,
    /// Number of realization records aggregated into this row.
    pub n: usize,
    /// Empty, or annotations such as `diverged:<count>` / `rank_deficient:<count>`.
    pub flags: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    /// Canonical row order: (task, omega_il, layer, metric name).
    pub fn sort(&mut self) {
        self.rows.sort_by(|a, b| {
            (a.task.as_str(), a.omega_il, a.layer, a.metric.as_str())
                .partial_cmp(&(b.task.as_str(), b.omega_il, b.layer, b.metric.as_str()))
                .expect("omega_il values are finite")
        });
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "task,omega_il,layer,metric,mean,std,n,flags")?;
        for row in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                row.task,
                row.omega_il,
                row.layer,
                row.metric.as_str(),
                fmt_sig12(row.mean),
                fmt_sig12(row.std),
                row.n,
                row.flags
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is ascii")
    }

    /// Looks up one row; means are the usual access pattern in analyses.
    pub fn row(&self, task: &str, omega_il: f64, layer: usize, metric: Metric) -> Option<&ResultRow> {
        self.rows.iter().find(|r| {
            r.task == task && r.omega_il == omega_il && r.layer == layer && r.metric == metric
        })
    }

    /// Parses a CSV produced by [`ResultTable::write_csv`].
    pub fn parse_csv(text: &str) -> Result<ResultTable> {
        let mut lines = text.lines();
        let header = lines.next().unwrap_or_default();
        if header != "task,omega_il,layer,metric,mean,std,n,flags" {
            return Err(Error::InvalidArgument(format!(
                "unexpected result header {header:?}"
            )));
        }
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 8 {
                return Err(Error::InvalidArgument(format!(
                    "row {}: expected 8 fields, got {}",
                    i + 2,
                    fields.len()
                )));
            }
            let parse_f64 = |s: &str| {
                s.parse::<f64>().map_err(|_| {
                    Error::InvalidArgument(format!("row {}: bad number {s:?}", i + 2))
                })
            };
            rows.push(ResultRow {
                task: fields[0].to_string(),
                omega_il: parse_f64(fields[1])?,
                layer: fields[2]
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("row {}: bad layer", i + 2)))?,
                metric: Metric::parse(fields[3])?,
                mean: parse_f64(fields[4])?,
                std: parse_f64(fields[5])?,
                n: fields[6]
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("row {}: bad n", i + 2)))?,
                flags: fields[7].to_string(),
            });
        }
        Ok(ResultTable { rows })
    }
}

/// Writes the table to `path` in the canonical CSV form.
pub fn emit_csv(table: &ResultTable, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    table.write_csv(&mut buf).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    std::fs::write(path, buf).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// 12 significant digits; non-finite values print as `inf`/`-inf`/`NaN`.
fn fmt_sig12(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// Arithmetic mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::EmptyGroup);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Ok((mean, var.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_std_examples() {
        assert_eq!(mean_std(&[4.25]).unwrap(), (4.25, 0.0));
        assert_eq!(mean_std(&[1.0, 3.0]).unwrap(), (2.0, 1.0));
        assert!(matches!(mean_std(&[]), Err(Error::EmptyGroup)));
    }

    #[test]
    fn empty_table_is_header_only() {
        let table = ResultTable::default();
        assert_eq!(
            table.to_csv_string(),
            "task,omega_il,layer,metric,mean,std,n,flags\n"
        );
    }

    #[test]
    fn roundtrip_preserves_rows() {
        let mut table = ResultTable {
            rows: vec![
                ResultRow {
                    task: "narma10".into(),
                    omega_il: 2.0,
                    layer: 3,
                    metric: Metric::Ase,
                    mean: -1.234567890123456,
                    std: 0.001953125,
                    n: 15,
                    flags: String::new(),
                },
                ResultRow {
                    task: "narma10".into(),
                    omega_il: 0.5,
                    layer: 1,
                    metric: Metric::TestMseLms,
                    mean: f64::INFINITY,
                    std: f64::NAN,
                    n: 15,
                    flags: "diverged:2".into(),
                },
            ],
        };
        table.sort();
        assert_eq!(table.rows[0].omega_il, 0.5);
        let text = table.to_csv_string();
        let parsed = ResultTable::parse_csv(&text).unwrap();
        assert_eq!(parsed.to_csv_string(), text);
        assert!(parsed.rows[0].mean.is_infinite());
        assert!(parsed.rows[0].std.is_nan());
        assert_eq!(parsed.rows[1].flags, "");
    }

    #[test]
    fn sort_orders_by_full_key() {
        let row = |omega: f64, layer: usize, metric: Metric| ResultRow {
            task: "narma10".into(),
            omega_il: omega,
            layer,
            metric,
            mean: 0.0,
            std: 0.0,
            n: 1,
            flags: String::new(),
        };
        let mut table = ResultTable {
            rows: vec![
                row(2.0, 1, Metric::Ase),
                row(0.5, 2, Metric::Ud),
                row(0.5, 2, Metric::Log10Kappa),
                row(0.5, 1, Metric::Ud),
            ],
        };
        table.sort();
        let key: Vec<(f64, usize, &str)> = table
            .rows
            .iter()
            .map(|r| (r.omega_il, r.layer, r.metric.as_str()))
            .collect();
        assert_eq!(
            key,
            vec![
                (0.5, 1, "ud"),
                (0.5, 2, "log10_kappa"),
                (0.5, 2, "ud"),
                (2.0, 1, "ase"),
            ]
        );
    }

    #[test]
    fn emit_writes_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        emit_csv(&ResultTable::default(), &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("task,omega_il"));
    }
}
