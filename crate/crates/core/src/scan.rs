//! Frequency scans written as CSV.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::closedform::{FrequencyX, GaugeForms};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::format::{sci, write_atomic};
use crate::identities::linspace;
use crate::rabi::{beta_with, PhysicalConstants};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Column {
    F1,
    F2,
    Delta,
    Q,
    P,
    Beta,
}

impl Column {
    pub const REQUIRED: [Column; 3] = [Column::F1, Column::F2, Column::Delta];

    pub fn header(self) -> &'static str {
        match self {
            Column::F1 => "f1",
            Column::F2 => "f2",
            Column::Delta => "delta",
            Column::Q => "q",
            Column::P => "p",
            Column::Beta => "beta",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSpec {
    x_min: FrequencyX,
    x_max: FrequencyX,
    n_steps: usize,
    columns: Vec<Column>,
}

impl ScanSpec {
    /// `extra` may repeat or omit the required columns; the result always
    /// holds f1, f2, delta followed by the requested optional columns, in
    /// [`Column`] order.
    pub fn new(x_min: f64, x_max: f64, n_steps: usize, extra: &[Column]) -> Result<Self> {
        let x_min = FrequencyX::new(x_min)?;
        let x_max = FrequencyX::new(x_max)?;
        if x_min >= x_max {
            return Err(Error::Input(format!("x_min = {} must be below x_max = {}", x_min.value(), x_max.value())));
        }
        if n_steps < 2 {
            return Err(Error::Input(format!("a scan needs at least 2 steps, got {n_steps}")));
        }
        let mut columns: Vec<Column> = Column::REQUIRED.iter().chain(extra).copied().collect();
        columns.sort();
        columns.dedup();
        Ok(Self { x_min, x_max, n_steps, columns })
    }

    pub fn x_min(&self) -> FrequencyX {
        self.x_min
    }

    pub fn x_max(&self) -> FrequencyX {
        self.x_max
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn grid(&self) -> Vec<FrequencyX> {
        linspace(self.x_min.value(), self.x_max.value(), self.n_steps).expect("endpoints validated")
    }

    pub fn header(&self) -> String {
        std::iter::once("x").chain(self.columns.iter().map(|c| c.header())).collect::<Vec<_>>().join(",")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub x: f64,
    pub values: Vec<f64>,
    pub limit_path: bool,
}

pub fn evaluate(spec: &ScanSpec, forms: &GaugeForms, k: &PhysicalConstants, exec: Execution) -> Result<Vec<ScanRow>> {
    exec.try_map(&spec.grid(), |&x| {
        let g = forms.pair(x)?;
        let values = spec
            .columns
            .iter()
            .map(|c| {
                Ok(match c {
                    Column::F1 => g.f1,
                    Column::F2 => g.f2,
                    Column::Delta => g.delta,
                    Column::Q => g.q,
                    Column::P => g.p,
                    Column::Beta => beta_with(forms, x, k)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ScanRow { x: x.value(), values, limit_path: g.limit_path })
    })
}

pub fn to_csv(spec: &ScanSpec, rows: &[ScanRow]) -> String {
    let mut out = spec.header();
    out.push('\n');
    for row in rows {
        out.push_str(&sci(row.x));
        for v in &row.values {
            write!(out, ",{}", sci(*v)).expect("writing to a String cannot fail");
        }
        out.push('\n');
    }
    out
}

/// Evaluates every row first, then writes the file atomically; a failing
/// row leaves `path` untouched.
pub fn write_scan(
    spec: &ScanSpec,
    forms: &GaugeForms,
    k: &PhysicalConstants,
    exec: Execution,
    path: &Path,
) -> Result<Vec<ScanRow>> {
    let rows = evaluate(spec, forms, k, exec)?;
    write_atomic(path, to_csv(spec, &rows).as_bytes())?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::{delta_slope, X_RESONANCE};

    fn run(spec: &ScanSpec, exec: Execution) -> Vec<ScanRow> {
        evaluate(spec, &GaugeForms::default(), &PhysicalConstants::codata_2018(), exec).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(ScanSpec::new(0.2, 0.1, 10, &[]).is_err());
        assert!(ScanSpec::new(0.0, 0.1, 10, &[]).is_err());
        assert!(ScanSpec::new(0.1, 0.375, 10, &[]).is_err());
        assert!(ScanSpec::new(0.1, 0.2, 1, &[]).is_err());
        let s = ScanSpec::new(0.1, 0.2, 2, &[Column::Beta, Column::Q, Column::F1, Column::Q]).unwrap();
        assert_eq!(s.header(), "x,f1,f2,delta,q,beta");
    }

    #[test]
    fn small_scan_rows() {
        let spec = ScanSpec::new(0.15, 0.22, 8, &[]).unwrap();
        let rows = run(&spec, Execution::Sequential);
        assert_eq!(rows.len(), 8);
        assert!(rows.windows(2).all(|w| w[0].x < w[1].x));
        assert_eq!(rows[0].x, 0.15);
        assert_eq!(rows[7].x, 0.22);
        let csv = to_csv(&spec, &rows);
        assert_eq!(csv.lines().count(), 9);
        assert!(csv.starts_with("x,f1,f2,delta\n1.50000000000e-1,"));
    }

    #[test]
    fn delta_column_is_linear_and_changes_sign() {
        let spec = ScanSpec::new(0.01, 0.37, 200, &[]).unwrap();
        let rows = run(&spec, Execution::Parallel);
        for r in &rows {
            assert!((r.values[2] + delta_slope() * (r.x - X_RESONANCE)).abs() < 1e-9);
        }
        let flips: Vec<_> = rows.windows(2).filter(|w| w[0].values[2].signum() != w[1].values[2].signum()).collect();
        assert_eq!(flips.len(), 1);
        assert!(flips[0][0].x < X_RESONANCE && X_RESONANCE < flips[0][1].x);
    }

    #[test]
    fn parallel_output_is_identical() {
        let spec = ScanSpec::new(0.001, 0.37, 101, &[Column::Q, Column::P, Column::Beta]).unwrap();
        let a = to_csv(&spec, &run(&spec, Execution::Sequential));
        let b = to_csv(&spec, &run(&spec, Execution::Parallel));
        assert_eq!(a, b);
    }
}
