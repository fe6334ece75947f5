//! Data behind the two figures: `H` and its remainder for the sphere and the torus.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::uniform_grid;
use crate::sphere::{h_s2_direct, REMAINDER_LIMIT};
use crate::torus::LatticeShellTable;

/// Right end of the sphere figure when none is given.
pub const FIG1_DEFAULT_A_MAX: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig1,
    Fig2,
}

impl std::str::FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(Figure::Fig1),
            "fig2" => Ok(Figure::Fig2),
            _ => Err(Error::InvalidParameter(format!("unknown figure {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureTable {
    pub columns: Vec<String>,
    /// `(name, value)` pairs written as `# name = value` lines.
    pub constants: Vec<(String, f64)>,
    pub rows: Vec<Vec<f64>>,
}

impl FigureTable {
    /// CSV with 17 significant digits and `.` as decimal separator.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (name, value) in &self.constants {
            let _ = writeln!(out, "# {name} = {value:.16e}");
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Row whose first column is closest to `a`.
    pub fn row_near(&self, a: f64) -> Option<&[f64]> {
        self.rows
            .iter()
            .min_by(|x, y| (x[0] - a).abs().total_cmp(&(y[0] - a).abs()))
            .map(Vec::as_slice)
    }
}

fn check(a_max: f64, step: f64, tol: f64) -> Result<()> {
    if a_max > 0.0 && step > 0.0 && step <= a_max && tol > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "need 0 < step <= a_max and tol > 0, got {a_max}, {step}, {tol}"
        )))
    }
}

/// Columns `a, H_S2, remainder_scaled` with `remainder_scaled = (H − 1 + 8/(3πa))a³`.
pub fn fig1(a_max: f64, step: f64, tol: f64) -> Result<FigureTable> {
    check(a_max, step, tol)?;
    // the scaled remainder loses a³ digits, so sum well below `tol`
    let rows = uniform_grid(a_max, step)
        .par_iter()
        .map(|&a| {
            let series_tol = (tol / a.max(1.0).powi(3)).max(1e-18);
            let h = h_s2_direct(a, series_tol)?.value;
            Ok(vec![a, h, (h - 1.0 + 8.0 / (3.0 * PI * a)) * a.powi(3)])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FigureTable {
        columns: vec!["a".into(), "H_S2".into(), "remainder_scaled".into()],
        constants: vec![
            ("remainder_limit_-64/(315pi)".into(), REMAINDER_LIMIT),
            ("bound".into(), 1.0),
        ],
        rows,
    })
}

/// Columns `a, H_T2, R` with `R` the Poisson remainder.
pub fn fig2(a_max: f64, step: f64, tol: f64) -> Result<FigureTable> {
    check(a_max, step, tol)?;
    let weight = a_max.powi(4).max(4.0 / (PI * PI) * a_max.powi(3));
    let table = LatticeShellTable::build(LatticeShellTable::required_norm(weight, tol))?;
    let rows = uniform_grid(a_max, step)
        .par_iter()
        .map(|&a| {
            let h = table.h_t2(a, tol)?.value;
            let r = table.remainder(a, tol)?.r;
            Ok(vec![a, h, r])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FigureTable {
        columns: vec!["a".into(), "H_T2".into(), "R".into()],
        constants: vec![("bound".into(), 1.0)],
        rows,
    })
}
