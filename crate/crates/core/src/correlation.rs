use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ENTRY_TOL: f64 = 1e-12;
pub const ROW_SUM_TOL: f64 = 1e-10;

/// Conditional probabilities `p[i][j] = p(j | i)`: rows are inputs, columns outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Correlation {
    rows: Vec<Vec<f64>>,
}

impl Correlation {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::InvalidCorrelation("needs at least one input and one output".into()));
        }
        let n = rows[0].len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidCorrelation(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() || !(-ENTRY_TOL..=1.0 + ENTRY_TOL).contains(&v) {
                    return Err(Error::InvalidCorrelation(format!(
                        "entry p({}|{}) = {v} is not a probability",
                        j + 1,
                        i + 1
                    )));
                }
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidCorrelation(format!(
                    "row {} sums to {s}, expected 1",
                    i + 1
                )));
            }
        }
        Ok(Correlation { rows })
    }

    /// Row-major 2×2 correlation `(p11, p21; p12, p22)`.
    pub fn binary(p11: f64, p21: f64, p12: f64, p22: f64) -> Result<Self> {
        Self::new(vec![vec![p11, p21], vec![p12, p22]])
    }

    /// Parses `a,b,c,d` (row-major).
    pub fn parse_binary(text: &str) -> Result<Self> {
        let vals = text
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("correlation entry {s:?}: {e}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if vals.len() != 4 {
            return Err(Error::Parse(format!(
                "expected 4 comma-separated entries, got {}",
                vals.len()
            )));
        }
        Self::binary(vals[0], vals[1], vals[2], vals[3])
    }

    /// From Cartesian coordinates of a 2×2 correlation.
    pub fn from_xy(x: f64, y: f64) -> Result<Self> {
        Self::binary(
            (1.0 + x + y) / 2.0,
            (1.0 - x - y) / 2.0,
            (1.0 + x - y) / 2.0,
            (1.0 - x + y) / 2.0,
        )
    }

    pub fn inputs(&self) -> usize {
        self.rows.len()
    }

    pub fn outputs(&self) -> usize {
        self.rows[0].len()
    }

    pub fn is_binary(&self) -> bool {
        self.inputs() == 2 && self.outputs() == 2
    }

    pub fn require_binary(&self) -> Result<()> {
        if self.is_binary() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: 2,
                found: if self.inputs() != 2 { self.inputs() } else { self.outputs() },
            })
        }
    }

    /// `p(j | i)` with zero-based indices.
    pub fn get(&self, input: usize, output: usize) -> f64 {
        self.rows[input][output]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// `Σ_ij p(j|i) w_ij`.
    pub fn dot(&self, w: &[Vec<f64>]) -> f64 {
        self.rows
            .iter()
            .zip(w)
            .map(|(pr, wr)| pr.iter().zip(wr).map(|(a, b)| a * b).sum::<f64>())
            .sum()
    }

    /// `(x, y) = (p11 − p22, p11 − p12)` for a 2×2 correlation.
    pub fn xy(&self) -> (f64, f64) {
        let p11 = self.rows[0][0];
        let p22 = self.rows[1][1];
        let p12 = self.rows[1][0];
        (p11 - p22, p11 - p12)
    }
}

impl TryFrom<Vec<Vec<f64>>> for Correlation {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Correlation::new(rows)
    }
}

impl From<Correlation> for Vec<Vec<f64>> {
    fn from(c: Correlation) -> Self {
        c.rows
    }
}
