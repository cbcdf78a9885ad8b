use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypothesis::chi2_sf;

/// How model mass outside the table range enters the expected counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TailPolicy {
    /// Expected count of a cell is `n * P(cell)`; mass outside the table is dropped.
    Truncate,
    /// The last row and column absorb all mass beyond the table, summed up to
    /// `horizon` on each axis, so the expected total is `n`.
    AbsorbTail { horizon: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GofResult {
    pub observed: Vec<Vec<u64>>,
    pub expected: Vec<Vec<f64>>,
    pub chi2: f64,
    pub df: u32,
    pub p_value: f64,
    /// Cells with zero expected count but positive observed count; left out of `chi2`.
    pub excluded_cells: Vec<(usize, usize)>,
}

/// Pearson chi-square of an observed contingency table against a model PMF.
pub fn chi_square_gof<F>(observed: &[Vec<u64>], model_pmf: F, n: u64, df: u32, tail: TailPolicy) -> Result<GofResult>
where
    F: Fn(u32, u32) -> f64,
{
    if df < 1 {
        return Err(Error::InvalidParameter("df must be >= 1".into()));
    }
    let rows = observed.len();
    let cols = observed.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 || observed.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidParameter("observed table must be non-empty and rectangular".into()));
    }
    let total: u64 = observed.iter().flatten().sum();
    if total != n {
        return Err(Error::InvalidParameter(format!("observed total {total} differs from n = {n}")));
    }
    let nf = n as f64;
    let mut expected = vec![vec![0.0; cols]; rows];
    match tail {
        TailPolicy::Truncate => {
            for (i, row) in expected.iter_mut().enumerate() {
                for (j, e) in row.iter_mut().enumerate() {
                    *e = nf * model_pmf(i as u32, j as u32);
                }
            }
        }
        TailPolicy::AbsorbTail { horizon } => {
            let hr = horizon.max(rows as u32 - 1);
            let hc = horizon.max(cols as u32 - 1);
            for i in 0..=hr {
                for j in 0..=hc {
                    let r = (i as usize).min(rows - 1);
                    let c = (j as usize).min(cols - 1);
                    expected[r][c] += nf * model_pmf(i, j);
                }
            }
        }
    }
    let mut chi2 = 0.0;
    let mut excluded_cells = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            let (o, e) = (observed[i][j] as f64, expected[i][j]);
            if e > 0.0 {
                chi2 += (o - e).powi(2) / e;
            } else if o > 0.0 {
                excluded_cells.push((i, j));
            }
        }
    }
    Ok(GofResult { observed: observed.to_vec(), expected, chi2, df, p_value: chi2_sf(chi2, df), excluded_cells })
}

/// One-way version over cells `0..observed.len()`.
pub fn chi_square_gof_1d<F>(observed: &[u64], model_pmf: F, n: u64, df: u32, tail: TailPolicy) -> Result<GofResult>
where
    F: Fn(u32) -> f64,
{
    let table: Vec<Vec<u64>> = observed.iter().map(|&o| vec![o]).collect();
    chi_square_gof(&table, |i, j| if j == 0 { model_pmf(i) } else { 0.0 }, n, df, tail)
}
