use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::curve::CurveReport;

/// Residuals below this are clamped before taking logs.
pub const RESIDUAL_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Band {
    pub n: usize,
    pub n_times_loss: f64,
    /// `n · std_error`.
    pub half_width: f64,
}

/// Diagnostic fit of a curve to `8d/n + C·e^(−c·n)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateSummary {
    pub n_min: usize,
    pub sup_n_times_loss: f64,
    /// Standard error of the row attaining the supremum, times its `n`.
    pub sup_half_width: f64,
    /// Least-squares slope of `log max(loss − 8d/n, floor)` against `n`;
    /// `−c` in the exponential term.
    pub slope: f64,
    pub intercept: f64,
    /// Rows whose residual was clamped to the floor.
    pub floored: usize,
    pub bands: Vec<Band>,
}

pub fn fit_rate_summary(report: &CurveReport, d: usize, n_min: usize) -> Result<RateSummary> {
    let rows: Vec<_> = report.rows.iter().filter(|r| r.n >= n_min).collect();
    if rows.len() < 4 {
        return Err(Error::Invalid(format!(
            "rate summary needs at least 4 grid points at n ≥ {n_min}, got {}",
            rows.len()
        )));
    }
    let bands: Vec<Band> = rows
        .iter()
        .map(|r| Band {
            n: r.n,
            n_times_loss: r.n as f64 * r.mean_loss,
            half_width: r.n as f64 * r.std_error,
        })
        .collect();
    let top = bands
        .iter()
        .max_by(|a, b| a.n_times_loss.total_cmp(&b.n_times_loss))
        .expect("nonempty");
    let mut floored = 0;
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| {
            let resid = r.mean_loss - 8.0 * d as f64 / r.n as f64;
            if resid <= RESIDUAL_FLOOR {
                floored += 1;
            }
            (r.n as f64, resid.max(RESIDUAL_FLOOR).ln())
        })
        .collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    Ok(RateSummary {
        n_min,
        sup_n_times_loss: top.n_times_loss,
        sup_half_width: top.half_width,
        slope,
        intercept: my - slope * mx,
        floored,
        bands,
    })
}
