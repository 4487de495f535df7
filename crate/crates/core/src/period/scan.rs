//! Monotonicity scans of the period along one parameter.

use serde::{Deserialize, Serialize};

use super::{period, DEFAULT_PERIOD_TOL};
use crate::error::{Result, WaveError};
use crate::parallel::Execution;
use crate::params::{ReducedParams, RegionClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScanAxis {
    #[serde(rename = "b")]
    B,
    #[serde(rename = "C3")]
    C3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MonotoneVerdict {
    Increasing,
    Decreasing,
    SingleMax,
    Violated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSample {
    pub param: f64,
    #[serde(rename = "L")]
    pub period: f64,
    pub est_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityTable {
    pub axis: ScanAxis,
    /// The value held fixed: `C3` for a `b` scan, `b` for a `C3` scan.
    pub fixed: f64,
    pub samples: Vec<ScanSample>,
    pub verdict: MonotoneVerdict,
    /// Smallest ratio |difference| / noise over all successive differences.
    pub min_margin: f64,
}

/// Scan the period over `grid` with the default execution strategy.
pub fn monotonicity_scan(
    r: &ReducedParams,
    axis: ScanAxis,
    fixed: f64,
    grid: &[f64],
) -> Result<MonotonicityTable> {
    monotonicity_scan_with(Execution::default(), r, axis, fixed, grid)
}

/// Scan the period over `grid`. A difference between neighbours counts only if
/// it exceeds ten times the combined quadrature error of the two periods.
pub fn monotonicity_scan_with(
    exec: Execution,
    r: &ReducedParams,
    axis: ScanAxis,
    fixed: f64,
    grid: &[f64],
) -> Result<MonotonicityTable> {
    if grid.len() < 3 {
        return Err(WaveError::TooFewPoints(grid.len()));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(WaveError::InvalidParameter(
            "scan grid must be strictly increasing".into(),
        ));
    }
    let point = |x: f64| match axis {
        ScanAxis::B => (fixed, x),
        ScanAxis::C3 => (x, fixed),
    };
    for &x in grid {
        let (c3, b) = point(x);
        if r.classify(c3, b) != RegionClass::InteriorPeriodic {
            return Err(WaveError::NoOrbit { c3, b });
        }
    }
    let results = exec.map(grid, |&x| {
        let (c3, b) = point(x);
        period(r, c3, b, DEFAULT_PERIOD_TOL).map(|p| ScanSample {
            param: x,
            period: p.period,
            est_error: p.est_error,
        })
    });
    let samples = results.into_iter().collect::<Result<Vec<_>>>()?;
    let (verdict, min_margin) = classify_sequence(&samples);
    Ok(MonotonicityTable {
        axis,
        fixed,
        samples,
        verdict,
        min_margin,
    })
}

fn noise(s: &ScanSample) -> f64 {
    s.est_error.max(8.0 * f64::EPSILON * s.period.abs())
}

/// Maximum number of insignificant differences tolerated at the turnover of a
/// single maximum.
const TURNOVER_SLACK: usize = 2;

fn classify_sequence(samples: &[ScanSample]) -> (MonotoneVerdict, f64) {
    let mut signs = Vec::with_capacity(samples.len() - 1);
    let mut min_margin = f64::INFINITY;
    for w in samples.windows(2) {
        let d = w[1].period - w[0].period;
        let threshold = 10.0 * (noise(&w[0]) + noise(&w[1]));
        let margin = d.abs() / threshold;
        min_margin = min_margin.min(margin);
        signs.push(if margin > 1.0 { d.signum() as i8 } else { 0 });
    }
    let verdict = if signs.iter().all(|&s| s == 1) {
        MonotoneVerdict::Increasing
    } else if signs.iter().all(|&s| s == -1) {
        MonotoneVerdict::Decreasing
    } else {
        let rise = signs.iter().take_while(|&&s| s == 1).count();
        let flat = signs[rise..].iter().take_while(|&&s| s == 0).count();
        let fall = signs[rise + flat..]
            .iter()
            .take_while(|&&s| s == -1)
            .count();
        if rise > 0 && fall > 0 && flat <= TURNOVER_SLACK && rise + flat + fall == signs.len() {
            MonotoneVerdict::SingleMax
        } else {
            MonotoneVerdict::Violated
        }
    };
    (verdict, min_margin)
}
