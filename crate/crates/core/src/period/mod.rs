//! The period function of the periodic orbits, its partial derivatives and its
//! closed-form limits on the boundary of the existence region.

pub mod chicone;
mod scan;
mod shooting;

pub use chicone::{chicone_witness, ChiconeWitness, DEFAULT_CHICONE_SAMPLES};
pub use scan::{
    monotonicity_scan, monotonicity_scan_with, MonotoneVerdict, MonotonicityTable, ScanAxis,
    ScanSample,
};
pub use shooting::period_by_shooting;

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Result, WaveError};
use crate::params::{ReducedParams, RegionClass};
use crate::quadrature::integrate_doubling;

/// Default absolute tolerance for [`period`].
pub const DEFAULT_PERIOD_TOL: f64 = 1e-12;

/// Period of an orbit in `z` units, with the quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodResult {
    #[serde(rename = "L")]
    pub period: f64,
    pub est_error: f64,
    pub nodes_used: usize,
}

/// Period of the orbit through `(C3, b)`.
///
/// With `phi = m + rho sin s` the half period becomes
/// `int_{-pi/2}^{pi/2} sqrt((C1 - phi)/(phi - phi_r)) ds`, an analytic
/// integrand, so Gauss-Legendre rules are doubled from 16 nodes until two
/// successive values agree to `tol`.
///
/// Besides interior points this also accepts the centre boundary (returning
/// the linearised period) and the `C3 = 0` edge (returning the period of the
/// peaked wave).
pub fn period(r: &ReducedParams, c3: f64, b: f64, tol: f64) -> Result<PeriodResult> {
    if !(tol > 0.0) {
        return Err(WaveError::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let shape = r.orbit_shape(c3, b)?;
    let q = integrate_doubling(
        -FRAC_PI_2,
        FRAC_PI_2,
        |s| shape.angle_integrand(s),
        0.5 * tol,
    )?;
    Ok(PeriodResult {
        period: 2.0 * q.value,
        est_error: 2.0 * q.est_error,
        nodes_used: q.nodes,
    })
}

/// Partial derivatives of the period with respect to `b` and `C3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodPartials {
    #[serde(rename = "dL_db")]
    pub d_b: f64,
    #[serde(rename = "dL_dC3")]
    pub d_c3: f64,
    /// Difference between the two Richardson levels for each derivative.
    pub spread_b: f64,
    pub spread_c3: f64,
}

/// Central differences with one Richardson step, at `h`, `h/2` and `h/4`.
/// Returns the finest extrapolated value and its distance to the coarser one.
fn richardson<F: Fn(f64) -> Result<f64>>(f: F, x: f64, h: f64) -> Result<(f64, f64)> {
    let central = |h: f64| -> Result<f64> { Ok((f(x + h)? - f(x - h)?) / (2.0 * h)) };
    let d1 = central(h)?;
    let d2 = central(0.5 * h)?;
    let d3 = central(0.25 * h)?;
    let r1 = (4.0 * d2 - d1) / 3.0;
    let r2 = (4.0 * d3 - d2) / 3.0;
    Ok((r2, (r2 - r1).abs()))
}

fn stencil_step<F: Fn(f64) -> bool>(inside: F, x: f64, h: f64, what: &str) -> Result<f64> {
    for step in [h, 0.1 * h] {
        if inside(x - step) && inside(x + step) {
            return Ok(step);
        }
    }
    Err(WaveError::StencilLeavesRegion(format!(
        "{what} stencil of width {h} around {x} is not interior"
    )))
}

/// `(dL/db, dL/dC3)` by Richardson-extrapolated central differences with step
/// `1e-5 max(1, |x|)`; the step is shrunk once if the stencil leaves the region.
pub fn period_partials(r: &ReducedParams, c3: f64, b: f64) -> Result<PeriodPartials> {
    if r.classify(c3, b) != RegionClass::InteriorPeriodic {
        return Err(WaveError::NoOrbit { c3, b });
    }
    let interior = |c: f64, bb: f64| r.classify(c, bb) == RegionClass::InteriorPeriodic;
    let tol = 1e-14;
    let hb = stencil_step(|x| interior(c3, x), b, 1e-5 * b.abs().max(1.0), "b")?;
    let hc = stencil_step(|x| interior(x, b), c3, 1e-5 * c3.abs().max(1.0), "C3")?;
    let (d_b, spread_b) = richardson(|x| Ok(period(r, c3, x, tol)?.period), b, hb)?;
    let (d_c3, spread_c3) = richardson(|x| Ok(period(r, x, b, tol)?.period), c3, hc)?;
    Ok(PeriodPartials {
        d_b,
        d_c3,
        spread_b,
        spread_c3,
    })
}

/// Threshold `b1` below which the period increases with `C3` at fixed `b`.
pub fn b1_threshold(r: &ReducedParams) -> f64 {
    let s6 = 6f64.sqrt();
    let (c1, c2) = (r.c1, r.c2);
    (-1.0 + s6 / 3.0) * c1 * c1 + (-1.5 + s6 / 3.0) * c1 * c2 + (-0.125 + s6 / 12.0) * c2 * c2
}

/// Squared linear frequency at the centre, computed two ways:
/// `C3/(C1 - phi2)^3 - 1` and `(3 phi2 - C1 + C2)/(C1 - phi2)`.
pub fn center_frequencies(r: &ReducedParams, c3: f64) -> Result<(f64, f64)> {
    let phi2 = r.critical_roots(c3)?.phi2;
    let gap = r.c1 - phi2;
    let from_level = c3 / gap.powi(3) - 1.0;
    let from_root = (3.0 * phi2 - r.c1 + r.c2) / gap;
    Ok((from_level, from_root))
}

/// Limit of the period at the centre boundary `b -> b_minus(C3)`: `2 pi / omega`.
pub fn center_limit_period(r: &ReducedParams, c3: f64) -> Result<f64> {
    let (w2_level, w2_root) = center_frequencies(r, c3)?;
    let phi2 = r.critical_roots(c3)?.phi2;
    let gap = r.c1 - phi2;
    // Both expressions lose accuracy as the centre merges with the saddle; the
    // allowance tracks their conditioning.
    let root_error = 16.0 * f64::EPSILON * (r.c1.abs() + r.c2.abs() + phi2.abs());
    let allowance = 1e-12 * (1.0 + w2_level.abs())
        + 3.0 * (1.0 + w2_level.abs()) * root_error / gap
        + 3.0 * root_error / gap;
    if (w2_level - w2_root).abs() > allowance {
        return Err(WaveError::NonConvergent(format!(
            "centre frequency formulas disagree: {w2_level} vs {w2_root}"
        )));
    }
    if !(w2_root > 0.0) {
        return Err(WaveError::OutOfRange(format!(
            "non-positive squared frequency {w2_root} at C3 = {c3}"
        )));
    }
    Ok(2.0 * PI / w2_root.sqrt())
}

/// Value of `b` on the `C3 = 0` edge for which the peaked wave has period `L`.
pub fn peaked_b_of_l(r: &ReducedParams, l: f64) -> Result<f64> {
    if !(l > 0.0) {
        return Err(WaveError::OutOfRange(format!(
            "period must be positive, got {l}"
        )));
    }
    let (c1, c2) = (r.c1, r.c2);
    let ch = (0.5 * l).cosh();
    Ok((c2 * c2 - 4.0 * c1 * c2) / 8.0 - (2.0 * c1 + c2).powi(2) / (8.0 * ch * ch))
}

/// Slope `db/dL` of [`peaked_b_of_l`].
pub fn peaked_db_dl(r: &ReducedParams, l: f64) -> f64 {
    let s = (2.0 * r.c1 + r.c2).powi(2);
    let h = 0.5 * l;
    s * h.sinh() / (8.0 * h.cosh().powi(3))
}

/// Inverse of [`peaked_b_of_l`]: `L = 2 asinh(sqrt((b - b_A1)/(b_A2 - b)))`.
pub fn peaked_l_of_b(r: &ReducedParams, b: f64) -> Result<f64> {
    let (c1, c2) = (r.c1, r.c2);
    let lo = -0.5 * c1 * c1 - c1 * c2;
    let hi = (c2 * c2 - 4.0 * c1 * c2) / 8.0;
    if !(b > lo && b < hi) {
        return Err(WaveError::OutOfRange(format!(
            "b = {b} is outside ({lo}, {hi})"
        )));
    }
    Ok(2.0 * ((b - lo) / (hi - b)).sqrt().asinh())
}
