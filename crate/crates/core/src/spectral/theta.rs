//! The shear index `theta` of the periodic kernel solutions of `L v = 0`.

use ode_solvers::{Dop853, OutputType, System, Vector4};

use crate::error::{Result, WaveError};
use crate::params::{ReducedParams, RegionClass};
use crate::period::period_partials;
use crate::profile::Profile;

/// The wave ODE coupled with the linearised equation: state `(phi, phi', v, v')`.
struct KernelSystem {
    c1: f64,
    c2: f64,
    b: f64,
}

impl KernelSystem {
    fn accel(&self, phi: f64, slope: f64) -> f64 {
        (0.5 * slope * slope + (self.c1 - self.c2 - 1.5 * phi) * phi - self.b) / (self.c1 - phi)
    }
}

impl System<f64, Vector4<f64>> for KernelSystem {
    fn system(&self, _z: f64, y: &Vector4<f64>, dy: &mut Vector4<f64>) {
        let (phi, slope, v, w) = (y[0], y[1], y[2], y[3]);
        let curvature = self.accel(phi, slope);
        dy[0] = slope;
        dy[1] = curvature;
        dy[2] = w;
        dy[3] = (slope * w + (self.c1 - self.c2 - 3.0 * phi + curvature) * v) / (self.c1 - phi);
    }
}

const THETA_RTOL: f64 = 1e-10;

/// Dop853 with step-wise (not interpolated) output, so the last stored state
/// is the one at `z_end` itself.
fn stepper(
    sys: KernelSystem,
    z_end: f64,
    y0: Vector4<f64>,
    rtol: f64,
) -> Dop853<f64, Vector4<f64>, KernelSystem> {
    Dop853::from_param(
        sys,
        0.0,
        z_end,
        z_end,
        y0,
        rtol,
        1e-14,
        0.9,
        0.0,
        0.333,
        6.0,
        z_end,
        0.0,
        100_000,
        1000,
        OutputType::Sparse,
    )
}

/// `theta = y1'(L)` where `y1` solves `L y = 0` with `y1(0) = 1`, `y1'(0) = 0`,
/// integrated from the crest over one period alongside the wave itself.
pub fn theta_index(p: &Profile) -> Result<f64> {
    if !p.is_smooth() {
        return Err(WaveError::PeakedProfile);
    }
    let r = &p.params;
    if r.classify(p.c3, p.b) != RegionClass::InteriorPeriodic {
        return Err(WaveError::NoOrbit { c3: p.c3, b: p.b });
    }
    let crest = r.turning_points(p.c3, p.b)?.phi_plus;
    let sys = KernelSystem {
        c1: r.c1,
        c2: r.c2,
        b: p.b,
    };
    let l = p.period_z;
    let y0 = Vector4::new(crest, 0.0, 1.0, 0.0);
    let mut solver = stepper(sys, l, y0, THETA_RTOL);
    solver
        .integrate()
        .map_err(|e| WaveError::IntegrationFailure(format!("{e:?}")))?;
    let (Some(&z_end), Some(y_end)) = (solver.x_out().last(), solver.y_out().last()) else {
        return Err(WaveError::IntegrationFailure("no output".into()));
    };
    if (z_end - l).abs() > 1e-9 * l {
        return Err(WaveError::IntegrationFailure(format!(
            "integration stopped at {z_end} before {l}"
        )));
    }
    Ok(y_end[3])
}

/// `theta = -(dL/dC3) / (dphi_plus/dC3) * phi''(0)` with the period slope
/// taken at fixed `b` by finite differences.
pub fn theta_from_period_slope(r: &ReducedParams, c3: f64, b: f64) -> Result<f64> {
    let partials = period_partials(r, c3, b)?;
    let crest = r.turning_points(c3, b)?.phi_plus;
    let (c1, c2) = (r.c1, r.c2);
    let q = crest * crest + c2 * crest + 2.0 * b + c1 * c2;
    // Derivative of the turning-point cubic; dphi_plus/dC3 is its reciprocal.
    let slope = -q + (c1 - crest) * (2.0 * crest + c2);
    let curvature = ((c1 - c2 - 1.5 * crest) * crest - b) / (c1 - crest);
    Ok(-partials.d_c3 * slope * curvature)
}
