//! Period by direct time integration of the wave equation, independent of the
//! quadrature route.

use ode_solvers::{Dop853, OutputType, System, Vector2};

use crate::error::{Result, WaveError};
use crate::params::{ReducedParams, RegionClass};

struct WaveSystem {
    c1: f64,
    c2: f64,
    b: f64,
    /// Set once the slope has become positive (past the trough).
    rising: bool,
    /// Stop when the slope turns negative again (back at the crest).
    watch: bool,
}

impl WaveSystem {
    fn accel(&self, phi: f64, slope: f64) -> f64 {
        (0.5 * slope * slope + (self.c1 - self.c2 - 1.5 * phi) * phi - self.b) / (self.c1 - phi)
    }
}

impl System<f64, Vector2<f64>> for WaveSystem {
    fn system(&self, _z: f64, y: &Vector2<f64>, dy: &mut Vector2<f64>) {
        dy[0] = y[1];
        dy[1] = self.accel(y[0], y[1]);
    }

    fn solout(&mut self, _z: f64, y: &Vector2<f64>, _dy: &Vector2<f64>) -> bool {
        if !self.watch {
            return false;
        }
        if y[1] > 0.0 {
            self.rising = true;
        }
        self.rising && y[1] <= 0.0
    }
}

fn integrate(
    sys: WaveSystem,
    z0: f64,
    z1: f64,
    y0: Vector2<f64>,
    rtol: f64,
) -> Result<(Vec<f64>, Vec<Vector2<f64>>)> {
    let mut solver = Dop853::from_param(
        sys,
        z0,
        z1,
        z1 - z0,
        y0,
        rtol,
        1e-15,
        0.9,
        0.0,
        0.333,
        6.0,
        (z1 - z0).abs(),
        0.0,
        1_000_000,
        1000,
        OutputType::Sparse,
    );
    solver
        .integrate()
        .map_err(|e| WaveError::IntegrationFailure(format!("{e:?}")))?;
    Ok((solver.x_out().clone(), solver.y_out().clone()))
}

/// Period of the orbit at `(C3, b)` found by integrating from the crest until
/// the slope returns to zero from above, then locating that zero by Newton
/// iteration on short re-integrations.
///
/// `z_max` bounds the search (it must exceed the period).
pub fn period_by_shooting(r: &ReducedParams, c3: f64, b: f64, z_max: f64) -> Result<f64> {
    if r.classify(c3, b) != RegionClass::InteriorPeriodic {
        return Err(WaveError::NoOrbit { c3, b });
    }
    let crest = r.turning_points(c3, b)?.phi_plus;
    let make = |watch: bool| WaveSystem {
        c1: r.c1,
        c2: r.c2,
        b,
        rising: false,
        watch,
    };
    let rtol = 1e-13;
    let (zs, ys) = integrate(make(true), 0.0, z_max, Vector2::new(crest, 0.0), rtol)?;
    let k = ys.len();
    if k < 2 || ys[k - 1][1] > 0.0 || !ys.iter().any(|y| y[1] > 0.0) {
        return Err(WaveError::NonConvergent(format!(
            "orbit did not close before z = {z_max}"
        )));
    }
    let (za, ya) = (zs[k - 2], ys[k - 2]);
    let sys = make(false);
    let mut dz = zs[k - 1] - za;
    for _ in 0..50 {
        let (_, y) = integrate(make(false), za, za + dz, ya, rtol)?;
        let end = y[y.len() - 1];
        let step = end[1] / sys.accel(end[0], end[1]);
        dz -= step;
        if step.abs() <= 1e-15 * (za + dz) {
            return Ok(za + dz);
        }
    }
    Err(WaveError::NonConvergent(
        "crest location did not converge".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::period::{period, DEFAULT_PERIOD_TOL};

    #[test]
    fn agrees_with_quadrature() {
        let r = ReducedParams::new(2.0, 1.0);
        for (c3, b) in [(2.0, -1.0), (3.0, -0.4), (0.5, -1.0)] {
            let quad = period(&r, c3, b, DEFAULT_PERIOD_TOL).unwrap().period;
            let shot = period_by_shooting(&r, c3, b, 4.0 * quad).unwrap();
            assert!((quad - shot).abs() <= 1e-9 * quad, "{quad} vs {shot}");
        }
    }

    #[test]
    fn short_window_fails() {
        let r = ReducedParams::new(2.0, 1.0);
        assert!(period_by_shooting(&r, 2.0, -1.0, 1.0).is_err());
    }
}
