//! Sampled wave profiles on a uniform grid, closed-form special profiles,
//! conserved quantities and residual checks.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WaveError};
use crate::fourier;
use crate::params::{OrbitShape, PhysicalParams, ReducedParams, RegionClass};
use crate::period::{center_limit_period, peaked_b_of_l, peaked_l_of_b, period};
use crate::quadrature::integrate_adaptive;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Numeric,
    PeakedClosedForm,
    Constant,
}

/// One period of a travelling-wave profile sampled at `z_j = j * period_z / n`,
/// with the crest at `z = 0`. Derivatives are in `z` units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub params: ReducedParams,
    #[serde(rename = "C3")]
    pub c3: f64,
    pub b: f64,
    pub period_z: f64,
    pub grid_n: usize,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
    pub provenance: Provenance,
}

impl Profile {
    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    pub fn dz(&self) -> f64 {
        self.period_z / self.len() as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        let dz = self.dz();
        (0..self.len()).map(|j| j as f64 * dz).collect()
    }

    pub fn is_smooth(&self) -> bool {
        self.provenance != Provenance::PeakedClosedForm
    }

    /// Second derivative: exact for the peaked family (away from the crest),
    /// spectral otherwise.
    pub fn ddphi(&self) -> Vec<f64> {
        match self.provenance {
            Provenance::PeakedClosedForm => {
                self.phi.iter().map(|p| p + 0.5 * self.params.c2).collect()
            }
            Provenance::Constant => vec![0.0; self.len()],
            Provenance::Numeric => fourier::second_derivative(&self.phi, self.period_z),
        }
    }

    /// Rectangle-rule integral over one period (spectrally accurate for smooth
    /// periodic integrands).
    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().sum::<f64>() * self.dz()
    }
}

fn check_grid(n: usize) -> Result<()> {
    if n < 16 || !n.is_multiple_of(2) {
        return Err(WaveError::InvalidParameter(format!(
            "grid size must be even and at least 16, got {n}"
        )));
    }
    Ok(())
}

/// Profile of the wave at `(C3, b)` on `n` uniform points.
///
/// Interior points are solved numerically; the centre boundary gives the
/// constant profile with the linearised period; the `C3 = 0` edge gives the
/// closed-form peaked wave.
pub fn solve_profile(r: &ReducedParams, c3: f64, b: f64, n: usize) -> Result<Profile> {
    check_grid(n)?;
    match r.classify(c3, b) {
        RegionClass::InteriorPeriodic => numeric_profile(r, c3, b, n),
        RegionClass::BoundaryCenter if c3 > 0.0 => {
            let phi2 = r.critical_roots(c3)?.phi2;
            Ok(Profile {
                params: *r,
                c3,
                b,
                period_z: center_limit_period(r, c3)?,
                grid_n: n,
                phi: vec![phi2; n],
                dphi: vec![0.0; n],
                provenance: Provenance::Constant,
            })
        }
        RegionClass::BoundaryPeaked => peaked_profile(r, peaked_l_of_b(r, b)?, n),
        _ => Err(WaveError::NoOrbit { c3, b }),
    }
}

/// Angles `s_j` with `z(s_j) = j * step`, where `z(s) = int_s^{pi/2} g`.
fn invert_half_period(shape: &OrbitShape, half_n: usize, step: f64) -> Result<Vec<f64>> {
    let g = |s: f64| shape.angle_integrand(s);
    let mut angles = Vec::with_capacity(half_n + 1);
    angles.push(FRAC_PI_2);
    let mut prev = FRAC_PI_2;
    for _ in 1..half_n {
        let mut lo = -FRAC_PI_2;
        let mut hi = prev;
        let excess = |s: f64| integrate_adaptive(s, prev, &g, 1e-15) - step;
        let gp = g(prev);
        let mut s = if gp > 0.0 {
            (prev - step / gp).max(lo)
        } else {
            0.5 * (lo + hi)
        };
        let mut converged = false;
        for _ in 0..100 {
            let e = excess(s);
            if e.abs() <= 1e-16 * step.max(1.0) {
                converged = true;
                break;
            }
            if e < 0.0 {
                hi = s;
            } else {
                lo = s;
            }
            let gs = g(s);
            let mut next = if gs > 0.0 { s + e / gs } else { f64::NAN };
            if !(next >= lo && next <= hi) {
                next = 0.5 * (lo + hi);
            }
            let moved = (next - s).abs();
            s = next;
            if moved <= 4.0 * f64::EPSILON || hi - lo <= 4.0 * f64::EPSILON {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(WaveError::NonConvergent(
                "profile inversion did not converge".into(),
            ));
        }
        angles.push(s);
        prev = s;
    }
    angles.push(-FRAC_PI_2);
    Ok(angles)
}

fn numeric_profile(r: &ReducedParams, c3: f64, b: f64, n: usize) -> Result<Profile> {
    let shape = r.orbit_shape(c3, b)?;
    let l = period(r, c3, b, 1e-13)?.period;
    let half = n / 2;
    let angles = invert_half_period(&shape, half, l / n as f64)?;
    let (m, rho) = (shape.mid(), shape.radius());
    let mut phi = vec![0.0; n];
    let mut dphi = vec![0.0; n];
    for (j, &s) in angles.iter().enumerate() {
        phi[j] = m + rho * s.sin();
        if j > 0 && j < half {
            // dphi = -sqrt(2 (b - U)) = -rho |cos s| / g(s) on the descending half.
            dphi[j] = -rho * s.cos() / shape.angle_integrand(s);
        }
    }
    phi[0] = shape.phi_plus;
    phi[half] = shape.phi_minus;
    for j in 1..half {
        phi[n - j] = phi[j];
        dphi[n - j] = -dphi[j];
    }
    Ok(Profile {
        params: *r,
        c3,
        b,
        period_z: l,
        grid_n: n,
        phi,
        dphi,
        provenance: Provenance::Numeric,
    })
}

/// Closed-form peaked wave of period `L` on the `C3 = 0` edge:
/// `phi(z) = (C1 + C2/2) cosh(L/2 - z)/cosh(L/2) - C2/2` on `[0, L)`.
/// The stored slope at the crest is the mean of the one-sided slopes (zero).
pub fn peaked_profile(r: &ReducedParams, l: f64, n: usize) -> Result<Profile> {
    check_grid(n)?;
    let b = peaked_b_of_l(r, l)?;
    let amp = r.c1 + 0.5 * r.c2;
    let tail = (-l).exp();
    let dz = l / n as f64;
    let mut phi = Vec::with_capacity(n);
    let mut dphi = Vec::with_capacity(n);
    for j in 0..n {
        let z = j as f64 * dz;
        // cosh(L/2 - z)/cosh(L/2) and sinh(L/2 - z)/cosh(L/2) without overflow.
        let ez = (-z).exp();
        let ezl = (z - l).exp();
        phi.push(amp * (ez + ezl) / (1.0 + tail) - 0.5 * r.c2);
        dphi.push(if j == 0 {
            0.0
        } else {
            -amp * (ez - ezl) / (1.0 + tail)
        });
    }
    phi[0] = r.c1;
    Ok(Profile {
        params: *r,
        c3: 0.0,
        b,
        period_z: l,
        grid_n: n,
        phi,
        dphi,
        provenance: Provenance::PeakedClosedForm,
    })
}

/// Mass, energy and the Hamiltonian of a profile over one period in `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservedQuantities {
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "F")]
    pub f: f64,
    pub physical: PhysicalParams,
}

pub fn conserved_quantities(p: &Profile, phys: &PhysicalParams) -> Result<ConservedQuantities> {
    let red = phys.reduce()?;
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
    if !close(red.c1, p.params.c1) || !close(red.c2, p.params.c2) {
        return Err(WaveError::ParamMismatch(format!(
            "physical parameters reduce to ({}, {}), profile has ({}, {})",
            red.c1, red.c2, p.params.c1, p.params.c2
        )));
    }
    let PhysicalParams {
        alpha,
        omega,
        gamma,
        ..
    } = *phys;
    let dx = alpha * p.dz();
    let (mut m, mut e, mut f) = (0.0, 0.0, 0.0);
    for (&u, &dz) in p.phi.iter().zip(&p.dphi) {
        let ux = dz / alpha;
        m += u;
        e += u * u + alpha * alpha * ux * ux;
        f += u * u * u + alpha * alpha * u * ux * ux + 2.0 * omega * u * u - gamma * ux * ux;
    }
    Ok(ConservedQuantities {
        m: m * dx,
        e: 0.5 * e * dx,
        f: 0.5 * f * dx,
        physical: *phys,
    })
}

/// Pointwise residuals of the profile equations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// Second-order equation, with spectral (or closed-form) derivatives.
    pub second_order: Vec<f64>,
    /// First integral minus `C3`, using the stored slope.
    pub first_integral: Vec<f64>,
}

pub fn residuals(p: &Profile) -> Residuals {
    let r = &p.params;
    let (d1, d2) = match p.provenance {
        Provenance::Numeric => (
            fourier::derivative(&p.phi, p.period_z),
            fourier::second_derivative(&p.phi, p.period_z),
        ),
        _ => (p.dphi.clone(), p.ddphi()),
    };
    let second_order = (0..p.len())
        .map(|j| r.profile_equation(p.phi[j], d1[j], d2[j], p.b))
        .collect();
    let first_integral = (0..p.len())
        .map(|j| r.first_integral(p.phi[j], p.dphi[j], p.b) - p.c3)
        .collect();
    Residuals {
        second_order,
        first_integral,
    }
}

/// Max-norm residuals `(res2, res1)` of the second-order equation and of the
/// first integral.
pub fn residual_check(p: &Profile) -> (f64, f64) {
    let res = residuals(p);
    let max = |v: &[f64]| v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    (max(&res.second_order), max(&res.first_integral))
}
