//! Parameter algebra of the travelling-wave reduction: the reduced constants,
//! the cubic `f(phi) = C3`, the Newtonian potential, turning points and the
//! geometry of the existence region in the `(C3, b)` plane.
//!
//! Everything here is in the normalized variable `z = xi / alpha`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WaveError};
use crate::roots::{bisect, brent};

/// Tolerance (absolute distance in `b`) for the boundary tags of [`RegionClass`].
pub const BOUNDARY_TOL: f64 = 1e-10;

/// Relative tolerance (in units of the critical level) for recognising the
/// `C3 = 0` edge and the upper corner. It is at roundoff level so that
/// `C3 = 1e-12` still counts as an interior level.
const EDGE_REL_TOL: f64 = 1e-15;

/// The four constants of the shallow-water equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub alpha: f64,
    pub omega: f64,
    pub gamma: f64,
    pub c: f64,
}

impl PhysicalParams {
    pub fn new(alpha: f64, omega: f64, gamma: f64, c: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(WaveError::InvalidParameter(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        if !(omega.is_finite() && gamma.is_finite() && c.is_finite()) {
            return Err(WaveError::InvalidParameter(
                "omega, gamma and c must be finite".into(),
            ));
        }
        Ok(Self {
            alpha,
            omega,
            gamma,
            c,
        })
    }

    /// Collapse to the two reduced constants `C1 = c + gamma/alpha^2`,
    /// `C2 = 2 omega + gamma/alpha^2`.
    pub fn reduce(&self) -> Result<ReducedParams> {
        if !(self.alpha > 0.0) {
            return Err(WaveError::InvalidParameter(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        let k = self.gamma / (self.alpha * self.alpha);
        Ok(ReducedParams {
            c1: self.c + k,
            c2: 2.0 * self.omega + k,
        })
    }
}

/// Which side of the existence region a point `(C3, b)` lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionClass {
    InteriorPeriodic,
    BoundaryCenter,
    BoundarySolitary,
    BoundaryPeaked,
    Outside,
}

impl RegionClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionClass::InteriorPeriodic => "InteriorPeriodic",
            RegionClass::BoundaryCenter => "BoundaryCenter",
            RegionClass::BoundarySolitary => "BoundarySolitary",
            RegionClass::BoundaryPeaked => "BoundaryPeaked",
            RegionClass::Outside => "Outside",
        }
    }
}

/// The three real roots of `f(phi) = C3`, in increasing order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicRoots {
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
}

/// The two roots of `b = U(phi)` that bound a periodic orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningPoints {
    pub phi_minus: f64,
    pub phi_plus: f64,
}

/// Turning points together with the distances needed for singularity-free
/// quadrature near the crest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct OrbitShape {
    pub phi_minus: f64,
    pub phi_plus: f64,
    /// `C1 - phi_plus`, computed without cancellation.
    pub crest_gap: f64,
    /// `phi_minus - phi_r`, where `phi_r` is the third root of the turning-point cubic.
    pub floor_gap: f64,
}

impl OrbitShape {
    pub fn mid(&self) -> f64 {
        0.5 * (self.phi_plus + self.phi_minus)
    }

    pub fn radius(&self) -> f64 {
        0.5 * (self.phi_plus - self.phi_minus)
    }

    /// Integrand of the half period in the angle variable `phi = m + rho sin s`:
    /// `sqrt((C1 - phi) / (phi - phi_r))`.
    pub fn angle_integrand(&self, s: f64) -> f64 {
        let rho = self.radius();
        let half = 0.5 * s;
        let q = PI / 4.0;
        let down = 2.0 * (q - half).sin().powi(2); // 1 - sin s
        let up = 2.0 * (q + half).sin().powi(2); // 1 + sin s
        ((self.crest_gap + rho * down) / (self.floor_gap + rho * up)).sqrt()
    }
}

/// Rectangular window of the phase plane plus the number of `phi` samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseWindow {
    pub phi_min: f64,
    pub phi_max: f64,
    pub dphi_min: f64,
    pub dphi_max: f64,
    pub samples: usize,
}

/// Which part of a level curve a sample belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LevelBranch {
    /// The closed orbit between the turning points.
    Orbit,
    /// Any other real branch of the same level.
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelPoint {
    pub phi: f64,
    pub dphi: f64,
    pub branch: LevelBranch,
}

/// Reduced constants `(C1, C2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedParams {
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
}

impl ReducedParams {
    pub fn new(c1: f64, c2: f64) -> Self {
        Self { c1, c2 }
    }

    /// Whether `2 C1 + C2 > 0`, which every geometric operation assumes.
    pub fn is_admissible(&self) -> bool {
        self.c1.is_finite() && self.c2.is_finite() && 2.0 * self.c1 + self.c2 > 0.0
    }

    fn require_admissible(&self) -> Result<()> {
        if self.is_admissible() {
            Ok(())
        } else {
            Err(WaveError::InvalidParameter(format!(
                "2*C1 + C2 must be positive (C1 = {}, C2 = {})",
                self.c1, self.c2
            )))
        }
    }

    /// Physical constants with `alpha` and `gamma` chosen by the caller.
    pub fn expand(&self, alpha: f64, gamma: f64) -> Result<PhysicalParams> {
        if !(alpha > 0.0) {
            return Err(WaveError::InvalidParameter(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        let k = gamma / (alpha * alpha);
        Ok(PhysicalParams {
            alpha,
            omega: 0.5 * (self.c2 - k),
            gamma,
            c: self.c1 - k,
        })
    }

    /// `f(phi) = 2 (phi - C1)^2 (phi + C2/2)`.
    pub fn f(&self, phi: f64) -> f64 {
        let d = phi - self.c1;
        2.0 * d * d * (phi + 0.5 * self.c2)
    }

    fn f_slope(&self, phi: f64) -> f64 {
        2.0 * (phi - self.c1) * (3.0 * phi + self.c2 - self.c1)
    }

    /// Maximum of `f` on `(-C2/2, C1)`: `(2 C1 + C2)^3 / 27`.
    pub fn c3_critical(&self) -> Result<f64> {
        self.require_admissible()?;
        Ok((2.0 * self.c1 + self.c2).powi(3) / 27.0)
    }

    fn crit(&self) -> f64 {
        (2.0 * self.c1 + self.c2).powi(3) / 27.0
    }

    fn edge_tol(&self) -> f64 {
        EDGE_REL_TOL * self.crit().max(1.0)
    }

    /// Local maximum of `f`, which separates `phi1` from `phi2`.
    pub fn f_max_location(&self) -> f64 {
        (self.c1 - self.c2) / 3.0
    }

    /// The three roots of `f(phi) = C3` for `0 < C3 < C3crit`.
    pub fn critical_roots(&self, c3: f64) -> Result<CubicRoots> {
        self.require_admissible()?;
        let crit = self.crit();
        if !(c3 > 0.0 && c3 < crit) {
            return Err(WaveError::OutOfRange(format!(
                "C3 = {c3} is outside (0, {crit}); f(phi) = C3 has fewer than three real roots"
            )));
        }
        // Shift to the inflection point: with t = phi - (4 C1 - C2)/6 and
        // d = (2 C1 + C2)/6 the equation reads t^3 - 3 d^2 t + 2 d^3 - C3/2 = 0.
        let d = (2.0 * self.c1 + self.c2) / 6.0;
        let centre = (4.0 * self.c1 - self.c2) / 6.0;
        // cos(3 psi) = 2 C3 / C3crit - 1, evaluated without cancellation at either end.
        let frac = c3 / crit;
        let psi = if frac > 0.5 {
            2.0 * ((1.0 - frac).sqrt()).asin() / 3.0
        } else {
            (PI - 2.0 * frac.sqrt().asin()) / 3.0
        };
        let third = 2.0 * PI / 3.0;
        let mut phi3 = centre + 2.0 * d * psi.cos();
        let mut phi2 = centre + 2.0 * d * (psi - third).cos();
        let mut phi1 = centre + 2.0 * d * (psi + third).cos();
        for phi in [&mut phi1, &mut phi2, &mut phi3] {
            *phi = self.polish(*phi, c3);
        }
        let lo = -0.5 * self.c2;
        let mid = self.f_max_location();
        // Keep the ordering even when roots nearly coincide in floating point.
        phi1 = phi1.clamp(lo, mid);
        phi2 = phi2.clamp(mid, self.c1);
        phi3 = phi3.max(self.c1);
        Ok(CubicRoots { phi1, phi2, phi3 })
    }

    fn polish(&self, phi: f64, c3: f64) -> f64 {
        let slope = self.f_slope(phi);
        if slope == 0.0 || !slope.is_finite() {
            return phi;
        }
        let next = phi - (self.f(phi) - c3) / slope;
        if (self.f(next) - c3).abs() <= (self.f(phi) - c3).abs() {
            next
        } else {
            phi
        }
    }

    /// Newtonian potential `U(phi)`.
    pub fn potential(&self, phi: f64, c3: f64) -> Result<f64> {
        let (c1, c2) = (self.c1, self.c2);
        let pole = if c3 == 0.0 {
            0.0
        } else if phi == c1 {
            return Err(WaveError::PoleAtC1);
        } else {
            c3 / (2.0 * (phi - c1))
        };
        Ok(-0.5 * phi * phi - 0.5 * c2 * phi - 0.5 * c1 * c2 - pole)
    }

    /// `dU/dphi = (C3 - f(phi)) / (2 (phi - C1)^2)`.
    pub fn potential_slope(&self, phi: f64, c3: f64) -> Result<f64> {
        let d = phi - self.c1;
        if c3 == 0.0 {
            return Ok(-phi - 0.5 * self.c2);
        }
        if d == 0.0 {
            return Err(WaveError::PoleAtC1);
        }
        Ok((c3 - self.f(phi)) / (2.0 * d * d))
    }

    /// Value of `b` at an equilibrium `phi` of the profile equation.
    pub fn equilibrium_b(&self, phi: f64) -> f64 {
        (self.c1 - self.c2 - 1.5 * phi) * phi
    }

    /// Left-hand side of the first integral (with `alpha = 1`), whose value along
    /// a solution is `C3`.
    pub fn first_integral(&self, phi: f64, dphi: f64, b: f64) -> f64 {
        let (c1, c2) = (self.c1, self.c2);
        (phi - c1) * dphi * dphi + (c1 - c2) * phi * phi - phi * phi * phi - 2.0 * b * phi
            + c1 * (2.0 * b + c1 * c2)
    }

    /// Residual of the second-order profile equation (with `alpha = 1`).
    pub fn profile_equation(&self, phi: f64, dphi: f64, ddphi: f64, b: f64) -> f64 {
        (phi - self.c1) * ddphi + 0.5 * dphi * dphi + (self.c1 - self.c2 - 1.5 * phi) * phi - b
    }

    /// Lower and upper boundary values `(b_minus, b_plus)` of the existence
    /// region at level `C3`.
    pub fn boundary_b(&self, c3: f64) -> Result<(f64, f64)> {
        self.require_admissible()?;
        let crit = self.crit();
        if !(0.0..=crit).contains(&c3) {
            return Err(WaveError::OutOfRange(format!(
                "C3 = {c3} is outside [0, {crit}]"
            )));
        }
        let (c1, c2) = (self.c1, self.c2);
        if c3 == 0.0 {
            return Ok((-0.5 * c1 * c1 - c1 * c2, (c2 * c2 - 4.0 * c1 * c2) / 8.0));
        }
        if c3 == crit {
            let v = (c1 - c2).powi(2) / 6.0;
            return Ok((v, v));
        }
        let mid = self.f_max_location();
        let phi2 = bisect(|p| self.f(p) - c3, mid, c1)?;
        let phi1 = bisect(|p| self.f(p) - c3, -0.5 * c2, mid)?;
        Ok((self.equilibrium_b(phi2), self.equilibrium_b(phi1)))
    }

    /// Open interval of levels `C3` for which `(C3, b)` is an interior point.
    ///
    /// The ends are where the horizontal line `b = const` meets the solitary
    /// curve (or the `C3 = 0` edge) and the centre curve.
    pub fn level_range(&self, b: f64) -> Result<(f64, f64)> {
        self.require_admissible()?;
        let (c1, c2) = (self.c1, self.c2);
        let disc = (c1 - c2).powi(2) - 6.0 * b;
        let empty = || WaveError::OutOfRange(format!("no interior levels at b = {b}"));
        if !(disc > 0.0) {
            return Err(empty());
        }
        // Equilibria at height b solve 1.5 phi^2 - (C1 - C2) phi + b = 0.
        let phi2 = (c1 - c2 + disc.sqrt()) / 3.0;
        let phi1 = (c1 - c2 - disc.sqrt()) / 3.0;
        if !(phi2 < c1) {
            return Err(empty());
        }
        let hi = self.f(phi2);
        let lo = if phi1 > -0.5 * c2 { self.f(phi1) } else { 0.0 };
        if !(lo < hi) {
            return Err(empty());
        }
        Ok((lo, hi))
    }

    /// Classify `(C3, b)` relative to the existence region of smooth periodic
    /// waves. Boundary tags use [`BOUNDARY_TOL`] in `b`.
    pub fn classify(&self, c3: f64, b: f64) -> RegionClass {
        if !self.is_admissible() || !c3.is_finite() || !b.is_finite() {
            return RegionClass::Outside;
        }
        let crit = self.crit();
        let edge = self.edge_tol();
        if c3 < -edge || c3 > crit {
            return RegionClass::Outside;
        }
        if c3.abs() <= edge {
            let (bm, bp) = self.boundary_b(0.0).expect("C3 = 0 is in range");
            return if (b - bm).abs() <= BOUNDARY_TOL {
                RegionClass::BoundaryCenter
            } else if (b - bp).abs() <= BOUNDARY_TOL {
                RegionClass::BoundarySolitary
            } else if bm < b && b < bp {
                RegionClass::BoundaryPeaked
            } else {
                RegionClass::Outside
            };
        }
        if crit - c3 <= edge {
            // The upper corner where both boundary curves meet is excluded.
            return RegionClass::Outside;
        }
        let (bm, bp) = match self.boundary_b(c3) {
            Ok(v) => v,
            Err(_) => return RegionClass::Outside,
        };
        if (b - bm).abs() <= BOUNDARY_TOL {
            RegionClass::BoundaryCenter
        } else if (b - bp).abs() <= BOUNDARY_TOL {
            RegionClass::BoundarySolitary
        } else if bm < b && b < bp {
            RegionClass::InteriorPeriodic
        } else {
            RegionClass::Outside
        }
    }

    /// Turning-point cubic `P(phi) = (C1 - phi)(phi^2 + C2 phi + 2b + C1 C2) - C3`,
    /// which equals `2 (C1 - phi)(b - U(phi))`.
    pub fn turning_cubic(&self, phi: f64, c3: f64, b: f64) -> f64 {
        (self.c1 - phi) * self.crest_quadratic(phi, b) - c3
    }

    fn crest_quadratic(&self, phi: f64, b: f64) -> f64 {
        phi * phi + self.c2 * phi + 2.0 * b + self.c1 * self.c2
    }

    /// Turning points `phi_minus <= phi_plus` of the orbit at `(C3, b)`.
    pub fn turning_points(&self, c3: f64, b: f64) -> Result<TurningPoints> {
        let shape = self.orbit_shape(c3, b)?;
        Ok(TurningPoints {
            phi_minus: shape.phi_minus,
            phi_plus: shape.phi_plus,
        })
    }

    pub(crate) fn orbit_shape(&self, c3: f64, b: f64) -> Result<OrbitShape> {
        let (c1, c2) = (self.c1, self.c2);
        let class = self.classify(c3, b);
        let (phi_minus, phi_plus, crest_gap) = match class {
            RegionClass::Outside | RegionClass::BoundarySolitary => {
                return Err(WaveError::NoOrbit { c3, b })
            }
            RegionClass::BoundaryCenter => {
                if c3.abs() <= self.edge_tol() {
                    (c1, c1, 0.0)
                } else {
                    let p2 = self.critical_roots(c3)?.phi2;
                    (p2, p2, c1 - p2)
                }
            }
            RegionClass::BoundaryPeaked => {
                let disc = c2 * c2 - 4.0 * (2.0 * b + c1 * c2);
                let pm = 0.5 * (-c2 + disc.max(0.0).sqrt());
                (pm.min(c1), c1, 0.0)
            }
            RegionClass::InteriorPeriodic => {
                let roots = self.critical_roots(c3)?;
                let p = |x: f64| self.turning_cubic(x, c3, b);
                let pm = brent(p, roots.phi1, roots.phi2, 0.0)?;
                let pp = brent(p, roots.phi2, c1, 0.0)?;
                let q = self.crest_quadratic(pp, b);
                let gap = if q > 0.0 { c3 / q } else { c1 - pp };
                (pm, pp, gap)
            }
        };
        let floor_gap = 2.0 * phi_minus + phi_plus + c2 - c1;
        Ok(OrbitShape {
            phi_minus,
            phi_plus,
            crest_gap,
            floor_gap,
        })
    }

    /// Phase-portrait classifier `g(C1, C2, b)`.
    pub fn g_classifier(&self, b: f64) -> Result<f64> {
        let (c1, c2) = (self.c1, self.c2);
        let disc = (c1 - c2).powi(2) - 6.0 * b;
        if disc < 0.0 {
            return Err(WaveError::ComplexBranch(disc));
        }
        Ok(12.0 * b + 2.0 * c1 * c1 - c2 * c2 + 8.0 * c1 * c2 - (2.0 * c1 + c2) * disc.sqrt())
    }

    /// Samples of the level curve `{first integral = C3}` inside `window`.
    pub fn level_set(&self, c3: f64, b: f64, window: &PhaseWindow) -> Result<Vec<LevelPoint>> {
        let w = window;
        if ![w.phi_min, w.phi_max, w.dphi_min, w.dphi_max]
            .iter()
            .all(|v| v.is_finite())
            || w.phi_min >= w.phi_max
            || w.dphi_min > w.dphi_max
            || w.samples < 2
        {
            return Err(WaveError::InvalidParameter(
                "phase window must be finite, non-empty and have at least 2 samples".into(),
            ));
        }
        let orbit = self.turning_points(c3, b).ok();
        let on_orbit = |phi: f64| match orbit {
            Some(t) => phi >= t.phi_minus && phi <= t.phi_plus,
            None => false,
        };
        let branch = |phi: f64| {
            if on_orbit(phi) {
                LevelBranch::Orbit
            } else {
                LevelBranch::Other
            }
        };
        let inside = |phi: f64, v: f64| {
            phi >= w.phi_min && phi <= w.phi_max && v >= w.dphi_min && v <= w.dphi_max
        };
        let mut out = Vec::new();
        let step = (w.phi_max - w.phi_min) / (w.samples - 1) as f64;
        for i in 0..w.samples {
            let phi = w.phi_min + step * i as f64;
            if phi == self.c1 {
                continue;
            }
            // (phi - C1) v^2 = C3 - h(phi), i.e. v^2 = P(phi) / (C1 - phi).
            let v2 = self.turning_cubic(phi, c3, b) / (self.c1 - phi);
            if !(v2 > 0.0) || !v2.is_finite() {
                continue;
            }
            let v = v2.sqrt();
            for s in [v, -v] {
                if inside(phi, s) {
                    out.push(LevelPoint {
                        phi,
                        dphi: s,
                        branch: branch(phi),
                    });
                }
            }
        }
        for phi in self.turning_cubic_roots(c3, b) {
            if phi != self.c1 && inside(phi, 0.0) {
                out.push(LevelPoint {
                    phi,
                    dphi: 0.0,
                    branch: branch(phi),
                });
            }
        }
        if out.is_empty() {
            return Err(WaveError::EmptyLevelSet);
        }
        out.sort_by(|a, b| a.phi.total_cmp(&b.phi).then(a.dphi.total_cmp(&b.dphi)));
        Ok(out)
    }

    /// Real roots of the turning-point cubic, i.e. the points where a level
    /// curve meets the `phi` axis.
    pub fn turning_cubic_roots(&self, c3: f64, b: f64) -> Vec<f64> {
        if let Ok(shape) = self.orbit_shape(c3, b) {
            let phi_r = self.c1 - self.c2 - shape.phi_minus - shape.phi_plus;
            let mut v = vec![phi_r, shape.phi_minus];
            if shape.phi_plus != shape.phi_minus {
                v.push(shape.phi_plus);
            }
            return v;
        }
        // General case: -P is a monic cubic in phi.
        let (c1, c2) = (self.c1, self.c2);
        let a2 = c2 - c1;
        let a1 = 2.0 * b + c1 * c2 - c1 * c2;
        let a0 = c3 - c1 * (2.0 * b + c1 * c2);
        real_cubic_roots(a2, a1, a0)
            .into_iter()
            .filter(|x| self.turning_cubic(*x, c3, b).abs() <= 1e-9 * (1.0 + c3.abs() + b.abs()))
            .collect()
    }
}

/// Real roots of `x^3 + a2 x^2 + a1 x + a0`, polished by Newton steps.
fn real_cubic_roots(a2: f64, a1: f64, a0: f64) -> Vec<f64> {
    let shift = a2 / 3.0;
    let p = a1 - a2 * a2 / 3.0;
    let q = 2.0 * a2.powi(3) / 27.0 - a2 * a1 / 3.0 + a0;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    let mut ts = Vec::new();
    if disc > 0.0 {
        let s = disc.sqrt();
        ts.push((-q / 2.0 + s).cbrt() + (-q / 2.0 - s).cbrt());
    } else if p == 0.0 {
        ts.push(0.0);
    } else {
        let r = (-p / 3.0).sqrt();
        let arg = (-q / (2.0 * r.powi(3))).clamp(-1.0, 1.0);
        let psi = arg.acos() / 3.0;
        for k in 0..3 {
            ts.push(2.0 * r * (psi - 2.0 * PI * k as f64 / 3.0).cos());
        }
    }
    let poly = |x: f64| ((x + a2) * x + a1) * x + a0;
    let slope = |x: f64| (3.0 * x + 2.0 * a2) * x + a1;
    let mut xs: Vec<f64> = ts
        .into_iter()
        .map(|t| {
            let mut x = t - shift;
            for _ in 0..3 {
                let d = slope(x);
                if d == 0.0 {
                    break;
                }
                let nx = x - poly(x) / d;
                if poly(nx).abs() > poly(x).abs() {
                    break;
                }
                x = nx;
            }
            x
        })
        .collect();
    xs.sort_by(f64::total_cmp);
    xs
}
