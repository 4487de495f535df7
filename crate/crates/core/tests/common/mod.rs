//! Reference computations shared by the integration tests. They are written
//! independently of the library's solvers: fixed-step RK4 instead of adaptive
//! Dormand-Prince, bisection on hand-written polynomials instead of the cubic
//! formulas, pointwise operator application instead of assembled matrices, and
//! plain central differences instead of Richardson extrapolation.

#![allow(dead_code)]

use dgh_waves::fourier;
use dgh_waves::params::ReducedParams;
use dgh_waves::profile::Profile;

/// `f(phi) = 2 (phi - C1)^2 (phi + C2/2)`.
pub fn level_polynomial(c1: f64, c2: f64, phi: f64) -> f64 {
    2.0 * (phi - c1).powi(2) * (phi + 0.5 * c2)
}

/// Second derivative of the profile from the travelling-wave ODE.
pub fn profile_accel(c1: f64, c2: f64, b: f64, phi: f64, slope: f64) -> f64 {
    (0.5 * slope * slope + (c1 - c2 - 1.5 * phi) * phi - b) / (c1 - phi)
}

/// Value of the first integral at a state at rest: zero at the turning points.
pub fn rest_residual(c1: f64, c2: f64, c3: f64, b: f64, phi: f64) -> f64 {
    (c1 - phi) * (phi * phi + c2 * phi + 2.0 * b + c1 * c2) - c3
}

pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Middle root of `f(phi) = C3`, between the local maximum of `f` and `C1`.
pub fn centre(c1: f64, c2: f64, c3: f64) -> f64 {
    bisect(|p| level_polynomial(c1, c2, p) - c3, (c1 - c2) / 3.0, c1)
}

/// Crest of the orbit at `(C3, b)`: the turning point between the centre and `C1`.
pub fn crest(r: &ReducedParams, c3: f64, b: f64) -> f64 {
    let (c1, c2) = (r.c1, r.c2);
    bisect(|p| rest_residual(c1, c2, c3, b, p), centre(c1, c2, c3), c1)
}

/// Squared linear frequency at the centre in two forms: from the level,
/// `C3/(C1 - q)^3 - 1`, and from the linearised ODE, `(3q - C1 + C2)/(C1 - q)`.
pub fn centre_frequencies_squared(c1: f64, c2: f64, c3: f64) -> (f64, f64) {
    let q = centre(c1, c2, c3);
    (
        c3 / (c1 - q).powi(3) - 1.0,
        (3.0 * q - c1 + c2) / (c1 - q),
    )
}

pub fn rk4_step<const N: usize, F: Fn(&[f64; N]) -> [f64; N]>(
    f: &F,
    y: &[f64; N],
    h: f64,
) -> [f64; N] {
    let add = |a: &[f64; N], k: &[f64; N], s: f64| {
        let mut out = *a;
        for i in 0..N {
            out[i] += s * k[i];
        }
        out
    };
    let k1 = f(y);
    let k2 = f(&add(y, &k1, 0.5 * h));
    let k3 = f(&add(y, &k2, 0.5 * h));
    let k4 = f(&add(y, &k3, h));
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Period of the orbit through the crest by fixed-step RK4. The slope first
/// goes negative, turns positive past the trough and returns to zero at the
/// next crest, which is then located by Newton steps on the slope.
pub fn rk4_period(r: &ReducedParams, c3: f64, b: f64, scale: f64, steps: usize) -> f64 {
    let (c1, c2) = (r.c1, r.c2);
    let f = |y: &[f64; 2]| [y[1], profile_accel(c1, c2, b, y[0], y[1])];
    let h = scale / steps as f64;
    let mut y = [crest(r, c3, b), 0.0];
    let mut z = 0.0;
    let mut seen_positive = false;
    for _ in 0..8 * steps {
        let next = rk4_step(&f, &y, h);
        seen_positive |= next[1] > 0.0;
        if seen_positive && next[1] <= 0.0 {
            let mut dz = 0.0;
            for _ in 0..8 {
                let at = rk4_step(&f, &y, dz);
                dz -= at[1] / profile_accel(c1, c2, b, at[0], at[1]);
            }
            return z + dz;
        }
        y = next;
        z += h;
    }
    f64::NAN
}

/// `theta = v'(L)` for the solution of `L v = 0` with `v(0) = 1, v'(0) = 0`,
/// integrated together with the wave from its crest by fixed-step RK4.
pub fn rk4_theta(r: &ReducedParams, c3: f64, b: f64, period: f64, steps: usize) -> f64 {
    let (c1, c2) = (r.c1, r.c2);
    let f = |y: &[f64; 4]| {
        let acc = profile_accel(c1, c2, b, y[0], y[1]);
        let vacc = (y[1] * y[3] + (c1 - c2 - 3.0 * y[0] + acc) * y[2]) / (c1 - y[0]);
        [y[1], acc, y[3], vacc]
    };
    let h = period / steps as f64;
    let mut y = [crest(r, c3, b), 0.0, 1.0, 0.0];
    for _ in 0..steps {
        y = rk4_step(&f, &y, h);
    }
    y[3]
}

/// `L v = -((C1 - phi) v')' + (C1 - C2 - 3 phi + phi'') v` applied pointwise
/// with spectral derivatives.
pub fn apply_l(p: &Profile, v: &[f64]) -> Vec<f64> {
    let (c1, c2) = (p.params.c1, p.params.c2);
    let l = p.period_z;
    let ddphi = fourier::second_derivative(&p.phi, l);
    let dv = fourier::derivative(v, l);
    let flux: Vec<f64> = p.phi.iter().zip(&dv).map(|(u, d)| (c1 - u) * d).collect();
    let dflux = fourier::derivative(&flux, l);
    (0..v.len())
        .map(|j| -dflux[j] + (c1 - c2 - 3.0 * p.phi[j] + ddphi[j]) * v[j])
        .collect()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
