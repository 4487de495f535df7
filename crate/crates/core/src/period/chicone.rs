//! Sampled check of the convexity condition that implies monotonicity of the
//! period in `b`.
//!
//! With `Q = phi2`, `x = (phi - Q)/Q`, `beta = C2/Q` and `eta = (C1 - Q)/Q` the
//! potential becomes (up to scale) `G(x)`, and the period increases with the
//! energy when `W = G/(G')^2` is convex between the left maximum `x1` of `G`
//! and the point `x2 in (0, eta)` at the same height.

use serde::{Deserialize, Serialize};

use crate::error::{Result, WaveError};
use crate::params::ReducedParams;
use crate::roots::bisect;

pub const DEFAULT_CHICONE_SAMPLES: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiconeWitness {
    #[serde(rename = "Q")]
    pub q: f64,
    pub beta: f64,
    pub eta: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    #[serde(rename = "min_R_on_range")]
    pub min_r_on_range: f64,
    #[serde(rename = "min_Wpp_on_range")]
    pub min_wpp_on_range: f64,
    #[serde(rename = "S_value")]
    pub s_value: f64,
    #[serde(rename = "N_value")]
    pub n_value: f64,
}

/// Shifted potential `G(x)`.
pub fn shifted_potential(beta: f64, eta: f64, x: f64) -> f64 {
    let k = beta + 2.0;
    -0.5 * (x * x + k * x + k * eta * eta / (x - eta) + k * eta)
}

/// Cubic numerator `R(x)` of `W''`.
pub fn convexity_numerator(beta: f64, eta: f64, x: f64) -> f64 {
    let (b, e) = (beta, eta);
    let c3 = 4.0 * e - b - 2.0;
    let c2 = e * (14.0 + 7.0 * b - 12.0 * e);
    let c1 = 3.0 * e * e * (4.0 * e - 6.0 - 3.0 * b);
    let c0 = e * e * (b * b + 6.0 * e - 4.0 * e * e + 4.0 * b + 3.0 * b * e + 4.0);
    ((c3 * x + c2) * x + c1) * x + c0
}

/// `W''(x) = -12 (beta + 2)(x - eta) R(x) / B(x)^4` with
/// `B(x) = 2x^2 + (beta + 2 - 4 eta) x + 2 eta (eta - beta - 2)`.
pub fn w_second_derivative(beta: f64, eta: f64, x: f64) -> f64 {
    let k = beta + 2.0;
    let bracket = 2.0 * x * x + (k - 4.0 * eta) * x + 2.0 * eta * (eta - k);
    -12.0 * k * (x - eta) * convexity_numerator(beta, eta, x) / bracket.powi(4)
}

/// Discriminant factor `S(eta, beta)`.
pub fn discriminant_factor(beta: f64, eta: f64) -> f64 {
    let (b, e) = (beta, eta);
    27.0 * b.powi(3)
        + 2.0 * (81.0 + 92.0 * e) * b * b
        + (324.0 + 736.0 * e - 240.0 * e * e) * b
        + 8.0 * (27.0 + 92.0 * e - 60.0 * e * e + 16.0 * e.powi(3))
}

/// Auxiliary positive quantity `N(beta, eta)`.
pub fn auxiliary_n(beta: f64, eta: f64) -> f64 {
    let k = beta + 2.0;
    k * (k + 2.0 * eta) + (k - 2.0 * eta) * (k * (k + 8.0 * eta)).sqrt()
}

/// Compute the witness quantities for level `C3`, sampling `R` and `W''` at the
/// midpoints of `n_samples` equal cells of `[x1, x2]` (`W''` is unbounded at
/// `x1`, where `G'` vanishes).
pub fn chicone_witness(r: &ReducedParams, c3: f64, n_samples: usize) -> Result<ChiconeWitness> {
    if n_samples == 0 {
        return Err(WaveError::InvalidParameter(
            "n_samples must be positive".into(),
        ));
    }
    let q = r.critical_roots(c3)?.phi2;
    if q.abs() < 1e-12 {
        return Err(WaveError::QZero);
    }
    let beta = r.c2 / q;
    let eta = (r.c1 - q) / q;
    let k = beta + 2.0;
    let disc = k * (k + 8.0 * eta);
    if !(disc >= 0.0) {
        return Err(WaveError::OutOfRange(format!(
            "G has no real critical points (beta = {beta}, eta = {eta})"
        )));
    }
    let x1 = 0.25 * (4.0 * eta - k - disc.sqrt());
    let x3 = 0.25 * (4.0 * eta - k + disc.sqrt());
    let level = shifted_potential(beta, eta, x1);
    let x2 = bisect(
        |x| shifted_potential(beta, eta, x) - level,
        0.0,
        eta * (1.0 - 1e-15),
    )?;
    let h = (x2 - x1) / n_samples as f64;
    let mut min_r = f64::INFINITY;
    let mut min_wpp = f64::INFINITY;
    for i in 0..n_samples {
        let x = x1 + (i as f64 + 0.5) * h;
        min_r = min_r.min(convexity_numerator(beta, eta, x));
        min_wpp = min_wpp.min(w_second_derivative(beta, eta, x));
    }
    Ok(ChiconeWitness {
        q,
        beta,
        eta,
        x1,
        x2,
        x3,
        min_r_on_range: min_r,
        min_wpp_on_range: min_wpp,
        s_value: discriminant_factor(beta, eta),
        n_value: auxiliary_n(beta, eta),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn witness_at_unit_shift() {
        let r = ReducedParams::new(2.0, 1.0);
        let w = chicone_witness(&r, 3.0, DEFAULT_CHICONE_SAMPLES).unwrap();
        assert!((w.q - 1.0).abs() < 1e-14);
        assert!((w.beta - 1.0).abs() < 1e-14 && (w.eta - 1.0).abs() < 1e-14);
        assert!(w.x1 < 0.0 && 0.0 < w.x2 && w.x2 < w.eta && w.eta < w.x3);
        assert!(w.min_r_on_range > 0.0);
        assert!(w.min_wpp_on_range > 0.0);
        assert!(w.n_value > 0.0);
    }

    #[test]
    fn numerator_special_values() {
        for (beta, eta) in [(1.0, 1.0), (0.3, 2.5), (4.0, 0.2)] {
            assert_relative_eq!(
                convexity_numerator(beta, eta, eta),
                (2.0f64 + beta).powi(2) * eta * eta,
                max_relative = 1e-12
            );
        }
        // On 4 eta = beta + 2 the cubic term drops out.
        let (beta, eta) = (2.0, 1.0);
        for x in [-3.0, -0.4, 0.0, 0.7, 2.0] {
            let expect = 8.0 * eta * eta * (2.0 * x * x - 3.0 * eta * x + 3.0 * eta * eta);
            assert_relative_eq!(convexity_numerator(beta, eta, x), expect, epsilon = 1e-12);
            assert!(expect > 0.0);
        }
    }

    #[test]
    fn x1_and_x3_are_critical_points_of_g() {
        let w = chicone_witness(&ReducedParams::new(1.5, 0.4), 0.5, 16).unwrap();
        for x in [w.x1, w.x3] {
            let h = 1e-6;
            let slope = (shifted_potential(w.beta, w.eta, x + h)
                - shifted_potential(w.beta, w.eta, x - h))
                / (2.0 * h);
            assert!(slope.abs() < 1e-6, "{slope}");
        }
        assert_relative_eq!(
            shifted_potential(w.beta, w.eta, w.x2),
            shifted_potential(w.beta, w.eta, w.x1),
            max_relative = 1e-12
        );
    }

    #[test]
    fn second_derivative_matches_finite_differences_of_w() {
        let (beta, eta) = (0.7, 1.3);
        let g = |x: f64| shifted_potential(beta, eta, x);
        let gp = |x: f64| {
            let k = beta + 2.0;
            -0.5 * (2.0 * x + k - k * eta * eta / (x - eta).powi(2))
        };
        let w = |x: f64| g(x) / gp(x).powi(2);
        for x in [-0.3, 0.2, 0.5] {
            let h = 1e-4;
            let fd = (w(x + h) - 2.0 * w(x) + w(x - h)) / (h * h);
            assert_relative_eq!(w_second_derivative(beta, eta, x), fd, max_relative = 1e-5);
        }
    }

    #[test]
    fn zero_shift_is_reported() {
        // phi2 = 0 when f(0) = C3, i.e. C3 = C1^2 C2.
        let r = ReducedParams::new(1.0, 2.0);
        let c3 = r.f(0.0);
        assert_eq!(chicone_witness(&r, c3, 64), Err(WaveError::QZero));
    }
}
