//! Hypotheses of the orbital stability criterion and the invariance of the
//! linearised constraints.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{build_l, inf_norm};
use crate::error::Result;
use crate::fourier;
use crate::params::PhysicalParams;
use crate::period::period_partials;
use crate::profile::{conserved_quantities, Profile};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitalCheck {
    pub cond_b: bool,
    pub cond_sign: bool,
    #[serde(rename = "cond_M")]
    pub cond_m: bool,
    pub cond_period: bool,
    /// `(C2/2) (2b + (C2/2)(C1 - C2))`, required to be negative.
    pub sign_value: f64,
    #[serde(rename = "M")]
    pub mass: f64,
    #[serde(rename = "dL_dC3")]
    pub dl_dc3: f64,
    /// `<L Y, Y>` with `Y = phi + C2/2`, by matrix product and quadrature.
    #[serde(rename = "LYY")]
    pub lyy: f64,
    /// The same quantity from the expansion in `M`, `E` and the period.
    #[serde(rename = "LYY_expansion")]
    pub lyy_expansion: f64,
    #[serde(rename = "LYY_rel_diff")]
    pub lyy_rel_diff: f64,
    /// `||L Y - (K - A phi + A phi'')||` with `K = 2b + (C2/2)(C1 - C2)`, `A = C1 + C2/2`.
    #[serde(rename = "LY_residual")]
    pub ly_residual: f64,
    pub verdict: bool,
}

/// Evaluate the orbital stability hypotheses for a smooth interior wave.
pub fn orbital_check(p: &Profile, phys: &PhysicalParams) -> Result<OrbitalCheck> {
    let l = build_l(p)?;
    let (c1, c2, b) = (p.params.c1, p.params.c2, p.b);
    let k = 2.0 * b + 0.5 * c2 * (c1 - c2);
    let a = c1 + 0.5 * c2;
    let sign_value = 0.5 * c2 * k;
    let mass = conserved_quantities(p, phys)?.m;
    let dl_dc3 = period_partials(&p.params, p.c3, b)?.d_c3;

    let y = DVector::from_iterator(p.len(), p.phi.iter().map(|v| v + 0.5 * c2));
    let ly = &l.matrix * &y;
    let ddphi = p.ddphi();
    let ly_residual = (0..p.len())
        .map(|j| (ly[j] - (k - a * p.phi[j] + a * ddphi[j])).abs())
        .fold(0.0, f64::max);
    let dz = p.dz();
    let lyy = ly.dot(&y) * dz;

    let m_z = p.integrate(&p.phi);
    let e_z = 0.5
        * p.phi
            .iter()
            .zip(&p.dphi)
            .map(|(u, d)| u * u + d * d)
            .sum::<f64>()
        * dz;
    let lyy_expansion = (2.0 * b - 0.75 * c2 * c2) * m_z + sign_value * p.period_z - 2.0 * a * e_z;
    let lyy_rel_diff = (lyy - lyy_expansion).abs() / lyy.abs().max(lyy_expansion.abs());

    let cond_b = b <= 0.0;
    let cond_sign = sign_value < 0.0;
    let cond_m = mass > 0.0;
    let cond_period = dl_dc3 < 0.0;
    Ok(OrbitalCheck {
        cond_b,
        cond_sign,
        cond_m,
        cond_period,
        sign_value,
        mass,
        dl_dc3,
        lyy,
        lyy_expansion,
        lyy_rel_diff,
        ly_residual,
        verdict: cond_b && cond_sign && cond_m && cond_period && lyy < 0.0,
    })
}

/// Largest relative violation of `<c, J L w> = 0` for `c` in `{1, phi - phi''}`
/// over `trials` random vectors `w`, each normalised by `||c|| ||L w||`.
pub fn constraint_invariance_check(p: &Profile, trials: usize, seed: u64) -> Result<f64> {
    let l = build_l(p)?;
    let n = p.len();
    let j = fourier::j_matrix(n, p.period_z);
    let ddphi = p.ddphi();
    let ones = DVector::from_element(n, 1.0);
    let g = DVector::from_iterator(n, p.phi.iter().zip(&ddphi).map(|(a, b)| a - b));
    let scale = inf_norm(&l.matrix);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let w = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let lw = &l.matrix * &w;
        let denom = lw.norm().max(f64::MIN_POSITIVE * scale);
        let jlw = &j * &lw;
        for c in [&ones, &g] {
            worst = worst.max(c.dot(&jlw).abs() / (c.norm() * denom));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ReducedParams;
    use crate::profile::solve_profile;

    #[test]
    fn expansion_matches_quadrature() {
        let r = ReducedParams::new(2.0, 1.0);
        let phys = r.expand(1.0, 0.0).unwrap();
        for (c3, b) in [(2.0, -0.6), (3.0, -0.4), (1.5, -0.8)] {
            let p = solve_profile(&r, c3, b, 128).unwrap();
            let o = orbital_check(&p, &phys).unwrap();
            assert!(o.lyy_rel_diff <= 1e-6, "{o:?}");
            assert!(o.ly_residual <= 1e-6, "{o:?}");
        }
    }

    #[test]
    fn zero_c2_fails_sign_condition() {
        let r = ReducedParams::new(2.0, 0.0);
        let phys = r.expand(1.0, 0.0).unwrap();
        let (lo, hi) = r.level_range(-1.0).unwrap();
        let p = solve_profile(&r, 0.5 * (lo + hi), -1.0, 64).unwrap();
        let o = orbital_check(&p, &phys).unwrap();
        assert!(!o.cond_sign && !o.verdict);
    }

    #[test]
    fn constraints_are_invariant() {
        let r = ReducedParams::new(2.0, 1.0);
        let p = solve_profile(&r, 2.0, -1.0, 128).unwrap();
        assert!(constraint_invariance_check(&p, 20, 7).unwrap() <= 1e-8);
        let flat = solve_profile(&r, 3.0, -0.5, 32).unwrap();
        assert!(constraint_invariance_check(&flat, 20, 7).unwrap() <= 1e-13);
        let l = build_l(&p).unwrap();
        let j = fourier::j_matrix(p.len(), p.period_z);
        let jl_phi = j * (&l.matrix * DVector::from_column_slice(&p.dphi));
        assert!(jl_phi.amax() <= 1e-6);
    }
}
