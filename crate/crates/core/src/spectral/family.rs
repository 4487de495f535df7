//! Waves of a fixed period, their parameter derivatives and the stability
//! report built from them.

use nalgebra::{DMatrix, DVector, Matrix2, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::{
    build_jl, build_l, inertia, inf_norm, jl_spectrum_check, orbital_check, projected_inertia,
    schrodinger_transform, theta_index, InertiaCounts, JlSpectrum, OrbitalCheck,
};
use crate::error::{Result, WaveError};
use crate::params::{PhysicalParams, ReducedParams};
use crate::period::{center_frequencies, period, period_partials, DEFAULT_PERIOD_TOL};
use crate::profile::{conserved_quantities, solve_profile, Profile};
use crate::roots::{bisect, brent};

fn unreachable(target: f64, reason: String) -> WaveError {
    WaveError::PeriodUnreachable { target, reason }
}

fn linear_period(r: &ReducedParams, c3: f64) -> Result<f64> {
    let w2 = center_frequencies(r, c3)?.1;
    Ok(2.0 * std::f64::consts::PI / w2.sqrt())
}

/// The value of `b` at level `C3` whose orbit has period `target` (in `z`).
///
/// The period grows strictly in `b` from the linearised centre period to
/// infinity at the solitary boundary, so the root is bracketed and unique.
pub fn fixed_period_b(r: &ReducedParams, target: f64, c3: f64) -> Result<f64> {
    if !(target > 0.0 && target.is_finite()) {
        return Err(WaveError::InvalidParameter(format!(
            "target period must be positive, got {target}"
        )));
    }
    if !(c3 > 0.0) {
        return Err(WaveError::OutOfRange(format!(
            "C3 must be positive, got {c3}"
        )));
    }
    let (bm, bp) = r.boundary_b(c3)?;
    if !(bm < bp) {
        return Err(WaveError::OutOfRange(format!(
            "no interior band at C3 = {c3}"
        )));
    }
    let floor = linear_period(r, c3)?;
    if target <= floor {
        return Err(unreachable(
            target,
            format!("below the centre limit {floor} at C3 = {c3}"),
        ));
    }
    let excess = |b: f64| -> f64 {
        period(r, c3, b, DEFAULT_PERIOD_TOL)
            .map(|p| p.period - target)
            .unwrap_or(f64::NAN)
    };
    let width = bp - bm;
    let mut gap = 1e-3 * width;
    let hi = loop {
        let b = bp - gap;
        if excess(b) > 0.0 {
            break b;
        }
        gap *= 0.01;
        if gap < 1e-15 * width.max(bp.abs()) {
            return Err(unreachable(
                target,
                format!("period stays below target up to the solitary boundary at C3 = {c3}"),
            ));
        }
    };
    let lo = bm + 1e-12 * width;
    let lo = if excess(lo) < 0.0 { lo } else { bm };
    if excess(lo) >= 0.0 {
        return Ok(lo);
    }
    brent(excess, lo, hi, 1e-15 * bp.abs().max(1.0))
}

/// Level `C3_L` at which the centre period reaches `target`; fixed-period
/// waves exist for `0 < C3 < C3_L`.
pub fn fixed_period_level_limit(r: &ReducedParams, target: f64) -> Result<f64> {
    let crit = r.c3_critical()?;
    let lo = 1e-12 * crit;
    let hi = crit * (1.0 - 1e-12);
    let gap = |c3: f64| linear_period(r, c3).map(|l| l - target).unwrap_or(f64::NAN);
    if !(gap(lo) < 0.0) {
        return Err(unreachable(
            target,
            "at or below the centre period of every level".into(),
        ));
    }
    if !(gap(hi) > 0.0) {
        return Ok(hi);
    }
    bisect(gap, lo, hi)
}

/// A wave on the fixed-period curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPeriodWave {
    pub b: f64,
    pub profile: Profile,
}

pub fn fixed_period_curve(
    r: &ReducedParams,
    target: f64,
    c3: f64,
    n: usize,
) -> Result<FixedPeriodWave> {
    let b = fixed_period_b(r, target, c3)?;
    let profile = solve_profile(r, c3, b, n)?;
    Ok(FixedPeriodWave { b, profile })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityOptions {
    /// Collocation grid size.
    pub n: usize,
    /// Relative finite-difference step in `C3` and `C1`.
    pub rel_step: f64,
    /// Also run the `J L` check on a grid of size `2 n`.
    pub check_refined: bool,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        Self {
            n: 256,
            rel_step: 1e-4,
            check_refined: true,
        }
    }
}

/// Max-norm residuals of the operator identities used to build the report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityResiduals {
    /// `||L phi'|| / ||phi'||`.
    pub kernel: f64,
    /// `||L d_b phi - 1||`.
    pub inverse_b: f64,
    /// `||L d_c phi + (phi - phi'')||`.
    pub inverse_c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub params: ReducedParams,
    pub physical: PhysicalParams,
    #[serde(rename = "L_target")]
    pub target_period: f64,
    #[serde(rename = "C3")]
    pub c3: f64,
    pub b: f64,
    pub grid_n: usize,
    pub rel_step: f64,
    pub theta: f64,
    #[serde(rename = "dL_dC3")]
    pub dl_dc3: f64,
    #[serde(rename = "inertiaL")]
    pub inertia_l: InertiaCounts,
    #[serde(rename = "inertiaM")]
    pub inertia_m: InertiaCounts,
    /// Projection matrix from finite-difference parameter derivatives.
    #[serde(rename = "S_matrix")]
    pub s_matrix: [[f64; 2]; 2],
    /// The same matrix from solving `L w = 1` and `L w = phi - phi''`.
    #[serde(rename = "S_inverse")]
    pub s_inverse: [[f64; 2]; 2],
    #[serde(rename = "detS")]
    pub det_s: f64,
    pub s_zero_tol: f64,
    pub n0: usize,
    pub z0: usize,
    pub n_constrained: usize,
    pub z_constrained: usize,
    /// Inertia of `L` restricted to the constraint space, computed directly.
    pub projected: InertiaCounts,
    pub counting_agrees: bool,
    #[serde(rename = "dFM3_dC3")]
    pub d_fm3_dc3: f64,
    /// Whether `det S < 0` and `d(F/M^3)/dC3 < 0` agree.
    pub criterion_signs_agree: bool,
    pub residuals: IdentityResiduals,
    #[serde(rename = "max_re_JL")]
    pub max_re_jl: f64,
    pub jl: JlSpectrum,
    pub jl_refined: Option<JlSpectrum>,
    pub spectral_verdict: bool,
    /// `spectral_verdict` implies a stable `J L` spectrum on every grid checked.
    pub jl_consistent: bool,
    pub orbital: OrbitalCheck,
}

fn max_abs(v: &DVector<f64>) -> f64 {
    v.amax()
}

fn column(p: &Profile) -> DVector<f64> {
    DVector::from_column_slice(&p.phi)
}

fn stencil_error(what: &str, e: WaveError) -> WaveError {
    match e {
        WaveError::PeriodUnreachable { .. }
        | WaveError::OutOfRange(_)
        | WaveError::NoOrbit { .. }
        | WaveError::InvalidParameter(_) => WaveError::StencilLeavesCurve(format!("{what}: {e}")),
        other => other,
    }
}

/// Central difference of the fixed-period wave in `C3`; returns the profiles
/// at `C3 -/+ h`, the slope of `b` and the profile derivative.
struct LevelStencil {
    minus: Profile,
    plus: Profile,
    db: f64,
    dphi: DVector<f64>,
}

fn level_stencil(
    r: &ReducedParams,
    target: f64,
    c3: f64,
    h: f64,
    n: usize,
) -> Result<LevelStencil> {
    let lo = fixed_period_curve(r, target, c3 - h, n).map_err(|e| stencil_error("C3 - h", e))?;
    let hi = fixed_period_curve(r, target, c3 + h, n).map_err(|e| stencil_error("C3 + h", e))?;
    let dphi = (column(&hi.profile) - column(&lo.profile)) / (2.0 * h);
    Ok(LevelStencil {
        db: (hi.b - lo.b) / (2.0 * h),
        dphi,
        minus: lo.profile,
        plus: hi.profile,
    })
}

fn solve_deflated(
    l: &DMatrix<f64>,
    kernel: &DVector<f64>,
    rhs: &[DVector<f64>],
) -> Result<Vec<DVector<f64>>> {
    let unit = kernel / kernel.norm();
    let shifted = l + (&unit * unit.transpose()) * (2.0 * inf_norm(l));
    let lu = shifted.lu();
    rhs.iter()
        .map(|b| {
            lu.solve(b)
                .ok_or_else(|| WaveError::EigensolverFailure("singular deflated operator".into()))
        })
        .collect()
}

fn sym_counts(s: &Matrix2<f64>) -> (usize, usize, f64) {
    let sym = (s + s.transpose()) * 0.5;
    let norm = s.abs().max() * 2.0;
    let tol = 1e-8 * norm;
    let eig = SymmetricEigen::new(sym);
    let n0 = eig.eigenvalues.iter().filter(|v| **v < -tol).count();
    let z0 = eig.eigenvalues.iter().filter(|v| v.abs() <= tol).count();
    (n0, z0, tol)
}

fn as_array(s: &Matrix2<f64>) -> [[f64; 2]; 2] {
    [[s[(0, 0)], s[(0, 1)]], [s[(1, 0)], s[(1, 1)]]]
}

/// Spectral stability indices of the wave of period `target` at level `C3`.
///
/// The derivatives with respect to `b` and `c` are taken along the family of
/// waves with the same period; `c` moves `C1` with `C2` held fixed.
pub fn stability_indices(
    r: &ReducedParams,
    phys: &PhysicalParams,
    target: f64,
    c3: f64,
    opts: &StabilityOptions,
) -> Result<StabilityReport> {
    let n = opts.n;
    let wave = fixed_period_curve(r, target, c3, n)?;
    let p = &wave.profile;
    let l_op = build_l(p)?;
    let l = &l_op.matrix;
    let inertia_l = inertia(&l_op, None)?;
    let inertia_m = inertia(&schrodinger_transform(p)?, None)?;
    let theta = theta_index(p)?;
    let dl_dc3 = period_partials(r, c3, wave.b)?.d_c3;

    let dz = p.dz();
    let ones = DVector::from_element(n, 1.0);
    let ddphi = p.ddphi();
    let g = DVector::from_iterator(n, p.phi.iter().zip(&ddphi).map(|(a, b)| a - b));

    // d/db along the fixed-period family, through C3.
    let hc = opts.rel_step * c3;
    let level = level_stencil(r, target, c3, hc, n)?;
    if !(level.db.abs() > 0.0) {
        return Err(WaveError::StencilLeavesCurve(
            "flat b along the curve".into(),
        ));
    }
    let d_b = &level.dphi / level.db;

    // d/dC1 at fixed C3 and period, then corrected to fixed b.
    let h1 = opts.rel_step * r.c1.abs().max(1.0);
    let shifted = |c1: f64| -> Result<FixedPeriodWave> {
        let rr = ReducedParams::new(c1, r.c2);
        if !rr.is_admissible() {
            return Err(WaveError::StencilLeavesCurve(format!(
                "C1 = {c1} is not admissible"
            )));
        }
        fixed_period_curve(&rr, target, c3, n).map_err(|e| stencil_error("C1 stencil", e))
    };
    let lo1 = shifted(r.c1 - h1)?;
    let hi1 = shifted(r.c1 + h1)?;
    let dphi_dc1 = (column(&hi1.profile) - column(&lo1.profile)) / (2.0 * h1);
    let db_dc1 = (hi1.b - lo1.b) / (2.0 * h1);
    let d_c = dphi_dc1 - &d_b * db_dc1;

    let translation = DVector::from_column_slice(&p.dphi);
    let residuals = IdentityResiduals {
        kernel: max_abs(&(l * &translation)) / max_abs(&translation),
        inverse_b: max_abs(&(l * &d_b - &ones)),
        inverse_c: max_abs(&(l * &d_c + &g)),
    };

    let ip = |a: &DVector<f64>, b: &DVector<f64>| a.dot(b) * dz;
    let s = Matrix2::new(
        ip(&d_b, &ones),
        -ip(&d_c, &ones),
        ip(&d_b, &g),
        -ip(&d_c, &g),
    );
    let solved = solve_deflated(l, &translation, &[ones.clone(), g.clone()])?;
    let s_inv = Matrix2::new(
        ip(&solved[0], &ones),
        ip(&solved[1], &ones),
        ip(&solved[0], &g),
        ip(&solved[1], &g),
    );
    let det_s = s.determinant();
    let (n0, z0, s_zero_tol) = sym_counts(&s);
    let n_constrained = inertia_l.n_neg.saturating_sub(n0 + z0);
    let z_constrained = inertia_l.n_zero + z0;
    let projected = projected_inertia(p, None)?;
    let counting_agrees = projected.n_neg == n_constrained && projected.n_zero == z_constrained;

    let fm3 = |q: &Profile| -> Result<f64> {
        let c = conserved_quantities(q, phys)?;
        Ok(c.f / c.m.powi(3))
    };
    let d_fm3_dc3 = (fm3(&level.plus)? - fm3(&level.minus)?) / (2.0 * hc);

    let jl = jl_spectrum_check(&build_jl(p)?, None)?;
    let jl_refined = if opts.check_refined {
        let fine = solve_profile(r, c3, wave.b, 2 * n)?;
        Some(jl_spectrum_check(&build_jl(&fine)?, None)?)
    } else {
        None
    };
    let spectral_verdict = n_constrained == 0 && z_constrained == 1;
    let jl_consistent =
        !spectral_verdict || (jl.stable && jl_refined.as_ref().is_none_or(|s| s.stable));
    let orbital = orbital_check(p, phys)?;

    Ok(StabilityReport {
        params: *r,
        physical: *phys,
        target_period: target,
        c3,
        b: wave.b,
        grid_n: n,
        rel_step: opts.rel_step,
        theta,
        dl_dc3,
        inertia_l,
        inertia_m,
        s_matrix: as_array(&s),
        s_inverse: as_array(&s_inv),
        det_s,
        s_zero_tol,
        n0,
        z0,
        n_constrained,
        z_constrained,
        projected,
        counting_agrees,
        d_fm3_dc3,
        criterion_signs_agree: (det_s < 0.0) == (d_fm3_dc3 < 0.0),
        residuals,
        max_re_jl: jl.max_abs_real,
        jl,
        jl_refined,
        spectral_verdict,
        jl_consistent,
        orbital,
    })
}
