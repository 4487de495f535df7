//! Built-in verification suites run by `dgh verify`.
//!
//! Each suite evaluates a fixed or seeded-random set of parameter points and
//! reports the measured values alongside a pass/fail flag.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;
use crate::parallel::Execution;
use crate::params::{ReducedParams, RegionClass};
use crate::period::{
    b1_threshold, center_frequencies, chicone_witness, monotonicity_scan_with, peaked_b_of_l,
    peaked_l_of_b, period, period_by_shooting, period_partials, MonotoneVerdict, ScanAxis,
    DEFAULT_CHICONE_SAMPLES, DEFAULT_PERIOD_TOL,
};
use crate::profile::solve_profile;
use crate::spectral::{
    build_l, constraint_invariance_check, inertia, orbital_check, schrodinger_transform,
    stability_indices, theta_index, StabilityOptions,
};

pub const SUITES: &[&str] = &[
    "g-classifier",
    "region-corners",
    "root-ordering",
    "period-oracle",
    "center-limit",
    "peaked-limit",
    "theorem2",
    "theorem3",
    "chicone",
    "identities",
    "spectral-trichotomy",
    "inertia-equivalence",
    "theta-sign",
    "theorem4",
    "orbital",
];

/// Inputs shared by all suites. `params`, `c3` and `b` override the built-in
/// points for the suites that take a single point.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyConfig {
    pub params: Option<ReducedParams>,
    #[serde(rename = "C3")]
    pub c3: Option<f64>,
    pub b: Option<f64>,
    pub count: Option<usize>,
    pub seed: u64,
    pub grid_n: usize,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            params: None,
            c3: None,
            b: None,
            count: None,
            seed: 2024,
            grid_n: 256,
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub suite: String,
    pub passed: bool,
    pub seconds: f64,
    pub measured: Value,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Random admissible `(C1, C2)` with `2 C1 + C2` bounded away from zero.
pub fn random_params(rng: &mut ChaCha8Rng) -> ReducedParams {
    let c1 = rng.random_range(0.5..3.0);
    let c2 = rng.random_range((-2.0 * c1 + 0.5_f64).max(-2.0)..3.0);
    ReducedParams::new(c1, c2)
}

/// Random interior point: `C3` and `b` placed at the given fractions of their
/// admissible ranges.
pub fn interior_point(
    r: &ReducedParams,
    c3_frac: f64,
    b_frac: f64,
) -> Result<(f64, f64)> {
    let c3 = c3_frac * r.c3_critical()?;
    let (bm, bp) = r.boundary_b(c3)?;
    Ok((c3, bm + b_frac * (bp - bm)))
}

/// A random wave that the default collocation grid resolves well.
pub fn random_smooth_wave(rng: &mut ChaCha8Rng) -> Result<(ReducedParams, f64, f64)> {
    let r = random_params(rng);
    let (c3, b) = interior_point(&r, rng.random_range(0.15..0.85), rng.random_range(0.05..0.6))?;
    Ok((r, c3, b))
}

/// Grid on `(lo, hi)` clustered at both ends, omitting a relative margin `d`.
pub fn clustered_grid(lo: f64, hi: f64, count: usize, d: f64) -> Vec<f64> {
    (0..count)
        .map(|i| {
            let t = d + (1.0 - 2.0 * d) * i as f64 / (count - 1) as f64;
            lo + (hi - lo) * 0.5 * (1.0 - (PI * t).cos())
        })
        .collect()
}

fn p21() -> ReducedParams {
    ReducedParams::new(2.0, 1.0)
}

type SuiteFn = fn(&VerifyConfig) -> Result<(bool, Value)>;

fn suite_fn(name: &str) -> Option<SuiteFn> {
    Some(match name {
        "g-classifier" => g_classifier,
        "region-corners" => region_corners,
        "root-ordering" => root_ordering,
        "period-oracle" => period_oracle,
        "center-limit" => center_limit,
        "peaked-limit" => peaked_limit,
        "theorem2" => theorem2,
        "theorem3" => theorem3,
        "chicone" => chicone,
        "identities" => identities,
        "spectral-trichotomy" => spectral_trichotomy,
        "inertia-equivalence" => inertia_equivalence,
        "theta-sign" => theta_sign,
        "theorem4" => theorem4,
        "orbital" => orbital,
        _ => return None,
    })
}

pub fn is_suite(name: &str) -> bool {
    suite_fn(name).is_some()
}

/// Run one suite. Library errors inside a suite count as a failure and are
/// reported in `measured.error`.
pub fn run_suite(name: &str, cfg: &VerifyConfig) -> Option<SuiteOutcome> {
    let f = suite_fn(name)?;
    let start = Instant::now();
    let (passed, measured) = match f(cfg) {
        Ok(v) => v,
        Err(e) => (false, json!({ "error": e.to_string(), "kind": e.kind() })),
    };
    Some(SuiteOutcome {
        suite: name.to_string(),
        passed,
        seconds: start.elapsed().as_secs_f64(),
        measured,
    })
}

fn sig_digits_match(value: f64, printed: f64, digits: i32) -> bool {
    if printed == 0.0 {
        return value.abs() < 1e-12;
    }
    let scale = 10f64.powi(printed.abs().log10().floor() as i32 - digits + 1);
    (value - printed).abs() <= 0.5 * scale
}

fn g_classifier(_: &VerifyConfig) -> Result<(bool, Value)> {
    let cases = [
        (3.0, 1.02, -1.0, 7.32894),
        (2.01, 0.03, -1.0, -16.1944),
        (3.0, 3.0, -27.0 / 8.0, 0.0),
    ];
    let mut rows = Vec::new();
    let mut ok = true;
    for (c1, c2, b, printed) in cases {
        let g = ReducedParams::new(c1, c2).g_classifier(b)?;
        let pass = sig_digits_match(g, printed, 5);
        ok &= pass;
        rows.push(json!({ "C1": c1, "C2": c2, "b": b, "g": g, "printed": printed, "pass": pass }));
    }
    Ok((ok, json!({ "cases": rows })))
}

fn region_corners(cfg: &VerifyConfig) -> Result<(bool, Value)> {
    let r = cfg.params.unwrap_or_else(p21);
    let (bm0, bp0) = r.boundary_b(0.0)?;
    let crit = r.c3_critical()?;
    let (btop, _) = r.boundary_b(crit)?;
    let (c1, c2) = (r.c1, r.c2);
    let expect = [
        -0.5 * c1 * c1 - c1 * c2,
        (c2 * c2 - 4.0 * c1 * c2) / 8.0,
        (2.0 * c1 + c2).powi(3) / 27.0,
        (c1 - c2).powi(2) / 6.0,
    ];
    let got = [bm0, bp0, crit, btop];
    let err = got
        .iter()
        .zip(&expect)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok((
        err <= 1e-12,
        json!({ "A1": [0.0, bm0], "A2": [0.0, bp0], "A3": [crit, btop], "max_error": err }),
    ))
}

fn root_ordering(cfg: &VerifyConfig) -> Result<(bool, Value)> {
    let count = cfg.count.unwrap_or(10_000);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst = 0.0f64;
    let mut ordered = true;
    for _ in 0..count {
        let c1 = rng.random_range(-5.0..5.0);
        let c2 = rng.random_range((-2.0 * c1 + 1e-3)..(-2.0 * c1 + 15.0));
        let r = ReducedParams::new(c1, c2);
        let c3 = rng.random_range(1e-6..(1.0 - 1e-6)) * r.c3_critical()?;
        let roots = r.critical_roots(c3)?;
        ordered &= -0.5 * c2 < roots.phi1
            && roots.phi1 <= r.f_max_location()
            && roots.phi1 < roots.phi2
            && roots.phi2 < c1
            && c1 < roots.phi3;
        for phi in [roots.phi1, roots.phi2, roots.phi3] {
            worst = worst.max((r.f(phi) - c3).abs() / c3.abs().max(1.0));
        }
    }
    Ok((
        ordered && worst <= 1e-12,
        json!({ "count": count, "ordered": ordered, "max_scaled_residual": worst }),
    ))
}

fn period_oracle(cfg: &VerifyConfig) -> Result<(bool, Value)> {
    let count = cfg.count.unwrap_or(100);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let points: Vec<_> = (0..count)
        .map(|_| {
            let r = random_params(&mut rng);
            let f = (rng.random_range(0.05..0.95), rng.random_range(0.02..0.95));
            (r, f)
        })
        .collect();
    let errs = cfg.exec.map(&points, |(r, (fc, fb))| -> Result<f64> {
        let (c3, b) = interior_point(r, *fc, *fb)?;
        let quad = period(r, c3, b, DEFAULT_PERIOD_TOL)?.period;
        let shot = period_by_shooting(r, c3, b, 2.0 * quad)?;
        Ok(rel(shot, quad))
    });
    let errs: Vec<f64> = errs.into_iter().collect::<Result<_>>()?;
    let worst = errs.iter().copied().fold(0.0, f64::max);
    Ok((worst <= 1e-8, json!({ "count": count, "max_rel_diff": worst })))
}

/// Period at the centre, extrapolated from `b = b_minus + delta (b_plus - b_minus)`
/// with three Richardson levels.
pub fn extrapolated_center_period(r: &ReducedParams, c3: f64) -> Result<f64> {
    let (bm, bp) = r.boundary_b(c3)?;
    let w = bp - bm;
    let d0 = 1e-3;
    let mut level: Vec<f64> = (0..4)
        .map(|k| {
            let d = d0 / f64::powi(2.0, k);
            period(r, c3, bm + d * w, DEFAULT_PERIOD_TOL).map(|p| p.period)
        })
        .collect::<Result<_>>()?;
    for order in 1..4 {
        let f = f64::powi(2.0, order);
        level = level.windows(2).map(|p| (f * p[1] - p[0]) / (f - 1.0)).collect();
    }
    Ok(level[0])
}

fn center_limit(cfg: &VerifyConfig) -> Result<(bool, Value)> {
    let count = cfg.count.unwrap_or(20);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut cases = vec![(p21(), 3.0)];
    for _ in 0..count {
        let r = random_params(&mut rng);
        let c3 = rng.random_range(0.05..0.95) * r.c3_critical()?;
        cases.push((r, c3));
    }
    let mut worst = 0.0f64;
    for (r, c3) in &cases {
        let extrap = extrapolated_center_period(r, *c3)?;
        let (w2a, w2b) = center_frequencies(r, *c3)?;
        worst = worst
            .max(rel(extrap, 2.0 * PI / w2a.sqrt()))
            .max(rel(extrap, 2.0 * PI / w2b.sqrt()));
    }
    let exact = extrapolated_center_period(&p21(), 3.0)?;
    let exact_err = rel(exact, PI * 2f64.sqrt());
    Ok((
        worst <= 1e-6 && exact_err <= 1e-6,
        json!({ "count": cases.len(), "max_rel_diff": worst, "exact_case": exact, "exact_rel_diff": exact_err }),
    ))
}

fn peaked_limit(cfg: &VerifyConfig) -> Result<(bool, Value)> {
    let r = cfg.params.unwrap_or_else(p21);
    let c3 = 1e-10;
    let (bm, bp) = r.boundary_b(0.0)?;
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for k in 0..10 {
        let b = bm + (bp - bm) * (0.05 + 0.09 * k as f64);
        let l = period(&r, c3, b, DEFAULT_PERIOD_TOL)?.period;
        let closed = peaked_l_of_b(&r, b)?;
        worst = worst.max(rel(l, closed));
        rows.push(json!({ "b": b, "L": l, "L_closed": closed }));
    }
    let b2 = peaked_b_of_l(&p21(), 2.0)?;
    let b2_ok = (b2 + 2.18741).abs() <= 1e-4;
    Ok((
        worst <= 1e-3 && b2_ok,
        json!({ "C3": c3, "max_rel_diff": worst, "samples": rows, "b_at_L2": b2 }),
    ))
}

/// Representative `(C1, C2)` in each of the four parameter regions used for
/// the monotonicity in `b`.
fn quadrant_params(rng: &mut ChaCha8Rng, q: usize) -> ReducedParams {
    match q % 4 {
        0 => {
            let c1 = rng.random_range(0.5..3.0);
            ReducedParams::new(c1, rng.random_range(0.05..0.95) * c1)
        }
        1 => {
            let c1 = rng.random_range(0.5..3.0);
            ReducedParams::new(c1, -rng.random_range(0.0..0.9) * 2.0 * c1)
        }
        2 => {
            let c1 = rng.random_range(0.5..3.0);
            ReducedParams::new(c1, c1 * rng.random_range(1.0..3.0))
        }
        _ => {
            let c2 = rng.random_range(0.5..3.0);
            ReducedParams::new(-rng.random_range(0.0..0.45) * c2, c2)
        }
    }
}

fn theorem2(cfg: &VerifyConfig) -> Result<(bool, Value)> {
    let count = cfg.count.unwrap_or(50);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let cases: Vec<(ReducedParams, f64)> = match (cfg.params, cfg.c3) {
        (Some(r), Some(c3)) => vec![(r, c3)],
        _ => (0..10)
            .map(|q| {
                let r = quadrant_params(&mut rng, q);
                let c3 = rng.random_range(0.05..0.95) * r.c3_critical().unwrap_or(0.0);
                (r, c3)
            })
            .collect(),
    };
    let mut ok = true;
    let mut rows = Vec::new();
    for (r, c3) in cases {
        let (bm, bp) = r.boundary_b(c3)?;
        let d = 1e-3 * (bp - bm);
        let grid: Vec<f64> = (0..count)
            .map(|i| bm + d + (bp - bm - 2.0 * d) * i as f64 / (count - 1) as f64)
            .collect();
        let t = monotonicity_scan_with(cfg.exec, &r, ScanAxis::B, c3, &grid)?;
        let pass = t.verdict == MonotoneVerdict::Increasing && t.min_margin > 1.0;
        ok &= pass;
        rows.push(json!({ "params": r, "C3": c3, "verdict": t.verdict, "min_margin": t.min_margin }));
    }
    Ok((ok, json!({ "points": count, "scans": rows })))
}

/// Verdict of a `C3` scan at fixed `b` over the whole interior level range.
pub fn c3_scan_verdict(
    exec: Execution,
    r: &ReducedParams,
    b: f64,
    count: usize,
) -> Result<(MonotoneVerdict, f64)> {
    let (lo, hi) = r.level_range(b)?;
    let grid = clustered_grid(lo, hi, count, 1e-4);
    let t = monotonicity_scan_with(exec, r, ScanAxis::C3, b, &grid)?;
    Ok((t.verdict, t.min_margin))
}

fn theorem3(cfg: &VerifyConfig) -> Result<(bool, Value)> {
    let r = p21();
    let count = cfg.count.unwrap_or(80);
    let bands = [
        (-3.0, MonotoneVerdict::Increasing),
        (-1.5, MonotoneVerdict::SingleMax),
        (-0.8, MonotoneVerdict::Decreasing),
    ];
    let mut ok = true;
    let mut rows = Vec::new();
    for (b, expect) in bands {
        let (verdict, margin) = c3_scan_verdict(cfg.exec, &r, b, count)?;
        ok &= verdict == expect;
        rows.push(json!({ "b": b, "verdict": verdict, "expected": expect, "min_margin": margin }));
    }
    let b1 = b1_threshold(&r);
    let (mut lo, mut hi) = (-3.0, -1.5);
    while hi - lo > 5e-3 {
        let mid = 0.5 * (lo + hi);
        match c3_scan_verdict(cfg.exec, &r, mid, count)?.0 {
            MonotoneVerdict::Increasing => lo = mid,
            _ => hi = mid,
        }
    }
    let located = 0.5 * (lo + hi);
    let b1_ok = (b1 + 2.0219).abs() <= 1e-4 && (located - b1).abs() <= 1e-2;
    Ok((
        ok && b1_ok,
        json!({ "bands": rows, "b1": b1, "b1_from_scans": located }),
    ))
}

fn chicone(cfg: &VerifyConfig) -> Result<(bool, Value)> {
    let count = cfg.count.unwrap_or(20);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::new();
    let mut ok = true;
    while rows.len() < count {
        let r = random_params(&mut rng);
        let c3 = rng.random_range(0.02..0.98) * r.c3_critical()?;
        if r.critical_roots(c3)?.phi2 <= 0.0 {
            continue;
        }
        let w = chicone_witness(&r, c3, DEFAULT_CHICONE_SAMPLES)?;
        let pass = w.min_r_on_range > 0.0 && w.min_wpp_on_range > 0.0;
        ok &= pass;
        rows.push(json!({ "params": r, "C3": c3, "min_R": w.min_r_on_range, "min_Wpp": w.min_wpp_on_range }));
    }
    Ok((ok, json!({ "samples": DEFAULT_CHICONE_SAMPLES, "points": rows })))
}

fn identities(cfg: &VerifyConfig) -> Result<(bool, Value)> {
    let r = cfg.params.unwrap_or_else(p21);
    let c3 = cfg.c3.unwrap_or(2.5);
    let phys = r.expand(1.0, 0.0)?;
    let opts = StabilityOptions {
        n: cfg.grid_n,
        check_refined: false,
        ..Default::default()
    };
    let rep = stability_indices(&r, &phys, 5.0, c3, &opts)?;
    let res = rep.residuals;
    let ok = res.kernel <= 1e-6 && res.inverse_b <= 1e-4 && res.inverse_c <= 1e-4;
    Ok((ok, json!({ "L_target": 5.0, "C3": c3, "b": rep.b, "grid_n": cfg.grid_n, "residuals": res })))
}

fn spectral_trichotomy(cfg: &VerifyConfig) -> Result<(bool, Value)> {
    let r = p21();
    let b = cfg.b.unwrap_or(-1.9);
    let count = cfg.count.unwrap_or(24);
    let (_, hi) = r.level_range(b)?;
    let levels: Vec<f64> = (0..count)
        .map(|i| hi * (0.3 + 0.67 * i as f64 / (count - 1) as f64))
        .collect();
    let n = cfg.grid_n;
    let rows = cfg.exec.map(&levels, |&c3| -> Result<(f64, f64, usize, usize)> {
        let l = period(&r, c3, b, DEFAULT_PERIOD_TOL)?.period;
        let d = period_partials(&r, c3, b)?.d_c3;
        let counts = inertia(&build_l(&solve_profile(&r, c3, b, n)?)?, None)?;
        Ok((l, d, counts.n_neg, counts.n_zero))
    });
    let rows: Vec<_> = rows.into_iter().collect::<Result<_>>()?;
    let mut ok = true;
    for &(_, d, neg, zero) in &rows {
        let expect = if d > 0.0 { (2, 1) } else { (1, 1) };
        ok &= (neg, zero) == expect;
    }
    // The inertia switch must sit at the period maximum along the scan.
    let argmax = rows
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let switch = rows.iter().position(|row| row.2 == 1);
    let located = matches!(switch, Some(s) if s.abs_diff(argmax) <= 1);
    let has_both = rows.iter().any(|row| row.2 == 2) && rows.iter().any(|row| row.2 == 1);
    let table: Vec<Value> = levels
        .iter()
        .zip(&rows)
        .map(|(c3, (l, d, neg, zero))| json!({ "C3": c3, "L": l, "dL_dC3": d, "n_neg": neg, "n_zero": zero }))
        .collect();
    Ok((
        ok && located && has_both,
        json!({ "b": b, "grid_n": n, "argmax": argmax, "switch": switch, "scan": table }),
    ))
}

fn random_waves(cfg: &VerifyConfig) -> Result<Vec<(ReducedParams, f64, f64)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.count.unwrap_or(20))
        .map(|_| random_smooth_wave(&mut rng))
        .collect()
}

fn inertia_equivalence(cfg: &VerifyConfig) -> Result<(bool, Value)> {
    let waves = random_waves(cfg)?;
    let n = cfg.grid_n;
    let rows = cfg.exec.map(&waves, |(r, c3, b)| -> Result<Value> {
        let p = solve_profile(r, *c3, *b, n)?;
        let l = inertia(&build_l(&p)?, None)?;
        let m = inertia(&schrodinger_transform(&p)?, None)?;
        Ok(json!({
            "params": r, "C3": c3, "b": b,
            "L": [l.n_neg, l.n_zero], "M": [m.n_neg, m.n_zero],
            "pass": l.n_neg == m.n_neg && l.n_zero == m.n_zero,
        }))
    });
    let rows: Vec<Value> = rows.into_iter().collect::<Result<_>>()?;
    let ok = rows.iter().all(|r| r["pass"] == json!(true));
    Ok((ok, json!({ "grid_n": n, "waves": rows })))
}

fn theta_sign(cfg: &VerifyConfig) -> Result<(bool, Value)> {
    let waves = random_waves(cfg)?;
    let rows = cfg.exec.map(&waves, |(r, c3, b)| -> Result<Value> {
        let p = solve_profile(r, *c3, *b, 16)?;
        let theta = theta_index(&p)?;
        let d = period_partials(r, *c3, *b)?.d_c3;
        Ok(json!({
            "params": r, "C3": c3, "b": b, "theta": theta, "dL_dC3": d,
            "pass": theta.signum() == -d.signum(),
        }))
    });
    let rows: Vec<Value> = rows.into_iter().collect::<Result<_>>()?;
    let ok = rows.iter().all(|r| r["pass"] == json!(true));
    Ok((ok, json!({ "waves": rows })))
}

fn theorem4(cfg: &VerifyConfig) -> Result<(bool, Value)> {
    let r = cfg.params.unwrap_or_else(p21);
    let phys = r.expand(1.0, 0.0)?;
    let levels = match cfg.c3 {
        Some(c) => vec![c],
        None => vec![1.5, 2.5, 3.3],
    };
    let opts = StabilityOptions {
        n: cfg.grid_n,
        ..Default::default()
    };
    let mut ok = true;
    let mut applicable = 0;
    let mut rows = Vec::new();
    for c3 in levels {
        let rep = stability_indices(&r, &phys, 5.0, c3, &opts)?;
        let hyp = rep.d_fm3_dc3 < 0.0 && rep.dl_dc3 < 0.0;
        let refined_stable = rep.jl_refined.is_some_and(|j| j.stable);
        let pass = !hyp
            || ((rep.n_constrained, rep.z_constrained) == (0, 1) && rep.jl.stable && refined_stable);
        applicable += usize::from(hyp);
        ok &= pass;
        rows.push(json!({
            "C3": c3, "b": rep.b, "dFM3_dC3": rep.d_fm3_dc3, "dL_dC3": rep.dl_dc3,
            "n_constrained": rep.n_constrained, "z_constrained": rep.z_constrained,
            "max_re_JL": rep.jl.max_abs_real, "tol": rep.jl.tol,
            "max_re_JL_refined": rep.jl_refined.map(|j| j.max_abs_real),
            "tol_refined": rep.jl_refined.map(|j| j.tol),
            "pass": pass,
        }));
    }
    Ok((
        ok && applicable > 0,
        json!({ "L_target": 5.0, "grid_n": cfg.grid_n, "points": rows }),
    ))
}

fn orbital(cfg: &VerifyConfig) -> Result<(bool, Value)> {
    let r = p21();
    let phys = r.expand(1.0, 0.0)?;
    let n = cfg.grid_n;
    let mut rows = Vec::new();
    let mut agree = true;
    let mut found = false;
    for b in [-0.8, -0.7, -0.6, -0.5, -0.4, -0.3] {
        let (lo, hi) = r.level_range(b)?;
        for frac in [0.3, 0.6] {
            let c3 = lo + frac * (hi - lo);
            if r.classify(c3, b) != RegionClass::InteriorPeriodic {
                continue;
            }
            let p = solve_profile(&r, c3, b, n)?;
            let o = orbital_check(&p, &phys)?;
            agree &= o.lyy_rel_diff <= 1e-6;
            found |= o.verdict;
            rows.push(json!({ "C3": c3, "b": b, "check": o }));
        }
    }
    let p = solve_profile(&r, 2.0, -0.6, n)?;
    let invariance = constraint_invariance_check(&p, 10, cfg.seed)?;
    Ok((
        agree && found,
        json!({ "grid_n": n, "waves": rows, "constraint_violation": invariance }),
    ))
}
