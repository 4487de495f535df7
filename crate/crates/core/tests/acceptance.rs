//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on failure.
//!
//! Reference values come from printed numbers, closed forms evaluated here, or
//! the independent solvers in `common`.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use common::*;
use dgh_waves::parallel::Execution;
use dgh_waves::params::{ReducedParams, RegionClass};
use dgh_waves::period::{
    b1_threshold, chicone, chicone_witness, monotonicity_scan_with, peaked_b_of_l, period,
    MonotoneVerdict, ScanAxis, DEFAULT_CHICONE_SAMPLES, DEFAULT_PERIOD_TOL,
};
use dgh_waves::profile::{conserved_quantities, solve_profile};
use dgh_waves::spectral::{
    build_l, fixed_period_b, inertia, orbital_check, schrodinger_transform, stability_indices,
    theta_index, StabilityOptions,
};
use dgh_waves::verify::clustered_grid;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

const SEED: u64 = 7;

fn p21() -> ReducedParams {
    ReducedParams::new(2.0, 1.0)
}

fn ensure(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn lib<T>(r: dgh_waves::error::Result<T>) -> Result<T, String> {
    r.map_err(|e| format!("library error: {e}"))
}

fn period_of(r: &ReducedParams, c3: f64, b: f64) -> Result<f64, String> {
    Ok(lib(period(r, c3, b, DEFAULT_PERIOD_TOL))?.period)
}

/// Central difference of the period in `C3` at fixed `b`.
fn dl_dc3(r: &ReducedParams, c3: f64, b: f64) -> Result<f64, String> {
    let h = 1e-5 * c3.max(1e-3);
    Ok((period_of(r, c3 + h, b)? - period_of(r, c3 - h, b)?) / (2.0 * h))
}

fn random_params(rng: &mut ChaCha8Rng) -> ReducedParams {
    let c1 = rng.random_range(0.5..3.0);
    let c2 = rng.random_range((-2.0 * c1 + 0.5_f64).max(-2.0)..3.0);
    ReducedParams::new(c1, c2)
}

fn critical_level(r: &ReducedParams) -> f64 {
    (2.0 * r.c1 + r.c2).powi(3) / 27.0
}

fn interior(
    r: &ReducedParams,
    c3_frac: f64,
    b_frac: f64,
) -> Result<(f64, f64), String> {
    let c3 = c3_frac * critical_level(r);
    let (bm, bp) = lib(r.boundary_b(c3))?;
    Ok((c3, bm + b_frac * (bp - bm)))
}

/// A wave well resolved on 256 collocation points.
fn random_wave(rng: &mut ChaCha8Rng) -> Result<(ReducedParams, f64, f64), String> {
    let r = random_params(rng);
    let (c3, b) = interior(&r, rng.random_range(0.15..0.85), rng.random_range(0.05..0.6))?;
    Ok((r, c3, b))
}

fn sig_digits_match(value: f64, printed: f64, digits: i32) -> bool {
    if printed == 0.0 {
        return value.abs() < 1e-12;
    }
    let scale = 10f64.powi(printed.abs().log10().floor() as i32 - digits + 1);
    (value - printed).abs() <= 0.5 * scale
}

fn g_classifier() -> Outcome {
    let cases = [
        (3.0, 1.02, -1.0, 7.32894),
        (2.01, 0.03, -1.0, -16.1944),
        (3.0, 3.0, -27.0 / 8.0, 0.0),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (c1, c2, b, printed) in cases {
        let g = lib(ReducedParams::new(c1, c2).g_classifier(b))?;
        ok &= sig_digits_match(g, printed, 5);
        detail.push(format!("g={g:.6}"));
    }
    ensure(ok, detail.join(" "))
}

fn region_corners() -> Outcome {
    let r = p21();
    let (bm0, bp0) = lib(r.boundary_b(0.0))?;
    let crit = lib(r.c3_critical())?;
    let (btop, btop2) = lib(r.boundary_b(crit))?;
    let err = [
        bm0 + 4.0,
        bp0 + 0.875,
        crit - 125.0 / 27.0,
        btop - 1.0 / 6.0,
        btop2 - 1.0 / 6.0,
    ]
    .iter()
    .fold(0.0f64, |m, e| m.max(e.abs()));
    ensure(err <= 1e-12, format!("max corner error {err:.2e}"))
}

fn root_ordering() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    let mut ordered = true;
    for _ in 0..10_000 {
        let c1 = rng.random_range(-5.0..5.0);
        let c2 = rng.random_range((-2.0 * c1 + 1e-3)..(-2.0 * c1 + 15.0));
        let r = ReducedParams::new(c1, c2);
        let c3 = rng.random_range(1e-6..(1.0 - 1e-6)) * critical_level(&r);
        let roots = lib(r.critical_roots(c3))?;
        let fmax = (c1 - c2) / 3.0;
        ordered &= -0.5 * c2 < roots.phi1
            && roots.phi1 <= fmax
            && fmax <= roots.phi2
            && roots.phi2 < c1
            && c1 < roots.phi3;
        for phi in [roots.phi1, roots.phi2, roots.phi3] {
            worst = worst.max((level_polynomial(c1, c2, phi) - c3).abs() / c3.abs().max(1.0));
        }
    }
    ensure(
        ordered && worst <= 1e-12,
        format!("ordered={ordered} max scaled residual {worst:.2e}"),
    )
}

fn period_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let points: Vec<(ReducedParams, f64, f64)> = (0..100)
        .map(|_| {
            let r = random_params(&mut rng);
            (r, rng.random_range(0.05..0.95), rng.random_range(0.02..0.95))
        })
        .collect();
    let errs = Execution::default().map(&points, |(r, fc, fb)| -> Result<f64, String> {
        let (c3, b) = interior(r, *fc, *fb)?;
        let quad = period_of(r, c3, b)?;
        let shot = rk4_period(r, c3, b, quad, 20_000);
        Ok(rel(shot, quad))
    });
    let errs: Vec<f64> = errs.into_iter().collect::<Result<_, _>>()?;
    let worst = errs.iter().fold(0.0f64, |m, e| m.max(*e));
    ensure(worst <= 1e-8, format!("max relative difference {worst:.2e} over 100 points"))
}

/// Period at the centre from four offsets `b_minus + delta (b_plus - b_minus)`
/// combined by Richardson extrapolation in `delta`.
fn centre_period(r: &ReducedParams, c3: f64) -> Result<f64, String> {
    let (bm, bp) = lib(r.boundary_b(c3))?;
    let mut level = Vec::new();
    for k in 0..4 {
        let d = 1e-3 / f64::powi(2.0, k);
        level.push(period_of(r, c3, bm + d * (bp - bm))?);
    }
    for order in 1..4 {
        let f = f64::powi(2.0, order);
        level = level.windows(2).map(|p| (f * p[1] - p[0]) / (f - 1.0)).collect();
    }
    Ok(level[0])
}

fn center_limit() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let r = random_params(&mut rng);
        let c3 = rng.random_range(0.05..0.95) * critical_level(&r);
        let extrap = centre_period(&r, c3)?;
        let (w2a, w2b) = centre_frequencies_squared(r.c1, r.c2, c3);
        worst = worst
            .max(rel(extrap, 2.0 * PI / w2a.sqrt()))
            .max(rel(extrap, 2.0 * PI / w2b.sqrt()));
    }
    let exact = centre_period(&p21(), 3.0)?;
    let exact_err = rel(exact, PI * 2f64.sqrt());
    ensure(
        worst <= 1e-6 && exact_err <= 1e-6,
        format!("max relative difference {worst:.2e}; exact case {exact:.12} (error {exact_err:.2e})"),
    )
}

fn peaked_limit() -> Outcome {
    let r = p21();
    let (c1, c2) = (r.c1, r.c2);
    let lo = -0.5 * c1 * c1 - c1 * c2;
    let hi = (c2 * c2 - 4.0 * c1 * c2) / 8.0;
    let mut worst = 0.0f64;
    for k in 0..10 {
        let b = lo + (hi - lo) * (0.05 + 0.09 * k as f64);
        let l = period_of(&r, 1e-10, b)?;
        // b = hi - (2 C1 + C2)^2 / (8 cosh^2(L/2)) solved for L.
        let closed = 2.0 * ((2.0 * c1 + c2) / (8.0 * (hi - b)).sqrt()).acosh();
        worst = worst.max(rel(l, closed));
    }
    let b2 = lib(peaked_b_of_l(&r, 2.0))?;
    ensure(
        worst <= 1e-3 && (b2 + 2.18741).abs() <= 1e-4,
        format!("max relative difference {worst:.2e}; b(L=2) = {b2:.6}"),
    )
}

/// `(C1, C2)` drawn from one of the four parameter regions.
fn quadrant(rng: &mut ChaCha8Rng, q: usize) -> ReducedParams {
    let c1 = rng.random_range(0.5..3.0);
    match q % 4 {
        0 => ReducedParams::new(c1, rng.random_range(0.05..0.95) * c1),
        1 => ReducedParams::new(c1, -rng.random_range(0.0..0.9) * 2.0 * c1),
        2 => ReducedParams::new(c1, c1 * rng.random_range(1.0..3.0)),
        _ => {
            let c2 = c1;
            ReducedParams::new(-rng.random_range(0.0..0.45) * c2, c2)
        }
    }
}

fn theorem2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut seen = [false; 4];
    let mut worst_margin = f64::INFINITY;
    let mut ok = true;
    for q in 0..10 {
        let r = quadrant(&mut rng, q);
        let (c1, c2) = (r.c1, r.c2);
        let region = if c1 > c2 && c2 > 0.0 {
            0
        } else if c1 > 0.0 && c2 <= 0.0 {
            1
        } else if c2 >= c1 && c1 > 0.0 {
            2
        } else {
            3
        };
        seen[region] = true;
        let c3 = rng.random_range(0.05..0.95) * critical_level(&r);
        let (bm, bp) = lib(r.boundary_b(c3))?;
        let d = 1e-3 * (bp - bm);
        let grid: Vec<f64> = (0..50)
            .map(|i| bm + d + (bp - bm - 2.0 * d) * i as f64 / 49.0)
            .collect();
        let t = lib(monotonicity_scan_with(Execution::default(), &r, ScanAxis::B, c3, &grid))?;
        ok &= t.verdict == MonotoneVerdict::Increasing;
        for w in t.samples.windows(2) {
            let margin = (w[1].period - w[0].period) / (10.0 * (w[0].est_error + w[1].est_error));
            worst_margin = worst_margin.min(margin);
        }
    }
    let all = seen.iter().all(|s| *s);
    ensure(
        ok && all && worst_margin > 1.0,
        format!("all increasing={ok}, four regions covered={all}, min difference / (10 x error) = {worst_margin:.3e}"),
    )
}

fn c3_verdict(r: &ReducedParams, b: f64) -> Result<MonotoneVerdict, String> {
    let (lo, hi) = lib(r.level_range(b))?;
    let grid = clustered_grid(lo, hi, 80, 1e-4);
    Ok(lib(monotonicity_scan_with(Execution::default(), r, ScanAxis::C3, b, &grid))?.verdict)
}

fn theorem3() -> Outcome {
    let r = p21();
    let bands = [
        (-3.0, MonotoneVerdict::Increasing),
        (-1.5, MonotoneVerdict::SingleMax),
        (-0.8, MonotoneVerdict::Decreasing),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (b, expect) in bands {
        let v = c3_verdict(&r, b)?;
        ok &= v == expect;
        detail.push(format!("b={b}: {v:?}"));
    }
    let b1 = b1_threshold(&r);
    let (mut lo, mut hi) = (-3.0, -1.5);
    while hi - lo > 5e-3 {
        let mid = 0.5 * (lo + hi);
        if c3_verdict(&r, mid)? == MonotoneVerdict::Increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let located = 0.5 * (lo + hi);
    ensure(
        ok && (b1 + 2.0219).abs() <= 1e-4 && (located - b1).abs() <= 1e-2,
        format!("{}; b1 = {b1:.7}, bisected boundary {located:.4}", detail.join(", ")),
    )
}

/// `W''` for `W = G / G'^2` from the factorisation `G = x^2 A(x)`,
/// `G' = x B(x)`, so that `W = A / B^2` has no removable singularity at `x = 0`.
fn convexity_reference(beta: f64, eta: f64, x: f64) -> f64 {
    let k = beta + 2.0;
    let d = x - eta;
    let a0 = -0.5 * (1.0 + k / d);
    let a1 = 0.5 * k / (d * d);
    let a2 = -k / d.powi(3);
    let b0 = -1.0 - k / d + x * k / (2.0 * d * d);
    let b1 = 1.5 * k / (d * d) - x * k / d.powi(3);
    let b2 = -4.0 * k / d.powi(3) + 3.0 * x * k / d.powi(4);
    a2 / b0.powi(2) - 4.0 * a1 * b1 / b0.powi(3) - 2.0 * a0 * b2 / b0.powi(3)
        + 6.0 * a0 * b1 * b1 / b0.powi(4)
}

fn chicone() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut count = 0;
    let (mut min_r, mut min_wpp, mut min_ref) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut worst = 0.0f64;
    while count < 20 {
        let r = random_params(&mut rng);
        let c3 = rng.random_range(0.02..0.98) * critical_level(&r);
        let q = centre(r.c1, r.c2, c3);
        if q <= 0.0 {
            continue;
        }
        count += 1;
        let w = lib(chicone_witness(&r, c3, DEFAULT_CHICONE_SAMPLES))?;
        min_r = min_r.min(w.min_r_on_range);
        min_wpp = min_wpp.min(w.min_wpp_on_range);
        let (beta, eta) = (r.c2 / q, (r.c1 - q) / q);
        let cell = (w.x2 - w.x1) / DEFAULT_CHICONE_SAMPLES as f64;
        for i in 0..DEFAULT_CHICONE_SAMPLES {
            let x = w.x1 + (i as f64 + 0.5) * cell;
            let reference = convexity_reference(beta, eta, x);
            min_ref = min_ref.min(reference);
            worst = worst.max(rel(chicone::w_second_derivative(beta, eta, x), reference));
        }
    }
    ensure(
        min_r > 0.0 && min_wpp > 0.0 && min_ref > 0.0 && worst <= 1e-8,
        format!("min R {min_r:.3e}, min W'' {min_wpp:.3e} (reference {min_ref:.3e}, max relative difference {worst:.1e})"),
    )
}

fn identities() -> Outcome {
    let r = p21();
    let target = 5.0;
    let n = 256;
    let mut detail = Vec::new();
    let mut ok = true;
    for c3 in [1.5, 2.5] {
        let start = Instant::now();
        let b = lib(fixed_period_b(&r, target, c3))?;
        let p = lib(solve_profile(&r, c3, b, n))?;
        let phi = &p.phi;
        let ddphi = p.ddphi();

        let kernel = max_abs(&apply_l(&p, &p.dphi)) / max_abs(&p.dphi);

        let h = 1e-4 * c3;
        let wave = |rr: &ReducedParams, level: f64| -> Result<(f64, Vec<f64>), String> {
            let bb = lib(fixed_period_b(rr, target, level))?;
            Ok((bb, lib(solve_profile(rr, level, bb, n))?.phi))
        };
        let (bm, pm) = wave(&r, c3 - h)?;
        let (bp, pp) = wave(&r, c3 + h)?;
        let d_b: Vec<f64> = pp.iter().zip(&pm).map(|(a, m)| (a - m) / (bp - bm)).collect();
        let inverse_b = max_abs(&apply_l(&p, &d_b).iter().map(|v| v - 1.0).collect::<Vec<_>>());

        let k = 1e-4 * r.c1;
        let (bcm, pcm) = wave(&ReducedParams::new(r.c1 - k, r.c2), c3)?;
        let (bcp, pcp) = wave(&ReducedParams::new(r.c1 + k, r.c2), c3)?;
        let slope_b = (bcp - bcm) / (2.0 * k);
        let d_c: Vec<f64> = (0..n)
            .map(|j| (pcp[j] - pcm[j]) / (2.0 * k) - d_b[j] * slope_b)
            .collect();
        let ld_c = apply_l(&p, &d_c);
        let inverse_c = max_abs(&(0..n).map(|j| ld_c[j] + phi[j] - ddphi[j]).collect::<Vec<_>>());
        let secs = start.elapsed().as_secs_f64();

        ok &= kernel <= 1e-6 && inverse_b <= 1e-4 && inverse_c <= 1e-4 && secs < 30.0;
        detail.push(format!(
            "C3={c3}: kernel {kernel:.1e}, inverse_b {inverse_b:.1e}, inverse_c {inverse_c:.1e} ({secs:.1}s)"
        ));
    }
    ensure(ok, detail.join("; "))
}

fn spectral_trichotomy() -> Outcome {
    let r = p21();
    let b = -1.9;
    let (_, hi) = lib(r.level_range(b))?;
    let levels: Vec<f64> = (0..24).map(|i| hi * (0.3 + 0.67 * i as f64 / 23.0)).collect();
    let rows = Execution::default().map(&levels, |&c3| -> Result<(f64, f64, usize, usize), String> {
        let counts = lib(inertia(&lib(build_l(&lib(solve_profile(&r, c3, b, 256))?))?, None))?;
        Ok((period_of(&r, c3, b)?, dl_dc3(&r, c3, b)?, counts.n_neg, counts.n_zero))
    });
    let rows: Vec<_> = rows.into_iter().collect::<Result<_, _>>()?;
    let matches = rows
        .iter()
        .all(|&(_, d, neg, zero)| (neg, zero) == if d > 0.0 { (2, 1) } else { (1, 1) });
    let argmax = rows
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let switch = rows.iter().position(|row| row.2 == 1);
    let both = rows.iter().any(|row| row.2 == 2) && switch.is_some();
    let located = matches!(switch, Some(s) if s.abs_diff(argmax) <= 1);
    ensure(
        matches && both && located,
        format!("counts follow the slope sign={matches}; period maximum at sample {argmax}, switch at {switch:?}"),
    )
}

fn random_waves(count: usize) -> Result<Vec<(ReducedParams, f64, f64)>, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..count).map(|_| random_wave(&mut rng)).collect()
}

fn inertia_equivalence() -> Outcome {
    let waves = random_waves(20)?;
    let rows = Execution::default().map(&waves, |(r, c3, b)| -> Result<bool, String> {
        let p = lib(solve_profile(r, *c3, *b, 256))?;
        let l = lib(inertia(&lib(build_l(&p))?, None))?;
        let m = lib(inertia(&lib(schrodinger_transform(&p))?, None))?;
        Ok((l.n_neg, l.n_zero) == (m.n_neg, m.n_zero))
    });
    let rows: Vec<bool> = rows.into_iter().collect::<Result<_, _>>()?;
    let agree = rows.iter().filter(|x| **x).count();
    ensure(agree == rows.len(), format!("{agree}/{} waves agree", rows.len()))
}

fn theta_sign() -> Outcome {
    let waves = random_waves(20)?;
    let rows = Execution::default().map(&waves, |(r, c3, b)| -> Result<bool, String> {
        let p = lib(solve_profile(r, *c3, *b, 16))?;
        let theta = lib(theta_index(&p))?;
        let reference = rk4_theta(r, *c3, *b, p.period_z, 40_000);
        let d = dl_dc3(r, *c3, *b)?;
        Ok(theta.signum() == -d.signum() && reference.signum() == theta.signum())
    });
    let rows: Vec<bool> = rows.into_iter().collect::<Result<_, _>>()?;
    let good = rows.iter().filter(|x| **x).count();
    ensure(good == rows.len(), format!("{good}/{} waves obey the sign law", rows.len()))
}

/// `d(F/M^3)/dC3` along the fixed-period family, by central differences.
fn d_fm3(r: &ReducedParams, target: f64, c3: f64) -> Result<f64, String> {
    let phys = lib(r.expand(1.0, 0.0))?;
    let ratio = |level: f64| -> Result<f64, String> {
        let b = lib(fixed_period_b(r, target, level))?;
        let q = lib(conserved_quantities(&lib(solve_profile(r, level, b, 256))?, &phys))?;
        Ok(q.f / q.m.powi(3))
    };
    let h = 1e-4 * c3;
    Ok((ratio(c3 + h)? - ratio(c3 - h)?) / (2.0 * h))
}

fn theorem4() -> Outcome {
    let r = p21();
    let phys = lib(r.expand(1.0, 0.0))?;
    let target = 5.0;
    let mut applicable = 0;
    let mut ok = true;
    let mut detail = Vec::new();
    for c3 in [1.5, 2.5, 3.3] {
        let b = lib(fixed_period_b(&r, target, c3))?;
        let hyp = d_fm3(&r, target, c3)? < 0.0 && dl_dc3(&r, c3, b)? < 0.0;
        if !hyp {
            detail.push(format!("C3={c3}: hypotheses not met"));
            continue;
        }
        applicable += 1;
        let rep = lib(stability_indices(&r, &phys, target, c3, &StabilityOptions::default()))?;
        let refined = rep.jl_refined.ok_or("no refined J L check")?;
        let counts = (rep.n_constrained, rep.z_constrained) == (0, 1);
        let coarse = rep.jl.max_abs_real <= 1e-6 * rep.jl.norm;
        let fine = refined.max_abs_real <= 1e-6 * refined.norm;
        ok &= counts && coarse && fine;
        detail.push(format!(
            "C3={c3}: ({},{}) max|Re| {:.1e}/{:.1e} at 256, {:.1e}/{:.1e} at 512",
            rep.n_constrained,
            rep.z_constrained,
            rep.jl.max_abs_real,
            rep.jl.norm,
            refined.max_abs_real,
            refined.norm
        ));
    }
    ensure(ok && applicable > 0, detail.join("; "))
}

fn orbital() -> Outcome {
    let r = p21();
    let phys = lib(r.expand(1.0, 0.0))?;
    let mut worst = 0.0f64;
    let mut found = 0;
    let mut total = 0;
    for b in [-0.8, -0.7, -0.6, -0.5, -0.4, -0.3] {
        let (lo, hi) = lib(r.level_range(b))?;
        for frac in [0.3, 0.6] {
            let c3 = lo + frac * (hi - lo);
            if r.classify(c3, b) != RegionClass::InteriorPeriodic {
                continue;
            }
            let p = lib(solve_profile(&r, c3, b, 256))?;
            let o = lib(orbital_check(&p, &phys))?;
            let y: Vec<f64> = p.phi.iter().map(|v| v + 0.5 * r.c2).collect();
            let ly = apply_l(&p, &y);
            let lyy = ly.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() * p.dz();
            worst = worst.max(o.lyy_rel_diff).max(rel(lyy, o.lyy_expansion));
            found += usize::from(o.verdict);
            total += 1;
        }
    }
    ensure(
        worst <= 1e-6 && found > 0,
        format!("max relative difference {worst:.1e}; verdict true on {found}/{total} waves"),
    )
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: &[Criterion] = &[
        ("g-classifier printed values", g_classifier, Duration::from_millis(1)),
        ("existence-region corners", region_corners, Duration::from_millis(1)),
        ("root ordering on 10^4 samples", root_ordering, Duration::from_secs(5)),
        ("period by quadrature vs shooting", period_oracle, Duration::from_secs(60)),
        ("centre limit of the period", center_limit, Duration::from_secs(30)),
        ("peaked limit of the period", peaked_limit, Duration::from_secs(30)),
        ("period increases in b (four regions)", theorem2, Duration::from_secs(60)),
        ("period trichotomy in C3", theorem3, Duration::from_secs(120)),
        ("convexity witness", chicone, Duration::from_secs(30)),
        ("kernel and inverse identities", identities, Duration::from_secs(60)),
        ("inertia follows the period slope", spectral_trichotomy, Duration::from_secs(300)),
        ("inertia of L and M agree", inertia_equivalence, Duration::from_secs(120)),
        ("theta sign law", theta_sign, Duration::from_secs(120)),
        ("spectral stability end to end", theorem4, Duration::from_secs(600)),
        ("orbital certificate", orbital, Duration::from_secs(120)),
    ];
    let mut failures = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let timed = elapsed <= *budget;
        let (pass, detail) = match outcome {
            Ok(d) => (timed, d),
            Err(d) => (false, d),
        };
        failures += usize::from(!pass);
        println!(
            "{} {name}: {detail} [{:.3}s, budget {:.3}s{}]",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs_f64(),
            if timed { "" } else { ", over budget" }
        );
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
