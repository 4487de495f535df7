//! Gauss-Legendre quadrature helpers built on cached rules.

use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

use crate::error::{Result, WaveError};

/// Smallest rule used by the doubling scheme.
pub const MIN_NODES: usize = 16;
/// Largest rule the doubling scheme may reach before giving up.
pub const MAX_NODES: usize = 1 << 14;

const LEVELS: usize = 11;
const PANEL_NODES: usize = 20;

static RULES: [OnceLock<GaussLegendre>; LEVELS] = [const { OnceLock::new() }; LEVELS];
static PANEL: OnceLock<GaussLegendre> = OnceLock::new();

fn rule(level: usize) -> &'static GaussLegendre {
    RULES[level].get_or_init(|| {
        GaussLegendre::new(MIN_NODES << level).expect("degree >= 2 is always valid")
    })
}

fn panel() -> &'static GaussLegendre {
    PANEL.get_or_init(|| GaussLegendre::new(PANEL_NODES).expect("degree >= 2 is always valid"))
}

/// Result of an integral computed by node doubling.
#[derive(Debug, Clone, Copy)]
pub struct Doubled {
    pub value: f64,
    pub est_error: f64,
    pub nodes: usize,
}

/// Integrate `f` over `[a, b]` with Gauss-Legendre rules of 16, 32, 64, ...
/// nodes until two successive values agree to `tol` (or to a few ulps of the
/// value, whichever is looser).
pub fn integrate_doubling<F: Fn(f64) -> f64>(a: f64, b: f64, f: F, tol: f64) -> Result<Doubled> {
    let mut prev = rule(0).integrate(a, b, &f);
    for level in 1..LEVELS {
        let cur = rule(level).integrate(a, b, &f);
        let diff = (cur - prev).abs();
        if !cur.is_finite() {
            return Err(WaveError::NonConvergent("integrand is not finite".into()));
        }
        if diff <= tol || diff <= 64.0 * f64::EPSILON * cur.abs() {
            return Ok(Doubled {
                value: cur,
                est_error: diff,
                nodes: MIN_NODES << level,
            });
        }
        prev = cur;
    }
    Err(WaveError::NonConvergent(format!(
        "quadrature did not converge with {MAX_NODES} nodes"
    )))
}

/// Adaptive composite Gauss-Legendre on `[a, b]`: a panel is split in two
/// until the split and unsplit values agree to `tol` relative to the total.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(a: f64, b: f64, f: &F, tol: f64) -> f64 {
    let whole = panel().integrate(a, b, f);
    refine(a, b, f, whole, tol.max(f64::EPSILON * whole.abs()), 0)
}

fn refine<F: Fn(f64) -> f64>(a: f64, b: f64, f: &F, whole: f64, tol: f64, depth: u32) -> f64 {
    let mid = 0.5 * (a + b);
    let left = panel().integrate(a, mid, f);
    let right = panel().integrate(mid, b, f);
    let split = left + right;
    if (split - whole).abs() <= tol || depth >= 40 {
        return split;
    }
    refine(a, mid, f, left, 0.5 * tol, depth + 1) + refine(mid, b, f, right, 0.5 * tol, depth + 1)
}
