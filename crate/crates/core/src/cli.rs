//! The `dgh` command-line front end.
//!
//! Every command prints one JSON document (or CSV table) containing its inputs,
//! the tolerances used and the results. Floating-point values are printed with
//! 17 significant digits in both formats.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::SymmetricEigen;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Result, WaveError};
use crate::parallel::Execution;
use crate::params::{PhaseWindow, PhysicalParams, ReducedParams};
use crate::period::{
    monotonicity_scan_with, period, period_partials, ScanAxis, DEFAULT_PERIOD_TOL,
};
use crate::profile::{conserved_quantities, peaked_profile, residual_check, solve_profile, Profile};
use crate::spectral::{
    build_jl, build_l, inertia, jl_spectrum_check, orbital_check, schrodinger_transform,
    stability_indices, SpectralOperator, StabilityOptions,
};
use crate::verify::{self, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "dgh", version, about = "Periodic travelling waves of the DGH equation")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Axis {
    #[value(name = "b")]
    B,
    #[value(name = "C3", alias = "c3")]
    C3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OperatorChoice {
    #[value(name = "L")]
    L,
    #[value(name = "M")]
    M,
    #[value(name = "JL")]
    Jl,
}

/// Either the reduced pair `(C1, C2)` or the four physical constants.
#[derive(Debug, Clone, Args)]
struct ParamArgs {
    /// Reduced constant C1 (with --c2; implies alpha = 1, gamma = 0).
    #[arg(long, allow_hyphen_values = true, requires = "c2",
          conflicts_with_all = ["alpha", "omega", "gamma", "c"])]
    c1: Option<f64>,
    /// Reduced constant C2.
    #[arg(long, allow_hyphen_values = true, requires = "c1")]
    c2: Option<f64>,
    /// Physical parameter alpha (with --omega, --gamma, --c).
    #[arg(long, allow_hyphen_values = true, requires_all = ["omega", "gamma", "c"])]
    alpha: Option<f64>,
    /// Physical parameter omega.
    #[arg(long, allow_hyphen_values = true, requires_all = ["alpha", "gamma", "c"])]
    omega: Option<f64>,
    /// Physical parameter gamma.
    #[arg(long, allow_hyphen_values = true, requires_all = ["alpha", "omega", "c"])]
    gamma: Option<f64>,
    /// Wave speed c.
    #[arg(long, allow_hyphen_values = true, requires_all = ["alpha", "omega", "gamma"])]
    c: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify (C3, b), or sample the region boundary with --boundary.
    Region {
        #[command(flatten)]
        params: ParamArgs,
        /// Level C3 of the first integral.
        #[arg(long, allow_hyphen_values = true)]
        c3: Option<f64>,
        /// Integration constant b.
        #[arg(long, allow_hyphen_values = true)]
        b: Option<f64>,
        /// Number of boundary rows from C3 = 0 to the critical level.
        #[arg(long)]
        boundary: Option<usize>,
    },
    /// Roots of f(phi) = C3, and the turning points when --b is given.
    Roots {
        #[command(flatten)]
        params: ParamArgs,
        /// Level C3 of the first integral.
        #[arg(long, allow_hyphen_values = true)]
        c3: f64,
        /// Integration constant b.
        #[arg(long, allow_hyphen_values = true)]
        b: Option<f64>,
    },
    /// Period of the orbit at (C3, b).
    Period {
        #[command(flatten)]
        params: ParamArgs,
        /// Level C3 of the first integral.
        #[arg(long, allow_hyphen_values = true)]
        c3: f64,
        /// Integration constant b.
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        /// Target accuracy of the period quadrature.
        #[arg(long, default_value_t = DEFAULT_PERIOD_TOL)]
        tol: f64,
        /// Also report dL/db and dL/dC3.
        #[arg(long)]
        partials: bool,
    },
    /// Period along a grid in b (at fixed --c3) or in C3 (at fixed --b).
    PeriodSweep {
        #[command(flatten)]
        params: ParamArgs,
        /// Parameter to vary.
        #[arg(long, value_enum)]
        axis: Axis,
        /// First grid value.
        #[arg(long, allow_hyphen_values = true)]
        start: f64,
        /// Last grid value.
        #[arg(long, allow_hyphen_values = true)]
        stop: f64,
        /// Number of grid points.
        #[arg(long)]
        count: usize,
        /// Level C3 of the first integral.
        #[arg(long, allow_hyphen_values = true)]
        c3: Option<f64>,
        /// Integration constant b.
        #[arg(long, allow_hyphen_values = true)]
        b: Option<f64>,
        /// Target accuracy of the period quadrature.
        #[arg(long, default_value_t = DEFAULT_PERIOD_TOL)]
        tol: f64,
    },
    /// Wave profile on a uniform grid. With --c3 0 --period L the peaked wave is returned.
    Profile {
        #[command(flatten)]
        params: ParamArgs,
        /// Level C3 of the first integral.
        #[arg(long, allow_hyphen_values = true)]
        c3: f64,
        /// Integration constant b.
        #[arg(long, allow_hyphen_values = true)]
        b: Option<f64>,
        /// Period in z; with --c3 0 selects the peaked wave of this period.
        #[arg(long)]
        period: Option<f64>,
        /// Number of collocation points.
        #[arg(long, default_value_t = 256)]
        grid_n: usize,
    },
    /// Mass, energy and Hamiltonian of the wave.
    Conserved {
        #[command(flatten)]
        params: ParamArgs,
        /// Level C3 of the first integral.
        #[arg(long, allow_hyphen_values = true)]
        c3: f64,
        /// Integration constant b.
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        /// Number of collocation points.
        #[arg(long, default_value_t = 256)]
        grid_n: usize,
    },
    /// Eigenvalues of a collocation operator at the wave.
    Spectrum {
        #[command(flatten)]
        params: ParamArgs,
        /// Level C3 of the first integral.
        #[arg(long, allow_hyphen_values = true)]
        c3: f64,
        /// Integration constant b.
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        /// Number of collocation points.
        #[arg(long, default_value_t = 256)]
        grid_n: usize,
        /// Operator to discretise.
        #[arg(long, value_enum, default_value_t = OperatorChoice::L)]
        operator: OperatorChoice,
    },
    /// Stability indices of the wave with period --period at level --c3.
    Stability {
        #[command(flatten)]
        params: ParamArgs,
        /// Level C3 of the first integral.
        #[arg(long, allow_hyphen_values = true)]
        c3: f64,
        /// Target period in z.
        #[arg(long)]
        period: f64,
        /// Number of collocation points.
        #[arg(long, default_value_t = 256)]
        grid_n: usize,
        /// Relative step for derivatives in C3.
        #[arg(long, default_value_t = 1e-4)]
        rel_step: f64,
        /// Skip the J L check on the refined grid.
        #[arg(long)]
        no_refine: bool,
    },
    /// Orbital stability hypotheses at (C3, b).
    Orbital {
        #[command(flatten)]
        params: ParamArgs,
        /// Level C3 of the first integral.
        #[arg(long, allow_hyphen_values = true)]
        c3: f64,
        /// Integration constant b.
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        /// Number of collocation points.
        #[arg(long, default_value_t = 256)]
        grid_n: usize,
    },
    /// Samples of the level curve of the first integral.
    PhasePortrait {
        #[command(flatten)]
        params: ParamArgs,
        /// Level C3 of the first integral.
        #[arg(long, allow_hyphen_values = true)]
        c3: f64,
        /// Integration constant b.
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        /// Lower phi bound of the window.
        #[arg(long, allow_hyphen_values = true)]
        phi_min: f64,
        /// Upper phi bound of the window.
        #[arg(long, allow_hyphen_values = true)]
        phi_max: f64,
        /// Lower phi' bound of the window.
        #[arg(long, allow_hyphen_values = true)]
        dphi_min: f64,
        /// Upper phi' bound of the window.
        #[arg(long, allow_hyphen_values = true)]
        dphi_max: f64,
        /// Number of phi samples.
        #[arg(long, default_value_t = 401)]
        samples: usize,
    },
    /// Run the built-in verification suites.
    Verify {
        /// Suite name, or "all".
        #[arg(long, default_value = "all", value_parser = suite_names())]
        suite: String,
        #[command(flatten)]
        params: ParamArgs,
        /// Level C3 of the first integral.
        #[arg(long, allow_hyphen_values = true)]
        c3: Option<f64>,
        /// Integration constant b.
        #[arg(long, allow_hyphen_values = true)]
        b: Option<f64>,
        /// Number of random waves for randomised suites.
        #[arg(long)]
        count: Option<usize>,
        /// Seed for randomised suites.
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// Number of collocation points.
        #[arg(long, default_value_t = 256)]
        grid_n: usize,
    },
}

#[derive(Debug, Clone, Copy)]
struct Resolved {
    reduced: ReducedParams,
    physical: PhysicalParams,
    /// True when the physical constants were derived from `(C1, C2)` with
    /// `alpha = 1`, `gamma = 0`.
    physical_derived: bool,
}

impl ParamArgs {
    fn given(&self) -> bool {
        self.c1.is_some() || self.alpha.is_some()
    }

    fn resolve(&self) -> Result<Resolved> {
        match (self.c1, self.c2, self.alpha, self.omega, self.gamma, self.c) {
            (Some(c1), Some(c2), None, None, None, None) => {
                let reduced = ReducedParams::new(c1, c2);
                Ok(Resolved {
                    reduced,
                    physical: reduced.expand(1.0, 0.0)?,
                    physical_derived: true,
                })
            }
            (None, None, Some(alpha), Some(omega), Some(gamma), Some(c)) => {
                let physical = PhysicalParams::new(alpha, omega, gamma, c)?;
                Ok(Resolved {
                    reduced: physical.reduce()?,
                    physical,
                    physical_derived: false,
                })
            }
            _ => Err(WaveError::InvalidParameter(
                "give either --c1 --c2 or all of --alpha --omega --gamma --c".into(),
            )),
        }
    }
}

impl Resolved {
    fn json(&self) -> Value {
        json!({
            "params": self.reduced,
            "physical": self.physical,
            "physical_derived": self.physical_derived,
        })
    }
}

/// A value in a CSV cell.
#[derive(Debug, Clone)]
enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone)]
struct Table {
    headers: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

struct Output {
    json: Value,
    table: Option<Table>,
    /// Exit code to use after a successful write.
    code: i32,
}

impl Output {
    fn new(json: Value) -> Self {
        Self {
            json,
            table: None,
            code: EXIT_OK,
        }
    }

    fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }
}

/// Format a float with 17 significant digits (round-trip exact).
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn write_json(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                let x = n.as_f64().unwrap_or(f64::NAN);
                out.push_str(&format_f64(x));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.iter().all(|i| !i.is_object() && !i.is_array()) {
                out.push('[');
                for (k, item) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    write_json(item, indent, out);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_json(item, indent + 1, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            let len = map.len();
            for (k, (key, item)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_json(item, indent + 1, out);
                out.push_str(if k + 1 < len { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

/// Render a JSON value with every float printed by [`format_f64`].
/// Non-finite floats are not representable and become `null`.
pub fn render_json(v: &Value) -> String {
    let mut s = String::new();
    write_json(v, 0, &mut s);
    s.push('\n');
    s
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<Vec<Cell>>) {
    match v {
        Value::Object(map) => {
            for (k, item) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, item, rows);
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), item, rows);
            }
        }
        Value::Number(n) if n.is_f64() => rows.push(vec![
            Cell::Text(prefix.to_string()),
            Cell::Num(n.as_f64().unwrap_or(f64::NAN)),
        ]),
        Value::Number(n) => rows.push(vec![Cell::Text(prefix.to_string()), Cell::Text(n.to_string())]),
        Value::String(s) => rows.push(vec![Cell::Text(prefix.to_string()), Cell::Text(s.clone())]),
        Value::Bool(b) => rows.push(vec![Cell::Text(prefix.to_string()), Cell::Text(b.to_string())]),
        Value::Null => rows.push(vec![Cell::Text(prefix.to_string()), Cell::Text(String::new())]),
    }
}

fn render_csv(table: &Table) -> std::result::Result<String, String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| e.to_string();
    w.write_record(&table.headers).map_err(io)?;
    for row in &table.rows {
        let rec: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::Num(x) => format_f64(*x),
                Cell::Int(i) => i.to_string(),
                Cell::Text(s) => s.clone(),
            })
            .collect();
        w.write_record(&rec).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| e.to_string())?;
    String::from_utf8(bytes).map_err(|e| e.to_string())
}

fn render(out: &Output, format: Format) -> std::result::Result<String, String> {
    match format {
        Format::Json => Ok(render_json(&out.json)),
        Format::Csv => {
            let table = match &out.table {
                Some(t) => t.clone(),
                None => {
                    let mut rows = Vec::new();
                    flatten("", &out.json, &mut rows);
                    Table {
                        headers: vec!["key", "value"],
                        rows,
                    }
                }
            };
            render_csv(&table)
        }
    }
}

fn require_params(p: &ParamArgs) -> Result<Resolved> {
    if !p.given() {
        return Err(WaveError::InvalidParameter(
            "missing parameters: give --c1 --c2 or --alpha --omega --gamma --c".into(),
        ));
    }
    p.resolve()
}

fn need(name: &str, v: Option<f64>) -> Result<f64> {
    v.ok_or_else(|| WaveError::InvalidParameter(format!("--{name} is required")))
}

fn region(params: &ParamArgs, c3: Option<f64>, b: Option<f64>, boundary: Option<usize>) -> Result<Output> {
    let p = require_params(params)?;
    let r = p.reduced;
    if let Some(count) = boundary {
        if count < 2 {
            return Err(WaveError::InvalidParameter("--boundary needs at least 2 rows".into()));
        }
        let crit = r.c3_critical()?;
        let levels: Vec<f64> = (0..count)
            .map(|i| {
                if i + 1 == count {
                    crit
                } else {
                    crit * i as f64 / (count - 1) as f64
                }
            })
            .collect();
        let rows = Execution::default().map(&levels, |&c| r.boundary_b(c).map(|(m, p)| (c, m, p)));
        let rows: Vec<(f64, f64, f64)> = rows.into_iter().collect::<Result<_>>()?;
        let json = json!({
            "command": "region",
            "inputs": { "parameters": p.json(), "boundary_count": count, "boundary_tol": crate::params::BOUNDARY_TOL },
            "rows": rows.iter().map(|(c, m, p)| json!({ "C3": c, "b_minus": m, "b_plus": p })).collect::<Vec<_>>(),
        });
        let table = Table {
            headers: vec!["C3", "b_minus", "b_plus"],
            rows: rows
                .iter()
                .map(|&(c, m, p)| vec![c.into(), m.into(), p.into()])
                .collect(),
        };
        return Ok(Output::new(json).with_table(table));
    }
    let (c3, b) = (need("c3", c3)?, need("b", b)?);
    if !r.is_admissible() {
        return Err(WaveError::InvalidParameter(format!(
            "2 C1 + C2 must be positive, got C1 = {}, C2 = {}",
            r.c1, r.c2
        )));
    }
    let class = r.classify(c3, b);
    let json = json!({
        "command": "region",
        "inputs": { "parameters": p.json(), "C3": c3, "b": b, "boundary_tol": crate::params::BOUNDARY_TOL },
        "class": class.as_str(),
    });
    let mut out = Output::new(json);
    out.table = Some(Table {
        headers: vec!["C3", "b", "class"],
        rows: vec![vec![c3.into(), b.into(), class.as_str().into()]],
    });
    Ok(out)
}

fn roots(params: &ParamArgs, c3: f64, b: Option<f64>) -> Result<Output> {
    let p = require_params(params)?;
    let r = p.reduced;
    let roots = r.critical_roots(c3)?;
    let turning = b.map(|b| r.turning_points(c3, b)).transpose()?;
    let json = json!({
        "command": "roots",
        "inputs": { "parameters": p.json(), "C3": c3, "b": b },
        "C3_critical": r.c3_critical()?,
        "phi1": roots.phi1, "phi2": roots.phi2, "phi3": roots.phi3,
        "turning_points": turning,
    });
    Ok(Output::new(json))
}

fn period_cmd(params: &ParamArgs, c3: f64, b: f64, tol: f64, partials: bool) -> Result<Output> {
    let p = require_params(params)?;
    let r = p.reduced;
    let res = period(&r, c3, b, tol)?;
    let d = if partials {
        Some(period_partials(&r, c3, b)?)
    } else {
        None
    };
    let json = json!({
        "command": "period",
        "inputs": { "parameters": p.json(), "C3": c3, "b": b, "tol": tol },
        "class": r.classify(c3, b).as_str(),
        "L": res.period, "est_error": res.est_error, "nodes_used": res.nodes_used,
        "partials": d,
    });
    Ok(Output::new(json))
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    params: &ParamArgs,
    axis: Axis,
    start: f64,
    stop: f64,
    count: usize,
    c3: Option<f64>,
    b: Option<f64>,
    tol: f64,
) -> Result<Output> {
    let p = require_params(params)?;
    let r = p.reduced;
    if count < 3 {
        return Err(WaveError::TooFewPoints(count));
    }
    if !(start < stop) {
        return Err(WaveError::InvalidParameter("--start must be below --stop".into()));
    }
    let (scan_axis, fixed) = match axis {
        Axis::B => (ScanAxis::B, need("c3", c3)?),
        Axis::C3 => (ScanAxis::C3, need("b", b)?),
    };
    let grid: Vec<f64> = (0..count)
        .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
        .collect();
    let table = monotonicity_scan_with(Execution::default(), &r, scan_axis, fixed, &grid)?;
    let json = json!({
        "command": "period-sweep",
        "inputs": { "parameters": p.json(), "axis": scan_axis, "start": start, "stop": stop,
                    "count": count, "fixed": fixed, "tol": tol },
        "verdict": table.verdict,
        "min_margin": table.min_margin,
        "samples": table.samples,
    });
    let rows = table
        .samples
        .iter()
        .enumerate()
        .map(|(i, s)| vec![i.into(), s.param.into(), s.period.into(), s.est_error.into()])
        .collect();
    Ok(Output::new(json).with_table(Table {
        headers: vec!["index", "param", "L", "est_error"],
        rows,
    }))
}

fn profile_table(p: &Profile) -> Table {
    let z = p.grid();
    Table {
        headers: vec!["z", "phi", "dphi"],
        rows: (0..p.len())
            .map(|j| vec![z[j].into(), p.phi[j].into(), p.dphi[j].into()])
            .collect(),
    }
}

fn profile_cmd(
    params: &ParamArgs,
    c3: f64,
    b: Option<f64>,
    length: Option<f64>,
    n: usize,
) -> Result<Output> {
    let p = require_params(params)?;
    let r = p.reduced;
    let prof = match (b, length) {
        (_, Some(l)) if c3 == 0.0 => peaked_profile(&r, l, n)?,
        (Some(b), None) => solve_profile(&r, c3, b, n)?,
        _ => {
            return Err(WaveError::InvalidParameter(
                "give --b, or --period together with --c3 0".into(),
            ))
        }
    };
    let (res2, res1) = residual_check(&prof);
    let json = json!({
        "command": "profile",
        "inputs": { "parameters": p.json(), "C3": c3, "b": b, "period": length, "grid_n": n },
        "profile": prof,
        "residuals": { "second_order": res2, "first_integral": res1 },
    });
    let table = profile_table(&prof);
    Ok(Output::new(json).with_table(table))
}

fn conserved_cmd(params: &ParamArgs, c3: f64, b: f64, n: usize) -> Result<Output> {
    let p = require_params(params)?;
    let prof = solve_profile(&p.reduced, c3, b, n)?;
    let q = conserved_quantities(&prof, &p.physical)?;
    let json = json!({
        "command": "conserved",
        "inputs": { "parameters": p.json(), "C3": c3, "b": b, "grid_n": n },
        "period_z": prof.period_z,
        "period_x": prof.period_z * p.physical.alpha,
        "M": q.m, "E": q.e, "F": q.f,
    });
    Ok(Output::new(json))
}

fn sorted_eigenvalues(op: &SpectralOperator) -> Result<Vec<f64>> {
    let eig = SymmetricEigen::try_new(op.matrix.clone(), 1e-15, 0)
        .ok_or_else(|| WaveError::EigensolverFailure("symmetric eigensolver".into()))?;
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

fn spectrum_cmd(params: &ParamArgs, c3: f64, b: f64, n: usize, which: OperatorChoice) -> Result<Output> {
    let p = require_params(params)?;
    let prof = solve_profile(&p.reduced, c3, b, n)?;
    let inputs = json!({ "parameters": p.json(), "C3": c3, "b": b, "grid_n": n });
    match which {
        OperatorChoice::L | OperatorChoice::M => {
            let (name, op) = if which == OperatorChoice::L {
                ("L", build_l(&prof)?)
            } else {
                ("M", schrodinger_transform(&prof)?)
            };
            let counts = inertia(&op, None)?;
            let values = sorted_eigenvalues(&op)?;
            let json = json!({
                "command": "spectrum",
                "inputs": inputs,
                "operator": name,
                "raw_asymmetry": op.raw_asymmetry,
                "inertia": counts,
                "eigenvalues": values,
            });
            let rows = values
                .iter()
                .enumerate()
                .map(|(i, v)| vec![i.into(), (*v).into(), 0.0.into()])
                .collect();
            Ok(Output::new(json).with_table(Table {
                headers: vec!["index", "re", "im"],
                rows,
            }))
        }
        OperatorChoice::Jl => {
            let op = build_jl(&prof)?;
            let check = jl_spectrum_check(&op, None)?;
            let schur = op
                .matrix
                .clone()
                .try_schur(1e-15, 200 * n.max(10))
                .ok_or_else(|| WaveError::EigensolverFailure("Schur iteration limit".into()))?;
            let mut values: Vec<(f64, f64)> = schur
                .complex_eigenvalues()
                .iter()
                .map(|z| (z.re, z.im))
                .collect();
            values.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.total_cmp(&b.0)));
            let json = json!({
                "command": "spectrum",
                "inputs": inputs,
                "operator": "JL",
                "check": check,
                "eigenvalues": values.iter().map(|(re, im)| json!({ "re": re, "im": im })).collect::<Vec<_>>(),
            });
            let rows = values
                .iter()
                .enumerate()
                .map(|(i, (re, im))| vec![i.into(), (*re).into(), (*im).into()])
                .collect();
            Ok(Output::new(json).with_table(Table {
                headers: vec!["index", "re", "im"],
                rows,
            }))
        }
    }
}

fn stability_cmd(
    params: &ParamArgs,
    c3: f64,
    target: f64,
    n: usize,
    rel_step: f64,
    no_refine: bool,
) -> Result<Output> {
    let p = require_params(params)?;
    let opts = StabilityOptions {
        n,
        rel_step,
        check_refined: !no_refine,
    };
    let rep = stability_indices(&p.reduced, &p.physical, target, c3, &opts)?;
    let json = json!({
        "command": "stability",
        "inputs": { "parameters": p.json(), "C3": c3, "period": target, "grid_n": n,
                    "rel_step": rel_step, "refined_grid_n": if no_refine { None } else { Some(2 * n) } },
        "report": rep,
    });
    Ok(Output::new(json))
}

fn orbital_cmd(params: &ParamArgs, c3: f64, b: f64, n: usize) -> Result<Output> {
    let p = require_params(params)?;
    let prof = solve_profile(&p.reduced, c3, b, n)?;
    let check = orbital_check(&prof, &p.physical)?;
    let json = json!({
        "command": "orbital",
        "inputs": { "parameters": p.json(), "C3": c3, "b": b, "grid_n": n },
        "check": check,
    });
    Ok(Output::new(json))
}

fn phase_cmd(params: &ParamArgs, c3: f64, b: f64, window: PhaseWindow) -> Result<Output> {
    let p = require_params(params)?;
    let points = p.reduced.level_set(c3, b, &window)?;
    let class = p.reduced.classify(c3, b);
    let json = json!({
        "command": "phase-portrait",
        "inputs": { "parameters": p.json(), "C3": c3, "b": b, "window": window },
        "class": class.as_str(),
        "points": points,
    });
    let rows = points
        .iter()
        .map(|q| {
            let branch = match q.branch {
                crate::params::LevelBranch::Orbit => "Orbit",
                crate::params::LevelBranch::Other => "Other",
            };
            vec![q.phi.into(), q.dphi.into(), branch.into()]
        })
        .collect();
    Ok(Output::new(json).with_table(Table {
        headers: vec!["phi", "dphi", "branch"],
        rows,
    }))
}

#[allow(clippy::too_many_arguments)]
fn verify_cmd(
    suite: &str,
    params: &ParamArgs,
    c3: Option<f64>,
    b: Option<f64>,
    count: Option<usize>,
    seed: u64,
    n: usize,
) -> Result<Output> {
    let names: Vec<&str> = if suite == "all" {
        verify::SUITES.to_vec()
    } else if verify::is_suite(suite) {
        vec![suite]
    } else {
        return Err(WaveError::InvalidParameter(format!(
            "unknown suite {suite:?}; expected one of {} or all",
            verify::SUITES.join(", ")
        )));
    };
    let cfg = VerifyConfig {
        params: if params.given() {
            Some(params.resolve()?.reduced)
        } else {
            None
        },
        c3,
        b,
        count,
        seed,
        grid_n: n,
        exec: Execution::default(),
    };
    let outcomes: Vec<_> = names
        .iter()
        .filter_map(|s| verify::run_suite(s, &cfg))
        .collect();
    let passed = outcomes.iter().all(|o| o.passed);
    let verdict = if passed {
        None
    } else {
        Some("at least one suite failed")
    };
    let json = json!({
        "command": "verify",
        "inputs": cfg,
        "passed": passed,
        "failure": verdict,
        "suites": outcomes,
    });
    let rows = outcomes
        .iter()
        .map(|o| {
            vec![
                Cell::Text(o.suite.clone()),
                Cell::Text(o.passed.to_string()),
                o.seconds.into(),
            ]
        })
        .collect();
    let mut out = Output::new(json).with_table(Table {
        headers: vec!["suite", "passed", "seconds"],
        rows,
    });
    out.code = if passed { EXIT_OK } else { EXIT_INTERNAL };
    Ok(out)
}

fn suite_names() -> clap::builder::PossibleValuesParser {
    let mut names = vec!["all"];
    names.extend_from_slice(verify::SUITES);
    clap::builder::PossibleValuesParser::new(names)
}

fn dispatch(cmd: &Command) -> Result<Output> {
    match cmd {
        Command::Region {
            params,
            c3,
            b,
            boundary,
        } => region(params, *c3, *b, *boundary),
        Command::Roots { params, c3, b } => roots(params, *c3, *b),
        Command::Period {
            params,
            c3,
            b,
            tol,
            partials,
        } => period_cmd(params, *c3, *b, *tol, *partials),
        Command::PeriodSweep {
            params,
            axis,
            start,
            stop,
            count,
            c3,
            b,
            tol,
        } => sweep(params, *axis, *start, *stop, *count, *c3, *b, *tol),
        Command::Profile {
            params,
            c3,
            b,
            period,
            grid_n,
        } => profile_cmd(params, *c3, *b, *period, *grid_n),
        Command::Conserved {
            params,
            c3,
            b,
            grid_n,
        } => conserved_cmd(params, *c3, *b, *grid_n),
        Command::Spectrum {
            params,
            c3,
            b,
            grid_n,
            operator,
        } => spectrum_cmd(params, *c3, *b, *grid_n, *operator),
        Command::Stability {
            params,
            c3,
            period,
            grid_n,
            rel_step,
            no_refine,
        } => stability_cmd(params, *c3, *period, *grid_n, *rel_step, *no_refine),
        Command::Orbital {
            params,
            c3,
            b,
            grid_n,
        } => orbital_cmd(params, *c3, *b, *grid_n),
        Command::PhasePortrait {
            params,
            c3,
            b,
            phi_min,
            phi_max,
            dphi_min,
            dphi_max,
            samples,
        } => phase_cmd(
            params,
            *c3,
            *b,
            PhaseWindow {
                phi_min: *phi_min,
                phi_max: *phi_max,
                dphi_min: *dphi_min,
                dphi_max: *dphi_max,
                samples: *samples,
            },
        ),
        Command::Verify {
            suite,
            params,
            c3,
            b,
            count,
            seed,
            grid_n,
        } => verify_cmd(suite, params, *c3, *b, *count, *seed, *grid_n),
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
}

fn emit(text: &str, dest: Option<&PathBuf>) -> std::io::Result<()> {
    match dest {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

/// Parse `args` (including the program name) and run the command. Returns the
/// process exit code: 0 success, 1 internal error or failed verification,
/// 2 domain error, 64 usage error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli.command) {
        Ok(out) => match render(&out, cli.format) {
            Ok(text) => match emit(&text, cli.out.as_ref()) {
                Ok(()) => out.code,
                Err(e) => {
                    eprintln!("error: cannot write output: {e}");
                    EXIT_INTERNAL
                }
            },
            Err(e) => {
                eprintln!("error: cannot format output: {e}");
                EXIT_INTERNAL
            }
        },
        Err(err) => {
            let code = if matches!(err, WaveError::InvalidParameter(_)) && is_usage(&err) {
                EXIT_USAGE
            } else if err.is_domain_error() {
                EXIT_DOMAIN
            } else {
                EXIT_INTERNAL
            };
            let body = json!({
                "error": ErrorBody { kind: err.kind(), message: err.to_string() },
                "exit_code": code,
            });
            eprintln!("error: {err}");
            let _ = emit(&render_json(&body), None);
            code
        }
    }
}

fn is_usage(err: &WaveError) -> bool {
    matches!(err, WaveError::InvalidParameter(m) if m.starts_with("missing parameters") || m.ends_with("is required") || m.starts_with("give "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, -2.18741, 1e-300, 123456.789, std::f64::consts::PI] {
            let s = format_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_f64(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn json_rendering_is_valid_and_exact() {
        let v = json!({ "a": 0.1, "b": [1, 2.5], "c": { "d": "x", "e": null, "f": true } });
        let text = render_json(&v);
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["a"].as_f64(), Some(0.1));
        assert_eq!(back["b"][0].as_u64(), Some(1));
        assert_eq!(back["c"]["d"], "x");
    }

    #[test]
    fn flattened_csv_keys() {
        let v = json!({ "a": { "b": [1.5, 2.5] }, "s": "t" });
        let mut rows = Vec::new();
        flatten("", &v, &mut rows);
        let table = Table {
            headers: vec!["key", "value"],
            rows,
        };
        let csv = render_csv(&table).unwrap();
        assert!(csv.contains("a.b[0],1.5000000000000000e0"));
        assert!(csv.contains("s,t"));
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run(["dgh"]), EXIT_USAGE);
        assert_eq!(run(["dgh", "region", "--c1", "2"]), EXIT_USAGE);
        assert_eq!(
            run(["dgh", "region", "--c1", "2", "--c2", "1", "--alpha", "1", "--c3", "1", "--b", "-1"]),
            EXIT_USAGE
        );
        assert_eq!(run(["dgh", "--help"]), EXIT_OK);
    }
}
