//! Fourier collocation on a uniform periodic grid of even size.
//!
//! Every operator here is a circulant matrix defined by its symbol on the
//! wavenumbers `k_j = 2 pi j / L`. First-derivative-like (odd) symbols vanish on
//! the Nyquist mode; even symbols keep it.

use std::f64::consts::PI;

use nalgebra::DMatrix;

/// Angular wavenumber of mode `j` (for `0 <= j <= n/2`).
pub fn wavenumber(j: usize, period: f64) -> f64 {
    2.0 * PI * j as f64 / period
}

fn cos_table(n: usize) -> (Vec<f64>, Vec<f64>) {
    (0..n)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / n as f64;
            (t.cos(), t.sin())
        })
        .unzip()
}

/// First column of the circulant matrix with real even symbol `s(k)`.
fn even_column<S: Fn(f64) -> f64>(n: usize, period: f64, symbol: S) -> Vec<f64> {
    assert!(n >= 2 && n.is_multiple_of(2), "grid size must be even");
    let (cos, _) = cos_table(n);
    let half = n / 2;
    let s: Vec<f64> = (0..=half).map(|j| symbol(wavenumber(j, period))).collect();
    (0..n)
        .map(|m| {
            let mut acc = s[0] + if m % 2 == 0 { s[half] } else { -s[half] };
            for (j, sj) in s.iter().enumerate().take(half).skip(1) {
                acc += 2.0 * sj * cos[(j * m) % n];
            }
            acc / n as f64
        })
        .collect()
}

/// First column of the circulant matrix with symbol `i sigma(k)`, `sigma` odd.
fn odd_column<S: Fn(f64) -> f64>(n: usize, period: f64, sigma: S) -> Vec<f64> {
    assert!(n >= 2 && n.is_multiple_of(2), "grid size must be even");
    let (_, sin) = cos_table(n);
    let half = n / 2;
    let s: Vec<f64> = (0..half).map(|j| sigma(wavenumber(j, period))).collect();
    (0..n)
        .map(|m| {
            let mut acc = 0.0;
            for (j, sj) in s.iter().enumerate().skip(1) {
                acc += sj * sin[(j * m) % n];
            }
            -2.0 * acc / n as f64
        })
        .collect()
}

fn circulant(column: &[f64]) -> DMatrix<f64> {
    let n = column.len();
    DMatrix::from_fn(n, n, |m, l| column[(m + n - l) % n])
}

fn apply_circulant(column: &[f64], v: &[f64]) -> Vec<f64> {
    let n = column.len();
    assert_eq!(v.len(), n);
    (0..n)
        .map(|m| {
            let mut acc = 0.0;
            for (l, vl) in v.iter().enumerate() {
                acc += column[(m + n - l) % n] * vl;
            }
            acc
        })
        .collect()
}

fn d1_column(n: usize, period: f64) -> Vec<f64> {
    odd_column(n, period, |k| k)
}

fn d2_column(n: usize, period: f64) -> Vec<f64> {
    even_column(n, period, |k| -k * k)
}

/// First-derivative matrix (Nyquist mode removed).
pub fn d1_matrix(n: usize, period: f64) -> DMatrix<f64> {
    circulant(&d1_column(n, period))
}

/// Second-derivative matrix, symbol `-k^2` on every mode including Nyquist.
pub fn d2_matrix(n: usize, period: f64) -> DMatrix<f64> {
    circulant(&d2_column(n, period))
}

/// Matrix of `J = -(1 - d^2/dx^2)^{-1} d/dx`, symbol `-i k / (1 + k^2)`.
pub fn j_matrix(n: usize, period: f64) -> DMatrix<f64> {
    circulant(&odd_column(n, period, |k| -k / (1.0 + k * k)))
}

/// Spectral first derivative of grid values.
pub fn derivative(v: &[f64], period: f64) -> Vec<f64> {
    apply_circulant(&d1_column(v.len(), period), v)
}

/// Spectral second derivative of grid values.
pub fn second_derivative(v: &[f64], period: f64) -> Vec<f64> {
    apply_circulant(&d2_column(v.len(), period), v)
}
