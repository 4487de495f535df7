//! Fourier-collocation discretisations of the linearised operator, its
//! Schrodinger form and the Hamiltonian operator `J L`, with the spectral
//! diagnostics built on them.

mod family;
mod orbital;
mod theta;

pub use family::{
    fixed_period_b, fixed_period_curve, fixed_period_level_limit, stability_indices,
    FixedPeriodWave, IdentityResiduals, StabilityOptions, StabilityReport,
};
pub use orbital::{constraint_invariance_check, orbital_check, OrbitalCheck};
pub use theta::{theta_from_period_slope, theta_index};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Result, WaveError};
use crate::fourier;
use crate::profile::Profile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorKind {
    LinearizedL,
    SchrodingerM,
    #[serde(rename = "JL")]
    Jl,
}

/// Dense collocation matrix of an operator on a uniform periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralOperator {
    pub kind: OperatorKind,
    pub n: usize,
    pub matrix: DMatrix<f64>,
    pub period_x: f64,
    /// Known kernel vector (the translation mode), if the profile has one.
    pub kernel: Option<DVector<f64>>,
    /// `||A - A^T||_inf / ||A||_inf` of the assembled matrix before it was
    /// symmetrised (zero for non-symmetric kinds).
    pub raw_asymmetry: f64,
}

/// Eigenvalue counts of a symmetric operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InertiaCounts {
    pub n_neg: usize,
    pub n_zero: usize,
    pub n_pos: usize,
    pub zero_tol: f64,
    /// Whether the known kernel vector was deflated before counting.
    pub deflated: bool,
    /// The smallest few eigenvalues after deflation (ascending).
    pub lowest: Vec<f64>,
}

/// Result of the eigenvalue check for `J L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JlSpectrum {
    pub max_abs_real: f64,
    pub stable: bool,
    pub tol: f64,
    pub norm: f64,
}

pub(crate) fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn symmetrise(a: DMatrix<f64>) -> (DMatrix<f64>, f64) {
    let norm = inf_norm(&a);
    let asym = inf_norm(&(&a - a.transpose()));
    let sym = (&a + a.transpose()) * 0.5;
    (sym, if norm > 0.0 { asym / norm } else { 0.0 })
}

fn require_smooth(p: &Profile) -> Result<()> {
    if p.is_smooth() {
        Ok(())
    } else {
        Err(WaveError::PeakedProfile)
    }
}

fn translation_mode(p: &Profile) -> Option<DVector<f64>> {
    let v = DVector::from_column_slice(&p.dphi);
    if v.amax() > 0.0 {
        Some(v)
    } else {
        None
    }
}

/// Collocation matrix of `L = -d/dz((C1 - phi) d/dz) + (C1 - C2 - 3 phi + phi'')`.
///
/// The divergence-form term is discretised as
/// `-1/2 (a D2 + D2 a) + 1/2 a''` with `a = C1 - phi`, which is symmetric and
/// treats every Fourier mode (including Nyquist) consistently.
pub fn build_l(p: &Profile) -> Result<SpectralOperator> {
    require_smooth(p)?;
    let n = p.len();
    let (c1, c2) = (p.params.c1, p.params.c2);
    let d2 = fourier::d2_matrix(n, p.period_z);
    let ddphi = p.ddphi();
    let a = DVector::from_iterator(n, p.phi.iter().map(|x| c1 - x));
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = -0.5 * (a[i] + a[j]) * d2[(i, j)];
        }
        m[(i, i)] += c1 - c2 - 3.0 * p.phi[i] + 0.5 * ddphi[i];
    }
    let (matrix, raw_asymmetry) = symmetrise(m);
    Ok(SpectralOperator {
        kind: OperatorKind::LinearizedL,
        n,
        matrix,
        period_x: p.period_z,
        kernel: translation_mode(p),
        raw_asymmetry,
    })
}

/// Potential `Q` of the Schrodinger form `M = -d^2/dz^2 + Q`, which satisfies
/// `L = S M S` with `S = sqrt(C1 - phi)`.
pub fn schrodinger_potential(p: &Profile) -> Result<Vec<f64>> {
    require_smooth(p)?;
    let (c1, c2) = (p.params.c1, p.params.c2);
    let ddphi = p.ddphi();
    p.phi
        .iter()
        .zip(&p.dphi)
        .zip(&ddphi)
        .map(|((&phi, &d1), &d2)| {
            let a = c1 - phi;
            if !(a > 0.0) {
                return Err(WaveError::SingularWeight);
            }
            Ok((c1 - c2 - 3.0 * phi) / a + d2 / (2.0 * a) - 0.25 * (d1 / a).powi(2))
        })
        .collect()
}

pub fn schrodinger_transform(p: &Profile) -> Result<SpectralOperator> {
    let q = schrodinger_potential(p)?;
    let n = p.len();
    let mut m = -fourier::d2_matrix(n, p.period_z);
    for (i, qi) in q.iter().enumerate() {
        m[(i, i)] += qi;
    }
    let (matrix, raw_asymmetry) = symmetrise(m);
    let kernel = translation_mode(p).map(|v| {
        DVector::from_iterator(
            n,
            v.iter()
                .zip(&p.phi)
                .map(|(d, phi)| (p.params.c1 - phi).sqrt() * d),
        )
    });
    Ok(SpectralOperator {
        kind: OperatorKind::SchrodingerM,
        n,
        matrix,
        period_x: p.period_z,
        kernel,
        raw_asymmetry,
    })
}

/// Collocation matrix of `J L` with `J = -(1 - d^2/dz^2)^{-1} d/dz`.
pub fn build_jl(p: &Profile) -> Result<SpectralOperator> {
    let l = build_l(p)?;
    let j = fourier::j_matrix(l.n, l.period_x);
    Ok(SpectralOperator {
        kind: OperatorKind::Jl,
        n: l.n,
        matrix: j * l.matrix,
        period_x: l.period_x,
        kernel: None,
        raw_asymmetry: 0.0,
    })
}

/// Relative size of the known kernel residual `||A u||_inf / (||A||_inf ||u||_inf)`
/// below which the kernel vector is deflated.
const DEFLATION_GATE: f64 = 1e-6;

/// Count negative, zero and positive eigenvalues. The known kernel vector
/// (if it really is one) is deflated first by adding `sigma u u^T`, and
/// counted as one zero eigenvalue. `zero_tol` defaults to the larger of
/// `1e-10` times the spectral radius and ten times the kernel residual
/// `||A u||_inf / ||u||_inf`, which measures the discretisation error.
pub fn inertia(op: &SpectralOperator, zero_tol: Option<f64>) -> Result<InertiaCounts> {
    if op.kind == OperatorKind::Jl {
        return Err(WaveError::NotSymmetric);
    }
    let a = &op.matrix;
    let norm = inf_norm(a);
    let mut work = a.clone();
    let mut deflated = false;
    let mut kernel_residual = 0.0;
    if let Some(u) = &op.kernel {
        kernel_residual = (a * u).amax() / u.amax();
        if kernel_residual <= DEFLATION_GATE * norm {
            let unit = u / u.norm();
            work += (&unit * unit.transpose()) * (2.0 * norm);
            deflated = true;
        }
    }
    let eig = SymmetricEigen::try_new(work, 1e-15, 0)
        .ok_or_else(|| WaveError::EigensolverFailure("symmetric eigensolver".into()))?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    if deflated {
        // The shifted kernel eigenvalue is the largest one.
        values.pop();
    }
    let radius = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let tol = zero_tol.unwrap_or((1e-10 * radius).max(10.0 * kernel_residual));
    let n_neg = values.iter().filter(|v| **v < -tol).count();
    let small = values.iter().filter(|v| v.abs() <= tol).count();
    let n_zero = small + usize::from(deflated);
    Ok(InertiaCounts {
        n_neg,
        n_zero,
        n_pos: op.n - n_neg - n_zero,
        zero_tol: tol,
        deflated,
        lowest: values.iter().take(6).copied().collect(),
    })
}

/// Eigenvalues of `J L` via a real Schur decomposition; the wave is reported
/// stable when every real part is below `tol` (default `1e-6 ||J L||_inf`).
pub fn jl_spectrum_check(op: &SpectralOperator, tol: Option<f64>) -> Result<JlSpectrum> {
    if op.kind != OperatorKind::Jl {
        return Err(WaveError::InvalidParameter(
            "spectrum check expects a J L operator".into(),
        ));
    }
    let norm = inf_norm(&op.matrix);
    let schur = op
        .matrix
        .clone()
        .try_schur(1e-15, 200 * op.n.max(10))
        .ok_or_else(|| WaveError::EigensolverFailure("Schur iteration limit".into()))?;
    let max_abs_real = schur
        .complex_eigenvalues()
        .iter()
        .fold(0.0f64, |acc, z| acc.max(z.re.abs()));
    let tol = tol.unwrap_or(1e-6 * norm);
    Ok(JlSpectrum {
        max_abs_real,
        stable: max_abs_real <= tol,
        tol,
        norm,
    })
}

/// Inertia of `L` restricted to `{w : <1, w> = 0, <phi - phi'', w> = 0}`,
/// computed directly from an orthonormal basis of that subspace.
pub fn projected_inertia(p: &Profile, zero_tol: Option<f64>) -> Result<InertiaCounts> {
    let op = build_l(p)?;
    let n = op.n;
    let ddphi = p.ddphi();
    let g = DVector::from_iterator(n, p.phi.iter().zip(&ddphi).map(|(a, b)| a - b));
    let ones = DVector::from_element(n, 1.0);
    let constraints = DMatrix::from_columns(&[ones, g]);
    let q = constraints.qr().q();
    let projector = DMatrix::identity(n, n) - &q * q.transpose();
    let basis_eig = SymmetricEigen::new(projector);
    let cols: Vec<DVector<f64>> = basis_eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > 0.5)
        .map(|(i, _)| basis_eig.eigenvectors.column(i).into_owned())
        .collect();
    let z = DMatrix::from_columns(&cols);
    let restricted = z.transpose() * &op.matrix * &z;
    let restricted = (&restricted + restricted.transpose()) * 0.5;
    let kernel = op.kernel.as_ref().map(|u| z.transpose() * u);
    let reduced = SpectralOperator {
        kind: OperatorKind::LinearizedL,
        n: cols.len(),
        matrix: restricted,
        period_x: op.period_x,
        kernel,
        raw_asymmetry: 0.0,
    };
    inertia(&reduced, zero_tol)
}
