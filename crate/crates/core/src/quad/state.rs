use nalgebra::{DMatrix, DVector};

use super::{symplectic_form, LinearExpr, QuadError, SymplecticMap, SYMMETRY_TOL, UNCERTAINTY_TOL, VACUUM_VARIANCE};

/// Symmetric real covariance matrix in interleaved ordering.
///
/// Construction only checks shape and symmetry. Whether the matrix is a
/// physical state is answered by [`check_uncertainty`]; a covariance of
/// commuting nullifiers, for instance, need not satisfy it.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceMatrix {
    entries: DMatrix<f64>,
}

impl CovarianceMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self, QuadError> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(QuadError::Shape(format!(
                "covariance must be square and non-empty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(QuadError::Shape("covariance has non-finite entries".into()));
        }
        let asym = (&entries - entries.transpose()).amax();
        if asym > SYMMETRY_TOL * entries.amax().max(1.0) {
            return Err(QuadError::NotSymmetric { asymmetry: asym });
        }
        Ok(Self { entries })
    }

    /// `C Σ Cᵀ`, symmetrized to remove rounding asymmetry.
    pub(crate) fn from_congruence(c: &DMatrix<f64>, sigma: &DMatrix<f64>) -> Self {
        let m = c * sigma * c.transpose();
        let entries = (&m + m.transpose()) * 0.5;
        Self { entries }
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self { entries: DMatrix::identity(2 * n_modes, 2 * n_modes) * VACUUM_VARIANCE }
    }

    /// Single-mode diagonal covariance.
    pub fn diagonal(x_var: f64, y_var: f64) -> Result<Self, QuadError> {
        Self::new(DMatrix::from_diagonal(&DVector::from_vec(vec![x_var, y_var])))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n_modes(&self) -> usize {
        self.entries.nrows() / 2
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn block_diagonal(blocks: &[&CovarianceMatrix]) -> Self {
        let n: usize = blocks.iter().map(|b| b.dim()).sum();
        let mut m = DMatrix::zeros(n, n);
        let mut at = 0;
        for b in blocks {
            m.view_mut((at, at), (b.dim(), b.dim())).copy_from(&b.entries);
            at += b.dim();
        }
        Self { entries: m }
    }
}

/// Outcome of the uncertainty check `Σ + (i/4)Ω ⪰ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct UncertaintyReport {
    pub satisfied: bool,
    /// Smallest eigenvalue of the Hermitian matrix `Σ + (i/4)Ω`.
    pub min_eigenvalue: f64,
    /// Smallest symplectic eigenvalue; physical states have it ≥ 1/4.
    pub min_symplectic_eigenvalue: f64,
}

/// Tests `Σ + (i/4)Ω ⪰ 0` through the real symmetric embedding
/// `[[Σ, −Ω/4], [Ω/4, Σ]]`, whose spectrum is that of the Hermitian matrix
/// with every eigenvalue doubled.
pub fn check_uncertainty(cov: &CovarianceMatrix) -> Result<UncertaintyReport, QuadError> {
    let d = cov.dim();
    if d % 2 != 0 {
        return Err(QuadError::Shape(format!("uncertainty check needs an even dimension, got {d}")));
    }
    let n = d / 2;
    let omega = symplectic_form(n) * 0.25;
    let mut real = DMatrix::zeros(2 * d, 2 * d);
    real.view_mut((0, 0), (d, d)).copy_from(cov.matrix());
    real.view_mut((d, d), (d, d)).copy_from(cov.matrix());
    real.view_mut((0, d), (d, d)).copy_from(&(-&omega));
    real.view_mut((d, 0), (d, d)).copy_from(&omega);
    let min_eigenvalue = real.symmetric_eigen().eigenvalues.min();

    let spectrum = (symplectic_form(n) * cov.matrix()).complex_eigenvalues();
    let min_symplectic_eigenvalue = spectrum.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);

    let tol = UNCERTAINTY_TOL * cov.matrix().amax().max(1.0);
    Ok(UncertaintyReport { satisfied: min_eigenvalue >= -tol, min_eigenvalue, min_symplectic_eigenvalue })
}

/// Mean vector and covariance of an n-mode Gaussian state.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: CovarianceMatrix,
}

impl GaussianState {
    /// Validates dimensions and the uncertainty relation.
    pub fn new(mean: DVector<f64>, cov: CovarianceMatrix) -> Result<Self, QuadError> {
        if mean.len() != cov.dim() {
            return Err(QuadError::DimensionMismatch { expected: cov.dim(), found: mean.len() });
        }
        let report = check_uncertainty(&cov)?;
        if !report.satisfied {
            return Err(QuadError::Unphysical { min_eigenvalue: report.min_eigenvalue });
        }
        Ok(Self { mean, cov })
    }

    #[cfg(test)]
    pub(crate) fn new_unchecked(mean: DVector<f64>, cov: CovarianceMatrix) -> Self {
        Self { mean, cov }
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self { mean: DVector::zeros(2 * n_modes), cov: CovarianceMatrix::vacuum(n_modes) }
    }

    /// Single mode with a diagonal covariance `diag(x_var, y_var)`.
    pub fn squeezed(x_var: f64, y_var: f64) -> Result<Self, QuadError> {
        if !(x_var > 0.0 && y_var > 0.0) {
            return Err(QuadError::NonPositiveVariance(x_var.min(y_var)));
        }
        Self::new(DVector::zeros(2), CovarianceMatrix::diagonal(x_var, y_var)?)
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &CovarianceMatrix {
        &self.cov
    }

    pub fn n_modes(&self) -> usize {
        self.cov.n_modes()
    }

    pub fn with_mean(mut self, mean: DVector<f64>) -> Result<Self, QuadError> {
        if mean.len() != self.mean.len() {
            return Err(QuadError::DimensionMismatch { expected: self.mean.len(), found: mean.len() });
        }
        self.mean = mean;
        Ok(self)
    }

    /// Product state `self ⊗ other`; `other`'s modes are appended.
    pub fn tensor(&self, other: &GaussianState) -> Self {
        let mean = DVector::from_iterator(
            self.mean.len() + other.mean.len(),
            self.mean.iter().chain(other.mean.iter()).copied(),
        );
        Self { mean, cov: CovarianceMatrix::block_diagonal(&[&self.cov, &other.cov]) }
    }

    /// Restriction to a subset of modes.
    pub fn reduced(&self, modes: &[usize]) -> Result<Self, QuadError> {
        let idx = mode_indices(modes, self.n_modes())?;
        Ok(Self {
            mean: DVector::from_iterator(idx.len(), idx.iter().map(|&i| self.mean[i])),
            cov: CovarianceMatrix { entries: self.cov.entries.select_rows(&idx).select_columns(&idx) },
        })
    }
}

pub(crate) fn mode_indices(modes: &[usize], n_modes: usize) -> Result<Vec<usize>, QuadError> {
    let mut idx = Vec::with_capacity(2 * modes.len());
    for (k, &m) in modes.iter().enumerate() {
        if m >= n_modes || modes[..k].contains(&m) {
            return Err(QuadError::InvalidMode { mode: m, n_modes });
        }
        idx.extend([2 * m, 2 * m + 1]);
    }
    Ok(idx)
}

/// `mean' = S·mean`, `cov' = S·cov·Sᵀ`.
pub fn apply_symplectic(state: &GaussianState, s: &SymplecticMap) -> Result<GaussianState, QuadError> {
    if s.n_modes() != state.n_modes() {
        return Err(QuadError::DimensionMismatch { expected: state.n_modes(), found: s.n_modes() });
    }
    let m = s.matrix();
    Ok(GaussianState {
        mean: m * &state.mean,
        cov: CovarianceMatrix::from_congruence(m, state.cov.matrix()),
    })
}

/// Covariance of a list of linear expressions over a source covariance:
/// entry `(i, j) = cᵢᵀ Σ cⱼ`. Classical parts are ignored.
pub fn expr_covariance(exprs: &[LinearExpr], source_cov: &CovarianceMatrix) -> Result<CovarianceMatrix, QuadError> {
    if source_cov.dim() % 2 != 0 {
        return Err(QuadError::Shape("source covariance must have an even dimension".into()));
    }
    let n_modes = source_cov.n_modes();
    let mut c = DMatrix::zeros(exprs.len(), source_cov.dim());
    for (i, e) in exprs.iter().enumerate() {
        c.set_row(i, &e.coefficient_vector(n_modes)?.transpose());
    }
    Ok(CovarianceMatrix::from_congruence(&c, source_cov.matrix()))
}

/// Variance of a single expression.
pub fn expr_variance(expr: &LinearExpr, source_cov: &CovarianceMatrix) -> Result<f64, QuadError> {
    Ok(expr_covariance(std::slice::from_ref(expr), source_cov)?.entry(0, 0))
}
