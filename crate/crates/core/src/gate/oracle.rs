//! Gaussian homodyne conditioning on explicit joint states, used to check
//! the nullifier-based gate engine.

use nalgebra::{DMatrix, DVector};

use crate::cluster::{cluster_unitary, unitary_to_symplectic, ClusterGraph, OrthogonalFreedom, SourceVariances};
use crate::quad::{mode_indices, CovarianceMatrix, GaussianState, SymplecticMap};

use super::{GateError, HomodyneSetting, CONDITIONING_TOL};

/// Homodyne detection of `x cos θ + y sin θ` on one mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HomodyneMeasurement {
    pub mode: usize,
    pub angle: f64,
}

/// `Σ = finite + λ · divergent` with `λ → ∞`.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitCovariance {
    pub finite: DMatrix<f64>,
    pub divergent: DMatrix<f64>,
}

impl SplitCovariance {
    pub fn transformed(&self, s: &SymplecticMap) -> Self {
        let m = s.matrix();
        Self { finite: m * &self.finite * m.transpose(), divergent: m * &self.divergent * m.transpose() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMode {
    /// Condition the actual finite covariance.
    Finite,
    /// Condition in the limit of infinitely anti-squeezed laser x-quadratures.
    AntisqueezedLimit,
}

struct Partition {
    kept: Vec<usize>,
    measured: Vec<usize>,
    kept_modes: Vec<usize>,
    rotation: SymplecticMap,
}

fn partition(n_modes: usize, measurements: &[HomodyneMeasurement], outcomes: &[f64]) -> Result<Partition, GateError> {
    if outcomes.len() != measurements.len() {
        return Err(GateError::DimensionMismatch { expected: measurements.len(), found: outcomes.len() });
    }
    let measured_modes: Vec<usize> = measurements.iter().map(|m| m.mode).collect();
    mode_indices(&measured_modes, n_modes)?;
    let kept_modes: Vec<usize> = (0..n_modes).filter(|m| !measured_modes.contains(m)).collect();
    if kept_modes.is_empty() {
        return Err(GateError::Measurement("every mode is measured".into()));
    }
    let mut rotation = SymplecticMap::identity(n_modes);
    for m in measurements {
        // after rotating by −θ the measured quadrature is the x of the mode
        rotation = rotation.then(&SymplecticMap::phase_rotation(-m.angle).embed(n_modes, &[m.mode])?)?;
    }
    Ok(Partition {
        kept: mode_indices(&kept_modes, n_modes)?,
        measured: measured_modes.iter().map(|m| 2 * m).collect(),
        kept_modes,
        rotation,
    })
}

fn block(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    m.select_rows(rows).select_columns(cols)
}

fn inverse_checked(c: &DMatrix<f64>) -> Result<DMatrix<f64>, GateError> {
    let eig = c.clone().symmetric_eigen();
    let min = eig.eigenvalues.min();
    if !(min > CONDITIONING_TOL * c.amax().max(1.0)) {
        return Err(GateError::IllConditioned { variance: min });
    }
    let inv = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| 1.0 / v));
    Ok(&eig.eigenvectors * inv * eig.eigenvectors.transpose())
}

fn symmetrized(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

/// Conditional state of the unmeasured modes (in ascending order) given the
/// homodyne outcomes. Outcomes are quadrature values, not photocurrents.
pub fn homodyne_condition(
    state: &GaussianState,
    measurements: &[HomodyneMeasurement],
    outcomes: &[f64],
) -> Result<GaussianState, GateError> {
    let p = partition(state.n_modes(), measurements, outcomes)?;
    let r = p.rotation.matrix();
    let sigma = r * state.cov().matrix() * r.transpose();
    let mu = r * state.mean();

    let a = block(&sigma, &p.kept, &p.kept);
    let b = block(&sigma, &p.kept, &p.measured);
    let c_inv = inverse_checked(&block(&sigma, &p.measured, &p.measured))?;
    let gain = &b * c_inv;
    let delta = DVector::from_iterator(outcomes.len(), p.measured.iter().zip(outcomes).map(|(&i, o)| o - mu[i]));

    let cov = symmetrized(&a - &gain * b.transpose());
    let mean = DVector::from_iterator(p.kept.len(), p.kept.iter().map(|&i| mu[i])) + gain * delta;
    Ok(GaussianState::new(mean, CovarianceMatrix::new(cov)?)?)
}

/// As [`homodyne_condition`] for `Σ = finite + λ · divergent`, `λ → ∞`.
///
/// The measured block of `divergent` must be invertible and absorb all of
/// the divergent noise on the kept modes; the result is then finite.
pub fn homodyne_condition_limit(
    mean: &DVector<f64>,
    split: &SplitCovariance,
    measurements: &[HomodyneMeasurement],
    outcomes: &[f64],
) -> Result<GaussianState, GateError> {
    let n_modes = split.finite.nrows() / 2;
    if mean.len() != 2 * n_modes || split.divergent.shape() != split.finite.shape() {
        return Err(GateError::DimensionMismatch { expected: 2 * n_modes, found: mean.len() });
    }
    let p = partition(n_modes, measurements, outcomes)?;
    let s = split.transformed(&p.rotation);
    let mu = p.rotation.matrix() * mean;

    let (k0, k1) = (block(&s.finite, &p.kept, &p.kept), block(&s.divergent, &p.kept, &p.kept));
    let (b0, b1) = (block(&s.finite, &p.kept, &p.measured), block(&s.divergent, &p.kept, &p.measured));
    let c0 = block(&s.finite, &p.measured, &p.measured);
    let c1_inv = inverse_checked(&block(&s.divergent, &p.measured, &p.measured))?;

    let l = &b1 * &c1_inv;
    let residual = (&k1 - &l * b1.transpose()).amax();
    if residual > 1e-9 * k1.amax().max(1.0) {
        return Err(GateError::DivergentNoiseRemains { residual });
    }
    let cov = &k0 - &l * b0.transpose() - &b0 * l.transpose() + &l * c0 * l.transpose();
    let delta = DVector::from_iterator(outcomes.len(), p.measured.iter().zip(outcomes).map(|(&i, o)| o - mu[i]));
    let mean = DVector::from_iterator(p.kept.len(), p.kept.iter().map(|&i| mu[i])) + l * delta;
    debug_assert_eq!(p.kept_modes.len() * 2, mean.len());
    Ok(GaussianState::new(mean, CovarianceMatrix::new(symmetrized(cov))?)?)
}

/// One gate step simulated directly: input mode 0 and two laser sources
/// (modes 1, 2) are entangled, mixed and measured, and the conditional state
/// of the second cluster node is returned. `currents` are `(i_in, i_1)`.
pub fn conditioned_step_oracle(
    input: &GaussianState,
    sources: [SourceVariances; 2],
    q: &OrthogonalFreedom,
    setting: &HomodyneSetting,
    currents: [f64; 2],
    mode: OracleMode,
) -> Result<GaussianState, GateError> {
    if input.n_modes() != 1 {
        return Err(GateError::DimensionMismatch { expected: 1, found: input.n_modes() });
    }
    let lasers = GaussianState::squeezed(sources[0].x_var, sources[0].y_var)?
        .tensor(&GaussianState::squeezed(sources[1].x_var, sources[1].y_var)?);
    let joint = input.tensor(&lasers);

    let cluster = unitary_to_symplectic(&cluster_unitary(&ClusterGraph::two_node(), q)?)?.embed(3, &[1, 2])?;
    // mode 1 becomes (node1 + a)/√2, mode 0 becomes (node1 − a)/√2
    let bs = SymplecticMap::symmetric_beam_splitter().embed(3, &[1, 0])?;
    let total = cluster.then(&bs)?;

    let measurements = [
        HomodyneMeasurement { mode: 0, angle: setting.theta_in },
        HomodyneMeasurement { mode: 1, angle: setting.theta_1 },
    ];
    let outcomes = [currents[0] / (2.0 * setting.beta_0), currents[1] / (2.0 * setting.beta_0)];
    match mode {
        OracleMode::Finite => {
            let evolved = crate::quad::apply_symplectic(&joint, &total)?;
            homodyne_condition(&evolved, &measurements, &outcomes)
        }
        OracleMode::AntisqueezedLimit => {
            let mut divergent = DMatrix::zeros(6, 6);
            divergent[(2, 2)] = 1.0;
            divergent[(4, 4)] = 1.0;
            let split = SplitCovariance { finite: joint.cov().matrix().clone(), divergent }.transformed(&total);
            homodyne_condition_limit(&(total.matrix() * joint.mean()), &split, &measurements, &outcomes)
        }
    }
}
