//! Measurement-based single-mode gates on two-node clusters.

mod matrix;
mod oracle;
mod register;
mod solve;
mod step;

use thiserror::Error;

use crate::cluster::ClusterError;
use crate::quad::QuadError;

pub use matrix::{cz_matrix, cz_transform, gate_matrix, TwoModeCoefficients};
pub use oracle::{
    conditioned_step_oracle, homodyne_condition, homodyne_condition_limit, HomodyneMeasurement, OracleMode,
    SplitCovariance,
};
pub use register::{ClusterResource, ModePair, SourceKind, SourceRegister};
pub use solve::{refine_phases, solve_phases, PhaseSolution, MAX_REACHABLE_ENTRY, PHASE_SOLVE_TOL};
pub use step::{compose_two_steps, feed_forward, single_step, Envelope, GateOutput, StepOptions};

/// Default local-oscillator amplitude.
pub const DEFAULT_BETA_0: f64 = 1e6;

/// Smallest accepted `|sin θ₋|`.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Tolerance on `det = 1` for gate blocks and phase-solver targets.
pub const DET_TOL: f64 = 1e-9;

/// Smallest measured variance accepted by finite homodyne conditioning.
pub const CONDITIONING_TOL: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GateError {
    #[error("sin(theta_minus) vanishes for theta_minus = {theta_minus}")]
    DegeneratePhases { theta_minus: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cluster is not entangled (VLF sum {sum} >= {threshold})")]
    NotEntangled { sum: f64, threshold: f64 },
    #[error("local oscillator amplitude must be positive and finite, got {0}")]
    InvalidBeta(f64),
    #[error("invalid gate blocks: {0}")]
    InvalidBlocks(String),
    #[error("target matrix has determinant {det}, expected 1")]
    InvalidTarget { det: f64 },
    #[error("target entry {entry:e} exceeds the reachable bound {bound:e}")]
    OutOfReach { entry: f64, bound: f64 },
    #[error("phase solver stopped at residual {residual:e}")]
    NotReached { residual: f64, best: Box<solve::PhaseSolution> },
    #[error("measured variance {variance:e} is too small to condition on")]
    IllConditioned { variance: f64 },
    #[error("kept modes retain divergent noise ({residual:e})")]
    DivergentNoiseRemains { residual: f64 },
    #[error("{0}")]
    Measurement(String),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
}

/// Local-oscillator phases of the two homodyne detectors of one step.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct HomodyneSetting {
    pub theta_in: f64,
    pub theta_1: f64,
    pub beta_0: f64,
}

impl HomodyneSetting {
    pub fn new(theta_in: f64, theta_1: f64) -> Self {
        Self { theta_in, theta_1, beta_0: DEFAULT_BETA_0 }
    }

    /// From `θ± = θ_in ± θ_1`.
    pub fn from_sum_difference(theta_plus: f64, theta_minus: f64) -> Self {
        Self::new(0.5 * (theta_plus + theta_minus), 0.5 * (theta_plus - theta_minus))
    }

    pub fn with_beta(self, beta_0: f64) -> Self {
        Self { beta_0, ..self }
    }

    pub fn theta_plus(&self) -> f64 {
        self.theta_in + self.theta_1
    }

    pub fn theta_minus(&self) -> f64 {
        self.theta_in - self.theta_1
    }

    pub fn gate_matrix(&self) -> Result<nalgebra::Matrix2<f64>, GateError> {
        gate_matrix(self.theta_plus(), self.theta_minus())
    }
}
