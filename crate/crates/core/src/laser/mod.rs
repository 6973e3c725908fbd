//! Pulse trains chopped from two phase-locked sub-Poissonian lasers: the
//! normally ordered y-quadrature correlation, discrete frequency grids,
//! spectral quadrature variances and whole-pulse modes.

mod oracle;

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use thiserror::Error;

use crate::quad::VACUUM_VARIANCE;

pub use oracle::{gauss_legendre, y_spectral_variance_oracle, FourierOracle, MIN_WINDOW_KAPPA_UNITS};

/// Commutator normalization `[Q(−ω_k), P(ω_k)]` of a discretized pulse mode.
pub const DISCRETE_MODE_COMMUTATOR: f64 = 0.25;

/// `κT` below which the long-pulse assumption is reported as violated.
pub const LONG_PULSE_WARN: f64 = 10.0;

/// Synchronization strength above which the weak-locking assumption is reported.
pub const WEAK_LOCKING_WARN: f64 = 0.1;

/// Default excess-noise factor of the anti-squeezed quadrature.
pub const DEFAULT_EXCESS_NOISE: f64 = 10.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LaserError {
    #[error("invalid pulse train: {0}")]
    InvalidTrain(String),
    #[error("linewidth must be positive, got {0}")]
    NonPositiveLinewidth(f64),
    #[error("pulse index {index} out of range ({bound})")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("anti-squeezed variance diverges at omega = 0")]
    Divergent,
    #[error("excess-noise factor must be >= 1, got {0}")]
    InvalidExcessNoise(f64),
    #[error("integration window {window_kappa_units}/kappa is shorter than the minimum {min}/kappa")]
    WindowTooShort { window_kappa_units: f64, min: f64 },
    #[error("empty frequency index range")]
    EmptyRange,
    #[error("frequency multiplicity must be >= 1")]
    ZeroMultiplicity,
}

/// Two synchronized trains of `n_pulses` pulses of duration `pulse_duration`
/// separated by gaps `gap`, from lasers with linewidth `kappa` and
/// synchronization parameter `mu`.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseTrain {
    pub pulse_duration: f64,
    pub gap: f64,
    pub n_pulses: usize,
    pub kappa: f64,
    pub mu: f64,
}

impl PulseTrain {
    pub fn new(pulse_duration: f64, gap: f64, n_pulses: usize, kappa: f64, mu: f64) -> Result<Self, LaserError> {
        let bad = |m: String| Err(LaserError::InvalidTrain(m));
        if !(pulse_duration > 0.0 && pulse_duration.is_finite()) {
            return bad(format!("pulse duration must be positive, got {pulse_duration}"));
        }
        if !(gap > 0.0 && gap.is_finite()) {
            return bad(format!("gap must be positive, got {gap}"));
        }
        if n_pulses == 0 {
            return bad("at least one pulse is required".into());
        }
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(LaserError::NonPositiveLinewidth(kappa));
        }
        if !(0.0..1.0).contains(&mu) {
            return bad(format!("mu must lie in [0, 1), got {mu}"));
        }
        let train = Self { pulse_duration, gap, n_pulses, kappa, mu };
        for w in train.warnings() {
            log::warn!("{w}");
        }
        Ok(train)
    }

    /// Assumption violations that do not invalidate the model outright.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let kt = self.kappa * self.pulse_duration;
        if kt < LONG_PULSE_WARN {
            out.push(format!("kappa*T = {kt} is not much larger than 1; pulses are short against the laser correlation time"));
        }
        if self.mu > WEAK_LOCKING_WARN {
            out.push(format!("mu = {} is not small; weak-locking simplification is questionable", self.mu));
        }
        out
    }

    /// `T + T0`.
    pub fn period(&self) -> f64 {
        self.pulse_duration + self.gap
    }

    /// Start time of pulse `m` (0-based): `m (T + T0)`.
    pub fn pulse_start(&self, m: usize) -> f64 {
        m as f64 * self.period()
    }

    /// Window function: one strictly inside pulse `m`, zero elsewhere.
    pub fn window(&self, t: f64, m: usize) -> f64 {
        let start = self.pulse_start(m);
        if t > start && t < start + self.pulse_duration {
            1.0
        } else {
            0.0
        }
    }
}

/// A pulse of one of the two lasers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PulseRef {
    pub laser: usize,
    pub pulse: usize,
}

impl PulseRef {
    pub const fn new(laser: usize, pulse: usize) -> Self {
        Self { laser, pulse }
    }

    fn validate(&self, train: &PulseTrain) -> Result<(), LaserError> {
        if self.laser > 1 {
            return Err(LaserError::IndexOutOfRange { index: self.laser, bound: 2 });
        }
        if self.pulse >= train.n_pulses {
            return Err(LaserError::IndexOutOfRange { index: self.pulse, bound: train.n_pulses });
        }
        Ok(())
    }
}

/// Normally ordered correlation `⟨:δy(t) δy(t′):⟩` of the squeezed quadrature:
/// `−(κ/8) (1−μ)/(1−μ/2) exp(−κ(1−μ/2)|t−t′|)` inside the two windows, zero
/// across pulses or lasers.
pub fn y_correlation(t: f64, t_prime: f64, a: PulseRef, b: PulseRef, train: &PulseTrain) -> Result<f64, LaserError> {
    a.validate(train)?;
    b.validate(train)?;
    if a != b {
        return Ok(0.0);
    }
    let gate = train.window(t, a.pulse) * train.window(t_prime, b.pulse);
    if gate == 0.0 {
        return Ok(0.0);
    }
    Ok(gate * stationary_kernel(t - t_prime, train.kappa, train.mu))
}

pub(crate) fn stationary_kernel(tau: f64, kappa: f64, mu: f64) -> f64 {
    let amplitude = kappa / 8.0 * (1.0 - mu) / (1.0 - mu / 2.0);
    -amplitude * (-kappa * (1.0 - mu / 2.0) * tau.abs()).exp()
}

/// Full spectral variance of the squeezed quadrature for `μ = 0`:
/// `ω² / (4 (κ² + ω²))`. Zero at `ω = 0`, 1/8 at `ω = κ`, vacuum asymptotically.
pub fn y_spectral_variance(omega: f64, kappa: f64) -> Result<f64, LaserError> {
    if !(kappa > 0.0) {
        return Err(LaserError::NonPositiveLinewidth(kappa));
    }
    let w2 = omega * omega;
    Ok(w2 / (4.0 * (kappa * kappa + w2)))
}

/// Model for the stretched x-quadrature, whose spectrum is not otherwise pinned.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum XNoiseModel {
    /// `x_var = 1 / (16 y_var)`.
    MinimumUncertainty,
    /// `x_var = f / (16 y_var)` with `f ≥ 1`.
    ExcessNoise(f64),
}

impl Default for XNoiseModel {
    fn default() -> Self {
        Self::ExcessNoise(DEFAULT_EXCESS_NOISE)
    }
}

impl XNoiseModel {
    pub fn factor(&self) -> f64 {
        match self {
            Self::MinimumUncertainty => 1.0,
            Self::ExcessNoise(f) => *f,
        }
    }

    /// Partner variance of a given squeezed variance.
    pub fn x_from_y(&self, y_var: f64) -> Result<f64, LaserError> {
        let f = self.factor();
        if !(f >= 1.0 && f.is_finite()) {
            return Err(LaserError::InvalidExcessNoise(f));
        }
        if y_var <= 0.0 {
            return Err(LaserError::Divergent);
        }
        Ok(f / (16.0 * y_var))
    }
}

pub fn x_spectral_variance(omega: f64, kappa: f64, model: XNoiseModel) -> Result<f64, LaserError> {
    model.x_from_y(y_spectral_variance(omega, kappa)?)
}

/// One row of a spectrum sweep. `x_var` is `None` where it diverges.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumPoint {
    pub omega: f64,
    pub y_var: f64,
    pub x_var: Option<f64>,
}

impl SpectrumPoint {
    pub fn four_y_var(&self) -> f64 {
        4.0 * self.y_var
    }
}

/// Evaluates the spectrum at every frequency in parallel; rows keep input order.
pub fn spectrum_sweep(omegas: &[f64], kappa: f64, model: XNoiseModel) -> Result<Vec<SpectrumPoint>, LaserError> {
    omegas
        .par_iter()
        .map(|&omega| {
            let y_var = y_spectral_variance(omega, kappa)?;
            let x_var = match model.x_from_y(y_var) {
                Ok(x) => Some(x),
                Err(LaserError::Divergent) => None,
                Err(e) => return Err(e),
            };
            Ok(SpectrumPoint { omega, y_var, x_var })
        })
        .collect()
}

/// Discrete frequencies `ω_k = 2πk / (n (T + T0))`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralGrid {
    pub multiplicity: usize,
    pub period: f64,
    pub ks: Vec<i64>,
    pub omegas: Vec<f64>,
}

impl SpectralGrid {
    pub fn omega(&self, k: i64) -> f64 {
        2.0 * PI * k as f64 / (self.multiplicity as f64 * self.period)
    }
}

/// Grid over `k_range`; `k = 0` is always present.
pub fn discrete_frequencies(
    train: &PulseTrain,
    multiplicity: usize,
    k_range: RangeInclusive<i64>,
) -> Result<SpectralGrid, LaserError> {
    if multiplicity == 0 {
        return Err(LaserError::ZeroMultiplicity);
    }
    if k_range.is_empty() {
        return Err(LaserError::EmptyRange);
    }
    let mut ks: Vec<i64> = k_range.collect();
    if !ks.contains(&0) {
        ks.push(0);
        ks.sort_unstable();
    }
    let mut grid = SpectralGrid { multiplicity, period: train.period(), ks, omegas: Vec::new() };
    grid.omegas = grid.ks.iter().map(|&k| grid.omega(k)).collect();
    Ok(grid)
}

/// The zero-frequency mode of one pulse: the pulse integrated as a whole.
#[derive(Clone, Debug, PartialEq)]
pub struct WholePulseMode {
    pub pulse: PulseRef,
    /// Grid index, always the `k = 0` bin.
    pub k: i64,
    pub omega: f64,
    /// Variance in the ideal-integration limit (`κT → ∞`), i.e. the spectral
    /// variance at zero frequency.
    pub ideal_y_var: f64,
    /// Variance of the finite pulse `T^{-1/2} ∫ y(t) dt` over its window.
    pub finite_y_var: f64,
    pub commutator: f64,
}

pub fn whole_pulse_mode(train: &PulseTrain, pulse: PulseRef) -> Result<WholePulseMode, LaserError> {
    pulse.validate(train)?;
    Ok(WholePulseMode {
        pulse,
        k: 0,
        omega: 0.0,
        ideal_y_var: y_spectral_variance(0.0, train.kappa)?,
        finite_y_var: finite_pulse_y_variance(train),
        commutator: DISCRETE_MODE_COMMUTATOR,
    })
}

/// `1/4 + (1/T) ∫∫ ⟨:δy δy:⟩` over one window, in closed form. For `μ = 0`
/// this is `(1 − e^{−κT}) / (4κT)`.
pub fn finite_pulse_y_variance(train: &PulseTrain) -> f64 {
    let t = train.pulse_duration;
    let a = train.kappa * (1.0 - train.mu / 2.0);
    let amp = train.kappa / 8.0 * (1.0 - train.mu) / (1.0 - train.mu / 2.0);
    VACUUM_VARIANCE - 2.0 * amp / a + 2.0 * amp * (-(-a * t).exp_m1()) / (a * a * t)
}

/// Covariance between the whole-pulse y-modes of two pulses: distinct pulses
/// or lasers are uncorrelated.
pub fn whole_pulse_covariance(train: &PulseTrain, a: PulseRef, b: PulseRef) -> Result<f64, LaserError> {
    a.validate(train)?;
    b.validate(train)?;
    Ok(if a == b { finite_pulse_y_variance(train) } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn train() -> PulseTrain {
        PulseTrain::new(100.0, 10.0, 4, 1.0, 0.0).unwrap()
    }

    #[test]
    fn equal_time_correlation_is_minus_kappa_over_eight() {
        let tr = PulseTrain::new(100.0, 10.0, 3, 2.0, 0.0).unwrap();
        let p = PulseRef::new(0, 1);
        let t = tr.pulse_start(1) + 5.0;
        assert_eq!(y_correlation(t, t, p, p, &tr).unwrap(), -0.25);
    }

    #[test]
    fn distinct_pulses_and_lasers_are_uncorrelated() {
        let tr = train();
        let t = 5.0;
        assert_eq!(y_correlation(t, t, PulseRef::new(0, 0), PulseRef::new(0, 1), &tr).unwrap(), 0.0);
        assert_eq!(y_correlation(t, t, PulseRef::new(0, 0), PulseRef::new(1, 0), &tr).unwrap(), 0.0);
        assert!(y_correlation(t, t, PulseRef::new(2, 0), PulseRef::new(0, 0), &tr).is_err());
        assert!(y_correlation(t, t, PulseRef::new(0, 9), PulseRef::new(0, 0), &tr).is_err());
    }

    #[test]
    fn correlation_decays_and_vanishes_outside_window() {
        let tr = train();
        let p = PulseRef::new(1, 0);
        let far = y_correlation(1.0, 99.0, p, p, &tr).unwrap();
        assert!(far.abs() < 1e-40);
        assert_eq!(y_correlation(105.0, 1.0, p, p, &tr).unwrap(), 0.0);
    }

    #[test]
    fn weak_locking_reduces_to_unsynchronized_kernel() {
        let a = stationary_kernel(0.3, 1.5, 0.0);
        assert_eq!(a, -(1.5 / 8.0) * (-1.5f64 * 0.3).exp());
    }

    #[test]
    fn spectral_variance_examples() {
        assert_eq!(y_spectral_variance(0.0, 1.0).unwrap(), 0.0);
        assert_eq!(y_spectral_variance(3.0, 3.0).unwrap(), 0.125);
        assert!((y_spectral_variance(1e9, 1.0).unwrap() - 0.25).abs() < 1e-15);
        assert!(y_spectral_variance(1.0, 0.0).is_err());
        assert!(y_spectral_variance(1.0, -1.0).is_err());
    }

    #[test]
    fn x_variance_models() {
        assert_eq!(x_spectral_variance(1.0, 1.0, XNoiseModel::MinimumUncertainty).unwrap(), 0.5);
        assert_eq!(x_spectral_variance(1.0, 1.0, XNoiseModel::ExcessNoise(4.0)).unwrap(), 2.0);
        assert_eq!(x_spectral_variance(0.0, 1.0, XNoiseModel::MinimumUncertainty), Err(LaserError::Divergent));
        assert!(x_spectral_variance(1.0, 1.0, XNoiseModel::ExcessNoise(0.5)).is_err());
    }

    #[test]
    fn sweep_keeps_order_and_marks_divergence() {
        let pts = spectrum_sweep(&[0.0, 1.0, 2.0], 1.0, XNoiseModel::default()).unwrap();
        assert_eq!(pts.iter().map(|p| p.omega).collect::<Vec<_>>(), vec![0.0, 1.0, 2.0]);
        assert_eq!(pts[0].x_var, None);
        assert_eq!(pts[1].four_y_var(), 0.5);
        assert_eq!(pts[1].x_var, Some(DEFAULT_EXCESS_NOISE / 2.0));
    }

    #[test]
    fn grid_formula_and_scaling() {
        let tr = PulseTrain::new(0.5, 0.5, 1, 50.0, 0.0).unwrap();
        let g1 = discrete_frequencies(&tr, 1, 1..=1).unwrap();
        assert_eq!(g1.ks, vec![0, 1]);
        assert_eq!(g1.omegas[1], 2.0 * PI);
        let g2 = discrete_frequencies(&tr, 2, -3..=3).unwrap();
        let g1b = discrete_frequencies(&tr, 1, -3..=3).unwrap();
        for (a, b) in g2.omegas.iter().zip(&g1b.omegas) {
            assert_eq!(*a, b / 2.0);
        }
        for (a, b) in g2.omegas.iter().zip(g2.omegas.iter().rev()) {
            assert_eq!(*a, -b);
        }
        assert_eq!(discrete_frequencies(&tr, 1, 3..=2), Err(LaserError::EmptyRange));
        assert_eq!(discrete_frequencies(&tr, 0, 0..=2), Err(LaserError::ZeroMultiplicity));
    }

    #[test]
    fn whole_pulse_modes() {
        let tr = train();
        let m = whole_pulse_mode(&tr, PulseRef::new(0, 2)).unwrap();
        assert_eq!(m.k, 0);
        assert_eq!(m.ideal_y_var, 0.0);
        assert_eq!(m.commutator, 0.25);
        // kappa*T = 100: residual (1 - e^-100)/400
        assert!((m.finite_y_var - 1.0 / 400.0).abs() < 1e-15);
        assert_eq!(whole_pulse_covariance(&tr, PulseRef::new(0, 0), PulseRef::new(0, 1)).unwrap(), 0.0);
        assert_eq!(whole_pulse_covariance(&tr, PulseRef::new(0, 0), PulseRef::new(1, 0)).unwrap(), 0.0);
    }

    #[test]
    fn finite_pulse_variance_matches_window_quadrature() {
        // (1/T) ∫∫ K(t - t') over [0,T]^2 = (2/T) ∫_0^T (T - s) K(s) ds
        for (kappa, mu, t) in [(1.0, 0.0, 3.0), (2.0, 0.05, 10.0), (0.7, 0.3, 1.0)] {
            let tr = PulseTrain::new(t, 1.0, 1, kappa, mu).unwrap();
            let (nodes, weights) = gauss_legendre(32);
            let panels = 200;
            let h = t / panels as f64;
            let mut acc = 0.0;
            for p in 0..panels {
                let a = p as f64 * h;
                for (x, w) in nodes.iter().zip(&weights) {
                    let s = a + 0.5 * h * (x + 1.0);
                    acc += 0.5 * h * w * (t - s) * stationary_kernel(s, kappa, mu);
                }
            }
            let numeric = VACUUM_VARIANCE + 2.0 * acc / t;
            assert!((numeric - finite_pulse_y_variance(&tr)).abs() < 1e-13);
        }
    }

    #[test]
    fn invalid_trains() {
        assert!(PulseTrain::new(0.0, 1.0, 1, 1.0, 0.0).is_err());
        assert!(PulseTrain::new(1.0, -1.0, 1, 1.0, 0.0).is_err());
        assert!(PulseTrain::new(1.0, 1.0, 0, 1.0, 0.0).is_err());
        assert!(PulseTrain::new(1.0, 1.0, 1, 0.0, 0.0).is_err());
        assert!(PulseTrain::new(1.0, 1.0, 1, 1.0, 1.0).is_err());
        let short = PulseTrain::new(1.0, 1.0, 1, 1.0, 0.2).unwrap();
        assert_eq!(short.warnings().len(), 2);
        assert!(train().warnings().is_empty());
    }
}
