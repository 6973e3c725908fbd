use std::f64::consts::PI;
use std::ops::RangeInclusive;

use serde::Serialize;

use crate::cluster::VLF_THRESHOLD;

use super::MuxError;

/// Relative tolerance for recognising `tau` as a whole number of periods.
const GRID_TOL: f64 = 1e-12;

/// A time delay, with its multiple of `period` when it lies on the grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DelaySpec {
    pub tau: f64,
    pub period: f64,
    pub multiple: Option<u64>,
}

impl DelaySpec {
    pub fn new(tau: f64, period: f64) -> Result<Self, MuxError> {
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(MuxError::InvalidDelay(tau));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(MuxError::InvalidPeriod(period));
        }
        let ratio = tau / period;
        let n = ratio.round();
        let multiple = ((ratio - n).abs() <= GRID_TOL * ratio.max(1.0)).then_some(n as u64);
        Ok(Self { tau, period, multiple })
    }

    /// `tau = n · period`.
    pub fn on_grid(n: u64, period: f64) -> Result<Self, MuxError> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(MuxError::InvalidPeriod(period));
        }
        Ok(Self { tau: n as f64 * period, period, multiple: Some(n) })
    }

    pub fn is_on_grid(&self) -> bool {
        self.multiple.is_some()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DelayedVerdict {
    pub lhs: f64,
    pub entangled: bool,
}

impl DelayedVerdict {
    fn from_lhs(lhs: f64) -> Self {
        Self { lhs, entangled: lhs < VLF_THRESHOLD }
    }
}

fn check_variances(y_var: f64, x_var: f64) -> Result<(), MuxError> {
    for v in [y_var, x_var] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(MuxError::InvalidVariance(v));
        }
    }
    Ok(())
}

/// `4 cos²(ωτ/2) ⟨δy²⟩ + 4 sin²(ωτ/2) ⟨δx²⟩`, entangled iff below 1/2.
pub fn delayed_vlf(tau: f64, omega: f64, y_var: f64, x_var: f64) -> Result<DelayedVerdict, MuxError> {
    check_variances(y_var, x_var)?;
    let (s, c) = (0.5 * omega * tau).sin_cos();
    Ok(DelayedVerdict::from_lhs(4.0 * c * c * y_var + 4.0 * s * s * x_var))
}

/// [`delayed_vlf`] at any admissible `ω_k = 2πk/τ` with `τ` on the grid.
/// The half phase is exactly `πk`, so the x term drops out identically.
pub fn delayed_vlf_on_grid(delay: &DelaySpec, y_var: f64, x_var: f64) -> Result<DelayedVerdict, MuxError> {
    check_variances(y_var, x_var)?;
    if delay.multiple.is_none() {
        return Err(MuxError::OffGrid(delay.tau));
    }
    if !(delay.tau > 0.0) {
        return Err(MuxError::InvalidDelay(delay.tau));
    }
    Ok(DelayedVerdict::from_lhs(4.0 * y_var))
}

/// `ω_k = 2πk/τ` for every `k` in `k_range`.
pub fn admissible_frequencies(tau: f64, k_range: RangeInclusive<i64>) -> Result<Vec<f64>, MuxError> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(MuxError::InvalidDelay(tau));
    }
    Ok(k_range.map(|k| 2.0 * PI * k as f64 / tau).collect())
}
