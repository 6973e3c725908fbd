//! Numerical Fourier transform of the normally ordered correlation, used to
//! check the closed-form spectrum.

use std::f64::consts::PI;

use super::{y_correlation, LaserError, PulseRef, PulseTrain};
use crate::quad::VACUUM_VARIANCE;

/// Shortest accepted integration window, in units of `1/κ`.
pub const MIN_WINDOW_KAPPA_UNITS: f64 = 20.0;

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Newton iteration on `P_n`).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "quadrature order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `1/4 + ∫ ⟨:δy(t) δy(t+τ):⟩ cos(ωτ) dτ` evaluated numerically over
/// `|τ| < window/κ`.
///
/// The kernel is even with a cusp at zero, so the half-line is integrated
/// and doubled. Panels are at most `0.5/κ` wide and at most a half period of
/// the carrier, with a fixed Gauss–Legendre rule on each.
#[derive(Clone, Debug)]
pub struct FourierOracle {
    window_kappa_units: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl FourierOracle {
    pub fn new(window_kappa_units: f64, order: usize) -> Result<Self, LaserError> {
        if !(window_kappa_units >= MIN_WINDOW_KAPPA_UNITS) {
            return Err(LaserError::WindowTooShort { window_kappa_units, min: MIN_WINDOW_KAPPA_UNITS });
        }
        let (nodes, weights) = gauss_legendre(order.max(2));
        Ok(Self { window_kappa_units, nodes, weights })
    }

    pub fn window_kappa_units(&self) -> f64 {
        self.window_kappa_units
    }

    /// Full y-variance at `omega` for linewidth `kappa` and synchronization `mu`.
    pub fn y_spectral_variance(&self, omega: f64, kappa: f64, mu: f64) -> Result<f64, LaserError> {
        if !(kappa > 0.0) {
            return Err(LaserError::NonPositiveLinewidth(kappa));
        }
        let window = self.window_kappa_units / kappa;
        // One pulse long enough to hold the whole window on both sides of its centre.
        let train = PulseTrain { pulse_duration: 2.0 * window + 2.0 / kappa, gap: 1.0 / kappa, n_pulses: 1, kappa, mu };
        let centre = 0.5 * train.pulse_duration;
        let pulse = PulseRef::new(0, 0);

        let mut panel = 0.5 / kappa;
        if omega != 0.0 {
            panel = panel.min(PI / omega.abs());
        }
        let n_panels = (window / panel).ceil() as usize;
        let h = window / n_panels as f64;
        let mut acc = 0.0;
        for p in 0..n_panels {
            let a = p as f64 * h;
            let mut part = 0.0;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                let tau = a + 0.5 * h * (x + 1.0);
                part += w * y_correlation(centre, centre + tau, pulse, pulse, &train)? * (omega * tau).cos();
            }
            acc += 0.5 * h * part;
        }
        Ok(VACUUM_VARIANCE + 2.0 * acc)
    }
}

impl Default for FourierOracle {
    fn default() -> Self {
        Self::new(50.0, 16).expect("default window is valid")
    }
}

/// Convenience wrapper with the default oracle settings.
pub fn y_spectral_variance_oracle(omega: f64, kappa: f64, mu: f64) -> Result<f64, LaserError> {
    FourierOracle::default().y_spectral_variance(omega, kappa, mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [2, 5, 16] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            // degree 2n-1 monomial x^(2n-2) integrates to 2/(2n-1)
            let deg = 2 * n - 2;
            let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert!((s - 2.0 / (deg as f64 + 1.0)).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn short_window_is_rejected() {
        assert!(matches!(FourierOracle::new(19.9, 16), Err(LaserError::WindowTooShort { .. })));
        assert!(FourierOracle::new(20.0, 16).is_ok());
    }

    #[test]
    fn oracle_hits_closed_form_anchors() {
        let v0 = y_spectral_variance_oracle(0.0, 1.0, 0.0).unwrap();
        assert!(v0.abs() < 1e-6);
        let vk = y_spectral_variance_oracle(2.0, 2.0, 0.0).unwrap();
        assert!((vk - 0.125).abs() < 1e-6);
    }

    #[test]
    fn synchronization_leaves_residual_noise_at_zero_frequency() {
        let mu: f64 = 0.05;
        let v = y_spectral_variance_oracle(0.0, 1.0, mu).unwrap();
        assert!(v > 0.0);
        // kernel integral: residual = (1/4) (mu/2)^2 / (1 - mu/2)^2
        let expected = 0.25 * (mu / 2.0).powi(2) / (1.0 - mu / 2.0).powi(2);
        assert!((v - expected).abs() < 1e-12);
    }

    #[test]
    fn oracle_tracks_closed_form_over_six_decades() {
        let oracle = FourierOracle::default();
        let mut worst: f64 = 0.0;
        for i in 0..25 {
            let omega = 10f64.powf(-3.0 + 6.0 * i as f64 / 24.0);
            let exact = crate::laser::y_spectral_variance(omega, 1.0).unwrap();
            let num = oracle.y_spectral_variance(omega, 1.0, 0.0).unwrap();
            worst = worst.max(((num - exact) / exact).abs());
        }
        assert!(worst < 1e-6, "worst relative error {worst:e}");
    }
}
