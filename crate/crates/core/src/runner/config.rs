use std::path::Path;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::quad::db_to_variance;

use super::RunnerError;

/// Squeezed variance of an 8.3 dB source.
fn default_source_y_var() -> f64 {
    db_to_variance(8.3)
}

/// Whole config file: one optional table per experiment kind.
#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub spectrum: SpectrumConfig,
    #[serde(rename = "cluster-check")]
    pub cluster_check: ClusterCheckConfig,
    #[serde(rename = "delayed-check")]
    pub delayed_check: DelayedCheckConfig,
    pub gate: GateConfig,
    pub compose: ComposeConfig,
    pub cz: CzConfig,
    pub pipeline: PipelineConfig,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, RunnerError> {
        toml::from_str(text).map_err(|e| {
            let field = e.span().map_or_else(|| "config".to_string(), |s| format!("config[{}..{}]", s.start, s.end));
            RunnerError::config(field, e.message().to_string())
        })
    }

    pub fn load(path: &Path) -> Result<Self, RunnerError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| RunnerError::Io { context: format!("reading {}", path.display()), source })?;
        Self::parse(&text)
    }
}

fn positive(field: &str, v: f64) -> Result<(), RunnerError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(RunnerError::config(field, format!("must be positive and finite, got {v}")))
    }
}

fn finite(field: &str, v: f64) -> Result<(), RunnerError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(RunnerError::config(field, format!("must be finite, got {v}")))
    }
}

fn excess_noise(field: &str, f: f64) -> Result<(), RunnerError> {
    if f >= 1.0 && f.is_finite() {
        Ok(())
    } else {
        Err(RunnerError::config(field, format!("excess-noise factor must be >= 1, got {f}")))
    }
}

pub(crate) fn matrix2(field: &str, rows: &[Vec<f64>]) -> Result<Matrix2<f64>, RunnerError> {
    if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
        return Err(RunnerError::config(field, "expected a 2x2 matrix [[a, b], [c, d]]"));
    }
    for v in rows.iter().flatten() {
        finite(field, *v)?;
    }
    Ok(Matrix2::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1]))
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    pub kappa: f64,
    pub mu: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
    /// Excess-noise factor of the x-quadrature (1 = minimum uncertainty).
    pub x_noise: f64,
    /// Number of sweep points also checked against the numeric Fourier oracle.
    pub oracle_points: usize,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self { kappa: 1.0, mu: 0.0, omega_min: 1e-3, omega_max: 1e3, points: 200, x_noise: 10.0, oracle_points: 25 }
    }
}

impl SpectrumConfig {
    pub fn validate(&self) -> Result<(), RunnerError> {
        positive("spectrum.kappa", self.kappa)?;
        positive("spectrum.omega_min", self.omega_min)?;
        positive("spectrum.omega_max", self.omega_max)?;
        if self.omega_max <= self.omega_min {
            return Err(RunnerError::config("spectrum.omega_max", "must exceed omega_min"));
        }
        if self.points < 2 {
            return Err(RunnerError::config("spectrum.points", "need at least 2 points"));
        }
        if !(0.0..1.0).contains(&self.mu) {
            return Err(RunnerError::config("spectrum.mu", format!("must lie in [0, 1), got {}", self.mu)));
        }
        excess_noise("spectrum.x_noise", self.x_noise)
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterCheckConfig {
    /// `two-node`, `chain:N`, `star:N`, or an edge list `nodes N; i j; ...`.
    pub graph: String,
    pub y_vars: Vec<f64>,
    pub x_noise: f64,
}

impl Default for ClusterCheckConfig {
    fn default() -> Self {
        Self { graph: "two-node".into(), y_vars: vec![default_source_y_var()], x_noise: 1.0 }
    }
}

impl ClusterCheckConfig {
    pub fn validate(&self) -> Result<(), RunnerError> {
        if self.y_vars.is_empty() {
            return Err(RunnerError::config("cluster-check.y_vars", "must not be empty"));
        }
        for v in &self.y_vars {
            positive("cluster-check.y_vars", *v)?;
        }
        excess_noise("cluster-check.x_noise", self.x_noise)
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct DelayedCheckConfig {
    /// Pulse period `T + T0`.
    pub period: f64,
    pub multiples: Vec<u64>,
    pub k_min: i64,
    pub k_max: i64,
    pub y_var: f64,
    pub x_var: f64,
    /// Fractional offsets of `k` probed off the grid.
    pub off_grid: Vec<f64>,
}

impl Default for DelayedCheckConfig {
    fn default() -> Self {
        Self {
            period: 1.0,
            multiples: vec![1, 2, 5, 50],
            k_min: -3,
            k_max: 3,
            y_var: default_source_y_var(),
            x_var: 10.0,
            off_grid: vec![0.5],
        }
    }
}

impl DelayedCheckConfig {
    pub fn validate(&self) -> Result<(), RunnerError> {
        positive("delayed-check.period", self.period)?;
        if self.multiples.is_empty() || self.multiples.contains(&0) {
            return Err(RunnerError::config("delayed-check.multiples", "need at least one multiple, all >= 1"));
        }
        if self.k_max < self.k_min {
            return Err(RunnerError::config("delayed-check.k_max", "must not be below k_min"));
        }
        for (field, v) in [("delayed-check.y_var", self.y_var), ("delayed-check.x_var", self.x_var)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(RunnerError::config(field, format!("must be non-negative, got {v}")));
            }
        }
        for f in &self.off_grid {
            finite("delayed-check.off_grid", *f)?;
        }
        Ok(())
    }
}

/// Single-mode Gaussian input of a gate.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputConfig {
    pub x_var: f64,
    pub y_var: f64,
    pub mean: [f64; 2],
}

impl Default for InputConfig {
    fn default() -> Self {
        Self { x_var: 0.25, y_var: 0.25, mean: [1.0, -0.5] }
    }
}

impl InputConfig {
    pub fn validate(&self, section: &str) -> Result<(), RunnerError> {
        positive(&format!("{section}.input.x_var"), self.x_var)?;
        positive(&format!("{section}.input.y_var"), self.y_var)?;
        finite(&format!("{section}.input.mean"), self.mean[0])?;
        finite(&format!("{section}.input.mean"), self.mean[1])?;
        if self.x_var * self.y_var < 1.0 / 16.0 - 1e-15 {
            return Err(RunnerError::config(
                format!("{section}.input"),
                "x_var * y_var must be at least 1/16 for a physical state",
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct GateConfig {
    pub theta_in: f64,
    pub theta_1: f64,
    pub beta_0: f64,
    pub source_y_var: f64,
    pub x_noise: f64,
    pub input: InputConfig,
    pub sample: bool,
    pub allow_unentangled: bool,
}

impl Default for GateConfig {
    fn default() -> Self {
        Self {
            theta_in: 0.7,
            theta_1: -0.4,
            beta_0: crate::gate::DEFAULT_BETA_0,
            source_y_var: default_source_y_var(),
            x_noise: 1.0,
            input: InputConfig::default(),
            sample: false,
            allow_unentangled: false,
        }
    }
}

impl GateConfig {
    pub fn validate(&self) -> Result<(), RunnerError> {
        finite("gate.theta_in", self.theta_in)?;
        finite("gate.theta_1", self.theta_1)?;
        positive("gate.beta_0", self.beta_0)?;
        positive("gate.source_y_var", self.source_y_var)?;
        excess_noise("gate.x_noise", self.x_noise)?;
        self.input.validate("gate")
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct ComposeConfig {
    pub target: Vec<Vec<f64>>,
    pub source_y_var: f64,
    pub x_noise: f64,
    pub input: InputConfig,
    pub sample: bool,
}

impl Default for ComposeConfig {
    fn default() -> Self {
        Self {
            target: vec![vec![1.0, 0.0], vec![1.0, 1.0]],
            source_y_var: default_source_y_var(),
            x_noise: 1.0,
            input: InputConfig::default(),
            sample: false,
        }
    }
}

impl ComposeConfig {
    pub fn validate(&self) -> Result<Matrix2<f64>, RunnerError> {
        positive("compose.source_y_var", self.source_y_var)?;
        excess_noise("compose.x_noise", self.x_noise)?;
        self.input.validate("compose")?;
        matrix2("compose.target", &self.target)
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct CzConfig {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
}

impl Default for CzConfig {
    fn default() -> Self {
        Self { a: vec![vec![1.0, 0.0], vec![1.0, 1.0]], b: vec![vec![1.0, 0.0], vec![-1.0, 1.0]] }
    }
}

impl CzConfig {
    pub fn validate(&self) -> Result<(Matrix2<f64>, Matrix2<f64>), RunnerError> {
        Ok((matrix2("cz.a", &self.a)?, matrix2("cz.b", &self.b)?))
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub lanes: usize,
    pub clusters: usize,
    pub slot: f64,
    pub ticks_per_slot: u32,
    pub source_y_var: f64,
    pub x_noise: f64,
    /// Per lane, one `[theta_in, theta_1]` pair per cluster of that lane.
    /// Empty means identity gates everywhere.
    pub settings: Vec<Vec<[f64; 2]>>,
    /// Per lane input states; empty means `input` for every lane.
    pub inputs: Vec<InputConfig>,
    pub input: InputConfig,
    pub transmissivity: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            lanes: 2,
            clusters: 4,
            slot: 1.0,
            ticks_per_slot: crate::mux::DEFAULT_TICKS_PER_SLOT,
            source_y_var: default_source_y_var(),
            x_noise: 1.0,
            settings: Vec::new(),
            inputs: Vec::new(),
            input: InputConfig::default(),
            transmissivity: 1.0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), RunnerError> {
        if self.lanes == 0 {
            return Err(RunnerError::config("pipeline.lanes", "must be at least 1"));
        }
        if self.clusters < self.lanes {
            return Err(RunnerError::config("pipeline.clusters", "must be at least the number of lanes"));
        }
        positive("pipeline.slot", self.slot)?;
        positive("pipeline.source_y_var", self.source_y_var)?;
        excess_noise("pipeline.x_noise", self.x_noise)?;
        if !self.settings.is_empty() && self.settings.len() != self.lanes {
            return Err(RunnerError::config("pipeline.settings", "need one list per lane"));
        }
        if !self.inputs.is_empty() && self.inputs.len() != self.lanes {
            return Err(RunnerError::config("pipeline.inputs", "need one input per lane"));
        }
        for input in self.inputs.iter().chain(std::iter::once(&self.input)) {
            input.validate("pipeline")?;
        }
        if !(self.transmissivity > 0.0 && self.transmissivity <= 1.0) {
            return Err(RunnerError::config("pipeline.transmissivity", "must lie in (0, 1]"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = ConfigFile::parse("").unwrap();
        assert_eq!(c.spectrum.points, 200);
        assert!(c.seed.is_none());
        c.spectrum.validate().unwrap();
        c.gate.validate().unwrap();
        c.compose.validate().unwrap();
        c.pipeline.validate().unwrap();
    }

    #[test]
    fn sections_override_defaults() {
        let c = ConfigFile::parse("seed = 7\n[cluster-check]\ny_vars = [0.25]\n[cz]\na = [[1, 0], [0, 1]]\n").unwrap();
        assert_eq!(c.seed, Some(7));
        assert_eq!(c.cluster_check.y_vars, [0.25]);
        assert_eq!(c.cz.validate().unwrap().0, Matrix2::identity());
    }

    #[test]
    fn unknown_fields_and_bad_values_name_the_field() {
        let err = ConfigFile::parse("[spectrum]\nkapa = 1.0\n").unwrap_err();
        assert!(err.to_string().contains("kapa"), "{err}");
        let c = ConfigFile::parse("[spectrum]\nkappa = -1.0\n").unwrap();
        let err = c.spectrum.validate().unwrap_err();
        assert!(err.to_string().contains("spectrum.kappa"));
        assert_eq!(err.exit_code(), 2);
        let c = ConfigFile::parse("[compose]\ntarget = [[1, 0, 0]]\n").unwrap();
        assert!(c.compose.validate().unwrap_err().to_string().contains("compose.target"));
    }
}
