//! Config-driven experiments behind the `cvmbqc` binary.

mod config;
mod experiments;
mod output;
mod sampling;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

pub use config::{
    ClusterCheckConfig, ComposeConfig, ConfigFile, CzConfig, DelayedCheckConfig, GateConfig, InputConfig,
    PipelineConfig, SpectrumConfig,
};
pub use experiments::{
    run, run_cluster_check, run_compose, run_cz, run_delayed_check, run_gate, run_pipeline, run_spectrum,
    ExperimentKind,
};
pub use output::{format_g, write_outputs, OutputFormat};
pub use sampling::{sample_homodyne, SampledRun};

/// Relative tolerance of the closed-form spectral law.
pub const SPECTRAL_LAW_TOL: f64 = 1e-12;
/// Relative tolerance of the numeric Fourier oracle.
pub const FOURIER_ORACLE_TOL: f64 = 1e-6;
/// `|det M − 1|` accepted for a gate matrix.
pub const DET_UNITY_TOL: f64 = 1e-12;
/// Engine against homodyne-conditioning oracle.
pub const ORACLE_MATCH_TOL: f64 = 1e-9;
/// Output covariance against `M Σ Mᵀ + 2v I`.
pub const NOISE_FLOOR_TOL: f64 = 1e-10;
/// Residual of solved phases against the target gate.
pub const PHASE_RESIDUAL_TOL: f64 = 1e-6;
/// Pipeline lanes against independent runs.
pub const LANE_ISOLATION_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("sampling requested without a seed")]
    MissingSeed,
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: {message}")]
    Numeric { context: String, message: String },
}

impl RunnerError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Config { field: field.into(), message: message.into() }
    }

    pub fn numeric(context: impl Into<String>, err: impl std::fmt::Display) -> Self {
        Self::Numeric { context: context.into(), message: err.to_string() }
    }

    /// 2 for usage and configuration problems, 1 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config { .. } | Self::MissingSeed | Self::Io { .. } => 2,
            Self::Numeric { .. } => 1,
        }
    }
}

/// A pass/fail judgement against a named threshold.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    pub threshold_name: &'static str,
}

impl Verdict {
    /// Passes when `value <= threshold`.
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64, threshold_name: &'static str) -> Self {
        Self { name: name.into(), passed: value <= threshold, value, threshold, threshold_name }
    }

    /// Passes when `value < threshold`.
    pub fn below(name: impl Into<String>, value: f64, threshold: f64, threshold_name: &'static str) -> Self {
        Self { name: name.into(), passed: value < threshold, value, threshold, threshold_name }
    }
}

/// Column-oriented table.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Series {
    pub columns: Vec<String>,
    pub data: Vec<Vec<f64>>,
}

impl Series {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), data: vec![Vec::new(); columns.len()] }
    }

    pub fn push_row(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        for (col, v) in self.data.iter_mut().zip(row) {
            col.push(*v);
        }
    }

    pub fn n_rows(&self) -> usize {
        self.data.first().map_or(0, Vec::len)
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().position(|c| c == name).map(|i| self.data[i].as_slice())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRecord {
    pub kind: ExperimentKind,
    pub inputs: serde_json::Value,
    pub scalars: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series: Option<Series>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, serde_json::Value>,
    pub verdicts: Vec<Verdict>,
    #[serde(skip)]
    pub attachments: Vec<(String, String)>,
}

impl ResultRecord {
    pub fn new(kind: ExperimentKind, inputs: &impl Serialize) -> Self {
        Self {
            kind,
            inputs: serde_json::to_value(inputs).expect("config serializes"),
            scalars: BTreeMap::new(),
            series: None,
            details: BTreeMap::new(),
            verdicts: Vec::new(),
            attachments: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    fn detail(&mut self, key: &str, value: impl Serialize) {
        self.details.insert(key.to_string(), serde_json::to_value(value).expect("detail serializes"));
    }
}
