use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use nalgebra::Matrix2;
use serde::Serialize;

use crate::cluster::VLF_THRESHOLD;
use crate::quad::{apply_matrix2, expr_covariance, ClassicalSymbol, CovarianceMatrix, Detector, LinearExpr};

use super::register::{ClusterResource, ModePair, SourceRegister};
use super::{GateError, HomodyneSetting};

/// Temporal profile of the output mode, fixed by the detected pulse.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Envelope;

impl fmt::Display for Envelope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("L(t)")
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepOptions {
    /// Run on clusters that fail the VLF check instead of refusing.
    pub allow_unentangled: bool,
}

/// Output mode of a chain of gate steps.
///
/// `exprs` is the rewritten form `signal · input + Σ noise_terms + classical`;
/// `physical` is the same operator written directly over the sources. Both
/// agree once every photocurrent symbol is replaced by its operator from
/// `photocurrents`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GateOutput {
    pub exprs: ModePair,
    pub physical: ModePair,
    pub input: ModePair,
    #[serde(skip)]
    pub signal: Matrix2<f64>,
    pub noise_terms: Vec<ModePair>,
    pub envelope: Envelope,
    pub photocurrents: BTreeMap<ClassicalSymbol, LinearExpr>,
    pub displacement: [f64; 2],
    pub settings: Vec<HomodyneSetting>,
}

impl GateOutput {
    /// The input itself, before any step.
    pub fn identity(input: &ModePair) -> Self {
        Self {
            exprs: input.clone(),
            physical: input.clone(),
            input: input.clone(),
            signal: Matrix2::identity(),
            noise_terms: Vec::new(),
            envelope: Envelope,
            photocurrents: BTreeMap::new(),
            displacement: [0.0; 2],
            settings: Vec::new(),
        }
    }

    pub fn n_steps(&self) -> usize {
        self.settings.len()
    }

    /// One more step teleporting this output through `cluster`.
    pub fn then_step(
        &self,
        cluster: &ClusterResource,
        setting: &HomodyneSetting,
        options: StepOptions,
    ) -> Result<Self, GateError> {
        if !cluster.vlf.entangled {
            if !options.allow_unentangled {
                return Err(GateError::NotEntangled { sum: cluster.vlf.sum, threshold: VLF_THRESHOLD });
            }
            log::warn!("running gate on a cluster with VLF sum {} >= {VLF_THRESHOLD}", cluster.vlf.sum);
        }
        if !(setting.beta_0 > 0.0 && setting.beta_0.is_finite()) {
            return Err(GateError::InvalidBeta(setting.beta_0));
        }
        let m = setting.gate_matrix()?;
        let step = self.n_steps();
        let (s_in, c_in) = setting.theta_in.sin_cos();
        let (s_1, c_1) = setting.theta_1.sin_cos();

        // Beam splitter ports: (node1 + a)/√2 to the θ₁ detector,
        // (node1 − a)/√2 to the θ_in detector.
        let [x1, y1] = &cluster.nodes[0];
        let [xa, ya] = &self.physical;
        let port_in = [(x1 - xa) * FRAC_1_SQRT_2, (y1 - ya) * FRAC_1_SQRT_2];
        let port_1 = [(x1 + xa) * FRAC_1_SQRT_2, (y1 + ya) * FRAC_1_SQRT_2];
        let gain = 2.0 * setting.beta_0;
        let i_in = (&port_in[0] * c_in + &port_in[1] * s_in) * gain;
        let i_1 = (&port_1[0] * c_1 + &port_1[1] * s_1) * gain;
        let sym_in = ClassicalSymbol::new(step, Detector::Input);
        let sym_1 = ClassicalSymbol::new(step, Detector::Cluster);
        let mut photocurrents = self.photocurrents.clone();
        photocurrents.insert(sym_in, i_in);
        photocurrents.insert(sym_1, i_1);

        let k = 1.0 / (setting.beta_0 * std::f64::consts::SQRT_2 * setting.theta_minus().sin());
        let mut classical_x = LinearExpr::zero();
        classical_x.add_symbol(sym_in, k * c_1);
        classical_x.add_symbol(sym_1, -k * c_in);
        let mut classical_y = LinearExpr::zero();
        classical_y.add_symbol(sym_in, -k * s_1);
        classical_y.add_symbol(sym_1, k * s_in);

        let noise = [-&cluster.nullifiers[0], cluster.nullifiers[1].clone()];
        let carried = apply_matrix2(&m, &self.exprs);
        let exprs = [&carried[0] + &noise[0] + classical_x, &carried[1] + &noise[1] + classical_y];

        let mut noise_terms: Vec<ModePair> = self.noise_terms.iter().map(|n| apply_matrix2(&m, n)).collect();
        noise_terms.push(noise);
        let mut settings = self.settings.clone();
        settings.push(*setting);

        Ok(Self {
            exprs,
            physical: cluster.nodes[1].clone(),
            input: self.input.clone(),
            signal: m * self.signal,
            noise_terms,
            envelope: Envelope,
            photocurrents,
            displacement: [0.0; 2],
            settings,
        })
    }

    /// Covariance of the quantum part of `exprs`.
    pub fn covariance(&self, register: &SourceRegister) -> Result<CovarianceMatrix, GateError> {
        Ok(expr_covariance(&self.exprs, &register.covariance())?)
    }

    /// Covariance of the summed noise terms alone.
    pub fn noise_covariance(&self, register: &SourceRegister) -> Result<CovarianceMatrix, GateError> {
        let mut total = [LinearExpr::zero(), LinearExpr::zero()];
        for n in &self.noise_terms {
            total = [&total[0] + &n[0], &total[1] + &n[1]];
        }
        Ok(expr_covariance(&total, &register.covariance())?)
    }

    /// `signal · Σ_in · signalᵀ`.
    pub fn signal_covariance(&self, register: &SourceRegister) -> Result<Matrix2<f64>, GateError> {
        let cin = expr_covariance(&self.input, &register.covariance())?;
        let c = cin.matrix();
        let cin = Matrix2::new(c[(0, 0)], c[(0, 1)], c[(1, 0)], c[(1, 1)]);
        Ok(self.signal * cin * self.signal.transpose())
    }

    /// Quantum means of the output quadratures with the given photocurrents
    /// plugged into the classical part.
    pub fn mean(
        &self,
        register: &SourceRegister,
        currents: &BTreeMap<ClassicalSymbol, f64>,
    ) -> Result<[f64; 2], GateError> {
        let mu = register.mean();
        let mut out = [0.0; 2];
        for (o, e) in out.iter_mut().zip(&self.exprs) {
            *o = e.mean(&mu)? + e.classical_value(currents)?;
        }
        Ok(out)
    }

    /// `physical` recovered from `exprs` by substituting photocurrent operators.
    pub fn resolved_exprs(&self) -> ModePair {
        [self.exprs[0].substitute_classical(&self.photocurrents), self.exprs[1].substitute_classical(&self.photocurrents)]
    }
}

/// One gate step on `input` through `cluster`.
pub fn single_step(
    input: &ModePair,
    cluster: &ClusterResource,
    setting: &HomodyneSetting,
    options: StepOptions,
) -> Result<GateOutput, GateError> {
    GateOutput::identity(input).then_step(cluster, setting, options)
}

/// Two steps in sequence; the net signal matrix is `M₂ M₁`.
pub fn compose_two_steps(
    input: &ModePair,
    clusters: [&ClusterResource; 2],
    settings: [&HomodyneSetting; 2],
    options: StepOptions,
) -> Result<GateOutput, GateError> {
    single_step(input, clusters[0], settings[0], options)?.then_step(clusters[1], settings[1], options)
}

/// Displaces the output by minus its classical part, evaluated at the
/// measured photocurrents. Applying it twice changes nothing.
pub fn feed_forward(output: &GateOutput, currents: &BTreeMap<ClassicalSymbol, f64>) -> Result<GateOutput, GateError> {
    let mut out = output.clone();
    for k in 0..2 {
        let d = -output.exprs[k].classical_value(currents)?;
        out.exprs[k].clear_classical();
        out.physical[k] = &out.physical[k] + &LinearExpr::constant(d);
        out.displacement[k] += d;
    }
    Ok(out)
}
