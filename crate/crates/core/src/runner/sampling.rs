use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::gate::{feed_forward, GateOutput, SourceRegister};
use crate::quad::{expr_covariance, ClassicalSymbol, LinearExpr};

use super::RunnerError;

/// Photocurrents drawn for one run and the feed-forward-corrected output.
#[derive(Clone, Debug, Serialize)]
pub struct SampledRun {
    pub seed: u64,
    pub currents: BTreeMap<String, f64>,
    #[serde(skip)]
    pub values: BTreeMap<ClassicalSymbol, f64>,
    /// Classical part left in the corrected output; zero by construction.
    pub classical_offsets: [f64; 2],
    pub displacement: [f64; 2],
    /// Output mean after correction, given the drawn currents.
    pub corrected_mean: [f64; 2],
    #[serde(skip)]
    pub corrected: GateOutput,
}

/// Lower factor `L` with `L Lᵀ = cov`, falling back to the eigen square
/// root when `cov` is only semidefinite.
fn sqrt_factor(cov: &DMatrix<f64>) -> DMatrix<f64> {
    if let Some(ch) = cov.clone().cholesky() {
        return ch.l();
    }
    let eig = cov.clone().symmetric_eigen();
    let roots = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&roots)
}

/// Draws `n` joint samples of the photocurrents of `output`.
pub(crate) fn draw_currents(
    register: &SourceRegister,
    output: &GateOutput,
    rng: &mut ChaCha20Rng,
    n: usize,
) -> Result<(Vec<ClassicalSymbol>, Vec<DVector<f64>>), RunnerError> {
    let symbols: Vec<ClassicalSymbol> = output.photocurrents.keys().copied().collect();
    let ops: Vec<LinearExpr> = output.photocurrents.values().cloned().collect();
    let cov = expr_covariance(&ops, &register.covariance()).map_err(|e| RunnerError::numeric("photocurrent covariance", e))?;
    let mu = register.mean();
    let mean = DVector::from_iterator(
        ops.len(),
        ops.iter().map(|e| e.mean(&mu).expect("operators live on the register")),
    );
    let l = sqrt_factor(cov.matrix());
    let draws = (0..n)
        .map(|_| {
            let z = DVector::from_iterator(ops.len(), (0..ops.len()).map(|_| StandardNormal.sample(rng)));
            &mean + &l * z
        })
        .collect();
    Ok((symbols, draws))
}

/// One sampled run: draw every photocurrent jointly, then feed forward.
pub fn sample_homodyne(
    register: &SourceRegister,
    output: &GateOutput,
    seed: Option<u64>,
) -> Result<SampledRun, RunnerError> {
    let seed = seed.ok_or(RunnerError::MissingSeed)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (symbols, draws) = draw_currents(register, output, &mut rng, 1)?;
    let values: BTreeMap<ClassicalSymbol, f64> = symbols.iter().copied().zip(draws[0].iter().copied()).collect();
    let corrected = feed_forward(output, &values).map_err(|e| RunnerError::numeric("feed-forward", e))?;
    let mut classical_offsets = [0.0; 2];
    for (o, e) in classical_offsets.iter_mut().zip(&corrected.exprs) {
        *o = e.classical_value(&values).map_err(|e| RunnerError::numeric("feed-forward", e))?;
    }
    let corrected_mean = corrected.mean(register, &values).map_err(|e| RunnerError::numeric("corrected mean", e))?;
    Ok(SampledRun {
        seed,
        currents: values.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        values,
        classical_offsets,
        displacement: corrected.displacement,
        corrected_mean,
        corrected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{OrthogonalFreedom, SourceVariances};
    use crate::gate::{single_step, HomodyneSetting, StepOptions};
    use crate::quad::{expr_variance, GaussianState};

    fn setup() -> (SourceRegister, GateOutput) {
        let mut reg = SourceRegister::new();
        let input = GaussianState::squeezed(0.2, 0.5).unwrap().with_mean(DVector::from_vec(vec![1.0, -2.0])).unwrap();
        let a = reg.add_input(&input).unwrap();
        let c = reg
            .add_two_node_cluster([SourceVariances::minimum_uncertainty(0.05).unwrap(); 2], &OrthogonalFreedom::two_node_default())
            .unwrap();
        let out = single_step(&a, &c, &HomodyneSetting::new(0.7, -0.4), StepOptions::default()).unwrap();
        (reg, out)
    }

    #[test]
    fn missing_seed_is_an_error() {
        let (reg, out) = setup();
        assert!(matches!(sample_homodyne(&reg, &out, None), Err(RunnerError::MissingSeed)));
    }

    #[test]
    fn corrected_offsets_are_exactly_zero_and_runs_repeat() {
        let (reg, out) = setup();
        let a = sample_homodyne(&reg, &out, Some(11)).unwrap();
        let b = sample_homodyne(&reg, &out, Some(11)).unwrap();
        assert_eq!(a.classical_offsets, [0.0, 0.0]);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let c = sample_homodyne(&reg, &out, Some(12)).unwrap();
        assert_ne!(a.currents, c.currents);
    }

    #[test]
    fn sample_means_sit_within_standard_error() {
        let (reg, out) = setup();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let n = 10_000;
        let (symbols, draws) = draw_currents(&reg, &out, &mut rng, n).unwrap();
        for (i, s) in symbols.iter().enumerate() {
            let op = &out.photocurrents[s];
            let mean = op.mean(&reg.mean()).unwrap();
            assert!(mean.abs() > 1e5, "input mean shows up in {s}");
            let sigma = expr_variance(op, &reg.covariance()).unwrap().sqrt();
            let sample = draws.iter().map(|d| d[i]).sum::<f64>() / n as f64;
            assert!((sample - mean).abs() < 4.0 * sigma / 100.0, "{s}: {sample} vs {mean}");
        }
    }
}
