use std::f64::consts::FRAC_PI_4;
use std::fmt::Display;

use nalgebra::{DVector, Matrix2};
use rayon::prelude::*;
use serde::Serialize;

use crate::cluster::{
    generate_cluster, min_squeezing_threshold, nullifier_variances, ClusterGraph, OrthogonalFreedom, SourceVariances,
    VLF_THRESHOLD,
};
use crate::gate::{
    conditioned_step_oracle, cz_matrix, cz_transform, single_step, solve_phases, ClusterResource, GateError,
    GateOutput, HomodyneSetting, ModePair, OracleMode, SourceRegister, StepOptions, TwoModeCoefficients,
};
use crate::laser::{spectrum_sweep, FourierOracle, XNoiseModel};
use crate::mux::{
    admissible_frequencies, delayed_vlf, schedule_lanes, simulate_pipeline, validate_schedule, DelaySpec, MuxError,
    PipelineOptions, TimeBase,
};
use crate::quad::{symplectic_defect, GaussianState, SYMPLECTIC_TOL};

use super::config::{
    ClusterCheckConfig, ComposeConfig, ConfigFile, CzConfig, DelayedCheckConfig, GateConfig, InputConfig,
    PipelineConfig, SpectrumConfig,
};
use super::sampling::sample_homodyne;
use super::{
    ResultRecord, RunnerError, Series, Verdict, DET_UNITY_TOL, FOURIER_ORACLE_TOL, LANE_ISOLATION_TOL,
    NOISE_FLOOR_TOL, ORACLE_MATCH_TOL, PHASE_RESIDUAL_TOL, SPECTRAL_LAW_TOL,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Spectrum,
    ClusterCheck,
    DelayedCheck,
    Gate,
    Compose,
    Cz,
    Pipeline,
}

impl ExperimentKind {
    pub const ALL: [Self; 7] =
        [Self::Spectrum, Self::ClusterCheck, Self::DelayedCheck, Self::Gate, Self::Compose, Self::Cz, Self::Pipeline];

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Spectrum => "spectrum",
            Self::ClusterCheck => "cluster-check",
            Self::DelayedCheck => "delayed-check",
            Self::Gate => "gate",
            Self::Compose => "compose",
            Self::Cz => "cz",
            Self::Pipeline => "pipeline",
        }
    }
}

/// Runs one experiment. `seed` overrides the seed of the config file.
pub fn run(kind: ExperimentKind, config: &ConfigFile, seed: Option<u64>) -> Result<ResultRecord, RunnerError> {
    let seed = seed.or(config.seed);
    match kind {
        ExperimentKind::Spectrum => run_spectrum(&config.spectrum),
        ExperimentKind::ClusterCheck => run_cluster_check(&config.cluster_check),
        ExperimentKind::DelayedCheck => run_delayed_check(&config.delayed_check),
        ExperimentKind::Gate => run_gate(&config.gate, seed),
        ExperimentKind::Compose => run_compose(&config.compose, seed),
        ExperimentKind::Cz => run_cz(&config.cz),
        ExperimentKind::Pipeline => run_pipeline(&config.pipeline),
    }
}

fn num<E: Display>(context: &'static str) -> impl Fn(E) -> RunnerError {
    move |e| RunnerError::numeric(context, e)
}

fn exact(name: &str, value: f64) -> Verdict {
    Verdict::at_most(name, value, 0.0, "EXACT")
}

fn rows(m: &Matrix2<f64>) -> [[f64; 2]; 2] {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

pub fn run_spectrum(cfg: &SpectrumConfig) -> Result<ResultRecord, RunnerError> {
    cfg.validate()?;
    let mut rec = ResultRecord::new(ExperimentKind::Spectrum, cfg);
    let (lo, hi) = (cfg.omega_min.ln(), cfg.omega_max.ln());
    let mut omegas: Vec<f64> =
        (0..cfg.points).map(|i| (lo + (hi - lo) * i as f64 / (cfg.points - 1) as f64).exp()).collect();
    omegas.push(cfg.kappa);
    omegas.sort_by(f64::total_cmp);
    omegas.dedup();

    let points = spectrum_sweep(&omegas, cfg.kappa, XNoiseModel::ExcessNoise(cfg.x_noise)).map_err(num("spectrum"))?;
    let mut series = Series::new(&["omega", "y_var", "x_var", "four_y_var"]);
    let mut law_err: f64 = 0.0;
    let mut misclassified = 0usize;
    for p in &points {
        series.push_row(&[p.omega, p.y_var, p.x_var.unwrap_or(f64::INFINITY), p.four_y_var()]);
        let law = p.omega * p.omega / (cfg.kappa * cfg.kappa + p.omega * p.omega);
        law_err = law_err.max(((p.four_y_var() - law) / law).abs());
        if (p.four_y_var() < VLF_THRESHOLD) != (p.omega.abs() < cfg.kappa) {
            misclassified += 1;
        }
    }
    let at_kappa = points.iter().find(|p| p.omega == cfg.kappa).expect("kappa row").four_y_var();
    rec.scalars.insert("four_y_var_at_kappa".into(), at_kappa);
    rec.scalars.insert("entangled_points".into(), points.iter().filter(|p| p.four_y_var() < VLF_THRESHOLD).count() as f64);
    rec.verdicts.push(Verdict::at_most("spectral_law", law_err, SPECTRAL_LAW_TOL, "SPECTRAL_LAW_TOL"));
    rec.verdicts.push(Verdict::at_most(
        "four_y_var_at_kappa",
        (at_kappa - VLF_THRESHOLD).abs(),
        SPECTRAL_LAW_TOL,
        "SPECTRAL_LAW_TOL",
    ));
    rec.verdicts.push(Verdict::at_most("window_misclassified", misclassified as f64, 0.0, "VLF_THRESHOLD"));

    if cfg.oracle_points > 0 {
        let n = cfg.oracle_points.min(points.len());
        let picks: Vec<usize> = (0..n).map(|i| i * (points.len() - 1) / (n - 1).max(1)).collect();
        let oracle = FourierOracle::default();
        let gaps: Vec<f64> = picks
            .par_iter()
            .map(|&i| {
                let p = &points[i];
                let v = oracle.y_spectral_variance(p.omega, cfg.kappa, cfg.mu)?;
                Ok(((v - p.y_var) / p.y_var).abs())
            })
            .collect::<Result<_, crate::laser::LaserError>>()
            .map_err(num("fourier oracle"))?;
        let worst = gaps.iter().copied().fold(0.0, f64::max);
        rec.scalars.insert("oracle_max_relative_gap".into(), worst);
        if cfg.mu == 0.0 {
            rec.verdicts.push(Verdict::at_most("fourier_oracle", worst, FOURIER_ORACLE_TOL, "FOURIER_ORACLE_TOL"));
        }
    }
    rec.series = Some(series);
    Ok(rec)
}

pub(crate) fn parse_graph(text: &str) -> Result<ClusterGraph, RunnerError> {
    let bad = |e: &dyn Display| RunnerError::config("cluster-check.graph", e.to_string());
    let sized = |s: &str| s.trim().parse::<usize>().map_err(|e| bad(&e));
    match text.trim() {
        "two-node" => Ok(ClusterGraph::two_node()),
        s if s.starts_with("chain:") => ClusterGraph::chain(sized(&s[6..])?).map_err(|e| bad(&e)),
        s if s.starts_with("star:") => ClusterGraph::star(sized(&s[5..])?).map_err(|e| bad(&e)),
        s => s.replace(';', "\n").parse::<ClusterGraph>().map_err(|e| bad(&e)),
    }
}

pub fn run_cluster_check(cfg: &ClusterCheckConfig) -> Result<ResultRecord, RunnerError> {
    cfg.validate()?;
    let graph = parse_graph(&cfg.graph)?;
    let threshold = min_squeezing_threshold(&graph).map_err(|e| RunnerError::config("cluster-check.graph", e.to_string()))?;
    let n = graph.n_nodes();
    let q = if n == 2 { OrthogonalFreedom::two_node_default() } else { OrthogonalFreedom::identity(n) };
    let edges = graph.edges();

    let worst: Vec<f64> = cfg
        .y_vars
        .par_iter()
        .map(|&y| {
            let src = SourceVariances::new(cfg.x_noise / (16.0 * y), y)?;
            let state = generate_cluster(&vec![src; n], &graph, &q)?;
            let vars = nullifier_variances(&state, &graph)?;
            Ok(edges.iter().map(|&(i, j)| vars[i] + vars[j]).fold(0.0, f64::max))
        })
        .collect::<Result<_, crate::cluster::ClusterError>>()
        .map_err(num("cluster generation"))?;

    let mut rec = ResultRecord::new(ExperimentKind::ClusterCheck, cfg);
    rec.scalars.insert("min_squeezing_threshold".into(), threshold);
    let mut series = Series::new(&["y_var", "vlf_sum", "entangled"]);
    for (&y, &sum) in cfg.y_vars.iter().zip(&worst) {
        let entangled = sum < VLF_THRESHOLD;
        series.push_row(&[y, sum, entangled as u8 as f64]);
        rec.verdicts.push(Verdict::below(format!("entangled[y_var={}]", super::format_g(y, 12)), sum, VLF_THRESHOLD, "VLF_THRESHOLD"));
    }
    rec.series = Some(series);
    Ok(rec)
}

pub fn run_delayed_check(cfg: &DelayedCheckConfig) -> Result<ResultRecord, RunnerError> {
    cfg.validate()?;
    let mut rec = ResultRecord::new(ExperimentKind::DelayedCheck, cfg);
    let mut series = Series::new(&["n", "k", "tau", "omega", "lhs", "entangled", "on_grid"]);
    let mut grid_gap: f64 = 0.0;
    let mut off_grid_entangled = 0usize;
    let ks: Vec<i64> = (cfg.k_min..=cfg.k_max).collect();
    for &n in &cfg.multiples {
        let delay = DelaySpec::on_grid(n, cfg.period).map_err(num("delay"))?;
        let omegas = admissible_frequencies(delay.tau, cfg.k_min..=cfg.k_max).map_err(num("frequencies"))?;
        for (&k, &w) in ks.iter().zip(&omegas) {
            let v = delayed_vlf(delay.tau, w, cfg.y_var, cfg.x_var).map_err(num("delayed criterion"))?;
            grid_gap = grid_gap.max((v.lhs - 4.0 * cfg.y_var).abs());
            series.push_row(&[n as f64, k as f64, delay.tau, w, v.lhs, v.entangled as u8 as f64, 1.0]);
        }
        for &f in &cfg.off_grid {
            for &k in &ks {
                let kk = k as f64 + f;
                let w = 2.0 * std::f64::consts::PI * kk / delay.tau;
                let v = delayed_vlf(delay.tau, w, cfg.y_var, cfg.x_var).map_err(num("delayed criterion"))?;
                off_grid_entangled += v.entangled as usize;
                series.push_row(&[n as f64, kk, delay.tau, w, v.lhs, v.entangled as u8 as f64, 0.0]);
            }
        }
    }
    rec.scalars.insert("off_grid_entangled".into(), off_grid_entangled as f64);
    rec.verdicts.push(exact("grid_reduction", grid_gap));
    rec.verdicts.push(Verdict::below("on_grid_entangled", 4.0 * cfg.y_var, VLF_THRESHOLD, "VLF_THRESHOLD"));
    rec.series = Some(series);
    Ok(rec)
}

fn input_state(cfg: &InputConfig) -> Result<GaussianState, RunnerError> {
    GaussianState::squeezed(cfg.x_var, cfg.y_var)
        .and_then(|s| s.with_mean(DVector::from_vec(cfg.mean.to_vec())))
        .map_err(|e| RunnerError::config("input", e.to_string()))
}

fn source_pair(y_var: f64, x_noise: f64) -> Result<[SourceVariances; 2], RunnerError> {
    let s = SourceVariances::new(x_noise / (16.0 * y_var), y_var).map_err(|e| RunnerError::config("source_y_var", e.to_string()))?;
    Ok([s; 2])
}

fn add_sampling(rec: &mut ResultRecord, register: &SourceRegister, out: &GateOutput, seed: Option<u64>) -> Result<(), RunnerError> {
    let sampled = sample_homodyne(register, out, seed)?;
    let offset = sampled.classical_offsets.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    rec.verdicts.push(exact("feed_forward_offsets", offset));
    rec.detail("sampled", &sampled);
    Ok(())
}

fn gate_error(section: &'static str) -> impl Fn(GateError) -> RunnerError {
    move |e| match e {
        GateError::DegeneratePhases { .. } | GateError::InvalidBeta(_) | GateError::NotEntangled { .. } => {
            RunnerError::config(section, e.to_string())
        }
        e => RunnerError::numeric(section, e),
    }
}

pub fn run_gate(cfg: &GateConfig, seed: Option<u64>) -> Result<ResultRecord, RunnerError> {
    cfg.validate()?;
    if cfg.sample && seed.is_none() {
        return Err(RunnerError::MissingSeed);
    }
    let input = input_state(&cfg.input)?;
    let sources = source_pair(cfg.source_y_var, cfg.x_noise)?;
    let q = OrthogonalFreedom::two_node_default();
    let mut reg = SourceRegister::new();
    let a = reg.add_input(&input).map_err(gate_error("gate"))?;
    let cluster = reg.add_two_node_cluster(sources, &q).map_err(gate_error("gate"))?;
    let setting = HomodyneSetting::new(cfg.theta_in, cfg.theta_1).with_beta(cfg.beta_0);
    let out = single_step(&a, &cluster, &setting, StepOptions { allow_unentangled: cfg.allow_unentangled })
        .map_err(gate_error("gate"))?;

    let m = out.signal;
    let cov = out.covariance(&reg).map_err(num("gate covariance"))?;
    let cov = cov.matrix();
    let sigma_in = Matrix2::new(cfg.input.x_var, 0.0, 0.0, cfg.input.y_var);
    let expected = m * sigma_in * m.transpose() + Matrix2::identity() * (2.0 * cfg.source_y_var);
    let floor_gap = (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| (cov[(i, j)] - expected[(i, j)]).abs()).fold(0.0, f64::max);
    let oracle = conditioned_step_oracle(&input, sources, &q, &setting, [0.0; 2], OracleMode::AntisqueezedLimit)
        .map_err(num("conditioning oracle"))?;
    let oracle_gap = (oracle.cov().matrix() - cov).amax();

    let mut rec = ResultRecord::new(ExperimentKind::Gate, cfg);
    rec.scalars.insert("det_m".into(), m.determinant());
    rec.scalars.insert("vlf_sum".into(), cluster.vlf.sum);
    rec.verdicts.push(Verdict::below("cluster_entangled", cluster.vlf.sum, VLF_THRESHOLD, "VLF_THRESHOLD"));
    rec.verdicts.push(Verdict::at_most("det_unity", (m.determinant() - 1.0).abs(), DET_UNITY_TOL, "DET_UNITY_TOL"));
    rec.verdicts.push(Verdict::at_most("noise_floor", floor_gap, NOISE_FLOOR_TOL, "NOISE_FLOOR_TOL"));
    rec.verdicts.push(Verdict::at_most("conditioning_oracle", oracle_gap, ORACLE_MATCH_TOL, "ORACLE_MATCH_TOL"));
    rec.detail("gate_matrix", rows(&m));
    rec.detail("output_covariance", [[cov[(0, 0)], cov[(0, 1)]], [cov[(1, 0)], cov[(1, 1)]]]);
    rec.detail("expected_covariance", rows(&expected));
    rec.detail("output_x", out.exprs[0].to_string());
    rec.detail("output_y", out.exprs[1].to_string());
    rec.detail("envelope", out.envelope.to_string());
    if cfg.sample {
        add_sampling(&mut rec, &reg, &out, seed)?;
    }
    Ok(rec)
}

pub fn run_compose(cfg: &ComposeConfig, seed: Option<u64>) -> Result<ResultRecord, RunnerError> {
    let target = cfg.validate()?;
    if cfg.sample && seed.is_none() {
        return Err(RunnerError::MissingSeed);
    }
    let mut rec = ResultRecord::new(ExperimentKind::Compose, cfg);
    let solution = match solve_phases(&target) {
        Ok(s) => s,
        Err(GateError::NotReached { residual, best }) => {
            rec.verdicts.push(Verdict::at_most("phase_residual", residual, PHASE_RESIDUAL_TOL, "PHASE_RESIDUAL_TOL"));
            rec.detail("best_phases", [[best.first.theta_in, best.first.theta_1], [best.second.theta_in, best.second.theta_1]]);
            return Ok(rec);
        }
        Err(e) => return Err(RunnerError::config("compose.target", e.to_string())),
    };
    let input = input_state(&cfg.input)?;
    let sources = source_pair(cfg.source_y_var, cfg.x_noise)?;
    let q = OrthogonalFreedom::two_node_default();
    let mut reg = SourceRegister::new();
    let a = reg.add_input(&input).map_err(gate_error("compose"))?;
    let c1 = reg.add_two_node_cluster(sources, &q).map_err(gate_error("compose"))?;
    let c2 = reg.add_two_node_cluster(sources, &q).map_err(gate_error("compose"))?;
    let out = crate::gate::compose_two_steps(&a, [&c1, &c2], [&solution.first, &solution.second], StepOptions::default())
        .map_err(gate_error("compose"))?;
    let cov = out.covariance(&reg).map_err(num("compose covariance"))?;
    let c = cov.matrix();

    rec.scalars.insert("phase_residual".into(), solution.residual);
    rec.verdicts.push(Verdict::at_most("phase_residual", solution.residual, PHASE_RESIDUAL_TOL, "PHASE_RESIDUAL_TOL"));
    rec.verdicts.push(Verdict::at_most("signal_matches_target", (out.signal - target).amax(), PHASE_RESIDUAL_TOL, "PHASE_RESIDUAL_TOL"));
    rec.detail(
        "phases",
        [[solution.first.theta_in, solution.first.theta_1], [solution.second.theta_in, solution.second.theta_1]],
    );
    rec.detail("signal_matrix", rows(&out.signal));
    rec.detail("output_covariance", [[c[(0, 0)], c[(0, 1)]], [c[(1, 0)], c[(1, 1)]]]);
    if cfg.sample {
        add_sampling(&mut rec, &reg, &out, seed)?;
    }
    Ok(rec)
}

pub fn run_cz(cfg: &CzConfig) -> Result<ResultRecord, RunnerError> {
    let (a, b) = cfg.validate()?;
    let coeffs = TwoModeCoefficients::new(a, b).map_err(|e| RunnerError::config("cz", e.to_string()))?;
    let m = cz_transform(&coeffs);
    let dm = nalgebra::DMatrix::from_iterator(4, 4, m.iter().copied());
    let mut rec = ResultRecord::new(ExperimentKind::Cz, cfg);
    rec.verdicts.push(exact("matches_cz", (m - cz_matrix()).amax()));
    rec.verdicts.push(Verdict::at_most("symplectic", symplectic_defect(&dm), SYMPLECTIC_TOL, "SYMPLECTIC_TOL"));
    let matrix: Vec<Vec<f64>> = (0..4).map(|i| (0..4).map(|j| m[(i, j)]).collect()).collect();
    rec.detail("matrix", matrix);
    Ok(rec)
}

/// `θ₊ = 0, θ₋ = π/2`: the identity gate.
const IDENTITY_SETTING: [f64; 2] = [FRAC_PI_4, -FRAC_PI_4];

pub fn run_pipeline(cfg: &PipelineConfig) -> Result<ResultRecord, RunnerError> {
    cfg.validate()?;
    let mux_err = |e: MuxError| match e {
        MuxError::Unsupported(_) | MuxError::InfeasibleCounts { .. } | MuxError::CountMismatch { .. } | MuxError::InvalidTimeBase(_) => {
            RunnerError::config("pipeline", e.to_string())
        }
        e => RunnerError::numeric("pipeline", e),
    };
    let time_base = TimeBase::new(cfg.slot, cfg.ticks_per_slot).map_err(mux_err)?;
    let schedule = schedule_lanes(cfg.lanes, cfg.clusters, time_base).map_err(mux_err)?;
    let report = validate_schedule(&schedule).map_err(mux_err)?;

    let mut reg = SourceRegister::new();
    let inputs: Vec<ModePair> = (0..cfg.lanes)
        .map(|l| {
            let c = cfg.inputs.get(l).unwrap_or(&cfg.input);
            reg.add_input(&input_state(c)?).map_err(gate_error("pipeline"))
        })
        .collect::<Result<_, _>>()?;
    let sources = source_pair(cfg.source_y_var, cfg.x_noise)?;
    let q = OrthogonalFreedom::two_node_default();
    let clusters: Vec<ClusterResource> = (0..cfg.clusters)
        .map(|_| reg.add_two_node_cluster(sources, &q).map_err(gate_error("pipeline")))
        .collect::<Result<_, _>>()?;
    let settings: Vec<Vec<HomodyneSetting>> = (0..cfg.lanes)
        .map(|l| {
            let n = schedule.lanes.clusters_of_lane(l).len();
            match cfg.settings.get(l) {
                Some(s) if s.len() != n => Err(RunnerError::config(
                    format!("pipeline.settings[{l}]"),
                    format!("lane {l} has {n} clusters but {} settings", s.len()),
                )),
                Some(s) => Ok(s.iter().map(|p| HomodyneSetting::new(p[0], p[1])).collect()),
                None => Ok(vec![HomodyneSetting::new(IDENTITY_SETTING[0], IDENTITY_SETTING[1]); n]),
            }
        })
        .collect::<Result<_, _>>()?;

    let options = PipelineOptions { transmissivity: cfg.transmissivity, step: StepOptions::default() };
    let run = simulate_pipeline(&schedule, &inputs, &clusters, &settings, options).map_err(|e| match e {
        MuxError::Gate(g) => gate_error("pipeline")(g),
        e => mux_err(e),
    })?;

    let mut isolation_gap: f64 = 0.0;
    let mut series = Series::new(&["lane", "steps", "cov_xx", "cov_xy", "cov_yy"]);
    for lane in 0..cfg.lanes {
        let mut direct = GateOutput::identity(&inputs[lane]);
        for (step, &m) in schedule.lanes.clusters_of_lane(lane).iter().enumerate() {
            direct = direct.then_step(&clusters[m], &settings[lane][step], StepOptions::default()).map_err(gate_error("pipeline"))?;
        }
        let out = &run.outputs[lane];
        for k in 0..2 {
            isolation_gap = isolation_gap.max(out.exprs[k].max_abs_diff(&direct.exprs[k]));
        }
        let c = out.covariance(&reg).map_err(num("pipeline covariance"))?;
        series.push_row(&[lane as f64, out.n_steps() as f64, c.entry(0, 0), c.entry(0, 1), c.entry(1, 1)]);
    }

    let mut rec = ResultRecord::new(ExperimentKind::Pipeline, cfg);
    rec.scalars.insert("arm_delay".into(), schedule.delay.tau);
    rec.scalars.insert("beam_splitter_events".into(), report.beam_splitter_events as f64);
    rec.verdicts.push(exact("collisions", report.collisions as f64));
    rec.verdicts.push(Verdict::at_most("lane_isolation", isolation_gap, LANE_ISOLATION_TOL, "LANE_ISOLATION_TOL"));
    rec.detail("switch_schedule", &schedule.switch);
    rec.attachments.push(("pipeline_events.jsonl".into(), run.events_jsonl()));
    rec.series = Some(series);
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_configs_pass() {
        let c = ConfigFile::default();
        for kind in [
            ExperimentKind::Spectrum,
            ExperimentKind::ClusterCheck,
            ExperimentKind::DelayedCheck,
            ExperimentKind::Gate,
            ExperimentKind::Compose,
            ExperimentKind::Cz,
            ExperimentKind::Pipeline,
        ] {
            let rec = run(kind, &c, None).unwrap();
            assert!(rec.passed(), "{kind:?}: {:?}", rec.verdicts.iter().filter(|v| !v.passed).collect::<Vec<_>>());
        }
    }

    #[test]
    fn spectrum_has_half_at_kappa() {
        let rec = run_spectrum(&SpectrumConfig { oracle_points: 0, ..Default::default() }).unwrap();
        let s = rec.series.as_ref().unwrap();
        let i = s.column("omega").unwrap().iter().position(|&w| w == 1.0).unwrap();
        assert!((s.column("four_y_var").unwrap()[i] - 0.5).abs() < 1e-15);
        assert_eq!(s.n_rows(), 201);
    }

    #[test]
    fn vacuum_cluster_is_not_entangled() {
        let rec = run_cluster_check(&ClusterCheckConfig { y_vars: vec![0.25], ..Default::default() }).unwrap();
        assert!(!rec.passed());
        assert!((rec.verdicts[0].value - 1.0).abs() < 1e-15);
        assert_eq!(rec.scalars["min_squeezing_threshold"], 0.25);
    }

    #[test]
    fn graph_specs_parse() {
        assert_eq!(parse_graph("chain:4").unwrap().n_nodes(), 4);
        assert_eq!(parse_graph("star:5").unwrap().degree(0), 4);
        assert_eq!(parse_graph("nodes 3; 0 1; 1 2").unwrap().edges(), [(0, 1), (1, 2)]);
        assert!(parse_graph("ring").is_err());
    }

    #[test]
    fn sampling_without_seed_is_a_usage_error() {
        let err = run_gate(&GateConfig { sample: true, ..Default::default() }, None).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let rec = run_gate(&GateConfig { sample: true, ..Default::default() }, Some(3)).unwrap();
        assert!(rec.verdict("feed_forward_offsets").unwrap().passed);
    }

    #[test]
    fn lossy_pipeline_is_rejected() {
        let err = run_pipeline(&PipelineConfig { transmissivity: 0.5, ..Default::default() }).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn cz_output_is_the_integer_matrix() {
        let rec = run_cz(&CzConfig::default()).unwrap();
        assert!(rec.passed());
        assert_eq!(rec.details["matrix"], serde_json::json!([[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 1.0, 0.0], [0.0, 0.0, 1.0, 0.0], [1.0, 0.0, 0.0, 1.0]]));
    }
}
