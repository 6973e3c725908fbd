//! Python bindings for the `cvmbqc` core crate.

use nalgebra::{DMatrix, DVector, Matrix2};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use cvmbqc::cluster::{self, ClusterGraph, OrthogonalFreedom, SourceVariances};
use cvmbqc::gate::{self, SourceRegister, StepOptions, TwoModeCoefficients};
use cvmbqc::laser::{self, XNoiseModel};
use cvmbqc::mux;
use cvmbqc::quad::{self, GaussianState};
use cvmbqc::runner::{self, ConfigFile, ExperimentKind};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn matrix2(rows: [[f64; 2]; 2]) -> Matrix2<f64> {
    Matrix2::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1])
}

fn rows<R: nalgebra::Dim, C: nalgebra::Dim, S: nalgebra::RawStorage<f64, R, C>>(
    m: &nalgebra::Matrix<f64, R, C, S>,
) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn x_model(excess_noise: Option<f64>) -> XNoiseModel {
    excess_noise.map_or(XNoiseModel::default(), XNoiseModel::ExcessNoise)
}

/// Phases of the two homodyne detectors of one step.
#[pyclass(name = "HomodyneSetting", from_py_object)]
#[derive(Clone)]
struct PyHomodyneSetting(gate::HomodyneSetting);

#[pymethods]
impl PyHomodyneSetting {
    #[new]
    #[pyo3(signature = (theta_in, theta_1, beta_0 = gate::DEFAULT_BETA_0))]
    fn new(theta_in: f64, theta_1: f64, beta_0: f64) -> Self {
        Self(gate::HomodyneSetting::new(theta_in, theta_1).with_beta(beta_0))
    }

    #[staticmethod]
    fn from_sum_difference(theta_plus: f64, theta_minus: f64) -> Self {
        Self(gate::HomodyneSetting::from_sum_difference(theta_plus, theta_minus))
    }

    #[getter]
    fn theta_in(&self) -> f64 {
        self.0.theta_in
    }

    #[getter]
    fn theta_1(&self) -> f64 {
        self.0.theta_1
    }

    #[getter]
    fn beta_0(&self) -> f64 {
        self.0.beta_0
    }

    #[getter]
    fn theta_plus(&self) -> f64 {
        self.0.theta_plus()
    }

    #[getter]
    fn theta_minus(&self) -> f64 {
        self.0.theta_minus()
    }

    fn gate_matrix(&self) -> PyResult<Vec<Vec<f64>>> {
        Ok(rows(&self.0.gate_matrix().map_err(err)?))
    }

    fn __repr__(&self) -> String {
        format!("HomodyneSetting(theta_in={}, theta_1={}, beta_0={})", self.0.theta_in, self.0.theta_1, self.0.beta_0)
    }
}

/// Undirected simple graph of a cluster state.
#[pyclass(name = "ClusterGraph", from_py_object)]
#[derive(Clone)]
struct PyClusterGraph(ClusterGraph);

#[pymethods]
impl PyClusterGraph {
    #[new]
    fn new(n_nodes: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(Self(ClusterGraph::from_edges(n_nodes, &edges).map_err(err)?))
    }

    #[staticmethod]
    fn two_node() -> Self {
        Self(ClusterGraph::two_node())
    }

    #[staticmethod]
    fn chain(n: usize) -> PyResult<Self> {
        Ok(Self(ClusterGraph::chain(n).map_err(err)?))
    }

    #[staticmethod]
    fn star(n: usize) -> PyResult<Self> {
        Ok(Self(ClusterGraph::star(n).map_err(err)?))
    }

    #[getter]
    fn n_nodes(&self) -> usize {
        self.0.n_nodes()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.0.edges()
    }

    fn min_squeezing_threshold(&self) -> PyResult<f64> {
        cluster::min_squeezing_threshold(&self.0).map_err(err)
    }

    /// Covariance matrix of the cluster built from equal sources.
    #[pyo3(signature = (y_var, x_var = None))]
    fn covariance(&self, y_var: f64, x_var: Option<f64>) -> PyResult<Vec<Vec<f64>>> {
        Ok(rows(self.state(y_var, x_var)?.cov().matrix()))
    }

    /// Variances of every nullifier of the cluster built from equal sources.
    #[pyo3(signature = (y_var, x_var = None))]
    fn nullifier_variances(&self, y_var: f64, x_var: Option<f64>) -> PyResult<Vec<f64>> {
        cluster::nullifier_variances(&self.state(y_var, x_var)?, &self.0).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("ClusterGraph(n_nodes={}, edges={:?})", self.0.n_nodes(), self.0.edges())
    }
}

impl PyClusterGraph {
    fn state(&self, y_var: f64, x_var: Option<f64>) -> PyResult<GaussianState> {
        let source = match x_var {
            Some(x) => SourceVariances::new(x, y_var),
            None => SourceVariances::minimum_uncertainty(y_var),
        }
        .map_err(err)?;
        let n = self.0.n_nodes();
        cluster::generate_cluster(&vec![source; n], &self.0, &OrthogonalFreedom::identity(n)).map_err(err)
    }
}

/// `(omega, y_var, x_var)` rows of the laser output spectrum.
#[pyfunction]
#[pyo3(signature = (omegas, kappa, excess_noise = None))]
fn spectrum(omegas: Vec<f64>, kappa: f64, excess_noise: Option<f64>) -> PyResult<Vec<(f64, f64, Option<f64>)>> {
    let points = laser::spectrum_sweep(&omegas, kappa, x_model(excess_noise)).map_err(err)?;
    Ok(points.into_iter().map(|p| (p.omega, p.y_var, p.x_var)).collect())
}

/// Spectrum from direct quadrature of the finite-window Fourier transform.
#[pyfunction]
#[pyo3(signature = (omega, kappa, mu = 0.0))]
fn spectrum_oracle(omega: f64, kappa: f64, mu: f64) -> PyResult<f64> {
    laser::y_spectral_variance_oracle(omega, kappa, mu).map_err(err)
}

#[pyfunction]
fn db_to_variance(db: f64) -> f64 {
    quad::db_to_variance(db)
}

#[pyfunction]
fn variance_to_db(variance: f64) -> f64 {
    quad::variance_to_db(variance)
}

/// `(sum, entangled)` for a two-node cluster of equal sources.
#[pyfunction]
#[pyo3(signature = (y_var, x_var = None))]
fn vlf_two_node(y_var: f64, x_var: Option<f64>) -> PyResult<(f64, bool)> {
    let state = PyClusterGraph::two_node().state(y_var, x_var)?;
    let v = cluster::vlf_two_node_check(&state, (0, 1)).map_err(err)?;
    Ok((v.sum, v.entangled))
}

/// `(lhs, entangled)` for pulses separated by a delay `tau`.
#[pyfunction]
fn delayed_vlf(tau: f64, omega: f64, y_var: f64, x_var: f64) -> PyResult<(f64, bool)> {
    let v = mux::delayed_vlf(tau, omega, y_var, x_var).map_err(err)?;
    Ok((v.lhs, v.entangled))
}

#[pyfunction]
fn gate_matrix(theta_plus: f64, theta_minus: f64) -> PyResult<Vec<Vec<f64>>> {
    Ok(rows(&gate::gate_matrix(theta_plus, theta_minus).map_err(err)?))
}

/// Output covariance of one step on a squeezed input, as
/// `(total, signal, noise)`.
#[pyfunction]
#[pyo3(signature = (setting, source_y_var, input_x_var = 0.25, input_y_var = 0.25, source_x_var = None))]
fn single_step_covariance(
    setting: PyHomodyneSetting,
    source_y_var: f64,
    input_x_var: f64,
    input_y_var: f64,
    source_x_var: Option<f64>,
) -> PyResult<(Vec<Vec<f64>>, Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let source = match source_x_var {
        Some(x) => SourceVariances::new(x, source_y_var),
        None => SourceVariances::minimum_uncertainty(source_y_var),
    }
    .map_err(err)?;
    let mut reg = SourceRegister::new();
    let input = GaussianState::squeezed(input_x_var, input_y_var).map_err(err)?;
    let a = reg.add_input(&input).map_err(err)?;
    let c = reg.add_two_node_cluster([source; 2], &OrthogonalFreedom::two_node_default()).map_err(err)?;
    let out = gate::single_step(&a, &c, &setting.0, StepOptions::default()).map_err(err)?;
    Ok((
        rows(out.covariance(&reg).map_err(err)?.matrix()),
        rows(&out.signal_covariance(&reg).map_err(err)?),
        rows(out.noise_covariance(&reg).map_err(err)?.matrix()),
    ))
}

/// Settings of two steps whose product is `target`, and the residual.
#[pyfunction]
fn solve_phases(target: [[f64; 2]; 2]) -> PyResult<(PyHomodyneSetting, PyHomodyneSetting, f64)> {
    let sol = gate::solve_phases(&matrix2(target)).map_err(err)?;
    Ok((PyHomodyneSetting(sol.first), PyHomodyneSetting(sol.second), sol.residual))
}

/// Two-mode map of parallel gates `a` and `b` between Hadamard layers.
#[pyfunction]
#[pyo3(signature = (a = None, b = None))]
fn cz_transform(a: Option<[[f64; 2]; 2]>, b: Option<[[f64; 2]; 2]>) -> PyResult<Vec<Vec<f64>>> {
    let coeffs = match (a, b) {
        (None, None) => TwoModeCoefficients::cz_choice(),
        (Some(a), Some(b)) => TwoModeCoefficients::new(matrix2(a), matrix2(b)).map_err(err)?,
        _ => return Err(PyValueError::new_err("give both a and b or neither")),
    };
    Ok(rows(&gate::cz_transform(&coeffs)))
}

#[pyfunction]
fn cz_matrix() -> Vec<Vec<f64>> {
    rows(&gate::cz_matrix())
}

/// Applies a symplectic matrix to a Gaussian state; returns `(mean, cov)`.
#[pyfunction]
fn apply_symplectic(
    mean: Vec<f64>,
    cov: Vec<Vec<f64>>,
    symplectic: Vec<Vec<f64>>,
) -> PyResult<(Vec<f64>, Vec<Vec<f64>>)> {
    let to_matrix = |m: &Vec<Vec<f64>>| {
        let n = m.len();
        if m.iter().any(|r| r.len() != n) {
            return Err(PyValueError::new_err("matrix must be square"));
        }
        Ok(DMatrix::from_fn(n, n, |i, j| m[i][j]))
    };
    let cov = quad::CovarianceMatrix::new(to_matrix(&cov)?).map_err(err)?;
    let state = GaussianState::new(DVector::from_vec(mean), cov).map_err(err)?;
    let s = quad::SymplecticMap::new(to_matrix(&symplectic)?).map_err(err)?;
    let out = quad::apply_symplectic(&state, &s).map_err(err)?;
    Ok((out.mean().iter().copied().collect(), rows(out.cov().matrix())))
}

/// Runs one experiment kind from TOML text; returns the result record as JSON.
#[pyfunction]
#[pyo3(signature = (kind, config = "", seed = None))]
fn run(kind: &str, config: &str, seed: Option<u64>) -> PyResult<String> {
    let kind = ExperimentKind::from_name(kind).ok_or_else(|| PyValueError::new_err(format!("unknown kind {kind:?}")))?;
    let config = ConfigFile::parse(config).map_err(err)?;
    let record = runner::run(kind, &config, seed).map_err(err)?;
    serde_json::to_string(&record).map_err(err)
}

#[pymodule]
fn cvmbqc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHomodyneSetting>()?;
    m.add_class::<PyClusterGraph>()?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(db_to_variance, m)?)?;
    m.add_function(wrap_pyfunction!(variance_to_db, m)?)?;
    m.add_function(wrap_pyfunction!(vlf_two_node, m)?)?;
    m.add_function(wrap_pyfunction!(delayed_vlf, m)?)?;
    m.add_function(wrap_pyfunction!(gate_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(single_step_covariance, m)?)?;
    m.add_function(wrap_pyfunction!(solve_phases, m)?)?;
    m.add_function(wrap_pyfunction!(cz_transform, m)?)?;
    m.add_function(wrap_pyfunction!(cz_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(apply_symplectic, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
