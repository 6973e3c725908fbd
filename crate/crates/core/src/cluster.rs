//! Cluster states from graph adjacency matrices: generating unitaries,
//! nullifiers, squeezing thresholds and the two-node inseparability test.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Complex, DMatrix};
use thiserror::Error;

use crate::quad::{
    apply_symplectic, expr_covariance, expr_variance, GaussianState, LinearExpr, QuadError, Quadrature,
    SymplecticMap,
};

/// Inseparability bound for the sum of the two nullifier variances of a
/// two-node pair (strict inequality).
pub const VLF_THRESHOLD: f64 = 0.5;

/// Tolerance for orthogonality and unitarity checks.
pub const UNITARITY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClusterError {
    #[error("invalid adjacency matrix: {0}")]
    InvalidAdjacency(String),
    #[error("matrix is not orthogonal (|QᵀQ − I| = {defect:.3e})")]
    NotOrthogonal { defect: f64 },
    #[error("matrix is not unitary (|U†U − I| = {defect:.3e})")]
    NotUnitary { defect: f64 },
    #[error("graph has {graph} nodes but {other} was supplied")]
    SizeMismatch { graph: usize, other: usize },
    #[error("threshold undefined: graph has no adjacent pairs")]
    NoEdges,
    #[error("source variance must be positive and finite, got {0}")]
    NonPositiveVariance(f64),
    #[error("node {node} is out of range for a {n}-node state")]
    InvalidNode { node: usize, n: usize },
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// Undirected simple graph stored as a binary symmetric adjacency matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterGraph {
    adjacency: DMatrix<u8>,
}

impl ClusterGraph {
    pub fn new(adjacency: DMatrix<u8>) -> Result<Self, ClusterError> {
        let n = adjacency.nrows();
        if n == 0 || !adjacency.is_square() {
            return Err(ClusterError::InvalidAdjacency(format!(
                "expected a non-empty square matrix, got {}x{}",
                adjacency.nrows(),
                adjacency.ncols()
            )));
        }
        for i in 0..n {
            if adjacency[(i, i)] != 0 {
                return Err(ClusterError::InvalidAdjacency(format!("self-loop at node {i}")));
            }
            for j in 0..n {
                let a = adjacency[(i, j)];
                if a > 1 {
                    return Err(ClusterError::InvalidAdjacency(format!("entry ({i},{j}) = {a} is not binary")));
                }
                if a != adjacency[(j, i)] {
                    return Err(ClusterError::InvalidAdjacency(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
            }
        }
        Ok(Self { adjacency })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, ClusterError> {
        let mut a = DMatrix::zeros(n, n);
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(ClusterError::InvalidAdjacency(format!("edge ({i},{j}) outside {n} nodes")));
            }
            if i == j {
                return Err(ClusterError::InvalidAdjacency(format!("self-loop at node {i}")));
            }
            a[(i, j)] = 1;
            a[(j, i)] = 1;
        }
        Self::new(a)
    }

    pub fn two_node() -> Self {
        Self::from_edges(2, &[(0, 1)]).expect("valid graph")
    }

    pub fn edgeless(n: usize) -> Result<Self, ClusterError> {
        Self::from_edges(n, &[])
    }

    /// Linear chain `0 - 1 - ... - (n-1)`.
    pub fn chain(n: usize) -> Result<Self, ClusterError> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_edges(n, &edges)
    }

    /// Star with hub 0 and `n - 1` leaves.
    pub fn star(n: usize) -> Result<Self, ClusterError> {
        let edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
        Self::from_edges(n, &edges)
    }

    pub fn n_nodes(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[(i, j)] == 1
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency.row(i).iter().map(|&a| a as usize).sum()
    }

    /// Edges `(i, j)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n_nodes();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.adjacent(i, j))
            .collect()
    }

    pub fn adjacency(&self) -> &DMatrix<u8> {
        &self.adjacency
    }

    pub fn adjacency_f64(&self) -> DMatrix<f64> {
        self.adjacency.map(f64::from)
    }
}

/// Parses either a dense matrix (rows of whitespace-separated 0/1) or an
/// adjacency list introduced by a `nodes <n>` line followed by `i j` edge
/// lines. `#` starts a comment.
impl FromStr for ClusterGraph {
    type Err = ClusterError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lines: Vec<&str> = s
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .collect();
        let bad = |msg: String| ClusterError::InvalidAdjacency(msg);
        let Some(first) = lines.first() else {
            return Err(bad("empty graph description".into()));
        };
        if let Some(rest) = first.strip_prefix("nodes") {
            let n: usize = rest.trim().parse().map_err(|_| bad(format!("bad node count in '{first}'")))?;
            let mut edges = Vec::new();
            for l in &lines[1..] {
                let ids: Vec<usize> = l
                    .split_whitespace()
                    .map(|t| t.parse().map_err(|_| bad(format!("bad edge line '{l}'"))))
                    .collect::<Result<_, _>>()?;
                if ids.len() != 2 {
                    return Err(bad(format!("edge line '{l}' needs two node ids")));
                }
                edges.push((ids[0], ids[1]));
            }
            return Self::from_edges(n, &edges);
        }
        let rows: Vec<Vec<u8>> = lines
            .iter()
            .map(|l| {
                l.split_whitespace()
                    .map(|t| t.parse::<u8>().map_err(|_| bad(format!("bad matrix entry '{t}'"))))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<_, _>>()?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(bad(format!("matrix rows must all have {n} entries")));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }
}

impl fmt::Display for ClusterGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n_nodes() {
            let row: Vec<String> = self.adjacency.row(i).iter().map(|a| a.to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// The orthogonal matrix `Q` in `U = (I + iA)(I + A²)^{-1/2} Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalFreedom(DMatrix<f64>);

impl OrthogonalFreedom {
    pub fn new(q: DMatrix<f64>) -> Result<Self, ClusterError> {
        if !q.is_square() {
            return Err(ClusterError::NotOrthogonal { defect: f64::INFINITY });
        }
        let defect = (q.transpose() * &q - DMatrix::<f64>::identity(q.nrows(), q.nrows())).amax();
        if defect > UNITARITY_TOL {
            return Err(ClusterError::NotOrthogonal { defect });
        }
        Ok(Self(q))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    /// `diag(1, −1)`, the choice that factors the two-node unitary into two
    /// phase shifts around one symmetric beam splitter.
    pub fn two_node_default() -> Self {
        Self(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }
}

/// `(I + A²)^{-1/2}` through the symmetric eigendecomposition. `I + A² ⪰ I`,
/// so every eigenvalue is at least one.
fn inverse_sqrt_of_one_plus_square(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let m = DMatrix::<f64>::identity(n, n) + a * a;
    let eig = m.symmetric_eigen();
    debug_assert!(eig.eigenvalues.iter().all(|&l| l >= 1.0 - 1e-9));
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    &eig.eigenvectors * d * eig.eigenvectors.transpose()
}

/// `U = (I + iA)(I + A²)^{-1/2} Q`.
pub fn cluster_unitary(graph: &ClusterGraph, q: &OrthogonalFreedom) -> Result<DMatrix<Complex<f64>>, ClusterError> {
    let n = graph.n_nodes();
    if q.matrix().nrows() != n {
        return Err(ClusterError::SizeMismatch { graph: n, other: q.matrix().nrows() });
    }
    let a = graph.adjacency_f64();
    let w = inverse_sqrt_of_one_plus_square(&a) * q.matrix();
    let re = &w;
    let im = &a * &w;
    Ok(DMatrix::from_fn(n, n, |i, j| Complex::new(re[(i, j)], im[(i, j)])))
}

/// Largest entry of `|U†U − I|`.
pub fn unitarity_defect(u: &DMatrix<Complex<f64>>) -> f64 {
    let n = u.nrows();
    let p = u.adjoint() * u - DMatrix::<Complex<f64>>::identity(n, n);
    p.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Real form of a passive unitary acting on `x_j + i y_j`:
/// `X' = Re(U) x − Im(U) y`, `Y' = Im(U) x + Re(U) y`.
pub fn unitary_to_symplectic(u: &DMatrix<Complex<f64>>) -> Result<SymplecticMap, ClusterError> {
    if !u.is_square() {
        return Err(ClusterError::NotUnitary { defect: f64::INFINITY });
    }
    let defect = unitarity_defect(u);
    if defect > UNITARITY_TOL {
        return Err(ClusterError::NotUnitary { defect });
    }
    let n = u.nrows();
    let mut s = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = u[(i, j)];
            s[(2 * i, 2 * j)] = z.re;
            s[(2 * i, 2 * j + 1)] = -z.im;
            s[(2 * i + 1, 2 * j)] = z.im;
            s[(2 * i + 1, 2 * j + 1)] = z.re;
        }
    }
    Ok(SymplecticMap::new(s)?)
}

/// Nullifiers `N_j = Y_j − Σ_i A_ji X_i`, one per node, over cluster modes
/// `0..n`.
#[derive(Clone, Debug, PartialEq)]
pub struct NullifierSet {
    pub exprs: Vec<LinearExpr>,
}

pub fn nullifiers(graph: &ClusterGraph) -> NullifierSet {
    let n = graph.n_nodes();
    let exprs = (0..n)
        .map(|j| {
            let mut e = LinearExpr::quadrature(Quadrature::y(j));
            for i in (0..n).filter(|&i| graph.adjacent(j, i)) {
                e.add_term(Quadrature::x(i), -1.0);
            }
            e
        })
        .collect();
    NullifierSet { exprs }
}

/// `min over adjacent (i, j) of 1 / (2 + deg i + deg j)`: the y-variance every
/// source must stay below when all sources are squeezed equally.
pub fn min_squeezing_threshold(graph: &ClusterGraph) -> Result<f64, ClusterError> {
    graph
        .edges()
        .into_iter()
        .map(|(i, j)| 1.0 / (2 + graph.degree(i) + graph.degree(j)) as f64)
        .reduce(f64::min)
        .ok_or(ClusterError::NoEdges)
}

/// Variances of one squeezed source oscillator before entangling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SourceVariances {
    pub x_var: f64,
    pub y_var: f64,
}

impl SourceVariances {
    pub fn new(x_var: f64, y_var: f64) -> Result<Self, ClusterError> {
        for v in [x_var, y_var] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ClusterError::NonPositiveVariance(v));
            }
        }
        Ok(Self { x_var, y_var })
    }

    /// Minimum-uncertainty partner: `x_var = 1 / (16 y_var)`.
    pub fn minimum_uncertainty(y_var: f64) -> Result<Self, ClusterError> {
        if !(y_var > 0.0 && y_var.is_finite()) {
            return Err(ClusterError::NonPositiveVariance(y_var));
        }
        Self::new(1.0 / (16.0 * y_var), y_var)
    }
}

/// Product of squeezed vacua `diag(x_var, y_var)` per source.
pub fn squeezed_sources(sources: &[SourceVariances]) -> Result<GaussianState, ClusterError> {
    let mut state: Option<GaussianState> = None;
    for s in sources {
        let mode = GaussianState::squeezed(s.x_var, s.y_var)?;
        state = Some(match state {
            None => mode,
            Some(acc) => acc.tensor(&mode),
        });
    }
    state.ok_or(ClusterError::SizeMismatch { graph: 0, other: 0 })
}

/// Entangle squeezed sources into the cluster of `graph`.
pub fn generate_cluster(
    sources: &[SourceVariances],
    graph: &ClusterGraph,
    q: &OrthogonalFreedom,
) -> Result<GaussianState, ClusterError> {
    if sources.len() != graph.n_nodes() {
        return Err(ClusterError::SizeMismatch { graph: graph.n_nodes(), other: sources.len() });
    }
    let s = unitary_to_symplectic(&cluster_unitary(graph, q)?)?;
    Ok(apply_symplectic(&squeezed_sources(sources)?, &s)?)
}

/// Variances of every nullifier of `graph` in `state`.
pub fn nullifier_variances(state: &GaussianState, graph: &ClusterGraph) -> Result<Vec<f64>, ClusterError> {
    if state.n_modes() != graph.n_nodes() {
        return Err(ClusterError::SizeMismatch { graph: graph.n_nodes(), other: state.n_modes() });
    }
    let cov = expr_covariance(&nullifiers(graph).exprs, state.cov())?;
    Ok((0..cov.dim()).map(|i| cov.entry(i, i)).collect())
}

/// Result of the pairwise inseparability test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VlfVerdict {
    pub sum: f64,
    pub entangled: bool,
}

impl VlfVerdict {
    pub fn from_sum(sum: f64) -> Self {
        Self { sum, entangled: sum < VLF_THRESHOLD }
    }
}

/// `⟨(δY_i − δX_j)²⟩ + ⟨(δY_j − δX_i)²⟩ < 1/2`.
pub fn vlf_two_node_check(state: &GaussianState, pair: (usize, usize)) -> Result<VlfVerdict, ClusterError> {
    let n = state.n_modes();
    let (i, j) = pair;
    for node in [i, j] {
        if node >= n {
            return Err(ClusterError::InvalidNode { node, n });
        }
    }
    if i == j {
        return Err(ClusterError::InvalidNode { node: j, n });
    }
    let n1 = LinearExpr::quadrature(Quadrature::y(i)) - LinearExpr::quadrature(Quadrature::x(j));
    let n2 = LinearExpr::quadrature(Quadrature::y(j)) - LinearExpr::quadrature(Quadrature::x(i));
    let sum = expr_variance(&n1, state.cov())? + expr_variance(&n2, state.cov())?;
    Ok(VlfVerdict::from_sum(sum))
}

/// Cluster-mode expressions over source modes: row `j` of the map gives
/// `X_j` and `Y_j` as combinations of `(x_i, y_i)` of sources offset by
/// `source_offset` in a larger register.
pub fn cluster_mode_exprs(map: &SymplecticMap, source_offset: usize) -> Vec<[LinearExpr; 2]> {
    let m = map.matrix();
    let n = map.n_modes();
    (0..n)
        .map(|j| {
            let row = |r: usize| {
                LinearExpr::from_terms((0..2 * n).filter(|&c| m[(r, c)] != 0.0).map(|c| {
                    let q = Quadrature::from_index(c);
                    (Quadrature { mode: q.mode + source_offset, kind: q.kind }, m[(r, c)])
                }))
            };
            [row(2 * j), row(2 * j + 1)]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn max_diff(a: &DMatrix<Complex<f64>>, b: &DMatrix<Complex<f64>>) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn two_node_unitary_with_default_q() {
        let u = cluster_unitary(&ClusterGraph::two_node(), &OrthogonalFreedom::two_node_default()).unwrap();
        let h = FRAC_1_SQRT_2;
        let expected = DMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(0.0, -h), c(0.0, h), c(-h, 0.0)]);
        assert!(max_diff(&u, &expected) < 1e-15);
    }

    #[test]
    fn two_node_unitary_with_identity_q() {
        let u = cluster_unitary(&ClusterGraph::two_node(), &OrthogonalFreedom::identity(2)).unwrap();
        let h = FRAC_1_SQRT_2;
        let expected = DMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(0.0, h), c(0.0, h), c(h, 0.0)]);
        assert!(max_diff(&u, &expected) < 1e-15);
    }

    #[test]
    fn edgeless_graph_gives_identity() {
        let u = cluster_unitary(&ClusterGraph::edgeless(3).unwrap(), &OrthogonalFreedom::identity(3)).unwrap();
        assert!(max_diff(&u, &DMatrix::identity(3, 3)) < 1e-15);
    }

    #[test]
    fn symplectic_form_of_simple_unitaries() {
        let id = unitary_to_symplectic(&DMatrix::identity(2, 2)).unwrap();
        assert_eq!(id, SymplecticMap::identity(2));
        let u = DMatrix::from_row_slice(2, 2, &[c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let s = unitary_to_symplectic(&u).unwrap();
        let r = SymplecticMap::phase_rotation(FRAC_PI_2).embed(2, &[0]).unwrap();
        assert!((s.matrix() - r.matrix()).amax() < 1e-15);
    }

    #[test]
    fn two_node_unitary_factorises_into_phase_shifts_and_beam_splitter() {
        let u = cluster_unitary(&ClusterGraph::two_node(), &OrthogonalFreedom::two_node_default()).unwrap();
        let s = unitary_to_symplectic(&u).unwrap();
        let first = SymplecticMap::phase_rotation(FRAC_PI_2).embed(2, &[0]).unwrap();
        let last = SymplecticMap::phase_rotation(-FRAC_PI_2).embed(2, &[0]).unwrap();
        let f = first.then(&SymplecticMap::symmetric_beam_splitter()).unwrap().then(&last).unwrap();
        assert!((s.matrix() - f.matrix()).amax() < 1e-15);
    }

    #[test]
    fn non_unitary_and_non_orthogonal_inputs_are_rejected() {
        let m = DMatrix::from_element(2, 2, c(1.0, 0.0));
        assert!(matches!(unitary_to_symplectic(&m), Err(ClusterError::NotUnitary { .. })));
        let q = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(matches!(OrthogonalFreedom::new(q), Err(ClusterError::NotOrthogonal { .. })));
        assert!(matches!(
            cluster_unitary(&ClusterGraph::two_node(), &OrthogonalFreedom::identity(3)),
            Err(ClusterError::SizeMismatch { .. })
        ));
    }

    #[test]
    fn nullifier_examples() {
        let two = nullifiers(&ClusterGraph::two_node());
        let y = |i| LinearExpr::quadrature(Quadrature::y(i));
        let x = |i| LinearExpr::quadrature(Quadrature::x(i));
        assert_eq!(two.exprs, vec![y(0) - x(1), y(1) - x(0)]);
        let empty = nullifiers(&ClusterGraph::edgeless(3).unwrap());
        assert_eq!(empty.exprs, vec![y(0), y(1), y(2)]);
        let chain = nullifiers(&ClusterGraph::chain(3).unwrap());
        assert_eq!(chain.exprs, vec![y(0) - x(1), y(1) - x(0) - x(2), y(2) - x(1)]);
    }

    #[test]
    fn squeezing_thresholds() {
        assert_eq!(min_squeezing_threshold(&ClusterGraph::two_node()).unwrap(), 0.25);
        assert_eq!(min_squeezing_threshold(&ClusterGraph::chain(3).unwrap()).unwrap(), 0.2);
        assert_eq!(min_squeezing_threshold(&ClusterGraph::star(4).unwrap()).unwrap(), 1.0 / 6.0);
        assert_eq!(min_squeezing_threshold(&ClusterGraph::edgeless(2).unwrap()), Err(ClusterError::NoEdges));
    }

    #[test]
    fn invalid_adjacency_is_rejected() {
        let asym = DMatrix::from_row_slice(2, 2, &[0u8, 1, 0, 0]);
        assert!(ClusterGraph::new(asym).is_err());
        let loop_ = DMatrix::from_row_slice(2, 2, &[1u8, 0, 0, 0]);
        assert!(ClusterGraph::new(loop_).is_err());
        let two = DMatrix::from_row_slice(2, 2, &[0u8, 2, 2, 0]);
        assert!(ClusterGraph::new(two).is_err());
    }

    #[test]
    fn parse_dense_and_list_formats() {
        let dense: ClusterGraph = "0 1 0\n1 0 1\n0 1 0\n".parse().unwrap();
        assert_eq!(dense, ClusterGraph::chain(3).unwrap());
        let list: ClusterGraph = "# a star\nnodes 4\n0 1\n0 2\n0 3\n".parse().unwrap();
        assert_eq!(list, ClusterGraph::star(4).unwrap());
        assert!("0 1\n1\n".parse::<ClusterGraph>().is_err());
        assert!("".parse::<ClusterGraph>().is_err());
        let round: ClusterGraph = dense.to_string().parse().unwrap();
        assert_eq!(round, dense);
    }

    #[test]
    fn vacuum_sources_are_not_entangled() {
        let src = [SourceVariances::new(0.25, 0.25).unwrap(); 2];
        let st = generate_cluster(&src, &ClusterGraph::two_node(), &OrthogonalFreedom::two_node_default()).unwrap();
        let v = vlf_two_node_check(&st, (0, 1)).unwrap();
        assert!((v.sum - 1.0).abs() < 1e-14);
        assert!(!v.entangled);
        let vac = vlf_two_node_check(&GaussianState::vacuum(2), (0, 1)).unwrap();
        assert!((vac.sum - 1.0).abs() < 1e-15 && !vac.entangled);
    }

    #[test]
    fn equal_sources_give_four_v() {
        for v in [0.2, 0.125, 0.05, 1e-4] {
            let src = [SourceVariances::minimum_uncertainty(v).unwrap(); 2];
            let st = generate_cluster(&src, &ClusterGraph::two_node(), &OrthogonalFreedom::two_node_default())
                .unwrap();
            let verdict = vlf_two_node_check(&st, (0, 1)).unwrap();
            assert!((verdict.sum - 4.0 * v).abs() < 1e-12, "v = {v}: {}", verdict.sum);
            assert_eq!(verdict.entangled, v < 0.125);
        }
    }

    #[test]
    fn boundary_is_not_entangled() {
        assert!(!VlfVerdict::from_sum(0.5).entangled);
        assert!(VlfVerdict::from_sum(0.5 - 1e-15).entangled);
    }

    #[test]
    fn invalid_node_pair() {
        let st = GaussianState::vacuum(2);
        assert!(vlf_two_node_check(&st, (0, 2)).is_err());
        assert!(vlf_two_node_check(&st, (1, 1)).is_err());
    }

    #[test]
    fn nonpositive_variance_is_rejected() {
        assert!(SourceVariances::new(0.0, 0.1).is_err());
        assert!(SourceVariances::minimum_uncertainty(-1.0).is_err());
    }

    #[test]
    fn mode_exprs_follow_the_map_rows() {
        let u = cluster_unitary(&ClusterGraph::two_node(), &OrthogonalFreedom::two_node_default()).unwrap();
        let s = unitary_to_symplectic(&u).unwrap();
        let modes = cluster_mode_exprs(&s, 3);
        let h = FRAC_1_SQRT_2;
        // X1 = (x1 + y2)/√2 with sources at modes 3 and 4
        let want = LinearExpr::from_terms([(Quadrature::x(3), h), (Quadrature::y(4), h)]);
        assert!(modes[0][0].max_abs_diff(&want) < 1e-15);
        // Y2 = (x1 − y2)/√2
        let want = LinearExpr::from_terms([(Quadrature::x(3), h), (Quadrature::y(4), -h)]);
        assert!(modes[1][1].max_abs_diff(&want) < 1e-15);
    }
}
