use nalgebra::{DMatrix, DVector};

use crate::cluster::{
    cluster_mode_exprs, cluster_unitary, generate_cluster, nullifiers, unitary_to_symplectic, vlf_two_node_check,
    ClusterGraph, OrthogonalFreedom, SourceVariances, VlfVerdict,
};
use crate::quad::{CovarianceMatrix, GaussianState, LinearExpr, Quadrature};

use super::GateError;

/// A pair of expressions `(X, Y)` for one optical mode.
pub type ModePair = [LinearExpr; 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SourceKind {
    /// A state supplied to the computation.
    Input,
    /// A squeezed laser pulse whose x-quadrature is the anti-squeezed one.
    Laser,
}

#[derive(Clone, Debug)]
struct Block {
    offset: usize,
    kind: SourceKind,
    state: GaussianState,
}

/// All independent source modes of a computation, in the order they were
/// added. Every optical mode downstream is a linear combination of these.
#[derive(Clone, Debug, Default)]
pub struct SourceRegister {
    blocks: Vec<Block>,
    n_modes: usize,
}

/// A two-node cluster built from two laser sources of the register.
#[derive(Clone, Debug)]
pub struct ClusterResource {
    pub source_modes: [usize; 2],
    /// `(X, Y)` of node 1 and node 2 over register modes.
    pub nodes: [ModePair; 2],
    /// `N1 = Y1 − X2` and `N2 = Y2 − X1` over register modes.
    pub nullifiers: [LinearExpr; 2],
    pub local_state: GaussianState,
    pub vlf: VlfVerdict,
}

impl SourceRegister {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    fn push(&mut self, state: GaussianState, kind: SourceKind) -> usize {
        let offset = self.n_modes;
        self.n_modes += state.n_modes();
        self.blocks.push(Block { offset, kind, state });
        offset
    }

    /// Adds a single-mode input state and returns its `(x, y)` expressions.
    pub fn add_input(&mut self, state: &GaussianState) -> Result<ModePair, GateError> {
        if state.n_modes() != 1 {
            return Err(GateError::DimensionMismatch { expected: 1, found: state.n_modes() });
        }
        let m = self.push(state.clone(), SourceKind::Input);
        Ok([LinearExpr::quadrature(Quadrature::x(m)), LinearExpr::quadrature(Quadrature::y(m))])
    }

    /// Adds two squeezed laser pulses and entangles them into a two-node
    /// cluster with the unitary of `q`.
    pub fn add_two_node_cluster(
        &mut self,
        sources: [SourceVariances; 2],
        q: &OrthogonalFreedom,
    ) -> Result<ClusterResource, GateError> {
        let graph = ClusterGraph::two_node();
        let map = unitary_to_symplectic(&cluster_unitary(&graph, q)?)?;
        let local_state = generate_cluster(&sources, &graph, q)?;
        let vlf = vlf_two_node_check(&local_state, (0, 1))?;

        let first = self.push(GaussianState::squeezed(sources[0].x_var, sources[0].y_var)?, SourceKind::Laser);
        let second = self.push(GaussianState::squeezed(sources[1].x_var, sources[1].y_var)?, SourceKind::Laser);

        let modes = cluster_mode_exprs(&map, first);
        let nodes = [modes[0].clone(), modes[1].clone()];
        let lookup = |q: Quadrature| Some(&modes[q.mode][q.index() % 2]);
        let ns = nullifiers(&graph).exprs;
        let nullifiers = [ns[0].substitute(lookup), ns[1].substitute(lookup)];
        Ok(ClusterResource { source_modes: [first, second], nodes, nullifiers, local_state, vlf })
    }

    pub fn covariance(&self) -> CovarianceMatrix {
        let blocks: Vec<&CovarianceMatrix> = self.blocks.iter().map(|b| b.state.cov()).collect();
        CovarianceMatrix::block_diagonal(&blocks)
    }

    pub fn mean(&self) -> DVector<f64> {
        DVector::from_iterator(self.n_modes * 2, self.blocks.iter().flat_map(|b| b.state.mean().iter().copied()))
    }

    pub fn state(&self) -> Result<GaussianState, GateError> {
        Ok(GaussianState::new(self.mean(), self.covariance())?)
    }

    pub fn kind_of(&self, mode: usize) -> Option<SourceKind> {
        self.blocks
            .iter()
            .find(|b| mode >= b.offset && mode < b.offset + b.state.n_modes())
            .map(|b| b.kind)
    }

    /// Unit weight on every laser x-quadrature: the directions that become
    /// infinitely noisy in the ideal anti-squeezing limit.
    pub fn antisqueezed_directions(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(2 * self.n_modes, 2 * self.n_modes);
        for b in self.blocks.iter().filter(|b| b.kind == SourceKind::Laser) {
            for m in b.offset..b.offset + b.state.n_modes() {
                d[(2 * m, 2 * m)] = 1.0;
            }
        }
        d
    }
}
