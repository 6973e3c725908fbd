use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use cvmbqc::cluster::{
    cluster_unitary, generate_cluster, nullifier_variances, unitarity_defect, unitary_to_symplectic, ClusterGraph,
    OrthogonalFreedom, SourceVariances,
};
use cvmbqc::gate::gate_matrix;
use cvmbqc::laser::{y_spectral_variance, XNoiseModel};
use cvmbqc::mux::delayed_vlf;
use cvmbqc::quad::{
    apply_symplectic, expr_covariance, CovarianceMatrix, GaussianState, LinearExpr, Quadrature, SymplecticMap,
};

fn single_mode_map() -> impl Strategy<Value = SymplecticMap> {
    (-PI..PI, -1.5..1.5f64, -PI..PI).prop_map(|(a, r, b)| {
        SymplecticMap::phase_rotation(a)
            .then(&SymplecticMap::squeezer(r))
            .and_then(|m| m.then(&SymplecticMap::phase_rotation(b)))
            .unwrap()
    })
}

fn two_mode_map() -> impl Strategy<Value = SymplecticMap> {
    (single_mode_map(), single_mode_map(), single_mode_map(), single_mode_map()).prop_map(|(a, b, c, d)| {
        let bs = SymplecticMap::symmetric_beam_splitter();
        a.direct_sum(&b).then(&bs).and_then(|m| m.then(&c.direct_sum(&d))).and_then(|m| m.then(&bs)).unwrap()
    })
}

fn graph(max_nodes: usize) -> impl Strategy<Value = ClusterGraph> {
    (2..=max_nodes).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
            let edges: Vec<_> = bits.iter().zip(&mut pairs).filter(|(b, _)| **b).map(|(_, e)| e).collect();
            ClusterGraph::from_edges(n, &edges).unwrap()
        })
    })
}

fn state(n_modes: usize, vars: &[(f64, f64)]) -> GaussianState {
    let mut s = GaussianState::squeezed(vars[0].0, vars[0].1).unwrap();
    for &(x, y) in &vars[1..n_modes] {
        s = s.tensor(&GaussianState::squeezed(x, y).unwrap());
    }
    s
}

fn variances() -> impl Strategy<Value = (f64, f64)> {
    (0.01..2.0f64, 1.0..4.0f64).prop_map(|(x, r)| (x, r / (16.0 * x)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_stays_symplectic(a in two_mode_map(), b in two_mode_map()) {
        let ab = a.then(&b).unwrap();
        prop_assert!(ab.defect() < 1e-9 * ab.matrix().amax().powi(2).max(1.0));
        let back = ab.then(&ab.inverse()).unwrap();
        prop_assert!((back.matrix() - DMatrix::identity(4, 4)).amax() < 1e-8 * ab.matrix().amax().powi(2).max(1.0));
    }

    #[test]
    fn symplectic_maps_preserve_uncertainty(s in two_mode_map(), v in proptest::collection::vec(variances(), 2)) {
        let out = apply_symplectic(&state(2, &v), &s).unwrap();
        let cov = out.cov().matrix();
        let det = cov.determinant();
        prop_assert!(det >= (1.0 / 256.0) * (1.0 - 1e-9));
    }

    #[test]
    fn expression_covariance_agrees_with_state_transform(s in two_mode_map(), v in proptest::collection::vec(variances(), 2)) {
        let input = state(2, &v);
        let m = s.matrix();
        let exprs: Vec<LinearExpr> = (0..4)
            .map(|r| LinearExpr::from_terms((0..4).map(|c| (Quadrature::from_index(c), m[(r, c)]))))
            .collect();
        let via_exprs = expr_covariance(&exprs, input.cov()).unwrap();
        let via_state = apply_symplectic(&input, &s).unwrap();
        let scale = via_state.cov().matrix().amax().max(1.0);
        prop_assert!((via_exprs.matrix() - via_state.cov().matrix()).amax() < 1e-10 * scale);
    }

    #[test]
    fn cluster_unitaries_are_unitary(g in graph(8)) {
        let n = g.n_nodes();
        let u = cluster_unitary(&g, &OrthogonalFreedom::identity(n)).unwrap();
        prop_assert!(unitarity_defect(&u) < 1e-12);
        prop_assert!(unitary_to_symplectic(&u).unwrap().defect() < 1e-10);
    }

    #[test]
    fn nullifiers_do_not_depend_on_q_for_equal_sources(g in graph(6), y in 0.005..0.2f64, angle in -PI..PI) {
        let n = g.n_nodes();
        let src = vec![SourceVariances::minimum_uncertainty(y).unwrap(); n];
        let mut q = DMatrix::identity(n, n);
        let (s, c) = angle.sin_cos();
        q[(0, 0)] = c;
        q[(0, 1)] = -s;
        q[(1, 0)] = s;
        q[(1, 1)] = c;
        let a = nullifier_variances(&generate_cluster(&src, &g, &OrthogonalFreedom::identity(n)).unwrap(), &g).unwrap();
        let b = nullifier_variances(&generate_cluster(&src, &g, &OrthogonalFreedom::new(q).unwrap()).unwrap(), &g).unwrap();
        for (i, (x, z)) in a.iter().zip(&b).enumerate() {
            prop_assert!((x - z).abs() < 1e-10, "node {}: {} vs {}", i, x, z);
            prop_assert!((x - (1.0 + g.degree(i) as f64) * y).abs() < 1e-10);
        }
    }

    #[test]
    fn gate_matrices_have_unit_determinant(plus in -10.0..10.0f64, minus in -10.0..10.0f64) {
        prop_assume!(minus.sin().abs() > 1e-2);
        let m = gate_matrix(plus, minus).unwrap();
        prop_assert!((m.determinant() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn delayed_criterion_lies_between_quadrature_bounds(
        tau in 0.0..100.0f64,
        omega in -100.0..100.0f64,
        y in 0.0..1.0f64,
        x in 0.0..100.0f64,
    ) {
        let lhs = delayed_vlf(tau, omega, y, x).unwrap().lhs;
        let tol = 1e-12 * x.max(y).max(1.0);
        prop_assert!(lhs >= 4.0 * x.min(y) - tol && lhs <= 4.0 * x.max(y) + tol);
    }

    #[test]
    fn delayed_criterion_is_periodic_in_tau(tau in 0.0..10.0f64, omega in 0.1..10.0f64, y in 0.0..1.0f64, x in 0.0..10.0f64) {
        let a = delayed_vlf(tau, omega, y, x).unwrap().lhs;
        let b = delayed_vlf(tau + 2.0 * PI / omega, omega, y, x).unwrap().lhs;
        prop_assert!((a - b).abs() < 1e-9 * x.max(1.0));
    }

    #[test]
    fn spectrum_is_even_and_grows_with_frequency(w in 0.0..1e3f64, dw in 1e-6..1e3f64, kappa in 1e-3..1e3f64) {
        let at = |w: f64| y_spectral_variance(w, kappa).unwrap();
        prop_assert_eq!(at(w), at(-w));
        prop_assert!(at(w + dw) >= at(w));
        prop_assert!(at(w) <= 0.25);
    }

    #[test]
    fn excess_noise_scales_the_partner(y in 1e-4..0.25f64, f in 1.0..100.0f64) {
        let x = XNoiseModel::ExcessNoise(f).x_from_y(y).unwrap();
        prop_assert!((x * y - f / 16.0).abs() < 1e-12 * f);
    }
}

#[test]
fn block_covariances_match_their_parts() {
    let a = CovarianceMatrix::diagonal(0.1, 0.7).unwrap();
    let b = CovarianceMatrix::diagonal(2.0, 0.2).unwrap();
    let joint = CovarianceMatrix::block_diagonal(&[&a, &b]);
    let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![0.1, 0.7, 2.0, 0.2]));
    assert_eq!(joint.matrix(), &expected);
}
