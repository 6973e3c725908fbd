//! Homodyne phases realizing a target single-mode gate in two steps.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{Matrix2, Matrix4, Vector4, SMatrix, SVector};

use super::{gate_matrix, GateError, HomodyneSetting, DET_TOL};

/// Largest target entry magnitude accepted.
pub const MAX_REACHABLE_ENTRY: f64 = 1e6;

/// Largest accepted `|M₂ M₁ − T|` entry, relative to `max(1, |T|)`.
pub const PHASE_SOLVE_TOL: f64 = 1e-10;

const MAX_ITERATIONS: usize = 200;

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSolution {
    pub first: HomodyneSetting,
    pub second: HomodyneSetting,
    /// Largest entry of `M₂ M₁ − T`.
    pub residual: f64,
    pub iterations: usize,
}

impl PhaseSolution {
    pub fn product(&self) -> Result<Matrix2<f64>, GateError> {
        Ok(self.second.gate_matrix()? * self.first.gate_matrix()?)
    }
}

fn product(p: &Vector4<f64>) -> Option<Matrix2<f64>> {
    let m1 = gate_matrix(p[0] + p[1], p[0] - p[1]).ok()?;
    let m2 = gate_matrix(p[2] + p[3], p[2] - p[3]).ok()?;
    Some(m2 * m1)
}

fn residual_vector(p: &Vector4<f64>, target: &Matrix2<f64>) -> Option<Vector4<f64>> {
    let d = product(p)? - target;
    Some(Vector4::new(d[(0, 0)], d[(0, 1)], d[(1, 0)], d[(1, 1)]))
}

fn validate(target: &Matrix2<f64>) -> Result<(), GateError> {
    let entry = target.amax();
    if !entry.is_finite() || entry > MAX_REACHABLE_ENTRY {
        return Err(GateError::OutOfReach { entry, bound: MAX_REACHABLE_ENTRY });
    }
    let det = target.determinant();
    if !((det - 1.0).abs() < DET_TOL * entry.max(1.0).powi(2)) {
        return Err(GateError::InvalidTarget { det });
    }
    Ok(())
}

/// Closed-form phases: a rotation step followed by a squeezing step, from
/// the decomposition `T = R(α) diag(s, 1/s) R(β)`.
fn analytic_seed(target: &Matrix2<f64>) -> Vector4<f64> {
    let svd = target.svd(true, true);
    let mut u = svd.u.expect("requested");
    let mut vt = svd.v_t.expect("requested");
    let s = svd.singular_values[0];
    if u.determinant() < 0.0 {
        // det T = 1 so both factors flip together
        u.set_column(1, &-u.column(1));
        vt.set_row(1, &-vt.row(1));
    }
    let alpha = u[(1, 0)].atan2(u[(0, 0)]);
    let beta = vt[(1, 0)].atan2(vt[(0, 0)]);
    // M(θ₊, θ₋) = R(−θ₊/2) diag(cot(θ₋/2), tan(θ₋/2)) R(−θ₊/2)
    let (plus1, minus1) = (alpha - beta, FRAC_PI_2);
    let (plus2, minus2) = (-2.0 * alpha, 2.0 * (1.0 / s).atan());
    Vector4::new(
        0.5 * (plus1 + minus1),
        0.5 * (plus1 - minus1),
        0.5 * (plus2 + minus2),
        0.5 * (plus2 - minus2),
    )
}

fn solution(p: &Vector4<f64>, residual: f64, iterations: usize, beta_0: f64) -> PhaseSolution {
    PhaseSolution {
        first: HomodyneSetting::new(p[0], p[1]).with_beta(beta_0),
        second: HomodyneSetting::new(p[2], p[3]).with_beta(beta_0),
        residual,
        iterations,
    }
}

/// Phases `(θ_in, θ_1)` for two steps with `M₂ M₁ = target`.
pub fn solve_phases(target: &Matrix2<f64>) -> Result<PhaseSolution, GateError> {
    validate(target)?;
    let seed = analytic_seed(target);
    let seed = solution(&seed, 0.0, 0, super::DEFAULT_BETA_0);
    refine_phases(target, &seed)
}

/// Levenberg–Marquardt refinement from `initial`.
pub fn refine_phases(target: &Matrix2<f64>, initial: &PhaseSolution) -> Result<PhaseSolution, GateError> {
    validate(target)?;
    let beta_0 = initial.first.beta_0;
    let tol = PHASE_SOLVE_TOL * target.amax().max(1.0);
    let mut p = Vector4::new(initial.first.theta_in, initial.first.theta_1, initial.second.theta_in, initial.second.theta_1);
    let mut r = residual_vector(&p, target).ok_or(GateError::DegeneratePhases { theta_minus: p[0] - p[1] })?;
    let mut lambda = 1e-3;
    let mut iterations = 0;
    while r.amax() >= tol && iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut jac = SMatrix::<f64, 4, 4>::zeros();
        for k in 0..4 {
            let h = 1e-7;
            let mut up = p;
            up[k] += h;
            let mut down = p;
            down[k] -= h;
            match (residual_vector(&up, target), residual_vector(&down, target)) {
                (Some(a), Some(b)) => jac.set_column(k, &((a - b) / (2.0 * h))),
                _ => jac.set_column(k, &SVector::<f64, 4>::zeros()),
            }
        }
        let jtj = jac.transpose() * jac;
        let g = jac.transpose() * r;
        let mut improved = false;
        for _ in 0..30 {
            let damped = jtj + Matrix4::from_diagonal(&jtj.diagonal().map(|d| lambda * d.max(1e-12)));
            let Some(step) = damped.lu().solve(&(-g)) else {
                lambda *= 10.0;
                continue;
            };
            let trial = p + step;
            if let Some(rt) = residual_vector(&trial, target) {
                if rt.norm() < r.norm() {
                    p = trial;
                    r = rt;
                    lambda = (lambda * 0.3).max(1e-15);
                    improved = true;
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    let best = solution(&p, r.amax(), iterations, beta_0);
    if best.residual >= tol {
        return Err(GateError::NotReached { residual: best.residual, best: Box::new(best) });
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotation(angle: f64) -> Matrix2<f64> {
        let (s, c) = angle.sin_cos();
        Matrix2::new(c, -s, s, c)
    }

    fn shear(t: f64) -> Matrix2<f64> {
        Matrix2::new(1.0, 0.0, t, 1.0)
    }

    #[test]
    fn analytic_seed_is_exact_for_typical_targets() {
        for t in [shear(1.0), shear(-1.0), rotation(0.8), Matrix2::new(3.0, 0.0, 0.0, 1.0 / 3.0), Matrix2::identity()] {
            let sol = solve_phases(&t).unwrap();
            assert_eq!(sol.iterations, 0);
            assert!((sol.product().unwrap() - t).amax() < 1e-12, "{t}");
        }
    }

    #[test]
    fn gate_factorization_matches_closed_form() {
        for (p, m) in [(0.3, 1.2), (-2.0, 0.4), (1.0, 2.9)] {
            let g = gate_matrix(p, m).unwrap();
            let f = rotation(-p / 2.0) * Matrix2::new(1.0 / (m / 2.0).tan(), 0.0, 0.0, (m / 2.0).tan()) * rotation(-p / 2.0);
            assert!((g - f).amax() < 1e-13);
        }
    }

    #[test]
    fn refinement_recovers_from_perturbed_start() {
        let t = shear(1.0);
        let exact = solve_phases(&t).unwrap();
        let mut start = exact.clone();
        start.first.theta_in += 0.05;
        start.second.theta_1 -= 0.03;
        let sol = refine_phases(&t, &start).unwrap();
        assert!(sol.iterations > 0);
        assert!((sol.product().unwrap() - t).amax() < 1e-10);
    }

    #[test]
    fn large_squeezing_within_bound_is_reached() {
        let t = Matrix2::new(1e5, 0.0, 3.0, 1e-5);
        let sol = solve_phases(&t).unwrap();
        assert!((sol.product().unwrap() - t).amax() < PHASE_SOLVE_TOL * 1e5);
    }

    #[test]
    fn invalid_targets_are_rejected() {
        assert!(matches!(solve_phases(&Matrix2::new(2.0, 0.0, 0.0, 1.0)), Err(GateError::InvalidTarget { .. })));
        assert!(matches!(solve_phases(&Matrix2::new(1e7, 0.0, 0.0, 1e-7)), Err(GateError::OutOfReach { .. })));
    }
}
