use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;

use super::{QuadError, SYMPLECTIC_TOL};

/// Standard symplectic form for `n_modes` modes in interleaved ordering:
/// one `[[0, 1], [-1, 0]]` block per mode.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// `max |S Ω Sᵀ − Ω|` for an even-dimensional square matrix.
pub fn symplectic_defect(m: &DMatrix<f64>) -> f64 {
    let omega = symplectic_form(m.nrows() / 2);
    (m * &omega * m.transpose() - omega).amax()
}

/// A real linear map on quadratures that preserves the commutators.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticMap {
    matrix: DMatrix<f64>,
}

impl SymplecticMap {
    /// Validates `S Ω Sᵀ = Ω`. The tolerance scales with `max(1, |S|∞²)` so
    /// that strongly squeezing maps are judged by relative error.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self, QuadError> {
        if !matrix.is_square() || matrix.nrows() % 2 != 0 || matrix.nrows() == 0 {
            return Err(QuadError::Shape(format!(
                "symplectic map must be square with even dimension, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let defect = symplectic_defect(&matrix);
        let scale = matrix.amax().powi(2).max(1.0);
        if !(defect <= SYMPLECTIC_TOL * scale) {
            return Err(QuadError::NotSymplectic { defect });
        }
        Ok(Self { matrix })
    }

    pub fn identity(n_modes: usize) -> Self {
        Self { matrix: DMatrix::identity(2 * n_modes, 2 * n_modes) }
    }

    /// Single-mode rotation multiplying `x + iy` by `e^{iφ}`.
    pub fn phase_rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self { matrix: DMatrix::from_row_slice(2, 2, &[c, -s, s, c]) }
    }

    /// 50:50 beam splitter `(a, b) -> ((a + b)/√2, (a − b)/√2)` acting
    /// identically on the X pair and the Y pair. Involutory.
    pub fn symmetric_beam_splitter() -> Self {
        let h = FRAC_1_SQRT_2;
        #[rustfmt::skip]
        let m = DMatrix::from_row_slice(4, 4, &[
            h, 0.0,  h, 0.0,
            0.0, h, 0.0,  h,
            h, 0.0, -h, 0.0,
            0.0, h, 0.0, -h,
        ]);
        Self { matrix: m }
    }

    /// Single-mode squeezer `diag(e^{-r}, e^{r})`.
    pub fn squeezer(r: f64) -> Self {
        Self { matrix: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![(-r).exp(), r.exp()])) }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    /// Lift a k-mode map onto `targets` of an `n_modes` register; other modes
    /// are left alone.
    pub fn embed(&self, n_modes: usize, targets: &[usize]) -> Result<Self, QuadError> {
        if targets.len() != self.n_modes() {
            return Err(QuadError::Shape(format!(
                "map acts on {} modes but {} targets were given",
                self.n_modes(),
                targets.len()
            )));
        }
        for (i, t) in targets.iter().enumerate() {
            if *t >= n_modes || targets[..i].contains(t) {
                return Err(QuadError::Shape(format!("invalid embedding target {t}")));
            }
        }
        let mut m = DMatrix::identity(2 * n_modes, 2 * n_modes);
        let idx: Vec<usize> = targets.iter().flat_map(|t| [2 * t, 2 * t + 1]).collect();
        for (a, &ra) in idx.iter().enumerate() {
            for (b, &cb) in idx.iter().enumerate() {
                m[(ra, cb)] = self.matrix[(a, b)];
            }
        }
        Ok(Self { matrix: m })
    }

    /// The map `next ∘ self`.
    pub fn then(&self, next: &SymplecticMap) -> Result<Self, QuadError> {
        if next.n_modes() != self.n_modes() {
            return Err(QuadError::DimensionMismatch { expected: self.n_modes(), found: next.n_modes() });
        }
        Ok(Self { matrix: &next.matrix * &self.matrix })
    }

    /// Block-diagonal sum: `self` on the first modes, `other` on the rest.
    pub fn direct_sum(&self, other: &SymplecticMap) -> Self {
        let (a, b) = (self.matrix.nrows(), other.matrix.nrows());
        let mut m = DMatrix::zeros(a + b, a + b);
        m.view_mut((0, 0), (a, a)).copy_from(&self.matrix);
        m.view_mut((a, a), (b, b)).copy_from(&other.matrix);
        Self { matrix: m }
    }

    /// `S⁻¹ = −Ω Sᵀ Ω`.
    pub fn inverse(&self) -> Self {
        let omega = symplectic_form(self.n_modes());
        Self { matrix: -(&omega * self.matrix.transpose() * &omega) }
    }

    pub fn defect(&self) -> f64 {
        symplectic_defect(&self.matrix)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn zero_rotation_is_identity() {
        assert_eq!(SymplecticMap::phase_rotation(0.0), SymplecticMap::identity(1));
    }

    #[test]
    fn quarter_rotation_sends_x_y_to_minus_y_x() {
        let r = SymplecticMap::phase_rotation(FRAC_PI_2);
        let v = r.matrix() * nalgebra::DVector::from_vec(vec![0.3, 0.7]);
        assert!((v[0] + 0.7).abs() < 1e-15);
        assert!((v[1] - 0.3).abs() < 1e-15);
        let back = r.then(&SymplecticMap::phase_rotation(-FRAC_PI_2)).unwrap();
        assert!((back.matrix() - DMatrix::<f64>::identity(2, 2)).amax() < 1e-15);
    }

    #[test]
    fn beam_splitter_is_involutory_and_mixes_pairs() {
        let bs = SymplecticMap::symmetric_beam_splitter();
        let twice = bs.then(&bs).unwrap();
        assert!((twice.matrix() - DMatrix::<f64>::identity(4, 4)).amax() < 1e-15);
        let (x1, x2) = (0.4, -1.1);
        let v = bs.matrix() * nalgebra::DVector::from_vec(vec![x1, 0.0, x2, 0.0]);
        assert!((v[0] - (x1 + x2) * FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((v[2] - (x1 - x2) * FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn exposed_maps_are_symplectic() {
        for m in [
            SymplecticMap::phase_rotation(0.123),
            SymplecticMap::symmetric_beam_splitter(),
            SymplecticMap::squeezer(1.7),
        ] {
            assert!(m.defect() < 1e-12, "defect {}", m.defect());
            assert!(SymplecticMap::new(m.into_matrix()).is_ok());
        }
    }

    #[test]
    fn non_symplectic_matrix_is_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 2.0]);
        assert!(matches!(SymplecticMap::new(m), Err(QuadError::NotSymplectic { .. })));
        assert!(SymplecticMap::new(DMatrix::identity(3, 3)).is_err());
    }

    #[test]
    fn embed_and_inverse() {
        let r = SymplecticMap::phase_rotation(0.4).embed(3, &[1]).unwrap();
        assert!(r.defect() < 1e-15);
        let id = r.then(&r.inverse()).unwrap();
        assert!((id.matrix() - DMatrix::<f64>::identity(6, 6)).amax() < 1e-15);
        assert!(SymplecticMap::symmetric_beam_splitter().embed(3, &[2, 2]).is_err());
    }
}
