//! Symbolic linear combinations of source-mode quadratures.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DVector;
use serde::Serialize;

use super::QuadError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum QuadKind {
    X,
    Y,
}

/// One canonical quadrature of one mode. Flat index is `2 * mode + kind`,
/// i.e. the interleaved ordering (X1, Y1, X2, Y2, ...).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Quadrature {
    pub mode: usize,
    pub kind: QuadKind,
}

impl Quadrature {
    pub const fn x(mode: usize) -> Self {
        Self { mode, kind: QuadKind::X }
    }

    pub const fn y(mode: usize) -> Self {
        Self { mode, kind: QuadKind::Y }
    }

    pub const fn index(&self) -> usize {
        match self.kind {
            QuadKind::X => 2 * self.mode,
            QuadKind::Y => 2 * self.mode + 1,
        }
    }

    pub const fn from_index(index: usize) -> Self {
        let mode = index / 2;
        if index % 2 == 0 {
            Self::x(mode)
        } else {
            Self::y(mode)
        }
    }
}

impl fmt::Display for Quadrature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            QuadKind::X => write!(f, "x{}", self.mode),
            QuadKind::Y => write!(f, "y{}", self.mode),
        }
    }
}

/// Which balanced homodyne detector of a measurement step produced a photocurrent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Detector {
    /// The detector on the port carrying the input state, phase `theta_in`.
    Input,
    /// The detector on the port carrying the first cluster node, phase `theta_1`.
    Cluster,
}

/// A classical measurement record (photocurrent) of one gate step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ClassicalSymbol {
    pub step: usize,
    pub detector: Detector,
}

impl ClassicalSymbol {
    pub const fn new(step: usize, detector: Detector) -> Self {
        Self { step, detector }
    }
}

impl fmt::Display for ClassicalSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.detector {
            Detector::Input => write!(f, "i_in[{}]", self.step),
            Detector::Cluster => write!(f, "i_1[{}]", self.step),
        }
    }
}

/// Real linear combination of quadrature operators plus classical terms.
///
/// Classical terms are either symbolic photocurrents (kept until feed-forward
/// knows their values) or a plain numeric offset. Neither contributes to
/// covariances.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct LinearExpr {
    coeffs: BTreeMap<Quadrature, f64>,
    classical: BTreeMap<ClassicalSymbol, f64>,
    offset: f64,
}

impl LinearExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn quadrature(q: Quadrature) -> Self {
        Self::term(q, 1.0)
    }

    pub fn term(q: Quadrature, coeff: f64) -> Self {
        let mut e = Self::zero();
        e.add_term(q, coeff);
        e
    }

    pub fn symbol(sym: ClassicalSymbol, coeff: f64) -> Self {
        let mut e = Self::zero();
        e.add_symbol(sym, coeff);
        e
    }

    pub fn constant(offset: f64) -> Self {
        Self { offset, ..Self::default() }
    }

    pub fn from_terms<I: IntoIterator<Item = (Quadrature, f64)>>(terms: I) -> Self {
        let mut e = Self::zero();
        for (q, c) in terms {
            e.add_term(q, c);
        }
        e
    }

    pub fn add_term(&mut self, q: Quadrature, coeff: f64) {
        accumulate(&mut self.coeffs, q, coeff);
    }

    pub fn add_symbol(&mut self, sym: ClassicalSymbol, coeff: f64) {
        accumulate(&mut self.classical, sym, coeff);
    }

    pub fn coefficient(&self, q: Quadrature) -> f64 {
        self.coeffs.get(&q).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Quadrature, f64)> + '_ {
        self.coeffs.iter().map(|(q, c)| (*q, *c))
    }

    pub fn classical_terms(&self) -> impl Iterator<Item = (ClassicalSymbol, f64)> + '_ {
        self.classical.iter().map(|(s, c)| (*s, *c))
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn has_classical(&self) -> bool {
        !self.classical.is_empty() || self.offset != 0.0
    }

    /// Highest mode index referenced, if any quadrature is present.
    pub fn max_mode(&self) -> Option<usize> {
        self.coeffs.keys().map(|q| q.mode).max()
    }

    /// The quantum part only.
    pub fn quantum_part(&self) -> Self {
        Self { coeffs: self.coeffs.clone(), ..Self::default() }
    }

    /// Numeric value of the classical part for the given photocurrent values.
    pub fn classical_value(&self, values: &BTreeMap<ClassicalSymbol, f64>) -> Result<f64, QuadError> {
        let mut total = self.offset;
        for (sym, c) in &self.classical {
            let v = values.get(sym).ok_or(QuadError::UnboundSymbol(*sym))?;
            total += c * v;
        }
        Ok(total)
    }

    /// Coefficient row over a basis of `n_modes` modes.
    pub fn coefficient_vector(&self, n_modes: usize) -> Result<DVector<f64>, QuadError> {
        let mut v = DVector::zeros(2 * n_modes);
        for (q, c) in &self.coeffs {
            if q.mode >= n_modes {
                return Err(QuadError::UnknownQuadrature { quadrature: *q, n_modes });
            }
            v[q.index()] = *c;
        }
        Ok(v)
    }

    /// Expectation value given the source means (classical symbols excluded).
    pub fn mean(&self, source_mean: &DVector<f64>) -> Result<f64, QuadError> {
        let n_modes = source_mean.len() / 2;
        let row = self.coefficient_vector(n_modes)?;
        Ok(row.dot(source_mean) + self.offset)
    }

    /// Replace every quadrature by an expression (Heisenberg composition).
    /// Quadratures for which `map` returns `None` are kept as they are.
    pub fn substitute<'a, F>(&self, map: F) -> Self
    where
        F: Fn(Quadrature) -> Option<&'a LinearExpr>,
    {
        let mut out = Self {
            coeffs: BTreeMap::new(),
            classical: self.classical.clone(),
            offset: self.offset,
        };
        for (q, c) in &self.coeffs {
            match map(*q) {
                Some(e) => out = out + e * *c,
                None => out.add_term(*q, *c),
            }
        }
        out
    }

    /// Replace classical symbols by operator expressions (e.g. the measured
    /// quadrature a photocurrent records).
    pub fn substitute_classical(&self, map: &BTreeMap<ClassicalSymbol, LinearExpr>) -> Self {
        let mut out = Self {
            coeffs: self.coeffs.clone(),
            classical: BTreeMap::new(),
            offset: self.offset,
        };
        for (sym, c) in &self.classical {
            match map.get(sym) {
                Some(e) => out = out + e * *c,
                None => out.add_symbol(*sym, *c),
            }
        }
        out
    }

    /// Drop every classical contribution (the action of a perfect displacement).
    pub fn clear_classical(&mut self) {
        self.classical.clear();
        self.offset = 0.0;
    }

    /// Largest absolute coefficient difference, classical parts included.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let d = self - other;
        d.coeffs
            .values()
            .chain(d.classical.values())
            .map(|c| c.abs())
            .fold(d.offset.abs(), f64::max)
    }
}

fn accumulate<K: Ord>(map: &mut BTreeMap<K, f64>, key: K, coeff: f64) {
    let entry = map.entry(key).or_insert(0.0);
    *entry += coeff;
    if *entry == 0.0 {
        map.retain(|_, c| *c != 0.0);
    }
}

impl fmt::Display for LinearExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut emit = |f: &mut fmt::Formatter<'_>, c: f64, name: &dyn fmt::Display| -> fmt::Result {
            if first {
                first = false;
                write!(f, "{c}*{name}")
            } else if c < 0.0 {
                write!(f, " - {}*{name}", -c)
            } else {
                write!(f, " + {c}*{name}")
            }
        };
        for (q, c) in &self.coeffs {
            emit(f, *c, q)?;
        }
        for (s, c) in &self.classical {
            emit(f, *c, s)?;
        }
        if self.offset != 0.0 || first {
            if first {
                write!(f, "{}", self.offset)?;
            } else {
                write!(f, " + {}", self.offset)?;
            }
        }
        Ok(())
    }
}

impl Add<&LinearExpr> for LinearExpr {
    type Output = LinearExpr;

    fn add(mut self, rhs: &LinearExpr) -> LinearExpr {
        for (q, c) in &rhs.coeffs {
            self.add_term(*q, *c);
        }
        for (s, c) in &rhs.classical {
            self.add_symbol(*s, *c);
        }
        self.offset += rhs.offset;
        self
    }
}

impl Add for LinearExpr {
    type Output = LinearExpr;

    fn add(self, rhs: LinearExpr) -> LinearExpr {
        self + &rhs
    }
}

impl Add<&LinearExpr> for &LinearExpr {
    type Output = LinearExpr;

    fn add(self, rhs: &LinearExpr) -> LinearExpr {
        self.clone() + rhs
    }
}

impl Neg for LinearExpr {
    type Output = LinearExpr;

    fn neg(self) -> LinearExpr {
        self * -1.0
    }
}

impl Neg for &LinearExpr {
    type Output = LinearExpr;

    fn neg(self) -> LinearExpr {
        self * -1.0
    }
}

impl Sub<&LinearExpr> for LinearExpr {
    type Output = LinearExpr;

    fn sub(self, rhs: &LinearExpr) -> LinearExpr {
        self + &(-rhs)
    }
}

impl Sub for LinearExpr {
    type Output = LinearExpr;

    fn sub(self, rhs: LinearExpr) -> LinearExpr {
        self - &rhs
    }
}

impl Sub<&LinearExpr> for &LinearExpr {
    type Output = LinearExpr;

    fn sub(self, rhs: &LinearExpr) -> LinearExpr {
        self.clone() - rhs
    }
}

impl Mul<f64> for LinearExpr {
    type Output = LinearExpr;

    fn mul(mut self, k: f64) -> LinearExpr {
        if k == 0.0 {
            return LinearExpr::zero();
        }
        self.coeffs.values_mut().for_each(|c| *c *= k);
        self.classical.values_mut().for_each(|c| *c *= k);
        self.offset *= k;
        self
    }
}

impl Mul<f64> for &LinearExpr {
    type Output = LinearExpr;

    fn mul(self, k: f64) -> LinearExpr {
        self.clone() * k
    }
}

/// Apply a real matrix to a pair of expressions: `m * (a, b)^T`.
pub fn apply_matrix2(m: &nalgebra::Matrix2<f64>, pair: &[LinearExpr; 2]) -> [LinearExpr; 2] {
    [
        &pair[0] * m[(0, 0)] + &(&pair[1] * m[(0, 1)]),
        &pair[0] * m[(1, 0)] + &(&pair[1] * m[(1, 1)]),
    ]
}
