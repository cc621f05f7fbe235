//! Dense real matrices and the spectral primitives used by the solvers.
//!
//! Eigenvalue, singular-value, and LU machinery is delegated to nalgebra;
//! the types here pin down the row-major construction contract, the
//! finiteness and symmetry invariants, and the definiteness tolerances.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Symmetry check tolerance, relative to the largest entry magnitude.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Rank tolerance factor: singular values above
/// `max(rows, cols) * RANK_TOL_FACTOR * sigma_max` count toward the rank.
pub const RANK_TOL_FACTOR: f64 = 1e-14;

/// A symmetric matrix counts as positive definite iff its smallest
/// eigenvalue exceeds `PD_TOL * max(1, trace)`.
pub const PD_TOL: f64 = 1e-9;

/// A dense real matrix with finite entries, constructed row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    inner: DMatrix<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major entries. Rejects empty shapes,
    /// entry-count mismatches, and non-finite values.
    pub fn from_rows(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        for (k, &v) in entries.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    row: k / cols,
                    col: k % cols,
                });
            }
        }
        Ok(Self {
            inner: DMatrix::from_row_slice(rows, cols, entries),
        })
    }

    /// Builds a matrix from nested rows, rejecting ragged input.
    pub fn from_nested(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Dimension("matrix has no rows".into()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged matrix".into()));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::from_rows(rows.len(), cols, &flat)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            inner: DMatrix::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: DMatrix::identity(n, n),
        }
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.inner[(row, col)]
    }

    /// Entries in row-major order.
    pub fn row_major(&self) -> Vec<f64> {
        let (r, c) = (self.rows(), self.cols());
        let mut out = Vec::with_capacity(r * c);
        for i in 0..r {
            for j in 0..c {
                out.push(self.inner[(i, j)]);
            }
        }
        out
    }

    /// Rows as nested vectors, the shape used by the JSON interface.
    pub fn to_nested(&self) -> Vec<Vec<f64>> {
        (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.inner[(i, j)]).collect())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Self {
            inner: self.inner.transpose(),
        }
    }

    pub fn matmul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(
            self.cols(),
            rhs.rows(),
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows(),
            self.cols(),
            rhs.rows(),
            rhs.cols()
        );
        Self {
            inner: &self.inner * &rhs.inner,
        }
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        Self {
            inner: &self.inner + &rhs.inner,
        }
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        Self {
            inner: &self.inner - &rhs.inner,
        }
    }

    pub fn scale(&self, factor: f64) -> Matrix {
        Self {
            inner: &self.inner * factor,
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.inner.iter().fold(0.0_f64, |m, &v| m.max(v.abs()))
    }

    /// Standard Kronecker product.
    pub fn kron(&self, rhs: &Matrix) -> Matrix {
        Self {
            inner: self.inner.kronecker(&rhs.inner),
        }
    }
}

/// Largest eigenvalue magnitude of a square matrix.
pub fn spectral_radius(m: &Matrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "spectral radius requires a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let eigs = m.inner.clone().complex_eigenvalues();
    Ok(eigs.iter().fold(0.0_f64, |r, e| r.max(e.norm())))
}

/// Count of singular values above `max(rows, cols) * 1e-14 * sigma_max`.
pub fn numeric_rank(m: &Matrix) -> usize {
    let svd = m.inner.clone().svd(false, false);
    let sigma_max = svd.singular_values.iter().fold(0.0_f64, |a, &s| a.max(s));
    let tol = m.rows().max(m.cols()) as f64 * RANK_TOL_FACTOR * sigma_max;
    svd.singular_values.iter().filter(|&&s| s > tol).count()
}

/// Solves `M x = b`, rejecting systems whose condition estimate exceeds
/// `1 / (n * 1e-14)`. The answer satisfies
/// `‖Mx − b‖ ≤ 1e-10 (‖M‖_F ‖x‖ + ‖b‖)`; LU plus iterative refinement
/// keeps the residual near the rounding floor even for marginal systems.
pub fn linear_solve(m: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "linear solve requires a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    if b.len() != n {
        return Err(Error::Dimension(format!(
            "right-hand side length {} does not match system size {n}",
            b.len()
        )));
    }
    let svd = m.inner.clone().svd(false, false);
    let sigma_max = svd.singular_values.iter().fold(0.0_f64, |a, &s| a.max(s));
    let sigma_min = svd
        .singular_values
        .iter()
        .fold(f64::INFINITY, |a, &s| a.min(s));
    if sigma_min <= n as f64 * RANK_TOL_FACTOR * sigma_max {
        let condition = if sigma_min > 0.0 {
            sigma_max / sigma_min
        } else {
            f64::INFINITY
        };
        return Err(Error::SingularSystem { condition });
    }

    let lu = m.inner.clone().lu();
    let rhs = DVector::from_column_slice(b);
    let mut x = lu.solve(&rhs).ok_or(Error::SingularSystem {
        condition: sigma_max / sigma_min,
    })?;
    for _ in 0..3 {
        let residual = &rhs - &m.inner * &x;
        if residual.norm() <= 1e-14 * (m.inner.norm() * x.norm() + rhs.norm()) {
            break;
        }
        match lu.solve(&residual) {
            Some(correction) => x += correction,
            None => break,
        }
    }

    let residual = (&m.inner * &x - &rhs).norm();
    let bound = 1e-10 * (m.inner.norm() * x.norm() + rhs.norm());
    if residual > bound {
        return Err(Error::NumericalFailure(format!(
            "linear solve residual {residual:.3e} exceeds the contract bound {bound:.3e}"
        )));
    }
    Ok(x.iter().copied().collect())
}

/// Definiteness classification of a symmetric matrix, decided from its
/// smallest eigenvalue against `PD_TOL * max(1, |trace|)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Definiteness {
    PositiveDefinite,
    PositiveSemidefiniteSingular,
    Indefinite,
}

impl Definiteness {
    pub fn label(self) -> &'static str {
        match self {
            Definiteness::PositiveDefinite => "positive-definite",
            Definiteness::PositiveSemidefiniteSingular => "psd-singular",
            Definiteness::Indefinite => "indefinite",
        }
    }
}

/// A square matrix that passed the symmetry tolerance check.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    inner: DMatrix<f64>,
}

impl SymmetricMatrix {
    /// Validates symmetry: `|M[i,j] - M[j,i]| <= 1e-12 * max(1, max |entry|)`.
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!(
                "symmetric matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let scale = m.max_abs().max(1.0);
        let mut max_asymmetry = 0.0_f64;
        for i in 0..m.rows() {
            for j in (i + 1)..m.cols() {
                max_asymmetry = max_asymmetry.max((m.get(i, j) - m.get(j, i)).abs());
            }
        }
        if max_asymmetry > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric { max_asymmetry });
        }
        // Average the off-diagonal pairs so downstream arithmetic sees an
        // exactly symmetric matrix.
        let mut inner = m.inner;
        for i in 0..inner.nrows() {
            for j in (i + 1)..inner.ncols() {
                let avg = 0.5 * (inner[(i, j)] + inner[(j, i)]);
                inner[(i, j)] = avg;
                inner[(j, i)] = avg;
            }
        }
        Ok(Self { inner })
    }

    /// Builds from row-major entries, checking the symmetry invariant.
    pub fn from_rows(n: usize, entries: &[f64]) -> Result<Self> {
        Self::new(Matrix::from_rows(n, n, entries)?)
    }

    /// Symmetrizes an arbitrary square matrix as `(M + Mᵀ)/2`.
    pub fn symmetrize(m: &Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!(
                "cannot symmetrize a {}x{} matrix",
                m.rows(),
                m.cols()
            )));
        }
        let sym = m.add(&m.transpose()).scale(0.5);
        Ok(Self { inner: sym.inner })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: DMatrix::identity(n, n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            inner: DMatrix::zeros(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.inner[(row, col)]
    }

    pub fn as_matrix(&self) -> Matrix {
        Matrix {
            inner: self.inner.clone(),
        }
    }

    pub fn trace(&self) -> f64 {
        self.inner.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.norm()
    }

    /// Smallest eigenvalue, from the symmetric eigendecomposition.
    pub fn min_eigenvalue(&self) -> f64 {
        self.inner
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |a, &v| a.min(v))
    }

    pub fn is_positive_definite(&self) -> bool {
        self.min_eigenvalue() > PD_TOL * self.trace().max(1.0)
    }

    pub fn definiteness(&self) -> Definiteness {
        let min_eig = self.min_eigenvalue();
        let scale = self.trace().abs().max(1.0);
        if min_eig > PD_TOL * self.trace().max(1.0) {
            Definiteness::PositiveDefinite
        } else if min_eig >= -PD_TOL * scale {
            Definiteness::PositiveSemidefiniteSingular
        } else {
            Definiteness::Indefinite
        }
    }
}

/// Sum of diagonal entries.
pub fn trace(m: &SymmetricMatrix) -> f64 {
    m.trace()
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &SymmetricMatrix) -> f64 {
    m.min_eigenvalue()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: usize, cols: usize, entries: &[f64]) -> Matrix {
        Matrix::from_rows(rows, cols, entries).unwrap()
    }

    #[test]
    fn trace_identity_zero_and_general() {
        assert_eq!(trace(&SymmetricMatrix::identity(3)), 3.0);
        assert_eq!(trace(&SymmetricMatrix::zeros(2)), 0.0);
        let s = SymmetricMatrix::from_rows(2, &[1.0, 2.0, 2.0, 5.0]).unwrap();
        assert_eq!(trace(&s), 6.0);
    }

    #[test]
    fn spectral_radius_nilpotent_rotation_scalar() {
        let nilpotent = mat(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(spectral_radius(&nilpotent).unwrap().abs() <= 1e-12);

        let rotation = mat(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        assert!((spectral_radius(&rotation).unwrap() - 1.0).abs() <= 1e-12);

        let scalar = mat(1, 1, &[0.5]);
        assert!((spectral_radius(&scalar).unwrap() - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn spectral_radius_rejects_non_square() {
        let wide = mat(1, 2, &[1.0, 2.0]);
        assert!(matches!(
            spectral_radius(&wide),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn min_eigenvalue_examples() {
        assert!((SymmetricMatrix::identity(2).min_eigenvalue() - 1.0).abs() <= 1e-12);

        let rank_one = SymmetricMatrix::from_rows(2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(rank_one.min_eigenvalue().abs() <= 1e-12);

        let diag = SymmetricMatrix::from_rows(2, &[1.0, 0.0, 0.0, -1.0]).unwrap();
        assert!((diag.min_eigenvalue() + 1.0).abs() <= 1e-12);
    }

    #[test]
    fn numeric_rank_examples() {
        assert_eq!(numeric_rank(&Matrix::identity(3)), 3);
        assert_eq!(numeric_rank(&mat(2, 2, &[1.0, 0.0, 1.0, 0.0])), 1);
        assert_eq!(numeric_rank(&Matrix::zeros(2, 2)), 0);
    }

    #[test]
    fn kron_scalars_and_identity() {
        let a = mat(1, 1, &[2.0]);
        let b = mat(1, 1, &[3.0]);
        assert_eq!(a.kron(&b), mat(1, 1, &[6.0]));
        assert_eq!(Matrix::identity(2).kron(&Matrix::identity(2)), Matrix::identity(4));
    }

    #[test]
    fn linear_solve_identity_and_singular() {
        let x = linear_solve(&Matrix::identity(2), &[1.0, 2.0]).unwrap();
        assert!((x[0] - 1.0).abs() <= 1e-12 && (x[1] - 2.0).abs() <= 1e-12);

        let singular = mat(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(matches!(
            linear_solve(&singular, &[1.0, 0.0]),
            Err(Error::SingularSystem { .. })
        ));
    }

    #[test]
    fn linear_solve_residual_contract() {
        let m = mat(3, 3, &[4.0, 1.0, -2.0, 1.0, 5.0, 0.3, -2.0, 0.3, 6.0]);
        let b = [1.0, -2.0, 0.5];
        let x = linear_solve(&m, &b).unwrap();
        let xm = mat(3, 1, &x);
        let bm = mat(3, 1, &b);
        let residual = m.matmul(&xm).sub(&bm).frobenius_norm();
        let bound = 1e-10 * (m.frobenius_norm() * xm.frobenius_norm() + bm.frobenius_norm());
        assert!(residual <= bound, "residual {residual} > bound {bound}");
    }

    #[test]
    fn matrix_constructor_validation() {
        assert!(matches!(
            Matrix::from_rows(0, 1, &[]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            Matrix::from_rows(2, 2, &[1.0, 2.0]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            Matrix::from_rows(1, 2, &[1.0, f64::NAN]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
        assert!(Matrix::from_nested(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    }

    #[test]
    fn symmetry_tolerance_enforced() {
        let skewed = mat(2, 2, &[1.0, 1.0, 1.0 + 1e-6, 1.0]);
        assert!(matches!(
            SymmetricMatrix::new(skewed),
            Err(Error::NotSymmetric { .. })
        ));
        // Asymmetry within tolerance is accepted and averaged away.
        let nearly = mat(2, 2, &[1.0, 1.0, 1.0 + 1e-13, 1.0]);
        let s = SymmetricMatrix::new(nearly).unwrap();
        assert_eq!(s.get(0, 1), s.get(1, 0));
    }

    #[test]
    fn definiteness_classification() {
        assert_eq!(
            SymmetricMatrix::identity(2).definiteness(),
            Definiteness::PositiveDefinite
        );
        let rank_one = SymmetricMatrix::from_rows(2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(
            rank_one.definiteness(),
            Definiteness::PositiveSemidefiniteSingular
        );
        let diag = SymmetricMatrix::from_rows(2, &[1.0, 0.0, 0.0, -1.0]).unwrap();
        assert_eq!(diag.definiteness(), Definiteness::Indefinite);
    }
}
