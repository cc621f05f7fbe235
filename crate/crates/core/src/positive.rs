//! Internally positive systems: nonnegative `A` and row vector `c ≥ 0`
//! with a one-dimensional output.
//!
//! The PSD-slice construction carries over with the unit simplex in place
//! of the unit-trace slice and the affine map `x ↦ (xA + αc)/λ`,
//! `λ = Σ_k (xA + αc)_k`. Driving `λ` to 1 recovers the linear
//! certificate `q = c + qA`, i.e. `q = c(I−A)⁻¹`, which is entrywise
//! positive exactly when the system is stable and observable.

use crate::error::{Error, Result};
use crate::linalg::{linear_solve, numeric_rank, spectral_radius, Matrix};
use crate::solver::{
    bisect_alpha_to_unit_lambda, DEFAULT_MAP_TOL, DEFAULT_MAX_ITER, DENOMINATOR_FLOOR,
};
use crate::system::{observability_matrix, LtiSystem};

/// Entrywise positivity threshold for the certificate `q`, relative to
/// its largest entry.
pub const POSITIVITY_TOL: f64 = 1e-9;

/// Simplex membership tolerances: entries ≥ −1e-14 summing to 1 ± 1e-12.
pub const SIMPLEX_SUM_TOL: f64 = 1e-12;
pub const SIMPLEX_ENTRY_FLOOR: f64 = -1e-14;

/// A system with entrywise nonnegative `A` (n×n) and nonzero nonnegative
/// row vector `c` (1×n).
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveSystem {
    a: Matrix,
    c: Vec<f64>,
}

impl PositiveSystem {
    pub fn new(a: Matrix, c: Vec<f64>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension(format!(
                "state matrix A must be square, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        if c.len() != a.rows() {
            return Err(Error::Dimension(format!(
                "output vector c must have length {}, got {}",
                a.rows(),
                c.len()
            )));
        }
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                if a.get(i, j) < 0.0 {
                    return Err(Error::Precondition(format!(
                        "A must be entrywise nonnegative; A[{i},{j}] = {}",
                        a.get(i, j)
                    )));
                }
            }
        }
        if c.iter().any(|&v| !v.is_finite()) {
            return Err(Error::Precondition("c must have finite entries".into()));
        }
        if c.iter().any(|&v| v < 0.0) {
            return Err(Error::Precondition(
                "c must be entrywise nonnegative".into(),
            ));
        }
        if c.iter().all(|&v| v == 0.0) {
            return Err(Error::Precondition("c must be nonzero".into()));
        }
        Ok(Self { a, c })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    /// The same data viewed as an output pair with a 1×n output map.
    pub fn as_lti(&self) -> LtiSystem {
        let c = Matrix::from_rows(1, self.dim(), &self.c).expect("c entries already validated");
        LtiSystem::new(self.a.clone(), c).expect("dimensions already validated")
    }
}

/// A nonnegative row vector summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint {
    x: Vec<f64>,
}

impl SimplexPoint {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::Dimension("simplex point must be non-empty".into()));
        }
        let sum: f64 = x.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_SUM_TOL {
            return Err(Error::Precondition(format!(
                "simplex point must sum to 1, got {sum}"
            )));
        }
        if let Some(&bad) = x.iter().find(|&&v| v < SIMPLEX_ENTRY_FLOOR) {
            return Err(Error::Precondition(format!(
                "simplex point must be entrywise nonnegative, found {bad}"
            )));
        }
        Ok(Self { x })
    }

    /// The barycenter `(1/n, ..., 1/n)`.
    pub fn uniform(n: usize) -> Self {
        Self {
            x: vec![1.0 / n as f64; n],
        }
    }

    pub fn coords(&self) -> &[f64] {
        &self.x
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }
}

/// Converged (or flagged) state of the simplex iteration.
#[derive(Debug, Clone)]
pub struct SimplexFixedPoint {
    pub x: SimplexPoint,
    pub alpha: f64,
    /// `λ = Σ_k (xA + αc)_k` at `x`.
    pub lambda: f64,
    pub iterations: usize,
    pub map_residual: f64,
    pub converged: bool,
}

/// The linear certificate `q = c(I−A)⁻¹` with its residual and
/// entrywise-positivity verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveCertificate {
    pub q: Vec<f64>,
    /// Euclidean norm of `q − c − qA`.
    pub residual: f64,
    /// True iff every entry exceeds `1e-9 * max(1, ‖q‖_∞)`.
    pub positive: bool,
}

fn row_times_matrix(x: &[f64], a: &Matrix) -> Vec<f64> {
    let n = a.cols();
    let mut out = vec![0.0; n];
    for (i, &xi) in x.iter().enumerate() {
        if xi != 0.0 {
            for (j, slot) in out.iter_mut().enumerate() {
                *slot += xi * a.get(i, j);
            }
        }
    }
    out
}

/// One application of the simplex map `x ↦ (xA + αc)/λ`. Returns the
/// image and the normalizer `λ` at the input point.
pub fn simplex_map(
    ps: &PositiveSystem,
    alpha: f64,
    x: &SimplexPoint,
) -> Result<(SimplexPoint, f64)> {
    if alpha <= 0.0 {
        return Err(Error::Precondition(format!(
            "map parameter alpha must be positive, got {alpha}"
        )));
    }
    if x.dim() != ps.dim() {
        return Err(Error::Dimension(format!(
            "simplex point has dimension {}, system has {}",
            x.dim(),
            ps.dim()
        )));
    }
    let mut numerator = row_times_matrix(x.coords(), ps.a());
    for (slot, &ck) in numerator.iter_mut().zip(ps.c()) {
        *slot += alpha * ck;
    }
    let lambda: f64 = numerator.iter().sum();
    if lambda <= DENOMINATOR_FLOOR {
        return Err(Error::DegenerateMap { lambda });
    }
    let image: Vec<f64> = numerator.iter().map(|v| v / lambda).collect();
    Ok((SimplexPoint { x: image }, lambda))
}

/// Picard iteration of the simplex map from the barycenter.
pub fn simplex_fixed_point(
    ps: &PositiveSystem,
    alpha: f64,
    tol: f64,
    max_iter: usize,
) -> Result<SimplexFixedPoint> {
    let mut x = SimplexPoint::uniform(ps.dim());
    let mut iterations = 0;
    loop {
        let (next, lambda) = simplex_map(ps, alpha, &x)?;
        let map_residual = next
            .coords()
            .iter()
            .zip(x.coords())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        if map_residual <= tol {
            return Ok(SimplexFixedPoint {
                x,
                alpha,
                lambda,
                iterations,
                map_residual,
                converged: true,
            });
        }
        if iterations >= max_iter {
            return Ok(SimplexFixedPoint {
                x,
                alpha,
                lambda,
                iterations,
                map_residual,
                converged: false,
            });
        }
        x = next;
        iterations += 1;
    }
}

/// Solves `q(I − A) = c` and reports the residual of `q = c + qA` along
/// with the entrywise-positivity verdict.
///
/// Requires `ρ(A) < 1` (checked): otherwise `I − A` is singular or the
/// series meaning of `q` is lost.
pub fn solve_positive_q(ps: &PositiveSystem) -> Result<PositiveCertificate> {
    let rho = spectral_radius(ps.a())?;
    if rho >= 1.0 {
        return Err(Error::Precondition(format!(
            "positive certificate requires spectral radius below 1, got {rho}"
        )));
    }
    // q(I - A) = c  <=>  (I - A)^T q^T = c^T.
    let system = Matrix::identity(ps.dim()).sub(ps.a()).transpose();
    let q = linear_solve(&system, ps.c())?;

    let qa = row_times_matrix(&q, ps.a());
    let residual = q
        .iter()
        .zip(ps.c())
        .zip(&qa)
        .map(|((qi, ci), qai)| {
            let d = qi - ci - qai;
            d * d
        })
        .sum::<f64>()
        .sqrt();

    let scale = q.iter().fold(0.0_f64, |m, &v| m.max(v.abs())).max(1.0);
    let positive = q.iter().all(|&v| v > POSITIVITY_TOL * scale);
    Ok(PositiveCertificate {
        q,
        residual,
        positive,
    })
}

/// Rank test on the observability matrix of `(A, c)`.
pub fn is_positive_observable(ps: &PositiveSystem) -> bool {
    numeric_rank(&observability_matrix(&ps.as_lti())) == ps.dim()
}

/// Result of driving the simplex normalizer to 1.
#[derive(Debug, Clone)]
pub struct SimplexBisectionResult {
    /// The fixed point at `α*`; its coordinates equal `q/Σq`.
    pub fixed_point: SimplexFixedPoint,
    pub alpha: f64,
    pub lambda: f64,
}

/// Brackets and bisects `α ↦ λ(α)` of the simplex map to `λ = 1`,
/// reusing the slice solver's bracketing logic.
///
/// Requires stability and observability of `(A, c)` (checked).
pub fn solve_simplex_via_alpha_bisection(
    ps: &PositiveSystem,
    tol: f64,
) -> Result<SimplexBisectionResult> {
    let rho = spectral_radius(ps.a())?;
    if rho >= 1.0 {
        return Err(Error::Precondition(format!(
            "simplex bisection requires spectral radius below 1, got {rho}"
        )));
    }
    if !is_positive_observable(ps) {
        return Err(Error::Precondition(
            "simplex bisection requires an observable pair (A, c)".into(),
        ));
    }
    let eval = |alpha: f64| -> Result<(f64, SimplexFixedPoint)> {
        let state = simplex_fixed_point(ps, alpha, DEFAULT_MAP_TOL, DEFAULT_MAX_ITER)?;
        if !state.converged {
            return Err(Error::NumericalFailure(format!(
                "simplex iteration did not converge at alpha = {alpha}"
            )));
        }
        Ok((state.lambda, state))
    };
    let (alpha, lambda, state) = bisect_alpha_to_unit_lambda(eval, tol, |_, _| true)?;
    Ok(SimplexBisectionResult {
        fixed_point: state,
        alpha,
        lambda,
    })
}
