//! Solvers for `AᵀQA − Q + CᵀC = 0`.
//!
//! The central construction is the trace-normalized map
//!
//! ```text
//! f(X) = (AᵀXA + αCᵀC) / tr(AᵀXA + αCᵀC)
//! ```
//!
//! which sends the unit-trace PSD slice to itself for every `α > 0`. Its
//! fixed point `X_α` with normalizer `λ_α = tr(AᵀX_αA + αCᵀC)` yields the
//! Lyapunov solution `Q = X_α/α` exactly when `λ_α = 1`; the right `α` is
//! found by bracketing and bisection. Two independent solvers — the
//! vectorized Kronecker solve and the truncated Gramian series — serve as
//! cross-checks, and the scalar line map `θ ↦ θλ/(θλ + (1−θ)γ)` exposes
//! the repelling/attracting fixed-point structure behind uniqueness.

use crate::error::{Error, Result};
use crate::linalg::{linear_solve, spectral_radius, Definiteness, Matrix, SymmetricMatrix};
use crate::system::{is_asymptotically_stable, is_observable, LtiSystem};

/// Default Frobenius tolerance on the Picard map residual.
pub const DEFAULT_MAP_TOL: f64 = 1e-12;

/// Default Picard iteration cap before falling back to the resolvent solve.
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Default bisection tolerance on `|λ_α − 1|`.
pub const DEFAULT_LAMBDA_TOL: f64 = 1e-10;

/// Cap on bracketing doublings/halvings and on bisection steps.
pub const MAX_BRACKET_STEPS: usize = 200;

/// The normalizer must stay above this floor; below it the map is
/// degenerate (possible only when `C = 0` and `AᵀXA = 0`).
pub const DENOMINATOR_FLOOR: f64 = 1e-300;

/// Cobweb iterates beyond this magnitude are flagged as diverged.
pub const COBWEB_ESCAPE: f64 = 1e6;

/// Trace tolerance for membership in the unit-trace slice.
pub const SLICE_TRACE_TOL: f64 = 1e-10;

/// Eigenvalue floor for PSD membership in the slice.
pub const SLICE_EIG_FLOOR: f64 = -1e-10;

/// Residual acceptance threshold: `1e-8 * max(1, ‖CᵀC‖_F)`.
pub fn accept_tol(sys: &LtiSystem) -> f64 {
    let ctc = sys.c().transpose().matmul(sys.c());
    1e-8 * ctc.frobenius_norm().max(1.0)
}

/// A point on the unit-trace PSD slice: `X ⪰ 0`, `tr X = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlicePoint {
    m: SymmetricMatrix,
}

impl SlicePoint {
    /// Validates slice membership: trace within `1e-10` of 1 and smallest
    /// eigenvalue at least `-1e-10`.
    pub fn new(m: SymmetricMatrix) -> Result<Self> {
        let trace = m.trace();
        if (trace - 1.0).abs() > SLICE_TRACE_TOL {
            return Err(Error::Precondition(format!(
                "slice point must have unit trace, got {trace}"
            )));
        }
        let min_eig = m.min_eigenvalue();
        if min_eig < SLICE_EIG_FLOOR {
            return Err(Error::Precondition(format!(
                "slice point must be positive semidefinite, smallest eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self { m })
    }

    /// The interior starting point `I/n`.
    pub fn uniform(n: usize) -> Self {
        Self {
            m: SymmetricMatrix::new(Matrix::identity(n).scale(1.0 / n as f64))
                .expect("scaled identity is symmetric"),
        }
    }

    pub(crate) fn from_symmetric_unchecked(m: SymmetricMatrix) -> Self {
        Self { m }
    }

    pub fn matrix(&self) -> &SymmetricMatrix {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }
}

/// Converged (or flagged) state of the fixed-point iteration.
#[derive(Debug, Clone)]
pub struct FixedPointState {
    /// The slice point `X`.
    pub x: SlicePoint,
    /// The map parameter `α`.
    pub alpha: f64,
    /// The normalizer `λ = tr(AᵀXA + αCᵀC)` at `X`.
    pub lambda: f64,
    /// Picard iterations spent.
    pub iterations: usize,
    /// `‖f(X) − X‖_F` at the returned `X`.
    pub map_residual: f64,
    /// False when the iteration hit its cap without meeting the tolerance.
    pub converged: bool,
}

/// Which solver produced a Lyapunov solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    FixedPoint,
    Direct,
    Series,
}

impl SolveMethod {
    pub fn label(self) -> &'static str {
        match self {
            SolveMethod::FixedPoint => "fixed-point",
            SolveMethod::Direct => "direct",
            SolveMethod::Series => "series",
        }
    }
}

/// A solution `Q` with its equation residual and definiteness verdict.
#[derive(Debug, Clone)]
pub struct LyapunovSolution {
    pub q: SymmetricMatrix,
    /// `‖AᵀQA − Q + CᵀC‖_F`.
    pub residual: f64,
    pub method: SolveMethod,
    pub definiteness: Definiteness,
    /// Smallest eigenvalue of `Q`, the evidence behind the verdict.
    pub min_eigenvalue: f64,
}

/// Result of the α-bisection: the solution plus the fixed point behind it.
#[derive(Debug, Clone)]
pub struct AlphaBisectionResult {
    pub solution: LyapunovSolution,
    /// The converged state at `α*`; `Q = X/α*`.
    pub fixed_point: FixedPointState,
}

/// `‖AᵀQA − Q + CᵀC‖_F`.
pub fn lyapunov_residual(sys: &LtiSystem, q: &SymmetricMatrix) -> Result<f64> {
    if q.dim() != sys.dim() {
        return Err(Error::Dimension(format!(
            "Q is {}x{} but the state dimension is {}",
            q.dim(),
            q.dim(),
            sys.dim()
        )));
    }
    let a = sys.a();
    let qm = q.as_matrix();
    let ctc = sys.c().transpose().matmul(sys.c());
    let lhs = a.transpose().matmul(&qm).matmul(a).sub(&qm).add(&ctc);
    Ok(lhs.frobenius_norm())
}

/// One application of the normalized map. Returns the image point and the
/// normalizer `λ = tr(AᵀXA + αCᵀC)` at the input point.
pub fn normalized_map(
    sys: &LtiSystem,
    alpha: f64,
    x: &SlicePoint,
) -> Result<(SlicePoint, f64)> {
    if alpha <= 0.0 {
        return Err(Error::Precondition(format!(
            "map parameter alpha must be positive, got {alpha}"
        )));
    }
    if x.dim() != sys.dim() {
        return Err(Error::Dimension(format!(
            "slice point is {}x{} but the state dimension is {}",
            x.dim(),
            x.dim(),
            sys.dim()
        )));
    }
    let a = sys.a();
    let ctc = sys.c().transpose().matmul(sys.c());
    let numerator = a
        .transpose()
        .matmul(&x.matrix().as_matrix())
        .matmul(a)
        .add(&ctc.scale(alpha));
    let lambda = SymmetricMatrix::symmetrize(&numerator)?.trace();
    if lambda <= DENOMINATOR_FLOOR {
        return Err(Error::DegenerateMap { lambda });
    }
    // Symmetrize after every application to suppress asymmetry drift.
    let image = SymmetricMatrix::symmetrize(&numerator.scale(1.0 / lambda))?;
    Ok((SlicePoint::from_symmetric_unchecked(image), lambda))
}

/// Picard iteration of the normalized map from `x0`.
///
/// Non-convergence after `max_iter` steps is reported through the
/// `converged` flag, not as an error.
pub fn fixed_point_iterate(
    sys: &LtiSystem,
    alpha: f64,
    x0: SlicePoint,
    tol: f64,
    max_iter: usize,
) -> Result<FixedPointState> {
    let mut x = x0;
    let mut iterations = 0;
    loop {
        let (next, lambda) = normalized_map(sys, alpha, &x)?;
        let map_residual = next
            .matrix()
            .as_matrix()
            .sub(&x.matrix().as_matrix())
            .frobenius_norm();
        if map_residual <= tol {
            return Ok(FixedPointState {
                x,
                alpha,
                lambda,
                iterations,
                map_residual,
                converged: true,
            });
        }
        if iterations >= max_iter {
            return Ok(FixedPointState {
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

/// Fixed point via the vectorized resolvent: find `λ` such that
/// `tr X(λ) = 1` where `X(λ) = α (λ·Id − Aᵀ⊗Aᵀ)⁻¹ vec(CᵀC)`.
///
/// Used as the fallback when Picard iteration stalls; the root is
/// bracketed above `ρ(A)²` where the trace is decreasing in `λ`.
fn fixed_point_via_resolvent(sys: &LtiSystem, alpha: f64, tol: f64) -> Result<FixedPointState> {
    let n = sys.dim();
    let at = sys.a().transpose();
    let big_l = at.kron(&at);
    let ctc = sys.c().transpose().matmul(sys.c());
    let ctc_vec = ctc.row_major();
    let rho_sq = spectral_radius(sys.a())?.powi(2);

    let x_of = |lambda: f64| -> Result<Matrix> {
        let shifted = Matrix::identity(n * n).scale(lambda).sub(&big_l);
        let v = linear_solve(&shifted, &ctc_vec)?;
        Ok(Matrix::from_rows(n, n, &v)?.scale(alpha))
    };
    let trace_of = |m: &Matrix| -> f64 { (0..n).map(|i| m.get(i, i)).sum() };

    // Bracket: the trace blows up just above rho(A)^2 and decays to 0 as
    // lambda grows.
    let mut lo = rho_sq + (rho_sq * 1e-9).max(1e-12);
    let mut t_lo = f64::INFINITY;
    for _ in 0..MAX_BRACKET_STEPS {
        match x_of(lo) {
            Ok(x) => {
                t_lo = trace_of(&x);
                break;
            }
            Err(_) => lo += (rho_sq * 1e-9).max(1e-12),
        }
    }
    if t_lo < 1.0 {
        return Err(Error::NumericalFailure(format!(
            "resolvent trace {t_lo} below 1 at the lower bracket; no slice fixed point"
        )));
    }
    let mut hi = (2.0 * lo).max(lo + 1.0);
    let mut found_hi = false;
    for _ in 0..MAX_BRACKET_STEPS {
        if trace_of(&x_of(hi)?) < 1.0 {
            found_hi = true;
            break;
        }
        hi *= 2.0;
    }
    if !found_hi {
        return Err(Error::NumericalFailure(
            "resolvent bracketing failed: trace never fell below 1".into(),
        ));
    }

    let mut x_mid = x_of(0.5 * (lo + hi))?;
    for _ in 0..MAX_BRACKET_STEPS {
        let mid = 0.5 * (lo + hi);
        x_mid = x_of(mid)?;
        let t = trace_of(&x_mid);
        if (t - 1.0).abs() <= 1e-13 || (hi - lo) <= f64::EPSILON * hi {
            break;
        }
        if t > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let x = SlicePoint::new(SymmetricMatrix::symmetrize(&x_mid)?)?;
    let (image, lambda) = normalized_map(sys, alpha, &x)?;
    let map_residual = image
        .matrix()
        .as_matrix()
        .sub(&x.matrix().as_matrix())
        .frobenius_norm();
    Ok(FixedPointState {
        x,
        alpha,
        lambda,
        iterations: 0,
        map_residual,
        converged: map_residual <= tol,
    })
}

/// Picard iteration with the resolvent fallback on non-convergence.
fn fixed_point_with_fallback(
    sys: &LtiSystem,
    alpha: f64,
    x0: SlicePoint,
    tol: f64,
    max_iter: usize,
) -> Result<FixedPointState> {
    let state = fixed_point_iterate(sys, alpha, x0, tol, max_iter)?;
    if state.converged {
        return Ok(state);
    }
    let fallback = fixed_point_via_resolvent(sys, alpha, tol)?;
    if fallback.converged || fallback.map_residual < state.map_residual {
        Ok(fallback)
    } else {
        Ok(state)
    }
}

/// The normalizer `λ_α` of the converged fixed point for this `α`.
pub fn lambda_of_alpha(sys: &LtiSystem, alpha: f64) -> Result<f64> {
    let state = fixed_point_with_fallback(
        sys,
        alpha,
        SlicePoint::uniform(sys.dim()),
        DEFAULT_MAP_TOL,
        DEFAULT_MAX_ITER,
    )?;
    if !state.converged {
        return Err(Error::NumericalFailure(format!(
            "fixed-point iteration did not converge at alpha = {alpha} \
             (map residual {:.3e})",
            state.map_residual
        )));
    }
    Ok(state.lambda)
}

/// Shared bracketing + bisection of `α ↦ λ(α)` to `λ = 1`.
///
/// `eval` returns the converged normalizer and a payload for each `α`;
/// `accept` may demand extra bisection refinement (e.g. until a residual
/// threshold is met) after the `λ` tolerance is reached.
pub(crate) fn bisect_alpha_to_unit_lambda<S>(
    mut eval: impl FnMut(f64) -> Result<(f64, S)>,
    lambda_tol: f64,
    mut accept: impl FnMut(f64, &S) -> bool,
) -> Result<(f64, f64, S)> {
    let mut alpha = 1.0;
    let (mut lambda, mut state) = eval(alpha)?;

    let (mut alpha_lo, mut alpha_hi);
    if lambda < 1.0 {
        alpha_lo = alpha;
        let mut steps = 0;
        loop {
            alpha *= 2.0;
            let (l, s) = eval(alpha)?;
            if l > 1.0 {
                alpha_hi = alpha;
                break;
            }
            alpha_lo = alpha;
            lambda = l;
            state = s;
            steps += 1;
            if steps >= MAX_BRACKET_STEPS {
                return Err(Error::NumericalFailure(
                    "alpha bracketing failed: lambda never exceeded 1".into(),
                ));
            }
        }
    } else {
        alpha_hi = alpha;
        let mut steps = 0;
        loop {
            alpha *= 0.5;
            let (l, s) = eval(alpha)?;
            if l < 1.0 {
                alpha_lo = alpha;
                lambda = l;
                state = s;
                break;
            }
            alpha_hi = alpha;
            steps += 1;
            if steps >= MAX_BRACKET_STEPS {
                return Err(Error::NumericalFailure(
                    "alpha bracketing failed: lambda never fell below 1".into(),
                ));
            }
        }
    }

    let mut best_alpha = alpha_lo;
    for _ in 0..MAX_BRACKET_STEPS {
        let mid = 0.5 * (alpha_lo + alpha_hi);
        let (l, s) = eval(mid)?;
        best_alpha = mid;
        lambda = l;
        state = s;
        let within_tol = (lambda - 1.0).abs() <= lambda_tol;
        if within_tol && accept(lambda, &state) {
            return Ok((best_alpha, lambda, state));
        }
        if (alpha_hi - alpha_lo) <= f64::EPSILON * alpha_hi {
            if within_tol {
                return Ok((best_alpha, lambda, state));
            }
            break;
        }
        if lambda < 1.0 {
            alpha_lo = mid;
        } else {
            alpha_hi = mid;
        }
    }
    if (lambda - 1.0).abs() <= lambda_tol {
        return Ok((best_alpha, lambda, state));
    }
    Err(Error::NumericalFailure(format!(
        "alpha bisection stalled at lambda = {lambda}"
    )))
}

/// Solves the Lyapunov equation by driving `λ_α` to 1 and scaling the
/// fixed point: `Q = X_{α*}/α*`.
///
/// Requires asymptotic stability and observability; both are checked.
pub fn solve_via_alpha_bisection(sys: &LtiSystem, tol: f64) -> Result<AlphaBisectionResult> {
    let stability = is_asymptotically_stable(sys)?;
    if !stability.stable {
        return Err(Error::Precondition(format!(
            "alpha bisection requires asymptotic stability; spectral radius is {}",
            stability.spectral_radius
        )));
    }
    let observability = is_observable(sys);
    if !observability.observable {
        return Err(Error::Precondition(format!(
            "alpha bisection requires observability; rank is {} of {}",
            observability.rank,
            sys.dim()
        )));
    }

    let accept_threshold = accept_tol(sys);
    // Warm-start each lambda evaluation from the previous fixed point:
    // X_alpha moves continuously with alpha, so late bisection steps
    // converge in a handful of Picard iterations.
    let mut warm = SlicePoint::uniform(sys.dim());
    let eval = |alpha: f64| -> Result<(f64, FixedPointState)> {
        let state = fixed_point_with_fallback(sys, alpha, warm.clone(), DEFAULT_MAP_TOL, DEFAULT_MAX_ITER)?;
        if !state.converged {
            return Err(Error::NumericalFailure(format!(
                "fixed-point iteration did not converge at alpha = {alpha}"
            )));
        }
        warm = state.x.clone();
        Ok((state.lambda, state))
    };
    let accept = |_lambda: f64, state: &FixedPointState| -> bool {
        let q = SymmetricMatrix::symmetrize(
            &state.x.matrix().as_matrix().scale(1.0 / state.alpha),
        )
        .expect("scaled slice point stays symmetric");
        lyapunov_residual(sys, &q).map(|r| r <= accept_threshold).unwrap_or(false)
    };

    let (alpha, _lambda, state) = bisect_alpha_to_unit_lambda(eval, tol, accept)?;
    let q = SymmetricMatrix::symmetrize(&state.x.matrix().as_matrix().scale(1.0 / alpha))?;
    let residual = lyapunov_residual(sys, &q)?;
    if residual > accept_threshold {
        return Err(Error::NumericalFailure(format!(
            "bisection solution residual {residual:.3e} exceeds the acceptance \
             threshold {accept_threshold:.3e}"
        )));
    }
    let min_eigenvalue = q.min_eigenvalue();
    let definiteness = q.definiteness();
    Ok(AlphaBisectionResult {
        solution: LyapunovSolution {
            q,
            residual,
            method: SolveMethod::FixedPoint,
            definiteness,
            min_eigenvalue,
        },
        fixed_point: state,
    })
}

/// Direct vectorized solve: `(Id − Aᵀ⊗Aᵀ) vec(Q) = vec(CᵀC)`, then
/// symmetrization `(Q + Qᵀ)/2`.
pub fn solve_direct(sys: &LtiSystem) -> Result<LyapunovSolution> {
    let n = sys.dim();
    let at = sys.a().transpose();
    let system = Matrix::identity(n * n).sub(&at.kron(&at));
    let ctc = sys.c().transpose().matmul(sys.c());
    let q_vec = linear_solve(&system, &ctc.row_major())?;
    let q = SymmetricMatrix::symmetrize(&Matrix::from_rows(n, n, &q_vec)?)?;
    let residual = lyapunov_residual(sys, &q)?;
    let threshold = accept_tol(sys);
    if residual > threshold {
        return Err(Error::NumericalFailure(format!(
            "direct solution residual {residual:.3e} exceeds the acceptance \
             threshold {threshold:.3e}"
        )));
    }
    let min_eigenvalue = q.min_eigenvalue();
    let definiteness = q.definiteness();
    Ok(LyapunovSolution {
        q,
        residual,
        method: SolveMethod::Direct,
        definiteness,
        min_eigenvalue,
    })
}

/// Gramian series solve: `Q = Σ_k (CAᵏ)ᵀ(CAᵏ)`, truncated once the term
/// norm drops below `tol · (1 − ρ(A)²)`.
///
/// Requires asymptotic stability (checked).
pub fn solve_series(sys: &LtiSystem, tol: f64, max_terms: usize) -> Result<LyapunovSolution> {
    let stability = is_asymptotically_stable(sys)?;
    if !stability.stable {
        return Err(Error::Precondition(format!(
            "series solve requires asymptotic stability; spectral radius is {}",
            stability.spectral_radius
        )));
    }
    let rho = stability.spectral_radius;
    let threshold = tol * (1.0 - rho * rho);
    let n = sys.dim();
    let mut block = sys.c().clone(); // C A^k
    let mut q = Matrix::zeros(n, n);
    let mut truncated = false;
    for _ in 0..=max_terms {
        let term = block.transpose().matmul(&block);
        q = q.add(&term);
        if term.frobenius_norm() < threshold {
            truncated = true;
            break;
        }
        block = block.matmul(sys.a());
    }
    if !truncated {
        return Err(Error::NumericalFailure(format!(
            "series did not meet the tail bound within {max_terms} terms"
        )));
    }
    let q = SymmetricMatrix::symmetrize(&q)?;
    let residual = lyapunov_residual(sys, &q)?;
    let accept_threshold = accept_tol(sys);
    if residual > accept_threshold {
        return Err(Error::NumericalFailure(format!(
            "series solution residual {residual:.3e} exceeds the acceptance \
             threshold {accept_threshold:.3e}"
        )));
    }
    let min_eigenvalue = q.min_eigenvalue();
    let definiteness = q.definiteness();
    Ok(LyapunovSolution {
        q,
        residual,
        method: SolveMethod::Series,
        definiteness,
        min_eigenvalue,
    })
}

/// Defect of the n-step unrolled fixed-point identity
///
/// ```text
/// X = λ^{-(n+1)} (A^{n+1})ᵀ X A^{n+1} + Σ_{k=0}^{n} (α/λ^{k+1}) (CAᵏ)ᵀ(CAᵏ)
/// ```
///
/// Near zero for a true fixed point; at `n = 0` it reduces to the map
/// residual itself.
pub fn unrolled_chain_check(sys: &LtiSystem, fp: &FixedPointState, n: usize) -> f64 {
    let dim = sys.dim();
    let x = fp.x.matrix().as_matrix();
    let lambda = fp.lambda;
    let alpha = fp.alpha;

    let mut sum = Matrix::zeros(dim, dim);
    let mut block = sys.c().clone(); // C A^k
    let mut lambda_pow = lambda;
    for _ in 0..=n {
        let term = block.transpose().matmul(&block).scale(alpha / lambda_pow);
        sum = sum.add(&term);
        block = block.matmul(sys.a());
        lambda_pow *= lambda;
    }

    let mut a_pow = Matrix::identity(dim);
    for _ in 0..=n {
        a_pow = a_pow.matmul(sys.a());
    }
    let head = a_pow
        .transpose()
        .matmul(&x)
        .matmul(&a_pow)
        .scale(1.0 / lambda.powi(n as i32 + 1));

    x.sub(&head).sub(&sum).frobenius_norm()
}

/// Parameters of the conjugated scalar map along the line through two
/// candidate fixed points: the normalizers `λ` and `γ` of the endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaMapParams {
    lambda: f64,
    gamma: f64,
}

impl ThetaMapParams {
    pub fn new(lambda: f64, gamma: f64) -> Result<Self> {
        if lambda <= 0.0 || gamma <= 0.0 {
            return Err(Error::Precondition(format!(
                "theta map parameters must be positive, got lambda = {lambda}, gamma = {gamma}"
            )));
        }
        Ok(Self { lambda, gamma })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Location of the map's pole, `−γ/(λ−γ)`, or None when `λ = γ`.
    pub fn pole(&self) -> Option<f64> {
        if self.lambda == self.gamma {
            None
        } else {
            Some(-self.gamma / (self.lambda - self.gamma))
        }
    }
}

/// `θ ↦ θλ / (θλ + (1−θ)γ)`.
pub fn theta_map(params: &ThetaMapParams, theta: f64) -> Result<f64> {
    let denominator = theta * params.lambda + (1.0 - theta) * params.gamma;
    if denominator.abs() <= DENOMINATOR_FLOOR {
        return Err(Error::NumericalFailure(format!(
            "theta map pole hit at theta = {theta}"
        )));
    }
    Ok(theta * params.lambda / denominator)
}

/// Cobweb iterates of the scalar map, with early stop on escape or pole.
#[derive(Debug, Clone, PartialEq)]
pub struct CobwebTrace {
    /// `θ_0 .. θ_k` for the steps actually taken.
    pub thetas: Vec<f64>,
    /// True when the trace stopped early: `|θ| > 1e6` or a pole was hit.
    pub diverged: bool,
}

/// Iterates the scalar map from `theta0` for up to `steps` applications.
pub fn cobweb_iterates(params: &ThetaMapParams, theta0: f64, steps: usize) -> CobwebTrace {
    let mut thetas = vec![theta0];
    let mut diverged = theta0.abs() > COBWEB_ESCAPE;
    if !diverged {
        for _ in 0..steps {
            match theta_map(params, *thetas.last().expect("trace is non-empty")) {
                Ok(next) => {
                    thetas.push(next);
                    if next.abs() > COBWEB_ESCAPE {
                        diverged = true;
                        break;
                    }
                }
                Err(_) => {
                    diverged = true;
                    break;
                }
            }
        }
    }
    CobwebTrace { thetas, diverged }
}
