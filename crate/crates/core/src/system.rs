//! Discrete-time system model: `x_{k+1} = A x_k`, `y_k = C x_k`, plus the
//! input-side pair `(A, B)` and its dualization to the output side.

use crate::error::{Error, Result};
use crate::linalg::{numeric_rank, spectral_radius, Matrix};

/// The output pair `(A, C)`: `A` is `n x n`, `C` is `p x n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LtiSystem {
    a: Matrix,
    c: Matrix,
}

impl LtiSystem {
    pub fn new(a: Matrix, c: Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension(format!(
                "state matrix A must be square, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        if c.cols() != a.rows() {
            return Err(Error::Dimension(format!(
                "output matrix C must have {} columns, got {}",
                a.rows(),
                c.cols()
            )));
        }
        Ok(Self { a, c })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn c(&self) -> &Matrix {
        &self.c
    }

    /// State dimension n.
    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    /// Output dimension p.
    pub fn outputs(&self) -> usize {
        self.c.rows()
    }
}

/// The input pair `(A, B)`: `A` is `n x n`, `B` is `n x m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSystem {
    a: Matrix,
    b: Matrix,
}

impl ControlSystem {
    pub fn new(a: Matrix, b: Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension(format!(
                "state matrix A must be square, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        if b.rows() != a.rows() {
            return Err(Error::Dimension(format!(
                "input matrix B must have {} rows, got {}",
                a.rows(),
                b.rows()
            )));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }
}

/// Stability verdict together with the computed spectral radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityVerdict {
    pub stable: bool,
    pub spectral_radius: f64,
}

/// Observability verdict together with the observability-matrix rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ObservabilityVerdict {
    pub observable: bool,
    pub rank: usize,
}

/// A simulated state/output trajectory `x_0..x_N`, `y_0..y_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<Vec<f64>>,
    pub outputs: Vec<Vec<f64>>,
}

/// True iff the spectral radius of `A` is strictly below 1.
pub fn is_asymptotically_stable(sys: &LtiSystem) -> Result<StabilityVerdict> {
    let radius = spectral_radius(sys.a())?;
    Ok(StabilityVerdict {
        stable: radius < 1.0,
        spectral_radius: radius,
    })
}

/// The stacked block matrix `[C; CA; ...; CA^{n-1}]` (`np x n`).
pub fn observability_matrix(sys: &LtiSystem) -> Matrix {
    let n = sys.dim();
    let p = sys.outputs();
    let mut block = sys.c().clone();
    let mut entries = Vec::with_capacity(n * p * n);
    for _ in 0..n {
        entries.extend(block.row_major());
        block = block.matmul(sys.a());
    }
    Matrix::from_rows(n * p, n, &entries).expect("stacked blocks have consistent shape")
}

/// True iff the observability matrix has full column rank n.
pub fn is_observable(sys: &LtiSystem) -> ObservabilityVerdict {
    let rank = numeric_rank(&observability_matrix(sys));
    ObservabilityVerdict {
        observable: rank == sys.dim(),
        rank,
    }
}

/// Maps the input pair `(A, B)` to the output pair `(Aᵀ, Bᵀ)`, so the
/// controllability questions reduce to observability ones.
pub fn dualize(cs: &ControlSystem) -> LtiSystem {
    LtiSystem {
        a: cs.a().transpose(),
        c: cs.b().transpose(),
    }
}

/// Runs the recursion for N steps from `x0`, returning N+1 states/outputs.
pub fn simulate(sys: &LtiSystem, x0: &[f64], steps: usize) -> Result<Trajectory> {
    let n = sys.dim();
    if x0.len() != n {
        return Err(Error::Dimension(format!(
            "initial state length {} does not match state dimension {n}",
            x0.len()
        )));
    }
    let mut states = Vec::with_capacity(steps + 1);
    let mut outputs = Vec::with_capacity(steps + 1);
    let mut x = Matrix::from_rows(n, 1, x0)?;
    for _ in 0..=steps {
        states.push(x.row_major());
        outputs.push(sys.c().matmul(&x).row_major());
        x = sys.a().matmul(&x);
    }
    Ok(Trajectory { states, outputs })
}
