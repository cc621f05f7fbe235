//! Solvers and certificates for the discrete-time Lyapunov equation
//! `AᵀQA − Q + CᵀC = 0`.
//!
//! The crate is organized around four pieces:
//!
//! - [`linalg`]: dense real matrices plus the spectral primitives
//!   (eigenvalues, rank, definiteness) everything else consumes.
//! - [`system`]: the discrete-time system model `x_{k+1} = Ax_k`,
//!   `y_k = Cx_k`, with direct stability and observability tests.
//! - [`solver`]: the trace-normalized fixed-point map on the unit-trace
//!   PSD slice, Picard iteration, bisection of the normalizer to 1, two
//!   independent direct solvers, and the scalar conjugated line map.
//! - [`positive`]: the internally-positive analog on the unit simplex
//!   with the linear certificate `q = c + qA`.

pub mod error;
pub mod linalg;
pub mod positive;
pub mod solver;
pub mod system;

pub use error::Error;
pub use linalg::{Definiteness, Matrix, SymmetricMatrix};
pub use system::{ControlSystem, LtiSystem};
