//! The three-way equivalence report: asymptotic stability (i),
//! observability (ii), and existence of a positive definite Lyapunov
//! solution (iii). Any two of the conditions imply the third, so a report
//! in which exactly two hold is an arithmetic bug, never a valid state.

use lyapcert_core::linalg::{Definiteness, Matrix, SymmetricMatrix};
use lyapcert_core::solver::{
    solve_direct, solve_via_alpha_bisection, DEFAULT_LAMBDA_TOL,
};
use lyapcert_core::system::{
    dualize, is_asymptotically_stable, is_observable, ControlSystem, LtiSystem,
    ObservabilityVerdict, StabilityVerdict,
};

use crate::input::InputDocument;
use crate::CliError;

/// Outcome of one solver inside the report. Failures are recorded, not
/// propagated; skipped methods say why.
#[derive(Debug, Clone)]
pub enum SolveOutcome {
    Solved {
        q: SymmetricMatrix,
        residual: f64,
        definiteness: Definiteness,
        min_eigenvalue: f64,
        /// Present for the fixed-point route: the bisected `α*` and the
        /// normalizer `λ` at the converged point.
        alpha: Option<f64>,
        lambda: Option<f64>,
    },
    Error {
        message: String,
    },
    Skipped {
        reason: String,
    },
}

/// Per-condition verdicts with the numerical evidence behind them.
#[derive(Debug, Clone)]
pub struct TriadReport {
    pub stability: StabilityVerdict,
    pub observability: ObservabilityVerdict,
    /// The direct Kronecker solve, the arbiter of condition (iii).
    pub direct: SolveOutcome,
    /// Fixed-point cross-check, run only when (i) and (ii) both hold.
    pub fixed_point: SolveOutcome,
    /// Condition (iii): the direct solve produced a positive definite Q.
    pub positive_definite: bool,
    /// True unless exactly two of the three conditions hold.
    pub consistency: bool,
}

impl TriadReport {
    /// The dimension-checked system a document certifies: B-mode
    /// documents are dualized, positive-mode vectors become a 1×n output
    /// row.
    pub fn system_of(doc: &InputDocument) -> LtiSystem {
        match doc {
            InputDocument::Output { a, c } => {
                LtiSystem::new(a.clone(), c.clone()).expect("parse validated dimensions")
            }
            InputDocument::Input { a, b } => {
                let cs = ControlSystem::new(a.clone(), b.clone())
                    .expect("parse validated dimensions");
                dualize(&cs)
            }
            InputDocument::Positive { a, c } => {
                let row = Matrix::from_rows(1, c.len(), c).expect("parse validated entries");
                LtiSystem::new(a.clone(), row).expect("parse validated dimensions")
            }
        }
    }
}

/// Evaluates the triad on a validated document.
pub fn run_triad(doc: &InputDocument) -> TriadReport {
    let sys = TriadReport::system_of(doc);
    let stability = is_asymptotically_stable(&sys).expect("A is square");
    let observability = is_observable(&sys);

    let direct = match solve_direct(&sys) {
        Ok(sol) => SolveOutcome::Solved {
            residual: sol.residual,
            definiteness: sol.definiteness,
            min_eigenvalue: sol.min_eigenvalue,
            q: sol.q,
            alpha: None,
            lambda: None,
        },
        Err(e) => SolveOutcome::Error {
            message: e.to_string(),
        },
    };

    let fixed_point = if stability.stable && observability.observable {
        match solve_via_alpha_bisection(&sys, DEFAULT_LAMBDA_TOL) {
            Ok(result) => SolveOutcome::Solved {
                residual: result.solution.residual,
                definiteness: result.solution.definiteness,
                min_eigenvalue: result.solution.min_eigenvalue,
                q: result.solution.q,
                alpha: Some(result.fixed_point.alpha),
                lambda: Some(result.fixed_point.lambda),
            },
            Err(e) => SolveOutcome::Error {
                message: e.to_string(),
            },
        }
    } else {
        SolveOutcome::Skipped {
            reason: "requires asymptotic stability and observability".into(),
        }
    };

    let positive_definite = matches!(
        direct,
        SolveOutcome::Solved {
            definiteness: Definiteness::PositiveDefinite,
            ..
        }
    );
    let trues = [stability.stable, observability.observable, positive_definite]
        .iter()
        .filter(|&&v| v)
        .count();
    TriadReport {
        stability,
        observability,
        direct,
        fixed_point,
        positive_definite,
        consistency: trues != 2,
    }
}

/// Exit-code mapping for a finished report: an inconsistent triad is the
/// one state a caller must never treat as success.
pub fn check_consistency(report: &TriadReport) -> Result<(), CliError> {
    if report.consistency {
        Ok(())
    } else {
        Err(CliError::Inconsistency(format!(
            "exactly two of the three conditions hold (stability {}, observability {}, \
             positive definite solution {})",
            report.stability.stable, report.observability.observable, report.positive_definite
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::input::parse_input;

    #[test]
    fn scalar_system_has_all_three() {
        let doc = parse_input(br#"{"A": [[0.5]], "C": [[1]]}"#).unwrap();
        let report = run_triad(&doc);
        assert!(report.stability.stable);
        assert!(report.observability.observable);
        assert!(report.positive_definite);
        assert!(report.consistency);
        match &report.direct {
            SolveOutcome::Solved { q, .. } => {
                assert!((q.get(0, 0) - 4.0 / 3.0).abs() <= 1e-10)
            }
            other => panic!("expected a direct solution, got {other:?}"),
        }
        match &report.fixed_point {
            SolveOutcome::Solved { alpha, lambda, .. } => {
                assert!((alpha.unwrap() - 0.75).abs() <= 1e-8);
                assert!((lambda.unwrap() - 1.0).abs() <= 1e-10);
            }
            other => panic!("expected a fixed-point solution, got {other:?}"),
        }
    }

    #[test]
    fn identity_dynamics_fail_every_condition_consistently() {
        let doc = parse_input(br#"{"A": [[1, 0], [0, 1]], "C": [[1, 0]]}"#).unwrap();
        let report = run_triad(&doc);
        assert!(!report.stability.stable);
        assert!(!report.observability.observable);
        assert!(!report.positive_definite);
        assert!(matches!(report.direct, SolveOutcome::Error { .. }));
        assert!(matches!(report.fixed_point, SolveOutcome::Skipped { .. }));
        assert!(report.consistency);
    }

    #[test]
    fn nilpotent_pair_certifies_with_identity_gramian() {
        let doc = parse_input(br#"{"A": [[0, 1], [0, 0]], "C": [[1, 0]]}"#).unwrap();
        let report = run_triad(&doc);
        assert!(report.stability.stable);
        assert!(report.observability.observable);
        assert!(report.positive_definite);
        assert!(report.consistency);
        match &report.direct {
            SolveOutcome::Solved { q, .. } => {
                for i in 0..2 {
                    for j in 0..2 {
                        let want = if i == j { 1.0 } else { 0.0 };
                        assert!((q.get(i, j) - want).abs() <= 1e-10);
                    }
                }
            }
            other => panic!("expected a direct solution, got {other:?}"),
        }
    }

    #[test]
    fn b_mode_equals_c_mode_on_the_dual() {
        let b_doc = parse_input(br#"{"A": [[0.3, 0.1], [0.0, 0.4]], "B": [[1], [2]]}"#).unwrap();
        let c_doc = parse_input(br#"{"A": [[0.3, 0.0], [0.1, 0.4]], "C": [[1, 2]]}"#).unwrap();
        let b_report = run_triad(&b_doc);
        let c_report = run_triad(&c_doc);
        assert!(
            (b_report.stability.spectral_radius - c_report.stability.spectral_radius).abs()
                <= 1e-9
        );
        assert_eq!(b_report.observability.rank, c_report.observability.rank);
        match (&b_report.direct, &c_report.direct) {
            (SolveOutcome::Solved { q: qb, .. }, SolveOutcome::Solved { q: qc, .. }) => {
                for i in 0..2 {
                    for j in 0..2 {
                        assert!((qb.get(i, j) - qc.get(i, j)).abs() <= 1e-9);
                    }
                }
            }
            other => panic!("expected solved pairs, got {other:?}"),
        }
    }

    #[test]
    fn positive_mode_runs_the_triad_on_the_row_output() {
        let doc = parse_input(br#"{"A": [[0.0, 0.5], [0.5, 0.0]], "c": [1, 0]}"#).unwrap();
        let report = run_triad(&doc);
        assert!(report.stability.stable);
        assert!(report.observability.observable);
        assert!(report.positive_definite);
        assert!(report.consistency);
    }

    #[test]
    fn consistency_gate_raises_exit_three() {
        let doc = parse_input(br#"{"A": [[0.5]], "C": [[1]]}"#).unwrap();
        let mut report = run_triad(&doc);
        assert!(check_consistency(&report).is_ok());
        // Synthetic corruption: flip one verdict to fabricate a
        // two-true-one-false pattern.
        report.positive_definite = false;
        report.consistency = false;
        let err = check_consistency(&report).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }
}
