//! Deterministic report rendering. Floating-point values are printed with
//! 17 significant digits so reports are byte-stable and round-trip
//! exactly through any JSON parser.

use lyapcert_core::linalg::SymmetricMatrix;

use crate::triad::{SolveOutcome, TriadReport};

/// Output format for triad reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Text,
}

/// 17 significant digits, scientific notation. Valid as a JSON number.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// `[[...], [...]]` with 17-digit entries.
pub fn matrix_json(m: &SymmetricMatrix) -> String {
    let n = m.dim();
    let rows: Vec<String> = (0..n)
        .map(|i| {
            let cells: Vec<String> = (0..n).map(|j| fmt_float(m.get(i, j))).collect();
            format!("[{}]", cells.join(","))
        })
        .collect();
    format!("[{}]", rows.join(","))
}

pub fn vector_json(v: &[f64]) -> String {
    let cells: Vec<String> = v.iter().map(|&x| fmt_float(x)).collect();
    format!("[{}]", cells.join(","))
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

fn outcome_json(outcome: &SolveOutcome, method: &str) -> String {
    match outcome {
        SolveOutcome::Solved {
            q,
            residual,
            definiteness,
            min_eigenvalue,
            alpha,
            lambda,
        } => {
            let mut fields = vec![
                ("status".to_string(), "\"solved\"".to_string()),
                ("method".to_string(), json_string(method)),
                ("q".to_string(), matrix_json(q)),
                ("residual".to_string(), fmt_float(*residual)),
                (
                    "definiteness".to_string(),
                    json_string(definiteness.label()),
                ),
                ("min_eigenvalue".to_string(), fmt_float(*min_eigenvalue)),
            ];
            if let Some(alpha) = alpha {
                fields.push(("alpha".to_string(), fmt_float(*alpha)));
            }
            if let Some(lambda) = lambda {
                fields.push(("lambda".to_string(), fmt_float(*lambda)));
            }
            let body: Vec<String> = fields
                .into_iter()
                .map(|(k, v)| format!("\"{k}\":{v}"))
                .collect();
            format!("{{{}}}", body.join(","))
        }
        SolveOutcome::Error { message } => format!(
            "{{\"status\":\"error\",\"method\":{},\"message\":{}}}",
            json_string(method),
            json_string(message)
        ),
        SolveOutcome::Skipped { reason } => format!(
            "{{\"status\":\"skipped\",\"method\":{},\"reason\":{}}}",
            json_string(method),
            json_string(reason)
        ),
    }
}

/// Serializes a triad report. The JSON layout is fixed: keys
/// `stability`, `observability`, `lyapunov`, `consistency`, in that
/// order, with no run-dependent content.
pub fn render_report(report: &TriadReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let stability = format!(
                "{{\"verdict\":{},\"spectral_radius\":{}}}",
                report.stability.stable,
                fmt_float(report.stability.spectral_radius)
            );
            let observability = format!(
                "{{\"verdict\":{},\"rank\":{}}}",
                report.observability.observable, report.observability.rank
            );
            let lyapunov = format!(
                "{{\"positive_definite\":{},\"direct\":{},\"fixed_point\":{}}}",
                report.positive_definite,
                outcome_json(&report.direct, "direct"),
                outcome_json(&report.fixed_point, "fixed-point")
            );
            format!(
                "{{\"stability\":{stability},\"observability\":{observability},\
                 \"lyapunov\":{lyapunov},\"consistency\":{}}}\n",
                report.consistency
            )
        }
        ReportFormat::Text => {
            let mut out = String::new();
            out.push_str(&format!(
                "(i)   asymptotically stable: {} (spectral radius {})\n",
                report.stability.stable,
                fmt_float(report.stability.spectral_radius)
            ));
            out.push_str(&format!(
                "(ii)  observable: {} (rank {})\n",
                report.observability.observable, report.observability.rank
            ));
            let evidence = match &report.direct {
                SolveOutcome::Solved {
                    residual,
                    min_eigenvalue,
                    definiteness,
                    ..
                } => format!(
                    "direct residual {}, min eigenvalue {}, {}",
                    fmt_float(*residual),
                    fmt_float(*min_eigenvalue),
                    definiteness.label()
                ),
                SolveOutcome::Error { message } => format!("direct solve failed: {message}"),
                SolveOutcome::Skipped { reason } => format!("direct solve skipped: {reason}"),
            };
            out.push_str(&format!(
                "(iii) positive definite solution: {} ({evidence})\n",
                report.positive_definite
            ));
            match &report.fixed_point {
                SolveOutcome::Solved { alpha, lambda, .. } => {
                    out.push_str(&format!(
                        "      fixed-point cross-check: solved (alpha {}, lambda {})\n",
                        fmt_float(alpha.unwrap_or(f64::NAN)),
                        fmt_float(lambda.unwrap_or(f64::NAN))
                    ));
                }
                SolveOutcome::Error { message } => {
                    out.push_str(&format!("      fixed-point cross-check: failed: {message}\n"));
                }
                SolveOutcome::Skipped { reason } => {
                    out.push_str(&format!("      fixed-point cross-check: skipped: {reason}\n"));
                }
            }
            out.push_str(&format!("consistency: {}\n", report.consistency));
            out
        }
    }
}
