//! Input documents: a JSON object with key `A` and exactly one of
//! `C` (output pair), `B` (input pair), or `c` (positive-systems mode).
//! Matrices are row-major nested arrays; `c` is a flat array.

use lyapcert_core::linalg::Matrix;
use serde_json::Value;

use crate::CliError;

/// A validated input document; the mode is inferred from which of the
/// three optional keys was present.
#[derive(Debug, Clone)]
pub enum InputDocument {
    /// `{"A": ..., "C": ...}` — the output pair `(A, C)`.
    Output { a: Matrix, c: Matrix },
    /// `{"A": ..., "B": ...}` — the input pair `(A, B)`, handled through
    /// its dual `(Aᵀ, Bᵀ)`.
    Input { a: Matrix, b: Matrix },
    /// `{"A": ..., "c": ...}` — single-output positive-systems mode.
    Positive { a: Matrix, c: Vec<f64> },
}

fn input_err(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

fn matrix_from_value(key: &str, value: &Value) -> Result<Matrix, CliError> {
    let rows = value
        .as_array()
        .ok_or_else(|| input_err(format!("matrix {key} must be an array of rows")))?;
    if rows.is_empty() {
        return Err(input_err(format!("matrix {key} must have at least one row")));
    }
    let mut nested: Vec<Vec<f64>> = Vec::with_capacity(rows.len());
    for row in rows {
        let cells = row
            .as_array()
            .ok_or_else(|| input_err(format!("matrix {key} rows must be arrays of numbers")))?;
        let mut parsed = Vec::with_capacity(cells.len());
        for cell in cells {
            parsed.push(cell.as_f64().ok_or_else(|| {
                input_err(format!("matrix {key} entries must be finite numbers"))
            })?);
        }
        nested.push(parsed);
    }
    let width = nested[0].len();
    if width == 0 {
        return Err(input_err(format!("matrix {key} must have at least one column")));
    }
    if nested.iter().any(|r| r.len() != width) {
        return Err(input_err(format!("ragged matrix {key}")));
    }
    Matrix::from_nested(&nested).map_err(|e| input_err(format!("matrix {key}: {e}")))
}

fn vector_from_value(key: &str, value: &Value) -> Result<Vec<f64>, CliError> {
    let cells = value
        .as_array()
        .ok_or_else(|| input_err(format!("vector {key} must be a flat array of numbers")))?;
    if cells.is_empty() {
        return Err(input_err(format!("vector {key} must be non-empty")));
    }
    cells
        .iter()
        .map(|cell| {
            cell.as_f64()
                .ok_or_else(|| input_err(format!("vector {key} entries must be finite numbers")))
        })
        .collect()
}

/// Parses and validates a UTF-8 JSON input document.
pub fn parse_input(bytes: &[u8]) -> Result<InputDocument, CliError> {
    let value: Value = serde_json::from_slice(bytes)
        .map_err(|e| input_err(format!("malformed JSON: {e}")))?;
    let object = value
        .as_object()
        .ok_or_else(|| input_err("input must be a JSON object"))?;

    for key in object.keys() {
        if !matches!(key.as_str(), "A" | "B" | "C" | "c") {
            return Err(input_err(format!("unexpected key \"{key}\"")));
        }
    }
    let a_value = object
        .get("A")
        .ok_or_else(|| input_err("missing required key \"A\""))?;
    let mode_keys: Vec<&str> = ["C", "B", "c"]
        .into_iter()
        .filter(|k| object.contains_key(*k))
        .collect();
    if mode_keys.len() != 1 {
        return Err(input_err("exactly one of C, B, c required"));
    }

    let a = matrix_from_value("A", a_value)?;
    if !a.is_square() {
        return Err(input_err(format!(
            "matrix A must be square, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();

    match mode_keys[0] {
        "C" => {
            let c = matrix_from_value("C", &object["C"])?;
            if c.cols() != n {
                return Err(input_err(format!(
                    "matrix C must have {n} columns to match A, got {}",
                    c.cols()
                )));
            }
            Ok(InputDocument::Output { a, c })
        }
        "B" => {
            let b = matrix_from_value("B", &object["B"])?;
            if b.rows() != n {
                return Err(input_err(format!(
                    "matrix B must have {n} rows to match A, got {}",
                    b.rows()
                )));
            }
            Ok(InputDocument::Input { a, b })
        }
        _ => {
            let c = vector_from_value("c", &object["c"])?;
            if c.len() != n {
                return Err(input_err(format!(
                    "vector c must have length {n} to match A, got {}",
                    c.len()
                )));
            }
            Ok(InputDocument::Positive { a, c })
        }
    }
}
