//! Reading coefficient matrices and vector systems from text.
//!
//! Matrices come either as CSV (`n` rows of `n` comma-separated reals) or
//! as JSON `{"n": 3, "upper": [a_12, a_13, a_23]}`. Vector systems are JSON
//! `{"vectors": [[...], ...]}`.

use serde::Deserialize;

use super::{ChaosCoefficients, VectorSystem};
use crate::{Error, Result};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UpperJson {
    n: usize,
    upper: Vec<f64>,
}

pub fn parse_matrix_csv(text: &str) -> Result<ChaosCoefficients> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Input(format!("CSV row {}: {e}", line + 1)))?;
        let row = record
            .iter()
            .map(|field| {
                field.parse::<f64>().map_err(|_| Error::Input(format!("CSV row {}: bad number {field:?}", line + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    ChaosCoefficients::from_dense(&rows)
}

pub fn parse_matrix_json(text: &str) -> Result<ChaosCoefficients> {
    let raw: UpperJson = serde_json::from_str(text).map_err(|e| Error::Input(format!("matrix JSON: {e}")))?;
    ChaosCoefficients::from_upper(raw.n, &raw.upper)
}

/// JSON when the first non-blank character is `{`, CSV otherwise.
pub fn parse_matrix(text: &str) -> Result<ChaosCoefficients> {
    if text.trim_start().starts_with('{') {
        parse_matrix_json(text)
    } else {
        parse_matrix_csv(text)
    }
}

pub fn parse_vectors_json(text: &str) -> Result<VectorSystem> {
    serde_json::from_str(text).map_err(|e| Error::Input(format!("vectors JSON: {e}")))
}
