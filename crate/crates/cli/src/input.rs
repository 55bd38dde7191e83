//! Parsing of estimate inputs: a descending spectrum, possibly wrapped in
//! an object, or a symmetric covariance matrix to eigendecompose first.

use std::path::Path;

use serde::Deserialize;

use eigadm_core::{eig_sym_desc, Spectrum, SymmetricMatrix};

use crate::commands::CliError;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Tagged {
    #[serde(default)]
    spectrum: Option<Vec<f64>>,
    #[serde(default)]
    matrix: Option<Vec<Vec<f64>>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawInput {
    Bare(Vec<f64>),
    Tagged(Tagged),
}

/// Read the sample eigenvalues from a JSON file. A matrix input is
/// eigendecomposed; a vector input must already be descending and positive.
pub fn read_spectrum(path: &Path) -> Result<Spectrum, CliError> {
    let body = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    let raw: RawInput = serde_json::from_str(&body).map_err(|e| {
        CliError::usage(format!("invalid input {}: {e}", path.display()))
    })?;
    match raw {
        RawInput::Bare(values) => Ok(Spectrum::sample(values)?),
        RawInput::Tagged(Tagged { spectrum: Some(values), matrix: None }) => {
            Ok(Spectrum::sample(values)?)
        }
        RawInput::Tagged(Tagged { spectrum: None, matrix: Some(rows) }) => {
            let m = SymmetricMatrix::from_rows(&rows)?;
            Ok(eig_sym_desc(&m)?)
        }
        _ => Err(CliError::usage(
            "input must contain exactly one of \"spectrum\" or \"matrix\"",
        )),
    }
}
