use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// JSON metadata written by `build-projector` and `verify-bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub command: String,
    pub group: String,
    pub kind: String,
    pub route: String,
    pub cutoff_b: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub softness: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub smooth_s: Option<f64>,
    /// Singular values (SVD route) or per-coordinate eigenvalue-modulus sums
    /// (Schur route), ascending.
    pub spectrum: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_relative_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fitted_quadratic: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
}

impl ReportFile {
    pub fn write(&self, path: &Path) -> CliResult<()> {
        let text = serde_json::to_string_pretty(self)? + "\n";
        fs::write(path, text).map_err(|e| CliError::io(path, e))
    }
}
