//! Grayscale `P2` images scaled linearly from `[min, max]` to `[0, 255]`,
//! with the bounds recorded in a JSON sidecar.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use equiproj::DenseMatrix;
use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Serialize)]
pub struct Sidecar {
    pub width: usize,
    pub height: usize,
    pub min: f64,
    pub max: f64,
}

pub fn encode(img: &DenseMatrix) -> (String, Sidecar) {
    let min = img.as_slice().iter().copied().fold(f64::INFINITY, f64::min);
    let max = img.as_slice().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = max - min;
    let mut out = format!("P2\n{} {}\n255\n", img.cols(), img.rows());
    for i in 0..img.rows() {
        let px: Vec<String> = img
            .row(i)
            .iter()
            .map(|v| {
                let level = if span > 0.0 { ((v - min) / span * 255.0).round() } else { 0.0 };
                (level as u8).to_string()
            })
            .collect();
        writeln!(out, "{}", px.join(" ")).expect("string write");
    }
    let sidecar = Sidecar {
        width: img.cols(),
        height: img.rows(),
        min,
        max,
    };
    (out, sidecar)
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

pub fn write(path: &Path, img: &DenseMatrix) -> CliResult<()> {
    let (text, sidecar) = encode(img);
    fs::write(path, text).map_err(|e| CliError::io(path, e))?;
    let side = sidecar_path(path);
    fs::write(&side, serde_json::to_string_pretty(&sidecar)?).map_err(|e| CliError::io(&side, e))
}
