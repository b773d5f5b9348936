//! JSON group descriptions:
//! `{"kind", "params", "r_g"?, "generators_in"?, "generators_out"?}`.
//!
//! Catalog kinds are `so2`, `so3`, `so3_z`, `so_n {n}`, `cyclic_grid {k, n_rot}`,
//! `cyclic_vec {n}` and `shift_circulant {n}`. `custom_continuous` takes Lie
//! algebra generators plus `r_g`; `custom_discrete` takes the representation
//! matrices of a generating set. For discrete kinds `generators_out` also
//! holds representation matrices.

use std::fs;
use std::path::Path;

use equiproj::groups::forward_difference;
use equiproj::{DenseMatrix, GroupSpec};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpecFile {
    pub kind: String,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators_in: Option<Vec<Vec<Vec<f64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators_out: Option<Vec<Vec<Vec<f64>>>>,
}

fn matrix(rows: &[Vec<f64>]) -> CliResult<DenseMatrix> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || cols == 0 || rows.iter().any(|r| r.len() != cols) {
        return Err(CliError::Input("generator matrices must be non-empty and rectangular".into()));
    }
    Ok(DenseMatrix::from_rows(rows))
}

fn matrices(list: &[Vec<Vec<f64>>]) -> CliResult<Vec<DenseMatrix>> {
    if list.is_empty() {
        return Err(CliError::Input("generator list is empty".into()));
    }
    list.iter().map(|m| matrix(m)).collect()
}

fn differences(list: &[Vec<Vec<f64>>]) -> CliResult<Vec<DenseMatrix>> {
    matrices(list)?
        .iter()
        .map(|m| forward_difference(m).map_err(CliError::from))
        .collect()
}

impl GroupSpecFile {
    fn param(&self, name: &str) -> CliResult<usize> {
        self.params
            .get(name)
            .and_then(Value::as_u64)
            .map(|v| v as usize)
            .ok_or_else(|| CliError::Input(format!("group kind {:?} needs integer param {name:?}", self.kind)))
    }

    pub fn to_spec(&self) -> CliResult<GroupSpec> {
        let catalog = |spec: GroupSpec| -> CliResult<GroupSpec> {
            if self.generators_in.is_some() {
                return Err(CliError::Input(format!(
                    "catalog kind {:?} does not take generators_in",
                    self.kind
                )));
            }
            match &self.generators_out {
                None => Ok(spec),
                Some(out) => {
                    let gens = if spec.continuous { matrices(out)? } else { differences(out)? };
                    Ok(spec.with_output(gens)?)
                }
            }
        };
        let spec = match self.kind.as_str() {
            "so2" => catalog(GroupSpec::so2())?,
            "so3" => catalog(GroupSpec::so3())?,
            "so3_z" => catalog(GroupSpec::so3_z())?,
            "so_n" => catalog(GroupSpec::so_n(self.param("n")?)?)?,
            "cyclic_grid" => catalog(GroupSpec::cyclic_grid(self.param("k")?, self.param("n_rot")?)?)?,
            "cyclic_vec" => catalog(GroupSpec::cyclic_vec(self.param("n")?)?)?,
            "shift_circulant" => catalog(GroupSpec::shift_circulant(self.param("n")?)?)?,
            "custom_continuous" => {
                let gin = self
                    .generators_in
                    .as_deref()
                    .ok_or_else(|| CliError::Input("custom_continuous needs generators_in".into()))?;
                let r_g = self
                    .r_g
                    .ok_or_else(|| CliError::Input("custom_continuous needs r_g".into()))?;
                if !(r_g > 0.0 && r_g.is_finite()) {
                    return Err(CliError::Input(format!("r_g must be positive, got {r_g}")));
                }
                let gout = self.generators_out.as_deref().map(matrices).transpose()?;
                GroupSpec::custom_continuous(matrices(gin)?, gout, r_g)?
            }
            "custom_discrete" => {
                let gin = self
                    .generators_in
                    .as_deref()
                    .ok_or_else(|| CliError::Input("custom_discrete needs generators_in".into()))?;
                let gout = self.generators_out.as_deref().map(differences).transpose()?;
                GroupSpec::custom_discrete(differences(gin)?, gout)?
            }
            other => return Err(CliError::Input(format!("unknown group kind {other:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

pub fn read(path: &Path) -> CliResult<GroupSpec> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str::<GroupSpecFile>(&text)?.to_spec()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(json: &str) -> CliResult<GroupSpec> {
        serde_json::from_str::<GroupSpecFile>(json)?.to_spec()
    }

    #[test]
    fn catalog_kinds() {
        assert_eq!(parse(r#"{"kind": "so3"}"#).unwrap().n_g(), 3);
        assert_eq!(parse(r#"{"kind": "so3_z"}"#).unwrap().d_in(), 3);
        let g = parse(r#"{"kind": "cyclic_grid", "params": {"k": 3, "n_rot": 4}}"#).unwrap();
        assert_eq!(g.d_in(), 9);
        assert!(g.is_invariance());
        assert_eq!(parse(r#"{"kind": "so_n", "params": {"n": 5}}"#).unwrap().n_g(), 10);
    }

    #[test]
    fn custom_kinds() {
        let c = parse(r#"{"kind": "custom_continuous", "r_g": 3.14, "generators_in": [[[0, -1], [1, 0]]]}"#).unwrap();
        assert!(c.continuous);
        let d = parse(r#"{"kind": "custom_discrete", "generators_in": [[[0, 1], [1, 0]]]}"#).unwrap();
        assert!(!d.continuous);
        assert_eq!(d.generators_in[0][(0, 0)], -1.0);
    }

    #[test]
    fn rejects_invalid_specs() {
        assert!(parse(r#"{"kind": "so4"}"#).is_err());
        assert!(parse(r#"{"kind": "so_n"}"#).is_err());
        assert!(parse(r#"{"kind": "custom_continuous", "generators_in": [[[0, -1], [1, 0]]]}"#).is_err());
        assert!(parse(r#"{"kind": "custom_continuous", "r_g": 1, "generators_in": [[[0, -1, 2], [1, 0]]]}"#).is_err());
        assert!(parse(r#"{"kind": "so2", "extra": 1}"#).is_err());
        assert!(parse(r#"{"kind": "so2", "generators_in": [[[0]]]}"#).is_err());
    }
}
