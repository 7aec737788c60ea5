//! JSON config files with flag overrides, and the set descriptions they share.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use voltype_core::measure::SpectralMeasure;
use voltype_core::{build_sharpness_set, control_set, ControlKind, LatticeSpec, ThickenedSet};

use crate::Failure;

/// Loads the config file (if any), overlays every flag that was given, and
/// deserializes the result. Flags win over the file.
pub fn resolve<T: DeserializeOwned>(
    file: Option<&Path>,
    flags: &impl Serialize,
) -> Result<T, Failure> {
    let mut merged = match file {
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?
        }
        None => Value::Object(Default::default()),
    };
    let Value::Object(base) = &mut merged else {
        return Err(Failure::Usage("config file must hold a JSON object".into()));
    };
    let Value::Object(over) =
        serde_json::to_value(flags).map_err(|e| Failure::Internal(e.to_string()))?
    else {
        unreachable!("flag structs serialize to objects");
    };
    for (k, v) in over {
        if !v.is_null() {
            base.insert(k, v);
        }
    }
    serde_json::from_value(merged).map_err(|e| Failure::Usage(format!("config: {e}")))
}

pub fn parse_json(s: &str) -> Result<Value, String> {
    serde_json::from_str(s).map_err(|e| e.to_string())
}

fn third() -> f64 {
    1.0 / 3.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetConfig {
    /// Spherical image of the half-cube lattice, thickened by `q^{-d/s}`.
    Sharpness { q: u32, s: f64, d: usize },
    CantorProduct {
        d: usize,
        depth: u32,
        #[serde(default = "third")]
        ratio: f64,
    },
    AnnulusUniform {
        d: usize,
        n: usize,
        #[serde(default)]
        seed: u64,
    },
    Hyperplane {
        normal: Vec<f64>,
        n: usize,
        #[serde(default)]
        seed: u64,
    },
    /// Centers read from a headerless CSV point file.
    Points {
        path: PathBuf,
        #[serde(default)]
        radius: f64,
    },
}

impl SetConfig {
    pub fn build(&self) -> Result<ThickenedSet, Failure> {
        Ok(match self {
            SetConfig::Sharpness { q, s, d } => build_sharpness_set(&LatticeSpec::new(*q, *s, *d)?),
            SetConfig::CantorProduct { d, depth, ratio } => {
                control_set(&ControlKind::CantorProduct {
                    d: *d,
                    depth: *depth,
                    ratio: *ratio,
                })?
            }
            SetConfig::AnnulusUniform { d, n, seed } => {
                control_set(&ControlKind::AnnulusUniform {
                    d: *d,
                    n: *n,
                    seed: *seed,
                })?
            }
            SetConfig::Hyperplane { normal, n, seed } => control_set(&ControlKind::Hyperplane {
                normal: normal.clone(),
                n: *n,
                seed: *seed,
            })?,
            SetConfig::Points { path, radius } => {
                let pts = read_points(path)?;
                let name = path
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .unwrap_or("points");
                ThickenedSet::from_points(&pts, *radius, name)?
            }
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureConfig {
    Uniform {
        #[serde(default)]
        start: f64,
        #[serde(default = "one")]
        end: f64,
    },
    Cantor {
        depth: u32,
        #[serde(default = "third")]
        ratio: f64,
    },
    Set {
        set: SetConfig,
    },
}

fn one() -> f64 {
    1.0
}

impl MeasureConfig {
    pub fn build(&self) -> Result<SpectralMeasure, Failure> {
        Ok(match self {
            MeasureConfig::Uniform { start, end } => SpectralMeasure::Uniform {
                start: *start,
                end: *end,
            },
            MeasureConfig::Cantor { depth, ratio } => SpectralMeasure::Cantor {
                depth: *depth,
                ratio: *ratio,
            },
            MeasureConfig::Set { set } => SpectralMeasure::Set(set.build()?),
        })
    }
}

/// Headerless CSV, one point per row, all rows the same width.
pub fn read_points(path: &Path) -> Result<Vec<Vec<f64>>, Failure> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let mut points: Vec<Vec<f64>> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let p = record
            .iter()
            .map(|c| c.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Failure::Usage(format!("{}:{}: {e}", path.display(), line + 1)))?;
        if let Some(first) = points.first() {
            if first.len() != p.len() {
                return Err(voltype_core::Error::DimensionMismatch {
                    expected: first.len(),
                    found: p.len(),
                }
                .into());
            }
        }
        points.push(p);
    }
    if points.is_empty() {
        return Err(Failure::Usage(format!("{}: no points", path.display())));
    }
    Ok(points)
}

/// Headerless CSV of 0-based point indices, one tuple per row.
pub fn read_tuples(path: &Path, k: usize, num_points: usize) -> Result<Vec<Vec<usize>>, Failure> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let mut tuples = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let t = record
            .iter()
            .map(|c| c.parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Failure::Usage(format!("{}:{}: {e}", path.display(), line + 1)))?;
        if t.len() != k {
            return Err(Failure::Usage(format!(
                "{}:{}: expected {k} indices, found {}",
                path.display(),
                line + 1,
                t.len()
            )));
        }
        if let Some(bad) = t.iter().find(|&&i| i >= num_points) {
            return Err(Failure::Usage(format!(
                "{}:{}: index {bad} out of range for {num_points} points",
                path.display(),
                line + 1
            )));
        }
        tuples.push(t);
    }
    Ok(tuples)
}
