//! Experiment parameters, shared by the config file and the command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use bergman_shift::coefficients::{parse_complex, ComplexValue};
use bergman_shift::report::fmt_complex;
use bergman_shift::{Complex64, ModelSpec};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};

use crate::error::CliError;

/// A measure model given as shorthand (`jacobi:a=0.5,b=0`) or as a JSON spec.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelArg(pub ModelSpec);

impl FromStr for ModelArg {
    type Err = bergman_shift::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse().map(ModelArg)
    }
}

impl Serialize for ModelArg {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ModelArg {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Spec(ModelSpec),
        }
        match Raw::deserialize(d)? {
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
            Raw::Spec(s) => Ok(ModelArg(s)),
        }
    }
}

/// A complex number such as `2+0i`, `-0.5i` or `0.3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexArg(pub Complex64);

impl FromStr for ComplexArg {
    type Err = bergman_shift::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_complex(s).map(ComplexArg)
    }
}

impl fmt::Display for ComplexArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_complex(self.0))
    }
}

impl Serialize for ComplexArg {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ComplexArg {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        ComplexValue::deserialize(d)?
            .value()
            .map(ComplexArg)
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PaperExample {
    /// Twisted half-line pair with identical ratio asymptotics.
    Degenerate,
    /// A sequence against its unit-modulus rotation.
    Alexandrov,
    /// A sequence against the same sequence with leading terms removed.
    Stripping,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    H,
    Weak,
    Cesaro,
    CesaroBound,
    Ratio,
    NormalizedRatio,
    Windows,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentSelection {
    Weak,
    Cesaro,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Circle,
    Jacobi,
}

/// Every experiment parameter. A config file holds the same keys (with
/// underscores) plus `operation`; flags override the file.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// JSON config file; its keys are overridden by flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Subcommand to execute (config files only).
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub operation: Option<String>,

    /// Measure model: shorthand like `jacobi:a=0.5,b=0` or a JSON spec.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelArg>,

    /// Second measure for comparisons.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model_b: Option<ModelArg>,

    /// Built-in comparison instead of explicit models.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub paper_example: Option<PaperExample>,

    /// Truncation size N.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,

    /// Index or degree n.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,

    /// Comma-separated list of n values.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_grid: Option<Vec<usize>>,

    /// Largest moment order or offset j.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_max: Option<usize>,

    /// Index shift between the two measures.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,

    /// Radius of the evaluation circle (default 2·R_est).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,

    /// Number of grid points G on the circle.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,

    /// Window half-width m.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width: Option<usize>,

    /// Convergence tolerance for right-limit detection.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,

    /// Random seed.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,

    /// Number of ensemble members (seeds seed, seed+1, ...).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runs: Option<usize>,

    /// Evaluation point.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<ComplexArg>,

    /// Use orthonormal instead of monic polynomials.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalized: Option<bool>,

    /// Number of Laurent coefficients beyond c_0.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terms: Option<usize>,

    /// Compared quantity.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quantity: Option<Quantity>,

    /// Which moments to report.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<MomentSelection>,

    /// Subsequence: `a,b,c` or `offset:stride[:end]`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sub: Option<String>,

    /// Subsequence for the second measure (default: same as --sub).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sub_b: Option<String>,

    /// Search horizon H.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,

    /// Lower end k of the search range.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,

    /// Unit-modulus rotation for the Alexandrov example.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<ComplexArg>,

    /// Number of leading coefficients to strip.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strip: Option<usize>,

    /// Universal sequence family.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,

    /// Comma-separated base points (complex for circle, positive a-values for jacobi).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<Vec<ComplexArg>>,

    /// Comma-separated b-values for the jacobi family.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_b: Option<Vec<f64>>,

    /// Number of sequence entries to emit.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length: Option<usize>,

    /// CSV output file (default: standard output).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,

    /// Manifest file (default: next to --out as `<stem>.manifest.json`).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<PathBuf>,
}

impl Params {
    fn to_map(&self) -> Result<Map<String, Value>, CliError> {
        match serde_json::to_value(self).map_err(|e| CliError::Config(e.to_string()))? {
            Value::Object(m) => Ok(m),
            _ => unreachable!("parameters serialize to an object"),
        }
    }

    /// Reads `--config` (if any) and lays the flags over it.
    pub fn resolve(self) -> Result<Params, CliError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let file = load_config(&path)?;
        let mut merged = file.to_map()?;
        merged.extend(self.to_map()?);
        let mut out: Params = serde_json::from_value(Value::Object(merged))
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        out.config = Some(path);
        Ok(out)
    }

    /// Manifest path: explicit, or derived from `--out`.
    pub fn manifest_path(&self) -> Option<PathBuf> {
        self.manifest.clone().or_else(|| {
            self.out.as_ref().map(|out| {
                let stem = out
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                out.with_file_name(format!("{stem}.manifest.json"))
            })
        })
    }
}

pub fn load_config(path: &Path) -> Result<Params, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}
