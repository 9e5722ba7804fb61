use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value as Json;

use crate::error::CliError;
use crate::record::Format;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Experiment {
    Diagonalize,
    Spectrum,
    Correlator,
    CompareOracle,
    Critical,
    Linear,
    Ito,
    Limit,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Diagonalize => "diagonalize",
            Experiment::Spectrum => "spectrum",
            Experiment::Correlator => "correlator",
            Experiment::CompareOracle => "compare-oracle",
            Experiment::Critical => "critical",
            Experiment::Linear => "linear",
            Experiment::Ito => "ito",
            Experiment::Limit => "limit",
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Option<String>,
}

/// One run, as read from a JSON document.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<String>,
    #[serde(default = "empty_object")]
    pub parameters: Json,
    #[serde(default)]
    pub output: OutputSpec,
}

fn empty_object() -> Json {
    Json::Object(Default::default())
}

impl ExperimentConfig {
    pub fn parse_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse_json(&text)
    }

    pub fn check_experiment(&self, requested: Experiment) -> Result<(), CliError> {
        match &self.experiment {
            Some(name) if name != requested.name() => Err(CliError::Config(format!(
                "config is for experiment `{name}` but `{}` was requested",
                requested.name()
            ))),
            _ => Ok(()),
        }
    }

    pub fn format(&self) -> Result<Option<Format>, CliError> {
        self.output.format.as_deref().map(str::parse).transpose()
    }

    pub fn parameters<T: DeserializeOwned>(&self) -> Result<T, CliError> {
        serde_json::from_value(self.parameters.clone())
            .map_err(|e| CliError::Config(format!("invalid parameters: {e}")))
    }
}

/// A real number or a `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ComplexParam {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexParam {
    pub fn value(self) -> Complex64 {
        match self {
            ComplexParam::Real(x) => Complex64::new(x, 0.0),
            ComplexParam::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

/// A constant or one value per sample.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Series<T> {
    Scalar(T),
    Samples(Vec<T>),
}

impl<T: Clone> Series<T> {
    pub fn is_scalar(&self) -> bool {
        matches!(self, Series::Scalar(_))
    }

    pub fn expand(&self, name: &str, len: usize) -> Result<Vec<T>, CliError> {
        match self {
            Series::Scalar(x) => Ok(vec![x.clone(); len]),
            Series::Samples(v) if v.len() == len => Ok(v.clone()),
            Series::Samples(v) => Err(CliError::Config(format!(
                "`{name}` has {} samples, expected {len}",
                v.len()
            ))),
        }
    }

    pub fn sample_count(&self) -> Option<usize> {
        match self {
            Series::Scalar(_) => None,
            Series::Samples(v) => Some(v.len()),
        }
    }
}

pub fn complex_series(
    s: &Series<ComplexParam>,
    name: &str,
    len: usize,
) -> Result<Vec<Complex64>, CliError> {
    Ok(s.expand(name, len)?
        .into_iter()
        .map(ComplexParam::value)
        .collect())
}
