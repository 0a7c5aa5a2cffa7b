//! Experiment configuration. A config plus the cache directory contents
//! determines every output byte.

use std::fs;
use std::path::{Path, PathBuf};

use omegalab_core::enumerate::EnumerationLimits;
use omegalab_core::scatter::{PositionMap, ScatterSpec, DEFAULT_CEILING};
use omegalab_core::BitString;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::Format;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MachineSource {
    /// A catalog name, or `U` for the universal machine.
    Builtin(String),
    /// A machine description file.
    File(PathBuf),
    /// The machine built from a scattered-bits spec file.
    Scattered(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrefixSource {
    /// Bits of the experiment machine's own Ω.
    Own,
    /// Bits of another machine's Ω at the same budget.
    Machine(MachineSource),
    /// The computable sequence described by a scattered-bits spec file.
    Scattered(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Enumerate,
    Omega,
    Complexity {
        #[serde(default)]
        strings: Vec<String>,
    },
    Kraft {
        lengths: Vec<usize>,
    },
    Uncertainty {
        #[serde(default)]
        growth_threshold: Option<u64>,
    },
    Observables {
        #[serde(default)]
        strings: Vec<String>,
    },
    Scattered {
        spec: PathBuf,
        /// `ε₁` as `num/den`.
        #[serde(default = "default_epsilon")]
        epsilon: String,
        #[serde(default)]
        horizon: Option<usize>,
    },
}

fn default_epsilon() -> String {
    "1".into()
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Enumerate => "enumerate",
            Experiment::Omega => "omega",
            Experiment::Complexity { .. } => "complexity",
            Experiment::Kraft { .. } => "kraft",
            Experiment::Uncertainty { .. } => "uncertainty",
            Experiment::Observables { .. } => "observables",
            Experiment::Scattered { .. } => "scattered",
        }
    }

    pub fn default_format(&self) -> Format {
        match self {
            Experiment::Omega | Experiment::Kraft { .. } => Format::Text,
            _ => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub machine: MachineSource,
    /// Extra `U₀`-style padding bits in front of every program.
    #[serde(default)]
    pub pad: usize,
    pub budget: u64,
    #[serde(default = "default_max_nodes")]
    pub max_nodes: usize,
    #[serde(default = "default_s_max")]
    pub s_max: usize,
    #[serde(default = "default_prefix")]
    pub prefix: PrefixSource,
    #[serde(default = "default_threads")]
    pub threads: usize,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
}

fn default_max_nodes() -> usize {
    EnumerationLimits::DEFAULT_MAX_NODES
}

fn default_s_max() -> usize {
    8
}

fn default_prefix() -> PrefixSource {
    PrefixSource::Own
}

fn default_threads() -> usize {
    1
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment, machine: MachineSource, budget: u64) -> Self {
        ExperimentConfig {
            experiment,
            machine,
            pad: 0,
            budget,
            max_nodes: default_max_nodes(),
            s_max: default_s_max(),
            prefix: default_prefix(),
            threads: default_threads(),
            format: None,
            out: None,
            cache_dir: None,
        }
    }

    pub fn limits(&self) -> EnumerationLimits {
        EnumerationLimits {
            budget: self.budget,
            max_nodes: self.max_nodes,
        }
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_else(|| self.experiment.default_format())
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("config serializes");
        text.push('\n');
        text
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.into(),
            source,
        })
    }
}

/// Scattered-bits spec file.
///
/// ```json
/// {"f": "double", "bits": "101100", "k_max": 6}
/// {"f": [2, 3, 7], "bits": "011", "k_max": 3, "fill": "10101"}
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecFile {
    pub f: PositionSpec,
    /// `x_F(1) … x_F(k_max)`.
    pub bits: String,
    pub k_max: usize,
    #[serde(default)]
    pub ceiling: Option<usize>,
    /// Free bits of the full sequence `x`, zeros when absent.
    #[serde(default)]
    pub fill: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PositionSpec {
    Catalog(String),
    Table(Vec<usize>),
}

impl SpecFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.into(),
            source,
        })
    }

    pub fn spec(&self) -> Result<ScatterSpec> {
        let f = match &self.f {
            PositionSpec::Catalog(name) => PositionMap::from_catalog(name)
                .ok_or_else(|| Error::Invalid(format!("unknown position map {name:?}")))?,
            PositionSpec::Table(values) => PositionMap::Table(values.clone()),
        };
        let bits = parse_bits(&self.bits)?;
        Ok(ScatterSpec::with_ceiling(
            f,
            bits,
            self.k_max,
            self.ceiling.unwrap_or(DEFAULT_CEILING),
        )?)
    }

    /// The full sequence `x` of length `F(k_max)`.
    pub fn sequence(&self) -> Result<BitString> {
        let spec = self.spec()?;
        let fill = match &self.fill {
            Some(text) => parse_bits(text)?,
            None => BitString::zeros(spec.free_bits(spec.k_max())),
        };
        Ok(spec.fill(&fill)?)
    }
}

pub fn parse_bits(text: &str) -> Result<BitString> {
    text.parse()
        .map_err(|e| Error::Invalid(format!("bad bit string {text:?}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip() {
        let mut config = ExperimentConfig::new(
            Experiment::Uncertainty {
                growth_threshold: Some(2),
            },
            MachineSource::Builtin("M1".into()),
            1000,
        );
        config.prefix = PrefixSource::Machine(MachineSource::File("m.txt".into()));
        let back: ExperimentConfig = serde_json::from_str(&config.to_json()).unwrap();
        assert_eq!(back, config);
    }

    #[test]
    fn minimal_config_uses_defaults() {
        let config: ExperimentConfig =
            serde_json::from_str(r#"{"experiment": "omega", "machine": {"builtin": "M1"}, "budget": 10}"#).unwrap();
        assert_eq!(config.s_max, 8);
        assert_eq!(config.prefix, PrefixSource::Own);
        assert_eq!(config.format(), Format::Text);
    }

    #[test]
    fn spec_files() {
        let file: SpecFile = serde_json::from_str(r#"{"f": "double", "bits": "10", "k_max": 2}"#).unwrap();
        assert_eq!(file.sequence().unwrap().to_string(), "0100");
        let table: SpecFile =
            serde_json::from_str(r#"{"f": [2, 3, 7], "bits": "011", "k_max": 3, "fill": "1111"}"#).unwrap();
        assert_eq!(table.sequence().unwrap().to_string(), "1011111");
        let bad: SpecFile = serde_json::from_str(r#"{"f": "cube", "bits": "1", "k_max": 1}"#).unwrap();
        assert!(bad.spec().is_err());
    }
}
