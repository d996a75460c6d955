use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use relinfo::channel::{AdditiveChannel, GridMap};
use relinfo::estimators::SourceSpec;
use relinfo::info::JointDistribution;
use serde::{Deserialize, Serialize};

pub const DEFAULT_RESOLUTION: usize = 4096;
pub const DEFAULT_OUTPUT: &str = "relinfo-output";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Channel,
    Pca,
    Ib,
    Estimate,
    Selftest,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Channel => "channel",
            Mode::Pca => "pca",
            Mode::Ib => "ib",
            Mode::Estimate => "estimate",
            Mode::Selftest => "selftest",
        }
    }
}

/// One run: the mode, its parameter block, and where results go.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pca: Option<PcaBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ib: Option<IbBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<EstimateBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selftest: Option<SelftestBlock>,
}

/// Either the half-width `a` of uniform noise around antipodal `±1`, or a full
/// channel description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<AdditiveChannel>,
    pub thresholds: Vec<f64>,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    /// Sign and magnitude rows for every loss; defaults to on for uniform noise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<bool>,
}

fn default_resolution() -> usize {
    DEFAULT_RESOLUTION
}

impl ChannelBlock {
    pub fn channel(&self) -> Result<AdditiveChannel> {
        match (&self.a, &self.channel) {
            (Some(a), None) => Ok(AdditiveChannel::uniform(*a)?),
            (None, Some(ch)) => Ok(ch.clone()),
            _ => bail!(ConfigError(
                "channel block needs exactly one of `a` and `channel`".into()
            )),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PcaBlock {
    pub signal_cov: Vec<Vec<f64>>,
    pub noise_cov: Vec<Vec<f64>>,
    /// Kept dimensions to report; all of `1..N` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kept: Option<Vec<usize>>,
}

/// A joint distribution given inline or as a path relative to the config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JointSource {
    Path(PathBuf),
    Inline(JointDistribution),
}

impl JointSource {
    pub fn load(&self, base: &Path) -> Result<JointDistribution> {
        match self {
            JointSource::Inline(j) => Ok(j.clone()),
            JointSource::Path(p) => {
                let path = base.join(p);
                let text = std::fs::read_to_string(&path)
                    .with_context(|| format!("reading joint distribution {}", path.display()))
                    .map_err(|e| anyhow::Error::new(ConfigError(format!("{e:#}"))))?;
                serde_json::from_str(&text).map_err(|e| {
                    anyhow::Error::new(ConfigError(format!("{}: {e}", path.display())))
                })
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IbBlock {
    /// Joint over `(S, X)`, relevant variable first.
    pub joint: JointSource,
    /// Relevant-loss budget in bits.
    pub budget: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

fn default_beta() -> f64 {
    1.0
}

fn default_alpha() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "snake_case", deny_unknown_fields)]
pub enum EstimateBlock {
    /// Nearest-neighbor entropy of samples from `source`.
    Entropy {
        source: SourceSpec,
        n: usize,
        #[serde(default = "default_k")]
        k: usize,
        #[serde(default)]
        dump_samples: bool,
    },
    /// Divergence from Gaussianity of the first `x_dims` coordinates given the rest.
    Divergence {
        source: SourceSpec,
        n: usize,
        x_dims: usize,
        #[serde(default = "default_k")]
        k: usize,
        #[serde(default)]
        dump_samples: bool,
    },
    /// Gaussianity ordering of noise and output behind the spherical-noise bound.
    Hypothesis {
        signal_cov: Vec<Vec<f64>>,
        noise_cov: Vec<Vec<f64>>,
        source: SourceSpec,
        noise: SourceSpec,
        kept: usize,
        n: usize,
    },
    /// Relevant loss of uniform-noise antipodal signalling under refined partitions.
    Partition {
        a: f64,
        map: GridMap,
        resolutions: Vec<usize>,
        #[serde(default = "default_partition_grid")]
        grid_resolution: usize,
    },
}

fn default_k() -> usize {
    relinfo::estimators::DEFAULT_NEIGHBORS
}

fn default_partition_grid() -> usize {
    1024
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelftestBlock {}

/// Invalid configuration; maps to the validation exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl AnalysisConfig {
    pub fn selftest() -> Self {
        AnalysisConfig {
            mode: Mode::Selftest,
            seed: None,
            output_path: None,
            channel: None,
            pca: None,
            ib: None,
            estimate: None,
            selftest: Some(SelftestBlock::default()),
        }
    }

    /// Parses without validating, so command-line overrides can apply first.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| anyhow::Error::new(ConfigError(format!("config: {e}"))))
    }

    pub fn validate(&self) -> Result<()> {
        let present: Vec<&str> = [
            ("channel", self.channel.is_some()),
            ("pca", self.pca.is_some()),
            ("ib", self.ib.is_some()),
            ("estimate", self.estimate.is_some()),
            ("selftest", self.selftest.is_some()),
        ]
        .into_iter()
        .filter_map(|(name, on)| on.then_some(name))
        .collect();
        if present != [self.mode.name()] {
            bail!(ConfigError(format!(
                "mode `{}` needs exactly its own parameter block, found {present:?}",
                self.mode.name()
            )));
        }
        if self.mode == Mode::Estimate && self.seed.is_none() {
            bail!(ConfigError("estimate mode requires a seed".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str) -> Result<AnalysisConfig> {
        let c = AnalysisConfig::from_json(text)?;
        c.validate()?;
        Ok(c)
    }

    #[test]
    fn exactly_one_block() {
        let ok = r#"{"mode":"channel","channel":{"a":2,"thresholds":[0]}}"#;
        let c = load(ok).unwrap();
        assert_eq!(c.channel.unwrap().resolution, DEFAULT_RESOLUTION);

        let two = r#"{"mode":"channel","channel":{"a":2,"thresholds":[0]},"selftest":{}}"#;
        assert!(load(two).is_err());
        let wrong = r#"{"mode":"pca","channel":{"a":2,"thresholds":[0]}}"#;
        assert!(load(wrong).is_err());
        let unknown = r#"{"mode":"plot","selftest":{}}"#;
        assert!(load(unknown).is_err());
    }

    #[test]
    fn estimate_needs_seed() {
        let text = r#"{"mode":"estimate","estimate":{"task":"entropy","source":{"family":"gaussian","dim":1},"n":2000}}"#;
        assert!(load(text).is_err());
        let seeded = text.replacen("{\"mode\"", "{\"seed\":3,\"mode\"", 1);
        assert!(load(&seeded).is_ok());
    }

    #[test]
    fn joint_inline_or_path() {
        let text = r#"{"mode":"ib","ib":{"budget":0.1,"joint":{"variables":[{"name":"S","size":2},{"name":"X","size":2}],"mass":[0.25,0.25,0.25,0.25]}}}"#;
        let c = load(text).unwrap();
        assert!(matches!(c.ib.unwrap().joint, JointSource::Inline(_)));
        let text = r#"{"mode":"ib","ib":{"budget":0.1,"joint":"joint.json"}}"#;
        assert!(matches!(
            load(text).unwrap().ib.unwrap().joint,
            JointSource::Path(_)
        ));
    }
}
