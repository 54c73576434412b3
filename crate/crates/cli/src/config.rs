use std::fs;
use std::path::{Path, PathBuf};

use latentswap::evaluate::EvalConfig;
use latentswap::lemma_lab::SuiteConfig;
use latentswap::{ModelConfig, TrainConfig, WorldConfig, FORMAT_VERSION};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

/// Sample counts and the seed of the generated world and datasets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub seed: u64,
    pub n_a: usize,
    pub n_b: usize,
}

impl Default for DataConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            n_a: 10_000,
            n_b: 10_000,
        }
    }
}

/// Everything a command needs; one TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub format_version: u32,
    /// Output root; `--out` and `LATENTSWAP_OUT` take precedence.
    pub output_dir: PathBuf,
    pub data: DataConfig,
    pub world: WorldConfig,
    pub model: ModelConfig,
    pub train: TrainConfig,
    pub eval: EvalConfig,
    pub lemmas: SuiteConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            format_version: FORMAT_VERSION,
            output_dir: PathBuf::from("runs"),
            data: DataConfig::default(),
            world: WorldConfig::default(),
            model: ModelConfig::default(),
            train: TrainConfig::default(),
            eval: EvalConfig::default(),
            lemmas: SuiteConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// One seed for every stochastic stage.
    pub fn reseed(&mut self, seed: u64) {
        self.data.seed = seed;
        self.model.init_seed = seed;
        self.train.seed = seed;
        self.eval.seed = seed;
        self.lemmas.seed = seed;
    }

    pub fn validate(&self) -> latentswap::Result<()> {
        use latentswap::Error::Config;
        if self.format_version != FORMAT_VERSION {
            return Err(Config(format!(
                "format_version {} (this build reads {FORMAT_VERSION})",
                self.format_version
            )));
        }
        if self.data.n_a == 0 || self.data.n_b == 0 {
            return Err(Config("data.n_a and data.n_b must be at least 1".into()));
        }
        self.world.validate()?;
        self.model.validate()?;
        if self.model.ambient_dim != self.world.ambient_dim {
            return Err(Config(format!(
                "model.ambient_dim {} differs from world.ambient_dim {}",
                self.model.ambient_dim, self.world.ambient_dim
            )));
        }
        self.train.validate()?;
        self.eval.validate()
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    /// SHA-256 over the canonical JSON of everything but the output root,
    /// which moves files without changing what is computed.
    pub fn hash(&self) -> String {
        let canonical = Self {
            output_dir: PathBuf::new(),
            ..self.clone()
        };
        let json = serde_json::to_vec(&canonical).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }
}
