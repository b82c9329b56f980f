use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::engine::GaParams;
use crate::error::{Error, Result};
use crate::operators::{Mode, OperatorPipeline, Variant, DEFAULT_GROUP_SIZE};

/// One experiment: every (variant, mode) cell run `runs` times.
///
/// `Default` is the full 9 x 2 grid at length 50 with 50 runs per cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub length: usize,
    pub variants: Vec<Variant>,
    pub modes: Vec<Mode>,
    pub runs: usize,
    /// Group size for the elite and worst sets.
    pub k: usize,
    /// Master seed; per-run seeds are derived from it.
    pub seed: u64,
    /// `ga.seed` is ignored; every run gets a derived seed.
    pub ga: GaParams,
    pub out: PathBuf,
    /// Worker threads; 0 uses all available cores.
    pub jobs: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            length: 50,
            variants: Variant::ALL.to_vec(),
            modes: Mode::ALL.to_vec(),
            runs: 50,
            k: DEFAULT_GROUP_SIZE,
            seed: 1,
            ga: GaParams::default(),
            out: PathBuf::from("results"),
            jobs: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    /// Checks every parameter and returns the cells to run: `base` first
    /// (added when missing, since every other variant is tested against it),
    /// duplicates dropped, and each variant paired with every mode.
    pub fn cells(&self) -> Result<Vec<(Variant, Mode)>> {
        if self.length < 2 {
            return Err(Error::Config(format!("sequence length must be at least 2, got {}", self.length)));
        }
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.modes.is_empty() {
            return Err(Error::Config("at least one mode is required".into()));
        }
        self.ga.validate()?;

        let mut variants = vec![Variant::Base];
        for v in &self.variants {
            if !variants.contains(v) {
                variants.push(*v);
            }
        }
        let mut modes: Vec<Mode> = Vec::new();
        for m in &self.modes {
            if !modes.contains(m) {
                modes.push(*m);
            }
        }
        let mut cells = Vec::new();
        for &v in &variants {
            for &m in &modes {
                OperatorPipeline::for_variant(v, m, self.k)?.check_population_size(self.ga.group_pool_size())?;
                cells.push((v, m));
            }
        }
        Ok(cells)
    }
}
