//! TOML experiment configuration.
//!
//! ```toml
//! [experiment]
//! seed = 1
//! trials = 20
//! symbols = 100
//! cluster_sizes = [1, 2, 4, 8, 16]
//!
//! [codebook]
//! size = 64          # or: path = "codebook.txt"
//!
//! [[scenario]]
//! name = "high-spatial"
//! frequency = "high"        # "low" | "high" | adjacent magnitude | { matrix = "rf.txt" }
//! spatial = "macro-cell"    # "none" | "macro-cell" | { tx = "rt.txt", rx = "rr.txt" }
//! mode = "pooled"           # "pooled" | "per-index"
//! ```
//!
//! Omitted keys take the defaults below; the resolved values are echoed in
//! the report.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use grassfeed_core::channel::{CorrelationSpec, FreqProfile, SpatialProfile};
use grassfeed_core::feedback::ProbabilityMode;

use crate::codebook_io::load_matrix;
use crate::error::{SimError, SimResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub codebook: CodebookSection,
    #[serde(default, rename = "scenario")]
    pub scenarios: Vec<ScenarioConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub seed: u64,
    pub trials: usize,
    /// OFDM symbols per trial, `T`.
    pub symbols: usize,
    /// Symbols used to estimate the frozen probabilities.
    pub warmup: usize,
    pub cluster_sizes: Vec<usize>,
    /// Rebuild code tables every this many symbols.
    pub rebuild_interval: u64,
    pub subcarriers: usize,
    pub tx: usize,
    pub rx: usize,
    pub output: PathBuf,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection {
            seed: 1,
            trials: 20,
            symbols: 100,
            warmup: 500,
            cluster_sizes: vec![1, 2, 4, 8, 16],
            rebuild_interval: 1,
            subcarriers: 64,
            tx: 4,
            rx: 2,
            output: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CodebookSection {
    /// Load from this file instead of generating.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    pub size: usize,
    pub seed: u64,
    pub restarts: usize,
    pub iterations: usize,
}

impl Default for CodebookSection {
    fn default() -> Self {
        CodebookSection {
            path: None,
            size: 64,
            seed: 7,
            restarts: 4,
            iterations: 3000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FrequencySetting {
    Named(String),
    Adjacent(f64),
    Matrix { matrix: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpatialSetting {
    Named(String),
    Matrices { tx: PathBuf, rx: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeSetting {
    Pooled,
    PerIndex,
}

impl From<ModeSetting> for ProbabilityMode {
    fn from(m: ModeSetting) -> Self {
        match m {
            ModeSetting::Pooled => ProbabilityMode::Pooled,
            ModeSetting::PerIndex => ProbabilityMode::PerIndex,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default = "default_frequency")]
    pub frequency: FrequencySetting,
    #[serde(default = "default_spatial")]
    pub spatial: SpatialSetting,
    #[serde(default = "default_mode")]
    pub mode: ModeSetting,
}

fn default_frequency() -> FrequencySetting {
    FrequencySetting::Named("low".into())
}

fn default_spatial() -> SpatialSetting {
    SpatialSetting::Named("none".into())
}

fn default_mode() -> ModeSetting {
    ModeSetting::Pooled
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> SimResult<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| SimError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads and validates a config file. Relative paths inside it are
    /// resolved against the file's directory.
    pub fn load(path: &Path) -> SimResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| SimError::io(path, e))?;
        let mut cfg = Self::from_toml(&text).map_err(|e| match e {
            SimError::Config(msg) => SimError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        if let Some(dir) = path.parent() {
            cfg.resolve_paths(dir);
        }
        Ok(cfg)
    }

    fn resolve_paths(&mut self, dir: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        };
        if let Some(p) = self.codebook.path.as_mut() {
            fix(p);
        }
        for s in &mut self.scenarios {
            if let FrequencySetting::Matrix { matrix } = &mut s.frequency {
                fix(matrix);
            }
            if let SpatialSetting::Matrices { tx, rx } = &mut s.spatial {
                fix(tx);
                fix(rx);
            }
        }
    }

    pub fn validate(&self) -> SimResult<()> {
        let e = &self.experiment;
        let bad = |msg: String| Err(SimError::Config(msg));
        if e.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if e.symbols == 0 {
            return bad("symbols must be at least 1".into());
        }
        if e.rebuild_interval == 0 {
            return bad("rebuild_interval must be at least 1".into());
        }
        if e.subcarriers == 0 || e.tx == 0 || e.rx == 0 {
            return bad("subcarriers, tx and rx must be positive".into());
        }
        for &g in &e.cluster_sizes {
            if g == 0 || !e.subcarriers.is_multiple_of(g) {
                return bad(format!(
                    "cluster size {g} does not divide {} subcarriers",
                    e.subcarriers
                ));
            }
        }
        let n = self.codebook.size;
        if self.codebook.path.is_none() && (n < 2 || !n.is_power_of_two()) {
            return bad(format!("codebook size {n} must be a power of two >= 2"));
        }
        let mut names = std::collections::HashSet::new();
        for s in &self.scenarios {
            if s.name.is_empty()
                || !s
                    .name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
            {
                return bad(format!("scenario name {:?} must be non-empty [A-Za-z0-9_-]", s.name));
            }
            if !names.insert(&s.name) {
                return bad(format!("duplicate scenario name {:?}", s.name));
            }
            match &s.frequency {
                FrequencySetting::Named(n) if n != "low" && n != "high" => {
                    return bad(format!("scenario {}: unknown frequency profile {n:?}", s.name));
                }
                FrequencySetting::Adjacent(x) if !(0.0..1.0).contains(x) => {
                    return bad(format!("scenario {}: adjacent correlation {x} outside [0, 1)", s.name));
                }
                _ => {}
            }
            if let SpatialSetting::Named(n) = &s.spatial {
                if n != "none" && n != "macro-cell" {
                    return bad(format!("scenario {}: unknown spatial profile {n:?}", s.name));
                }
            }
        }
        if self.scenarios.is_empty() {
            return bad("no [[scenario]] defined".into());
        }
        Ok(())
    }

    /// Builds the channel spec of a scenario, reading any matrix files.
    pub fn correlation_spec(&self, s: &ScenarioConfig) -> SimResult<CorrelationSpec> {
        let e = &self.experiment;
        let freq = match &s.frequency {
            FrequencySetting::Named(n) if n == "high" => FreqProfile::high(),
            FrequencySetting::Named(_) => FreqProfile::low(),
            FrequencySetting::Adjacent(x) => FreqProfile::ExponentialPdp { adjacent_corr: *x },
            FrequencySetting::Matrix { matrix } => FreqProfile::Explicit(load_matrix(matrix)?),
        };
        let spatial = match &s.spatial {
            SpatialSetting::Named(n) if n == "macro-cell" => SpatialProfile::macro_cell(),
            SpatialSetting::Named(_) => SpatialProfile::None,
            SpatialSetting::Matrices { tx, rx } => SpatialProfile::Explicit {
                tx: load_matrix(tx)?,
                rx: load_matrix(rx)?,
            },
        };
        let spec = CorrelationSpec {
            subcarriers: e.subcarriers,
            tx: e.tx,
            rx: e.rx,
            freq,
            spatial,
        };
        spec.validate()?;
        Ok(spec)
    }
}
