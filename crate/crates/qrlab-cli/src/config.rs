use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use qrlab::channels::SiteChannelSpec;
use qrlab::recovery::RecoverySpec;

use crate::error::{CliError, CliResult};

/// Experiment kinds the runner understands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Sweep,
    Crossing,
    TsGrid,
    Certify,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridScale {
    Linear,
    Log,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(CliError::Config(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    #[serde(default = "default_scale")]
    pub scale: GridScale,
}

fn default_scale() -> GridScale {
    GridScale::Linear
}

impl GridConfig {
    pub fn points(&self) -> Vec<f64> {
        let n = self.steps;
        match self.scale {
            GridScale::Linear => (0..n)
                .map(|i| self.min + (self.max - self.min) * i as f64 / (n - 1) as f64)
                .collect(),
            GridScale::Log => {
                let (a, b) = (self.min.ln(), self.max.ln());
                (0..n)
                    .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                    .collect()
            }
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapsConfig {
    #[serde(default = "default_max_dim")]
    pub max_dim: usize,
    #[serde(default = "default_kraus_limit")]
    pub kraus_limit: usize,
}

fn default_max_dim() -> usize {
    1 << 14
}

fn default_kraus_limit() -> usize {
    4096
}

impl Default for CapsConfig {
    fn default() -> Self {
        Self {
            max_dim: default_max_dim(),
            kraus_limit: default_kraus_limit(),
        }
    }
}

/// On-disk experiment description (TOML). CLI flags override the
/// corresponding fields; see `apply_overrides`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub codes: Vec<String>,
    pub channel: String,
    pub recoveries: Vec<String>,
    pub grid: GridConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub certify: bool,
    /// Monte Carlo samples for the optional decoder cross-check column.
    #[serde(default)]
    pub mc_samples: u64,
    #[serde(default = "default_format")]
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub timings: bool,
    #[serde(default)]
    pub caps: CapsConfig,
}

fn default_format() -> OutputFormat {
    OutputFormat::Csv
}

fn default_workers() -> usize {
    1
}

/// Flag-level overrides; precedence is flags over config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub max_dim: Option<usize>,
    pub timings: bool,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        let config: ExperimentConfig =
            toml::from_str(&text).map_err(|e| CliError::Config(format!("bad config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn apply_overrides(mut self, over: &Overrides) -> Self {
        if let Some(out) = &over.out {
            self.out = Some(out.clone());
        }
        if let Some(format) = over.format {
            self.format = format;
        }
        if let Some(seed) = over.seed {
            self.seed = seed;
        }
        if let Some(workers) = over.workers {
            self.workers = workers;
        }
        if let Some(max_dim) = over.max_dim {
            self.caps.max_dim = max_dim;
        }
        if over.timings {
            self.timings = true;
        }
        self
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.codes.is_empty() {
            return Err(CliError::Config("at least one code is required".into()));
        }
        for name in &self.codes {
            qrlab::codes::build_code(name).map_err(CliError::from)?;
        }
        if self.recoveries.is_empty() {
            return Err(CliError::Config("at least one recovery is required".into()));
        }
        for r in &self.recoveries {
            let _ = self.recovery(r)?;
        }
        let channel = self.channel_spec()?;
        if self.grid.steps < 2 {
            return Err(CliError::Config("grid needs at least 2 steps".into()));
        }
        if self.grid.max < self.grid.min {
            return Err(CliError::Config("grid max below min".into()));
        }
        let (lo, hi) = channel.valid_range();
        if self.grid.min < lo || self.grid.max > hi {
            return Err(CliError::Config(format!(
                "grid [{}, {}] outside the channel's valid range [{lo}, {hi}]",
                self.grid.min, self.grid.max
            )));
        }
        if self.grid.scale == GridScale::Log && self.grid.min <= 0.0 {
            return Err(CliError::Config("log grid needs min > 0".into()));
        }
        if self.kind == ExperimentKind::Crossing && self.codes.len() < 2 {
            return Err(CliError::Config(
                "crossing analysis needs at least two codes".into(),
            ));
        }
        if self.workers == 0 {
            return Err(CliError::Config("workers must be at least 1".into()));
        }
        Ok(())
    }

    pub fn channel_spec(&self) -> CliResult<SiteChannelSpec> {
        self.channel.parse().map_err(CliError::from)
    }

    pub fn recovery(&self, text: &str) -> CliResult<RecoverySpec> {
        text.parse().map_err(CliError::from)
    }

    pub fn recovery_specs(&self) -> CliResult<Vec<(String, RecoverySpec)>> {
        self.recoveries
            .iter()
            .map(|r| Ok((r.clone(), self.recovery(r)?)))
            .collect()
    }

    pub fn output_path(&self) -> PathBuf {
        match &self.out {
            Some(p) => p.clone(),
            None => PathBuf::from(format!("qrlab-out.{}", self.format.extension())),
        }
    }
}
