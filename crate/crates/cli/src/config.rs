use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use trendscape::clustering::{Method, DEFAULT_K, DEFAULT_RESTARTS};
use trendscape::symbolic::{Alphabet, DEFAULT_ALPHABET_SIZE, DEFAULT_SEGMENTS, DEFAULT_WINDOW};
use trendscape::topology::{TdaParams, TdaStrategy};

use crate::error::{CliError, Result};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_OUT: &str = "trendscape-out";

/// Settings accepted both as flags and as keys of a TOML config file.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    /// SAX alphabet size (2 to 26)
    #[arg(long, global = true)]
    pub alphabet: Option<usize>,
    /// Sliding window length in weeks
    #[arg(long, global = true)]
    pub window: Option<usize>,
    /// PAA segments per window
    #[arg(long, global = true)]
    pub segments: Option<usize>,
    /// Delay-embedding dimension
    #[arg(long = "embed-dim", global = true)]
    pub embed_dim: Option<usize>,
    /// Delay-embedding lag
    #[arg(long, global = true)]
    pub tau: Option<usize>,
    /// Number of clusters
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Seed for k-means and synthetic data
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// H1_ONLY, H0_H1_FILTERED or auto (by clustering method)
    #[arg(long, global = true)]
    pub strategy: Option<String>,
    /// Relative persistence cut for H0_H1_FILTERED
    #[arg(long = "persistence-floor", global = true)]
    pub persistence_floor: Option<f64>,
    /// Landscape levels
    #[arg(long, global = true)]
    pub kmax: Option<usize>,
    /// Landscape grid points
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// k-means restarts
    #[arg(long, global = true)]
    pub restarts: Option<usize>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(skip)]
    #[serde(default)]
    pub inputs: Vec<PathBuf>,
}

impl Overrides {
    pub fn from_toml_str(text: &str) -> std::result::Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml_str(&text).map_err(|message| CliError::BadFile {
            path: path.to_path_buf(),
            message,
        })
    }

    /// Fields set in `self` win over those in `lower`.
    fn over(self, lower: Overrides) -> Overrides {
        Overrides {
            alphabet: self.alphabet.or(lower.alphabet),
            window: self.window.or(lower.window),
            segments: self.segments.or(lower.segments),
            embed_dim: self.embed_dim.or(lower.embed_dim),
            tau: self.tau.or(lower.tau),
            k: self.k.or(lower.k),
            seed: self.seed.or(lower.seed),
            strategy: self.strategy.or(lower.strategy),
            persistence_floor: self.persistence_floor.or(lower.persistence_floor),
            kmax: self.kmax.or(lower.kmax),
            grid: self.grid.or(lower.grid),
            restarts: self.restarts.or(lower.restarts),
            out: self.out.or(lower.out),
            inputs: if self.inputs.is_empty() {
                lower.inputs
            } else {
                self.inputs
            },
        }
    }
}

/// Effective settings of one invocation, as written to the manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub inputs: Vec<PathBuf>,
    pub alphabet_size: usize,
    pub window: usize,
    pub n_segments: usize,
    pub embed_dim: usize,
    pub embed_tau: usize,
    pub k: usize,
    pub seed: u64,
    pub restarts: usize,
    /// `None` picks H1_ONLY for k-means and H0_H1_FILTERED for Ward.
    #[serde(serialize_with = "strategy_name")]
    pub strategy: Option<TdaStrategy>,
    pub persistence_floor: f64,
    pub k_max: usize,
    pub grid_size: usize,
    pub out: PathBuf,
}

fn strategy_name<S: serde::Serializer>(s: &Option<TdaStrategy>, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(s.map_or("auto", TdaStrategy::name))
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let tda = TdaParams::default();
        Self {
            inputs: Vec::new(),
            alphabet_size: DEFAULT_ALPHABET_SIZE,
            window: DEFAULT_WINDOW,
            n_segments: DEFAULT_SEGMENTS,
            embed_dim: tda.embed_dim,
            embed_tau: tda.tau,
            k: DEFAULT_K,
            seed: DEFAULT_SEED,
            restarts: DEFAULT_RESTARTS,
            strategy: None,
            persistence_floor: tda.persistence_floor,
            k_max: tda.k_max,
            grid_size: tda.grid_size,
            out: PathBuf::from(DEFAULT_OUT),
        }
    }
}

fn usage(msg: String) -> CliError {
    CliError::Usage(msg)
}

impl PipelineConfig {
    /// Flags over config file over defaults.
    pub fn resolve(flags: Overrides, file: Option<Overrides>) -> Result<Self> {
        let o = flags.over(file.unwrap_or_default());
        let d = Self::default();
        let strategy = match o.strategy.as_deref() {
            None => None,
            Some(s) if s.eq_ignore_ascii_case("auto") => None,
            Some(s) => Some(s.parse::<TdaStrategy>().map_err(|e| usage(e.to_string()))?),
        };
        let c = Self {
            inputs: o.inputs,
            alphabet_size: o.alphabet.unwrap_or(d.alphabet_size),
            window: o.window.unwrap_or(d.window),
            n_segments: o.segments.unwrap_or(d.n_segments),
            embed_dim: o.embed_dim.unwrap_or(d.embed_dim),
            embed_tau: o.tau.unwrap_or(d.embed_tau),
            k: o.k.unwrap_or(d.k),
            seed: o.seed.unwrap_or(d.seed),
            restarts: o.restarts.unwrap_or(d.restarts),
            strategy,
            persistence_floor: o.persistence_floor.unwrap_or(d.persistence_floor),
            k_max: o.kmax.unwrap_or(d.k_max),
            grid_size: o.grid.unwrap_or(d.grid_size),
            out: o.out.unwrap_or(d.out),
        };
        c.check()?;
        Ok(c)
    }

    fn check(&self) -> Result<()> {
        Alphabet::new(self.alphabet_size).map_err(|e| usage(e.to_string()))?;
        if self.n_segments == 0 || self.window < self.n_segments {
            return Err(usage(format!(
                "need 1 <= segments <= window, got segments {} and window {}",
                self.n_segments, self.window
            )));
        }
        if self.embed_dim == 0 || self.embed_tau == 0 {
            return Err(usage("embed-dim and tau must be positive".into()));
        }
        if self.k < 2 {
            return Err(usage(format!("k must be at least 2, got {}", self.k)));
        }
        if self.restarts == 0 {
            return Err(usage("restarts must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.persistence_floor) {
            return Err(usage(format!(
                "persistence-floor must lie in [0, 1], got {}",
                self.persistence_floor
            )));
        }
        if self.k_max == 0 || self.grid_size < 2 {
            return Err(usage("kmax must be >= 1 and grid >= 2".into()));
        }
        Ok(())
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.alphabet_size).expect("checked in resolve")
    }

    pub fn tda_params(&self) -> TdaParams {
        TdaParams {
            embed_dim: self.embed_dim,
            tau: self.embed_tau,
            k_max: self.k_max,
            grid_size: self.grid_size,
            persistence_floor: self.persistence_floor,
            ..TdaParams::default()
        }
    }

    pub fn strategy_for(&self, method: Method) -> TdaStrategy {
        self.strategy.unwrap_or(match method {
            Method::KMeans => TdaStrategy::H1Only,
            Method::Ward => TdaStrategy::H0H1Filtered,
        })
    }
}
