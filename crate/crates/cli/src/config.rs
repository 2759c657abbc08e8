use std::fs;
use std::path::{Path, PathBuf};

use igusa_core::grid::{default_grid, generic_points, diagonal_points, DEFAULT_GENERIC_POINTS, DEFAULT_SEED};
use igusa_core::theta::{SiegelPoint, TruncationPolicy};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Loosest truncation target accepted for identity checks.
pub const MAX_EPS: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckThresholds {
    pub relations: f64,
    pub thetalink: f64,
    pub chi5_squared: f64,
    pub chi5_diagonal: f64,
    pub c5_spread: f64,
    pub adjugate: f64,
    pub derivative: f64,
    pub finite_difference_step: f64,
}

impl Default for CheckThresholds {
    fn default() -> Self {
        CheckThresholds {
            relations: 1e-9,
            thetalink: 1e-9,
            chi5_squared: 1e-8,
            chi5_diagonal: 1e-10,
            c5_spread: 1e-8,
            adjugate: 1e-8,
            derivative: 1e-6,
            finite_difference_step: 1e-4,
        }
    }
}

/// Settings shared by every command; file values are overridden by flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub eps: f64,
    pub max_radius: u32,
    /// `None` runs in double precision.
    pub precision_bits: Option<usize>,
    pub seed: u64,
    pub generic_points: usize,
    /// Inline points; replaces the seeded grid.
    pub points: Option<Vec<SiegelPoint>>,
    pub max_r: Option<u32>,
    pub format: Format,
    pub thresholds: CheckThresholds,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            eps: 1e-14,
            max_radius: 64,
            precision_bits: None,
            seed: DEFAULT_SEED,
            generic_points: DEFAULT_GENERIC_POINTS,
            points: None,
            max_r: None,
            format: Format::Json,
            thresholds: CheckThresholds::default(),
        }
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn parse_json<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse { path: path.to_path_buf(), message: e.to_string() })
}

/// Command-line overrides, applied on top of the config file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub config: Option<PathBuf>,
    pub points: Option<PathBuf>,
    pub eps: Option<f64>,
    pub max_radius: Option<u32>,
    pub precision_bits: Option<usize>,
    pub seed: Option<u64>,
    pub max_r: Option<u32>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn resolve(o: &Overrides) -> Result<RunConfig, CliError> {
        let mut cfg = match &o.config {
            Some(path) => parse_json(path, &read_text(path)?)?,
            None => RunConfig::default(),
        };
        if let Some(path) = &o.points {
            cfg.points = Some(parse_json(path, &read_text(path)?)?);
        }
        if let Some(x) = o.eps {
            cfg.eps = x;
        }
        if let Some(x) = o.max_radius {
            cfg.max_radius = x;
        }
        if let Some(x) = o.precision_bits {
            cfg.precision_bits = Some(x);
        }
        if let Some(x) = o.seed {
            cfg.seed = x;
        }
        if let Some(x) = o.max_r {
            cfg.max_r = Some(x);
        }
        if let Some(x) = o.format {
            cfg.format = x;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.eps > 0.0 && self.eps <= MAX_EPS) {
            return Err(CliError::Config(format!("eps = {:e} must lie in (0, {MAX_EPS:e}]", self.eps)));
        }
        self.policy()?;
        if let Some(bits) = self.precision_bits {
            if !(53..=4096).contains(&bits) {
                return Err(CliError::Config(format!("precision bits {bits} outside 53..=4096")));
            }
        }
        if self.points.as_ref().is_some_and(Vec::is_empty) {
            return Err(CliError::Config("point list is empty".into()));
        }
        if self.points.is_none() && self.generic_points < 2 {
            return Err(CliError::Config("at least two generic points are needed".into()));
        }
        let t = &self.thresholds;
        let all = [t.relations, t.thetalink, t.chi5_squared, t.chi5_diagonal, t.c5_spread, t.adjugate, t.derivative];
        if all.iter().any(|x| !(x.is_finite() && *x > 0.0)) || !(t.finite_difference_step > 0.0) {
            return Err(CliError::Config("thresholds must be positive".into()));
        }
        Ok(())
    }

    pub fn policy(&self) -> Result<TruncationPolicy, CliError> {
        TruncationPolicy::new(self.eps, self.max_radius).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Inline points, or the seeded generic points followed by the two
    /// diagonal ones.
    pub fn sample_points(&self) -> Vec<SiegelPoint> {
        match &self.points {
            Some(p) => p.clone(),
            None if self.generic_points == DEFAULT_GENERIC_POINTS => default_grid(self.seed),
            None => {
                let mut pts = generic_points(self.seed, self.generic_points);
                pts.extend(diagonal_points());
                pts
            }
        }
    }
}
