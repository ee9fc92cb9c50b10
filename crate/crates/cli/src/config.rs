//! Run configuration: TOML file, command-line overrides, validation.

use std::path::PathBuf;

use bottleneck_core::bottleneck::BottleneckRunConfig;
use bottleneck_core::tracking::TrackerConfig;
use serde::{Deserialize, Serialize};

use crate::InputError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub real: f64,
    pub dedup: f64,
    pub diag: f64,
    pub filter: f64,
    pub normality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let d = BottleneckRunConfig::default();
        Tolerances {
            real: d.real_tol,
            dedup: d.dedup_tol,
            diag: d.diag_tol,
            filter: d.filter_tol,
            normality: d.normality_tol,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemsBlock {
    pub x: Option<PathBuf>,
    pub y: Option<PathBuf>,
    pub symmetric: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleBlock {
    pub system: Option<PathBuf>,
    /// One `[lo, hi]` per coordinate.
    pub bounds: Vec<[f64; 2]>,
    pub spacing: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ComponentsBlock {
    pub cloud: Option<PathBuf>,
    pub r: Option<f64>,
}

/// Everything a run depends on. Reports echo the effective value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfigFile {
    pub seed: u64,
    pub threads: Option<usize>,
    pub strict: bool,
    /// `[re, im]`, unit modulus.
    pub gamma: Option<[f64; 2]>,
    /// CSV file with one `re[,im]` row per coordinate.
    pub p0: Option<PathBuf>,
    /// CSV file with the rows of a projection matrix.
    pub projection: Option<PathBuf>,
    pub tracker: TrackerConfig,
    pub tolerances: Tolerances,
    pub systems: SystemsBlock,
    pub sample: SampleBlock,
    pub components: ComponentsBlock,
}

impl RunConfigFile {
    pub fn from_toml(text: &str) -> Result<Self, InputError> {
        toml::from_str(text).map_err(|e| InputError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), InputError> {
        self.tracker
            .validate()
            .map_err(|e| InputError::Config(e.to_string()))?;
        let t = &self.tolerances;
        for (name, v) in [
            ("real", t.real),
            ("dedup", t.dedup),
            ("diag", t.diag),
            ("filter", t.filter),
            ("normality", t.normality),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(InputError::Config(format!(
                    "tolerance {name} must be positive and finite"
                )));
            }
        }
        if let Some([re, im]) = self.gamma {
            let m = (re * re + im * im).sqrt();
            if m.is_nan() || (m - 1.0).abs() > 1e-12 {
                return Err(InputError::Config(format!(
                    "gamma must have modulus 1, got {m}"
                )));
            }
        }
        if self.threads == Some(0) {
            return Err(InputError::Config("threads must be positive".into()));
        }
        for (k, [lo, hi]) in self.sample.bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(InputError::Config(format!(
                    "sample bound {k} is empty or not finite"
                )));
            }
        }
        if let Some(s) = self.sample.spacing {
            if !(s.is_finite() && s > 0.0) {
                return Err(InputError::Config("spacing must be positive".into()));
            }
        }
        if let Some(r) = self.components.r {
            if !(r.is_finite() && r > 0.0) {
                return Err(InputError::Config("r must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn tracker(&self) -> TrackerConfig {
        self.tracker.clone()
    }
}
