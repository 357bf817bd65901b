//! Engine configuration.
//!
//! One flat TOML table carries every tunable used by the offline build and the
//! online query path. Missing keys take the defaults below.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable naming a default config file.
pub const CONFIG_ENV: &str = "QIKSE_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    /// σᵢ² = T(wᵢ) / Σⱼ T(wⱼ)
    #[default]
    Colocation,
    /// σᵢ² = 1 / p
    Average,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CandidateMode {
    /// Non-schema intersection minus schema union.
    #[default]
    Paper,
    /// Non-schema intersection plus schema union.
    Union,
}

impl std::str::FromStr for CandidateMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(CandidateMode::Paper),
            "union" => Ok(CandidateMode::Union),
            other => Err(Error::Argument(format!(
                "unknown candidate mode `{other}` (expected paper or union)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    #[serde(serialize_with = "crate::numfmt::f64")]
    pub min_threshold: f64,
    /// Window multiplier: a compound of size p is looked for in windows of
    /// `l * p + window_slack` tokens.
    pub l: usize,
    pub window_slack: usize,
    pub max_compound_size: usize,
    pub weight_mode: WeightMode,
    #[serde(serialize_with = "crate::numfmt::f64")]
    pub pca_threshold: f64,
    #[serde(serialize_with = "crate::numfmt::f64")]
    pub rho_tol: f64,
    pub rho_max_iter: usize,
    #[serde(serialize_with = "crate::numfmt::f64")]
    pub beta_tol: f64,
    pub beta_max_iter: usize,
    #[serde(serialize_with = "crate::numfmt::f64")]
    pub prob_floor: f64,
    pub candidate_mode: CandidateMode,
    pub schema_includes_edge_labels: bool,
    pub k: usize,
    pub max_fanout: usize,
    /// Replacement stopword list, one word per line.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stopwords: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            min_threshold: 0.6,
            l: 1,
            window_slack: 1,
            max_compound_size: 3,
            weight_mode: WeightMode::Colocation,
            pca_threshold: 0.85,
            rho_tol: 1e-8,
            rho_max_iter: 500,
            beta_tol: 1e-9,
            beta_max_iter: 300,
            prob_floor: 1e-12,
            candidate_mode: CandidateMode::Paper,
            schema_includes_edge_labels: false,
            k: 20,
            max_fanout: 64,
            stopwords: None,
        }
    }
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_toml_str(&text)?;
        // relative stopword paths are resolved against the config file
        if let (Some(sw), Some(dir)) = (config.stopwords.as_mut(), path.parent()) {
            if sw.is_relative() {
                *sw = dir.join(&*sw);
            }
        }
        Ok(config)
    }

    /// Explicit path, else `$QIKSE_CONFIG`, else defaults.
    pub fn resolve(path: Option<&Path>) -> Result<Self> {
        match path {
            Some(p) => Self::from_file(p),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(p) if !p.is_empty() => Self::from_file(Path::new(&p)),
                _ => Ok(Self::default()),
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(0.0..=1.0).contains(&self.min_threshold) {
            return bad(format!("min_threshold {} outside [0, 1]", self.min_threshold));
        }
        if !(self.pca_threshold > 0.0 && self.pca_threshold <= 1.0) {
            return bad(format!("pca_threshold {} outside (0, 1]", self.pca_threshold));
        }
        if self.l == 0 {
            return bad("l must be at least 1".into());
        }
        if self.max_compound_size < 2 {
            return bad("max_compound_size must be at least 2".into());
        }
        if self.k == 0 {
            return bad("k must be at least 1".into());
        }
        if self.max_fanout == 0 {
            return bad("max_fanout must be at least 1".into());
        }
        for (name, v) in [
            ("rho_tol", self.rho_tol),
            ("beta_tol", self.beta_tol),
            ("prob_floor", self.prob_floor),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive"));
            }
        }
        Ok(())
    }

    pub fn window_len(&self, compound_size: usize) -> usize {
        self.l * compound_size + self.window_slack
    }
}
