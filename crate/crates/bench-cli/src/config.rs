// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Flat key-value configuration shared by every subcommand.
//!
//! A JSON object supplies any subset of the keys below. Every key can also be
//! given as a command-line flag of the same name, which wins over the file.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use lfr_core::detection::Algorithm;
use lfr_core::generators::{BaParams, CmParams, EvFitness, EvParams};
use lfr_core::planting::{PlantingParams, SeedModel};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("bad config {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("invalid value for {key}: {message}")]
    Invalid { key: &'static str, message: String },
}

fn invalid(key: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Cm,
    Ba,
    Ev,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Cm => "cm",
            ModelKind::Ba => "ba",
            ModelKind::Ev => "ev",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum FitnessKind {
    LastRound,
    Accumulated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub model: ModelKind,
    pub n: usize,
    /// Degree exponent, CM only.
    pub gamma: f64,
    /// Maximum degree, CM only.
    pub k_max: usize,
    /// Target mean degree, CM only.
    pub avg_k: f64,
    /// Links per arriving node, BA and EV.
    pub m: usize,
    pub b: f64,
    pub epsilon: f64,
    pub ev_fitness: FitnessKind,
    pub beta: f64,
    pub c_min: Option<usize>,
    pub c_max: Option<usize>,
    pub tolerance: f64,
    pub max_sweeps: usize,
    /// Mixing level for `generate`.
    pub mu: f64,
    pub mu_values: Vec<f64>,
    pub replicates: usize,
    pub base_seed: u64,
    pub algorithms: Vec<String>,
    pub out: PathBuf,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            model: ModelKind::Cm,
            n: 5000,
            gamma: 3.0,
            k_max: 90,
            avg_k: 30.0,
            m: 15,
            b: 1.5,
            epsilon: 0.99,
            ev_fitness: FitnessKind::LastRound,
            beta: 2.0,
            c_min: None,
            c_max: None,
            tolerance: 0.05,
            max_sweeps: 200,
            mu: 0.3,
            mu_values: (1..=19).map(|i| i as f64 * 0.05).map(|x| (x * 100.0).round() / 100.0).collect(),
            replicates: 25,
            base_seed: 0,
            algorithms: Algorithm::ALL.iter().map(|a| a.name().to_string()).collect(),
            out: PathBuf::from("lfr-out"),
            workers: 0,
        }
    }
}

impl SweepConfig {
    pub fn from_json(text: &str, path: &Path) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|source| ConfigError::Parse {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text, path)
    }

    /// Keys that shape the results; `out` and `workers` are excluded.
    pub fn fingerprint(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(map) = v.as_object_mut() {
            map.remove("out");
            map.remove("workers");
        }
        serde_json::to_string_pretty(&v).expect("config serializes")
    }

    pub fn algorithms(&self) -> Result<Vec<Algorithm>, ConfigError> {
        let mut out = Vec::new();
        for name in &self.algorithms {
            let a = Algorithm::from_str(name).map_err(|e| invalid("algorithms", e.to_string()))?;
            if out.contains(&a) {
                return Err(invalid("algorithms", format!("{name} listed twice")));
            }
            out.push(a);
        }
        Ok(out)
    }

    pub fn seed_model(&self) -> SeedModel {
        match self.model {
            ModelKind::Cm => SeedModel::Cm(CmParams {
                n: self.n,
                gamma: self.gamma,
                k_max: self.k_max,
                target_avg: self.avg_k,
            }),
            ModelKind::Ba => SeedModel::Ba(BaParams::new(self.n, self.m)),
            ModelKind::Ev => SeedModel::Ev(EvParams {
                fitness: match self.ev_fitness {
                    FitnessKind::LastRound => EvFitness::LastRound,
                    FitnessKind::Accumulated => EvFitness::Accumulated,
                },
                ..EvParams::new(self.n, self.m, self.b, self.epsilon)
            }),
        }
    }

    pub fn planting(&self, mu: f64) -> PlantingParams {
        PlantingParams {
            beta: self.beta,
            c_min: self.c_min,
            c_max: self.c_max,
            tolerance: self.tolerance,
            max_sweeps: self.max_sweeps,
            ..PlantingParams::new(mu)
        }
    }

    /// Checks ranges that would otherwise surface as failures in every row.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n < 2 {
            return Err(invalid("n", "need at least 2 nodes"));
        }
        let open_unit = |x: f64| x > 0.0 && x < 1.0;
        if self.mu_values.is_empty() {
            return Err(invalid("mu_values", "empty"));
        }
        if let Some(bad) = self.mu_values.iter().find(|&&x| !open_unit(x)) {
            return Err(invalid("mu_values", format!("{bad} outside (0, 1)")));
        }
        if !open_unit(self.mu) {
            return Err(invalid("mu", format!("{} outside (0, 1)", self.mu)));
        }
        if self.replicates == 0 {
            return Err(invalid("replicates", "must be at least 1"));
        }
        if !(self.tolerance > 0.0) {
            return Err(invalid("tolerance", "must be positive"));
        }
        if !self.beta.is_finite() {
            return Err(invalid("beta", "must be finite"));
        }
        if let (Some(lo), Some(hi)) = (self.c_min, self.c_max) {
            if lo > hi {
                return Err(invalid("c_min", format!("{lo} exceeds c_max {hi}")));
            }
        }
        if self.c_max.is_some_and(|c| c > self.n) {
            return Err(invalid("c_max", "exceeds n"));
        }
        match self.model {
            ModelKind::Cm => {
                if self.k_max >= self.n {
                    return Err(invalid("k_max", "must be below n"));
                }
                if !(self.avg_k >= 1.0 && self.avg_k < self.k_max as f64) {
                    return Err(invalid("avg_k", "must lie in [1, k_max)"));
                }
            }
            ModelKind::Ba | ModelKind::Ev => {
                if self.m == 0 || self.m >= self.n {
                    return Err(invalid("m", "must lie in [1, n)"));
                }
                if self.model == ModelKind::Ev {
                    if !(self.b > 1.0) {
                        return Err(invalid("b", "must exceed 1"));
                    }
                    if !(0.0..=1.0).contains(&self.epsilon) {
                        return Err(invalid("epsilon", "must lie in [0, 1]"));
                    }
                }
            }
        }
        self.algorithms()?;
        Ok(())
    }
}

/// Same-name flag for every configuration key.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// JSON file with any subset of the keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long = "k_max")]
    pub k_max: Option<usize>,
    #[arg(long = "avg_k")]
    pub avg_k: Option<f64>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long = "ev_fitness", value_enum)]
    pub ev_fitness: Option<FitnessKind>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long = "c_min")]
    pub c_min: Option<usize>,
    #[arg(long = "c_max")]
    pub c_max: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long = "max_sweeps")]
    pub max_sweeps: Option<usize>,
    #[arg(long)]
    pub mu: Option<f64>,
    /// Comma-separated list.
    #[arg(long = "mu_values", value_delimiter = ',')]
    pub mu_values: Option<Vec<f64>>,
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long = "base_seed", visible_alias = "seed")]
    pub base_seed: Option<u64>,
    /// Comma-separated subset of lp, fastgreedy, louvain; empty for none.
    #[arg(long, value_delimiter = ',')]
    pub algorithms: Option<Vec<String>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
}

impl ConfigArgs {
    /// File (or defaults), then flags, then validation.
    pub fn resolve(&self) -> Result<SweepConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(path) => SweepConfig::load(path)?,
            None => SweepConfig::default(),
        };
        macro_rules! take {
            ($($key:ident),*) => {
                $(if let Some(v) = &self.$key { cfg.$key = v.clone(); })*
            };
        }
        take!(model, n, gamma, k_max, avg_k, m, b, epsilon, ev_fitness, beta, tolerance, max_sweeps, mu, mu_values, replicates, base_seed, out, workers);
        if self.c_min.is_some() {
            cfg.c_min = self.c_min;
        }
        if self.c_max.is_some() {
            cfg.c_max = self.c_max;
        }
        if let Some(list) = &self.algorithms {
            cfg.algorithms = list.iter().filter(|s| !s.is_empty()).cloned().collect();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
