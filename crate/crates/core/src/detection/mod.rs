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

//! Built-in community detection: label propagation, greedy agglomerative
//! modularity maximization, and the two-phase Louvain method.

mod fast_greedy;
mod label_propagation;
mod louvain;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use thiserror::Error;

use crate::graph::Graph;
use crate::partition::Partition;

pub use fast_greedy::detect_fast_greedy;
pub use label_propagation::{detect_label_propagation, MAX_SWEEPS as LP_MAX_SWEEPS};
pub use louvain::{detect_louvain, modularity_gain};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DetectionError {
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("partition covers {got} nodes, graph has {expected}")]
    PartitionMismatch { got: usize, expected: usize },
    #[error("unknown algorithm {0:?}")]
    UnknownAlgorithm(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    LabelPropagation,
    FastGreedy,
    Louvain,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [
        Algorithm::LabelPropagation,
        Algorithm::FastGreedy,
        Algorithm::Louvain,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::LabelPropagation => "lp",
            Algorithm::FastGreedy => "fastgreedy",
            Algorithm::Louvain => "louvain",
        }
    }

    pub fn is_randomized(&self) -> bool {
        !matches!(self, Algorithm::FastGreedy)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = DetectionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lp" => Ok(Algorithm::LabelPropagation),
            "fastgreedy" => Ok(Algorithm::FastGreedy),
            "louvain" => Ok(Algorithm::Louvain),
            other => Err(DetectionError::UnknownAlgorithm(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    pub partition: Partition,
    pub algorithm: Algorithm,
    /// Modularity of `partition`; 0 on an edgeless graph.
    pub modularity: f64,
    pub elapsed: Duration,
    pub rng_seed: Option<u64>,
    pub converged: bool,
}

/// Runs `algorithm`, seeding the randomized ones with `seed`.
pub fn detect(g: &Graph, algorithm: Algorithm, seed: u64) -> Result<DetectionResult, DetectionError> {
    let mut rng = crate::rng::RandomSource::new(seed);
    match algorithm {
        Algorithm::LabelPropagation => Ok(detect_label_propagation(g, &mut rng)),
        Algorithm::FastGreedy => detect_fast_greedy(g),
        Algorithm::Louvain => Ok(detect_louvain(g, &mut rng)),
    }
}

/// `Q = Σ_c [ l_c / M - (d_c / 2M)^2 ]`.
pub fn modularity(g: &Graph, p: &Partition) -> Result<f64, DetectionError> {
    if p.len() != g.n() {
        return Err(DetectionError::PartitionMismatch {
            got: p.len(),
            expected: g.n(),
        });
    }
    let m = g.edge_count();
    if m == 0 {
        return Err(DetectionError::EmptyGraph);
    }
    let q = p.community_count();
    let mut internal = vec![0u64; q];
    let mut degree = vec![0u64; q];
    for v in 0..g.n() {
        degree[p.community_of(v)] += g.degree(v) as u64;
    }
    for &(u, v) in g.edges() {
        if p.community_of(u) == p.community_of(v) {
            internal[p.community_of(u)] += 1;
        }
    }
    let m = m as f64;
    Ok(internal
        .iter()
        .zip(&degree)
        .map(|(&l, &d)| l as f64 / m - (d as f64 / (2.0 * m)).powi(2))
        .sum())
}

fn modularity_or_zero(g: &Graph, p: &Partition) -> f64 {
    modularity(g, p).unwrap_or(0.0)
}
