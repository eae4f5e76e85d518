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

//! Topology report: distances, triangles, degree correlation, centralities
//! and their Freeman centralizations.

use std::collections::VecDeque;

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{Graph, NodeId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("graph has no pair of mutually reachable nodes")]
    NoReachablePairs,
    #[error("centralization needs at least 3 nodes, got {0}")]
    DegenerateDenominator(usize),
    #[error("{got} centrality values for {n} nodes")]
    LengthMismatch { got: usize, n: usize },
    #[error("only {got} observations at or above k_min, need {needed}")]
    TooFewObservations { got: usize, needed: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CentralityKind {
    Degree,
    Closeness,
    Betweenness,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopologyReport {
    /// Mean hop count over ordered reachable pairs.
    pub avg_distance: f64,
    pub unreachable_pairs: u64,
    pub transitivity_global: f64,
    pub clustering_local_avg: f64,
    /// `None` when endpoint degrees have zero variance.
    pub assortativity: Option<f64>,
    pub centralization_degree: f64,
    pub centralization_closeness: f64,
    pub centralization_betweenness: f64,
    pub degree_mean: f64,
    pub degree_max: f64,
    pub fitted_gamma: Option<f64>,
}

/// Everything one breadth-first pass per source yields.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSweep {
    /// Σ of hop counts to every reachable node, per source.
    pub distance_sums: Vec<u64>,
    /// Reachable nodes other than the source, per source.
    pub reached: Vec<usize>,
    /// Unordered-pair shortest-path betweenness.
    pub betweenness: Vec<f64>,
}

const SOURCE_CHUNK: usize = 32;

/// Single-source accumulation (BFS + dependency back-propagation) from every
/// node. Sources are processed in fixed chunks whose partial sums are added
/// in chunk order, so results do not depend on the worker count.
pub fn path_sweep(g: &Graph) -> PathSweep {
    let n = g.n();
    let sources: Vec<NodeId> = (0..n).collect();
    let partials: Vec<(Vec<(u64, usize)>, Vec<f64>)> = sources
        .par_chunks(SOURCE_CHUNK)
        .map(|chunk| {
            let mut scratch = Scratch::new(n);
            let mut bc = vec![0.0; n];
            let stats = chunk
                .iter()
                .map(|&s| scratch.accumulate(g, s, &mut bc))
                .collect();
            (stats, bc)
        })
        .collect();

    let mut distance_sums = Vec::with_capacity(n);
    let mut reached = Vec::with_capacity(n);
    let mut betweenness = vec![0.0; n];
    for (stats, bc) in partials {
        for (d, r) in stats {
            distance_sums.push(d);
            reached.push(r);
        }
        for (acc, x) in betweenness.iter_mut().zip(bc) {
            *acc += x;
        }
    }
    // Each unordered pair was counted from both ends.
    for b in &mut betweenness {
        *b /= 2.0;
    }
    PathSweep {
        distance_sums,
        reached,
        betweenness,
    }
}

struct Scratch {
    dist: Vec<i64>,
    sigma: Vec<f64>,
    delta: Vec<f64>,
    order: Vec<NodeId>,
    queue: VecDeque<NodeId>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Self {
            dist: vec![-1; n],
            sigma: vec![0.0; n],
            delta: vec![0.0; n],
            order: Vec::with_capacity(n),
            queue: VecDeque::with_capacity(n),
        }
    }

    fn accumulate(&mut self, g: &Graph, s: NodeId, bc: &mut [f64]) -> (u64, usize) {
        self.order.clear();
        self.dist[s] = 0;
        self.sigma[s] = 1.0;
        self.queue.push_back(s);
        let mut dsum = 0u64;
        while let Some(u) = self.queue.pop_front() {
            self.order.push(u);
            let du = self.dist[u];
            dsum += du as u64;
            for &v in g.neighbors(u) {
                if self.dist[v] < 0 {
                    self.dist[v] = du + 1;
                    self.queue.push_back(v);
                }
                if self.dist[v] == du + 1 {
                    self.sigma[v] += self.sigma[u];
                }
            }
        }
        for &w in self.order.iter().rev() {
            let dw = self.dist[w];
            let coeff = (1.0 + self.delta[w]) / self.sigma[w];
            for &v in g.neighbors(w) {
                if self.dist[v] == dw - 1 {
                    self.delta[v] += self.sigma[v] * coeff;
                }
            }
            if w != s {
                bc[w] += self.delta[w];
            }
        }
        let reached = self.order.len() - 1;
        for &w in &self.order {
            self.dist[w] = -1;
            self.sigma[w] = 0.0;
            self.delta[w] = 0.0;
        }
        (dsum, reached)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceSummary {
    pub mean: f64,
    pub reachable_pairs: u64,
    pub unreachable_pairs: u64,
}

pub fn average_distance(g: &Graph) -> Result<DistanceSummary, MetricError> {
    distance_summary(g, &path_sweep(g))
}

fn distance_summary(g: &Graph, sweep: &PathSweep) -> Result<DistanceSummary, MetricError> {
    let n = g.n() as u64;
    let total: u64 = sweep.distance_sums.iter().sum();
    let reachable: u64 = sweep.reached.iter().map(|&r| r as u64).sum();
    if reachable == 0 {
        return Err(MetricError::NoReachablePairs);
    }
    Ok(DistanceSummary {
        mean: total as f64 / reachable as f64,
        reachable_pairs: reachable,
        unreachable_pairs: n * n.saturating_sub(1) - reachable,
    })
}

/// Global (triangle/triple) and mean local clustering.
pub fn transitivity(g: &Graph) -> (f64, f64) {
    let tri = triangles_per_node(g);
    let mut closed = 0u64;
    let mut triples = 0u64;
    let mut local_sum = 0.0;
    let mut eligible = 0usize;
    for (v, &t) in tri.iter().enumerate() {
        let k = g.degree(v) as u64;
        if k >= 2 {
            let pairs = k * (k - 1) / 2;
            triples += pairs;
            closed += t;
            local_sum += t as f64 / pairs as f64;
            eligible += 1;
        }
    }
    let global = if triples == 0 {
        0.0
    } else {
        closed as f64 / triples as f64
    };
    let local = if eligible == 0 {
        0.0
    } else {
        local_sum / eligible as f64
    };
    (global, local)
}

/// Triangles through each node.
pub fn triangles_per_node(g: &Graph) -> Vec<u64> {
    let n = g.n();
    let mut tri = vec![0u64; n];
    for u in 0..n {
        let nu = g.neighbors(u);
        let upper_u = &nu[nu.partition_point(|&x| x <= u)..];
        for &v in upper_u {
            let nv = g.neighbors(v);
            let a = &upper_u[upper_u.partition_point(|&x| x <= v)..];
            let b = &nv[nv.partition_point(|&x| x <= v)..];
            let (mut i, mut j) = (0, 0);
            while i < a.len() && j < b.len() {
                match a[i].cmp(&b[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        let w = a[i];
                        tri[u] += 1;
                        tri[v] += 1;
                        tri[w] += 1;
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
    }
    tri
}

/// Pearson correlation of endpoint degrees over both orientations of every edge.
///
/// Sums are exact integers, so the zero-variance case is detected exactly.
pub fn degree_assortativity(g: &Graph) -> Option<f64> {
    let ends = 2 * g.edge_count() as i128;
    if ends == 0 {
        return None;
    }
    let (mut s1, mut s2, mut cross) = (0i128, 0i128, 0i128);
    for &(u, v) in g.edges() {
        let (a, b) = (g.degree(u) as i128, g.degree(v) as i128);
        s1 += a + b;
        s2 += a * a + b * b;
        cross += 2 * a * b;
    }
    let var = ends * s2 - s1 * s1;
    if var == 0 {
        return None;
    }
    let cov = ends * cross - s1 * s1;
    Some(cov as f64 / var as f64)
}

pub fn centrality(g: &Graph, kind: CentralityKind) -> Vec<f64> {
    match kind {
        CentralityKind::Degree => g.degrees().into_iter().map(|k| k as f64).collect(),
        CentralityKind::Closeness => closeness_from(&path_sweep(g)),
        CentralityKind::Betweenness => path_sweep(g).betweenness,
    }
}

/// `(|component| - 1) / Σ distances` within the node's component; 0 when isolated.
fn closeness_from(sweep: &PathSweep) -> Vec<f64> {
    sweep
        .distance_sums
        .iter()
        .zip(&sweep.reached)
        .map(|(&d, &r)| if d == 0 { 0.0 } else { r as f64 / d as f64 })
        .collect()
}

/// Centralization sum reached by the star on `n` nodes.
pub fn star_centralization_sum(kind: CentralityKind, n: usize) -> f64 {
    let n = n as f64;
    match kind {
        CentralityKind::Degree => (n - 1.0) * (n - 2.0),
        CentralityKind::Closeness => (n - 1.0) * (n - 2.0) / (2.0 * n - 3.0),
        CentralityKind::Betweenness => (n - 1.0) * (n - 1.0) * (n - 2.0) / 2.0,
    }
}

/// Freeman centralization, clamped to `[0, 1]`.
///
/// Per-component closeness on a disconnected graph can exceed the star's
/// spread; the clamp keeps the reported value in range.
pub fn centralization(values: &[f64], kind: CentralityKind, n: usize) -> Result<f64, MetricError> {
    if n < 3 {
        return Err(MetricError::DegenerateDenominator(n));
    }
    if values.len() != n {
        return Err(MetricError::LengthMismatch {
            got: values.len(),
            n,
        });
    }
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let spread: f64 = values.iter().map(|&c| max - c).sum();
    Ok((spread / star_centralization_sum(kind, n)).clamp(0.0, 1.0))
}

pub const MIN_TAIL: usize = 100;

/// Continuous-approximation maximum-likelihood exponent with fixed `k_min`.
///
/// Returns `f64::INFINITY` when every tail observation equals `k_min`.
pub fn fit_power_law_exponent(degrees: &[usize], k_min: usize) -> Result<f64, MetricError> {
    let k_min = k_min.max(1);
    let tail: Vec<usize> = degrees.iter().copied().filter(|&k| k >= k_min).collect();
    if tail.len() < MIN_TAIL {
        return Err(MetricError::TooFewObservations {
            got: tail.len(),
            needed: MIN_TAIL,
        });
    }
    if tail.iter().all(|&k| k == k_min) {
        return Ok(f64::INFINITY);
    }
    let shift = k_min as f64 - 0.5;
    let log_sum: f64 = tail.iter().map(|&k| (k as f64 / shift).ln()).sum();
    Ok(1.0 + tail.len() as f64 / log_sum)
}

/// Full report; needs at least three nodes and one edge.
pub fn topology_report(g: &Graph) -> Result<TopologyReport, MetricError> {
    let n = g.n();
    let sweep = path_sweep(g);
    let dist = distance_summary(g, &sweep)?;
    let (transitivity_global, clustering_local_avg) = transitivity(g);
    let degrees = g.degrees();
    let degree_values: Vec<f64> = degrees.iter().map(|&k| k as f64).collect();
    let closeness = closeness_from(&sweep);
    let centralization_degree = centralization(&degree_values, CentralityKind::Degree, n)?;
    let centralization_closeness = centralization(&closeness, CentralityKind::Closeness, n)?;
    let centralization_betweenness = centralization(&sweep.betweenness, CentralityKind::Betweenness, n)?;
    let k_min = degrees.iter().copied().filter(|&k| k > 0).min().unwrap_or(1);
    let fitted_gamma = fit_power_law_exponent(&degrees, k_min)
        .ok()
        .filter(|g| g.is_finite());
    Ok(TopologyReport {
        avg_distance: dist.mean,
        unreachable_pairs: dist.unreachable_pairs,
        transitivity_global,
        clustering_local_avg,
        assortativity: degree_assortativity(g),
        centralization_degree,
        centralization_closeness,
        centralization_betweenness,
        degree_mean: 2.0 * g.edge_count() as f64 / n as f64,
        degree_max: degrees.iter().copied().max().unwrap_or(0) as f64,
        fitted_gamma,
    })
}
