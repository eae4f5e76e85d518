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

//! Greedy agglomerative modularity maximization.
//!
//! Starting from singletons, the adjacent pair with the largest modularity
//! change is merged until no adjacent pairs remain; the dendrogram cut with
//! the highest modularity is returned. For communities `i`, `j` with `w`
//! edges between them and degree totals `d_i`, `d_j`, the merge changes
//! modularity by `w/M - d_i·d_j/(2M²)`.

use std::collections::BTreeMap;
use std::time::Instant;

use super::{modularity, Algorithm, DetectionError, DetectionResult};
use crate::graph::Graph;
use crate::partition::Partition;

/// Best merge partner of one community: `(gain, partner)`.
type Candidate = Option<(f64, usize)>;

struct Agglomeration {
    m: f64,
    degree: Vec<u64>,
    links: Vec<BTreeMap<usize, u64>>,
    alive: Vec<bool>,
    best: Vec<Candidate>,
}

impl Agglomeration {
    fn new(g: &Graph) -> Self {
        let n = g.n();
        let mut links = vec![BTreeMap::new(); n];
        for &(u, v) in g.edges() {
            links[u].insert(v, 1);
            links[v].insert(u, 1);
        }
        let mut a = Self {
            m: g.edge_count() as f64,
            degree: g.degrees().into_iter().map(|k| k as u64).collect(),
            links,
            alive: vec![true; n],
            best: vec![None; n],
        };
        for c in 0..n {
            a.best[c] = a.scan(c);
        }
        a
    }

    #[inline]
    fn gain(&self, i: usize, j: usize, w: u64) -> f64 {
        w as f64 / self.m - (self.degree[i] * self.degree[j]) as f64 / (2.0 * self.m * self.m)
    }

    /// Highest-gain partner of `c`, ties to the smallest id.
    fn scan(&self, c: usize) -> Candidate {
        let mut best: Candidate = None;
        for (&k, &w) in &self.links[c] {
            let d = self.gain(c, k, w);
            if best.map_or(true, |(bd, _)| d > bd) {
                best = Some((d, k));
            }
        }
        best
    }

    /// Globally best pair, ties to the smallest `(min, max)` id pair.
    fn select(&self) -> Option<(f64, usize, usize)> {
        let mut out: Option<(f64, usize, usize)> = None;
        for c in 0..self.alive.len() {
            if !self.alive[c] {
                continue;
            }
            if let Some((d, k)) = self.best[c] {
                let pair = (c.min(k), c.max(k));
                let better = match out {
                    None => true,
                    Some((bd, a, b)) => d > bd || (d == bd && pair < (a, b)),
                };
                if better {
                    out = Some((d, pair.0, pair.1));
                }
            }
        }
        out
    }

    /// Folds `gone` into `keep`.
    fn merge(&mut self, keep: usize, gone: usize) {
        let moved = std::mem::take(&mut self.links[gone]);
        self.links[keep].remove(&gone);
        for (k, w) in moved {
            if k == keep {
                continue;
            }
            self.links[k].remove(&gone);
            *self.links[k].entry(keep).or_insert(0) += w;
            *self.links[keep].entry(k).or_insert(0) += w;
        }
        self.degree[keep] += self.degree[gone];
        self.degree[gone] = 0;
        self.alive[gone] = false;
        self.best[gone] = None;

        self.best[keep] = self.scan(keep);
        let nbrs: Vec<(usize, u64)> = self.links[keep].iter().map(|(&k, &w)| (k, w)).collect();
        for (k, w) in nbrs {
            let stale = matches!(self.best[k], Some((_, p)) if p == keep || p == gone);
            if stale {
                self.best[k] = self.scan(k);
            } else {
                let d = self.gain(k, keep, w);
                let better = match self.best[k] {
                    None => true,
                    Some((bd, p)) => d > bd || (d == bd && keep < p),
                };
                if better {
                    self.best[k] = Some((d, keep));
                }
            }
        }
    }
}

pub fn detect_fast_greedy(g: &Graph) -> Result<DetectionResult, DetectionError> {
    let start = Instant::now();
    if g.edge_count() == 0 {
        return Err(DetectionError::EmptyGraph);
    }
    let n = g.n();
    let mut agg = Agglomeration::new(g);
    let two_m = 2.0 * agg.m;
    let mut q: f64 = agg
        .degree
        .iter()
        .map(|&d| -(d as f64 / two_m).powi(2))
        .sum();
    let mut best_q = q;
    let mut merges: Vec<(usize, usize)> = Vec::with_capacity(n);
    let mut best_len = 0;

    while let Some((d, a, b)) = agg.select() {
        agg.merge(a, b);
        merges.push((a, b));
        q += d;
        if q > best_q {
            best_q = q;
            best_len = merges.len();
        }
    }

    let mut parent: Vec<usize> = (0..n).collect();
    for &(keep, gone) in &merges[..best_len] {
        parent[gone] = keep;
    }
    let labels: Vec<usize> = (0..n)
        .map(|mut v| {
            while parent[v] != v {
                v = parent[v];
            }
            v
        })
        .collect();
    let partition = Partition::from_labels(&labels);
    Ok(DetectionResult {
        modularity: modularity(g, &partition)?,
        partition,
        algorithm: Algorithm::FastGreedy,
        elapsed: start.elapsed(),
        rng_seed: None,
        converged: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_triangles_bridge() {
        let g = Graph::from_edge_list(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])
            .unwrap();
        let r = detect_fast_greedy(&g).unwrap();
        assert_eq!(r.partition.labels(), &[0, 0, 0, 1, 1, 1]);
        assert!((r.modularity - 5.0 / 14.0).abs() < 1e-12);
    }

    #[test]
    fn k4_single_block() {
        let g = Graph::from_edge_list(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let r = detect_fast_greedy(&g).unwrap();
        assert_eq!(r.partition.community_count(), 1);
        assert!(r.modularity.abs() < 1e-12);
    }

    #[test]
    fn components_stay_apart() {
        let g = Graph::from_edge_list(7, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let r = detect_fast_greedy(&g).unwrap();
        assert_eq!(r.partition.community_count(), 3);
    }

    #[test]
    fn empty_graph() {
        assert_eq!(
            detect_fast_greedy(&Graph::with_nodes(3)).unwrap_err(),
            DetectionError::EmptyGraph
        );
    }
}
