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

//! Two-phase Louvain modularity optimization.
//!
//! Phase one moves single nodes to the neighboring community with the best
//! positive modularity gain until no move helps. Phase two collapses every
//! community into one node of a weighted graph, keeping internal weight as a
//! self-loop. The two phases repeat until phase one moves nothing.

use std::time::Instant;

use rand::seq::SliceRandom;

use super::{modularity_or_zero, Algorithm, DetectionError, DetectionResult};
use crate::graph::{Graph, NodeId};
use crate::partition::Partition;
use crate::rng::RandomSource;

/// Smallest gain counted as an improvement.
const MIN_GAIN: f64 = 1e-12;

/// Weighted graph with self-loops, private to this module.
struct LevelGraph {
    adj: Vec<Vec<(usize, f64)>>,
    /// Weight of the loop edge on each node, counted once.
    self_loops: Vec<f64>,
    /// Incident weight, loops counted twice.
    strength: Vec<f64>,
    /// `2M`.
    total: f64,
}

impl LevelGraph {
    fn from_graph(g: &Graph) -> Self {
        let adj: Vec<Vec<(usize, f64)>> = (0..g.n())
            .map(|u| g.neighbors(u).iter().map(|&v| (v, 1.0)).collect())
            .collect();
        Self {
            strength: g.degrees().into_iter().map(|k| k as f64).collect(),
            self_loops: vec![0.0; g.n()],
            total: 2.0 * g.edge_count() as f64,
            adj,
        }
    }

    fn n(&self) -> usize {
        self.adj.len()
    }

    fn aggregate(&self, comm: &[usize], count: usize) -> Self {
        let mut acc: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); count];
        let mut self_loops = vec![0.0; count];
        let mut strength = vec![0.0; count];
        for u in 0..self.n() {
            let cu = comm[u];
            strength[cu] += self.strength[u];
            self_loops[cu] += self.self_loops[u];
            for &(v, w) in &self.adj[u] {
                let cv = comm[v];
                if cu == cv {
                    // Seen from both ends.
                    self_loops[cu] += w / 2.0;
                } else {
                    *acc[cu].entry(cv).or_insert(0.0) += w;
                }
            }
        }
        Self {
            adj: acc.into_iter().map(|m| m.into_iter().collect()).collect(),
            self_loops,
            strength,
            total: self.total,
        }
    }
}

/// `w_{i,C} - tot_C·k_i / 2M`, where `tot_C` excludes `i` itself.
#[inline]
fn gain_units(weight_to: f64, tot_without: f64, k: f64, total: f64) -> f64 {
    weight_to - tot_without * k / total
}

/// Local moving on one level. Returns whether any node moved.
fn local_moves(lg: &LevelGraph, comm: &mut [usize], rng: &mut RandomSource) -> bool {
    let n = lg.n();
    let mut tot = vec![0.0; n];
    for u in 0..n {
        tot[comm[u]] += lg.strength[u];
    }
    let mut weight_to = vec![0.0; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);

    let mut moved_any = false;
    loop {
        let mut moved = false;
        for &u in &order {
            let own = comm[u];
            let k = lg.strength[u];
            for &(v, w) in &lg.adj[u] {
                let c = comm[v];
                if weight_to[c] == 0.0 {
                    touched.push(c);
                }
                weight_to[c] += w;
            }
            tot[own] -= k;
            let mut best = own;
            let mut best_gain = gain_units(weight_to[own], tot[own], k, lg.total);
            for &c in &touched {
                let gain = gain_units(weight_to[c], tot[c], k, lg.total);
                if gain > best_gain + MIN_GAIN {
                    best = c;
                    best_gain = gain;
                }
            }
            tot[best] += k;
            for &c in &touched {
                weight_to[c] = 0.0;
            }
            touched.clear();
            if best != own {
                comm[u] = best;
                moved = true;
            }
        }
        if !moved {
            break;
        }
        moved_any = true;
    }
    moved_any
}

fn compact(labels: &mut [usize]) -> usize {
    let mut map = vec![usize::MAX; labels.len()];
    let mut next = 0;
    for l in labels.iter_mut() {
        if map[*l] == usize::MAX {
            map[*l] = next;
            next += 1;
        }
        *l = map[*l];
    }
    next
}

pub fn detect_louvain(g: &Graph, rng: &mut RandomSource) -> DetectionResult {
    let start = Instant::now();
    let seed = rng.seed();
    let mut membership: Vec<usize> = (0..g.n()).collect();
    if g.edge_count() > 0 {
        let mut lg = LevelGraph::from_graph(g);
        loop {
            let mut comm: Vec<usize> = (0..lg.n()).collect();
            if !local_moves(&lg, &mut comm, rng) {
                break;
            }
            let count = compact(&mut comm);
            for m in membership.iter_mut() {
                *m = comm[*m];
            }
            if count == lg.n() {
                break;
            }
            lg = lg.aggregate(&comm, count);
        }
    }
    let partition = Partition::from_labels(&membership);
    DetectionResult {
        modularity: modularity_or_zero(g, &partition),
        partition,
        algorithm: Algorithm::Louvain,
        elapsed: start.elapsed(),
        rng_seed: Some(seed),
        converged: true,
    }
}

/// Modularity change from moving `node` into community `target`, computed
/// with the same gain terms the local-moving phase compares.
///
/// `target` may equal `p.community_count()` to denote a new singleton.
pub fn modularity_gain(
    g: &Graph,
    p: &Partition,
    node: NodeId,
    target: usize,
) -> Result<f64, DetectionError> {
    if p.len() != g.n() {
        return Err(DetectionError::PartitionMismatch {
            got: p.len(),
            expected: g.n(),
        });
    }
    if g.edge_count() == 0 {
        return Err(DetectionError::EmptyGraph);
    }
    let own = p.community_of(node);
    if target == own {
        return Ok(0.0);
    }
    let lg = LevelGraph::from_graph(g);
    let mut tot = vec![0.0; p.community_count() + 1];
    for v in 0..g.n() {
        tot[p.community_of(v)] += lg.strength[v];
    }
    let (mut w_own, mut w_target) = (0.0, 0.0);
    for &(v, w) in &lg.adj[node] {
        let c = p.community_of(v);
        if c == own {
            w_own += w;
        } else if c == target {
            w_target += w;
        }
    }
    let k = lg.strength[node];
    let stay = gain_units(w_own, tot[own] - k, k, lg.total);
    let go = gain_units(w_target, tot[target], k, lg.total);
    Ok((go - stay) * 2.0 / lg.total)
}
