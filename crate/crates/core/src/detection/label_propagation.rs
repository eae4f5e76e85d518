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

//! Asynchronous label propagation.
//!
//! Every node starts with its own label. In each sweep the nodes are visited
//! in a fresh random order and adopt the label most frequent among their
//! neighbors, ties broken uniformly. A node whose current label is already
//! among the most frequent keeps it, so a sweep without any change means every
//! node holds a majority label. A node's own label is not counted.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{modularity_or_zero, Algorithm, DetectionResult};
use crate::graph::{Graph, NodeId};
use crate::partition::Partition;
use crate::rng::RandomSource;

pub const MAX_SWEEPS: usize = 1000;

pub fn detect_label_propagation(g: &Graph, rng: &mut RandomSource) -> DetectionResult {
    let start = Instant::now();
    let seed = rng.seed();
    let n = g.n();
    let mut labels: Vec<usize> = (0..n).collect();
    let mut counts = vec![0u32; n];
    let mut seen: Vec<usize> = Vec::new();
    let mut best: Vec<usize> = Vec::new();
    let mut order: Vec<NodeId> = (0..n).collect();
    let mut converged = false;

    for _ in 0..MAX_SWEEPS {
        order.shuffle(rng);
        let mut changed = false;
        for &v in &order {
            let nbrs = g.neighbors(v);
            if nbrs.is_empty() {
                continue;
            }
            for &u in nbrs {
                let l = labels[u];
                if counts[l] == 0 {
                    seen.push(l);
                }
                counts[l] += 1;
            }
            let top = seen.iter().map(|&l| counts[l]).max().unwrap_or(0);
            best.clear();
            best.extend(seen.iter().copied().filter(|&l| counts[l] == top));
            for &l in &seen {
                counts[l] = 0;
            }
            seen.clear();

            if !best.contains(&labels[v]) {
                labels[v] = best[rng.gen_range(0..best.len())];
                changed = true;
            }
        }
        if !changed {
            converged = true;
            break;
        }
    }

    let partition = Partition::from_labels(&labels);
    DetectionResult {
        modularity: modularity_or_zero(g, &partition),
        partition,
        algorithm: Algorithm::LabelPropagation,
        elapsed: start.elapsed(),
        rng_seed: Some(seed),
        converged,
    }
}
