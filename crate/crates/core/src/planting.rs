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

//! Planting a ground-truth community structure into a seed graph.
//!
//! Nodes are first placed into communities of power-law sizes, then edges are
//! rewired with degree-preserving double-edge swaps until each node's share of
//! external links approaches the mixing coefficient `mu`.
//!
//! Every node `i` of degree `k_i` gets an internal target
//! `round_half_up((1 - mu)·k_i)`, capped at `|community(i)| - 1`, and the
//! external target is the remainder. The rewiring hill-descends the integer
//! objective `Σ_i |ext_i - ext_target_i|`; a swap is only kept if it does not
//! raise it.

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::generators::{generate_ba, generate_cm, generate_ev, BaParams, CmParams, EvParams, GenerateError};
use crate::graph::{Graph, NodeId, SwapMode};
use crate::partition::Partition;
use crate::rng::RandomSource;
use crate::sampling::{build_community_sizes, SamplingError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlantingError {
    #[error("community size list is empty")]
    EmptySizes,
    #[error("community sizes sum to {sum}, expected {n}")]
    SizeMismatch { sum: usize, n: usize },
    #[error("partition covers {got} nodes, graph has {expected}")]
    PartitionMismatch { got: usize, expected: usize },
    #[error("every node is isolated; mixing is undefined")]
    IsolatedNode,
    #[error("node {node} needs {internal} internal links but the largest community holds {largest}")]
    Unassignable {
        node: NodeId,
        internal: usize,
        largest: usize,
    },
    #[error("invalid planting parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantingParams {
    pub mu: f64,
    pub beta: f64,
    /// Defaults to `max(10, k_min + 1)` over the seed degrees when absent,
    /// so a minimum-degree node can keep all of its links internal.
    pub c_min: Option<usize>,
    /// Defaults to `max(n / 8, c_min)` when absent.
    pub c_max: Option<usize>,
    /// Acceptable gap between the achieved mean mixing and `mu`.
    pub tolerance: f64,
    /// Maximum passes over the node set.
    pub max_sweeps: usize,
}

impl PlantingParams {
    pub fn new(mu: f64) -> Self {
        Self {
            mu,
            beta: 2.0,
            c_min: None,
            c_max: None,
            tolerance: 0.05,
            max_sweeps: 200,
        }
    }

    /// Community-size bounds used for a seed graph.
    pub fn size_bounds(&self, g: &Graph) -> (usize, usize) {
        let n = g.n();
        let c_min = self.c_min.unwrap_or_else(|| {
            let k_min = (0..n).map(|v| g.degree(v)).min().unwrap_or(0);
            (k_min + 1).max(10).min(n)
        });
        (c_min, self.c_max.unwrap_or((n / 8).max(c_min)))
    }

    fn check(&self) -> Result<(), PlantingError> {
        if !(self.mu > 0.0 && self.mu < 1.0) {
            return Err(PlantingError::InvalidParams(format!("mu {} outside (0, 1)", self.mu)));
        }
        if !(self.tolerance > 0.0) {
            return Err(PlantingError::InvalidParams(format!(
                "tolerance {} must be positive",
                self.tolerance
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedNetwork {
    pub graph: Graph,
    pub truth: Partition,
    pub achieved_mu_mean: f64,
    pub achieved_mu_per_node: Vec<f64>,
    pub mu_limit: f64,
    pub converged: bool,
    pub swaps: usize,
    pub sweeps: usize,
}

/// Seed model selector for [`plant`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeedModel {
    Cm(CmParams),
    Ba(BaParams),
    Ev(EvParams),
}

impl SeedModel {
    pub fn generate(&self, rng: &mut RandomSource) -> Result<Graph, GenerateError> {
        match self {
            SeedModel::Cm(p) => generate_cm(p, rng),
            SeedModel::Ba(p) => generate_ba(p, rng),
            SeedModel::Ev(p) => generate_ev(p, rng),
        }
    }
}

/// `(n - largest) / n`: above this mixing level the blocks stop being communities.
pub fn mu_limit(sizes: &[usize], n: usize) -> Result<f64, PlantingError> {
    let largest = *sizes.iter().max().ok_or(PlantingError::EmptySizes)?;
    let sum: usize = sizes.iter().sum();
    if sum != n {
        return Err(PlantingError::SizeMismatch { sum, n });
    }
    Ok((n - largest) as f64 / n as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mixing {
    /// `external_degree / degree`; `None` for isolated nodes.
    pub per_node: Vec<Option<f64>>,
    /// Mean over non-isolated nodes.
    pub mean: f64,
    pub isolated: Vec<NodeId>,
}

pub fn measure_mixing(g: &Graph, p: &Partition) -> Result<Mixing, PlantingError> {
    if p.len() != g.n() {
        return Err(PlantingError::PartitionMismatch {
            got: p.len(),
            expected: g.n(),
        });
    }
    let ext = external_degrees(g, p);
    let mut per_node = Vec::with_capacity(g.n());
    let mut isolated = Vec::new();
    let mut sum = 0.0;
    for (i, &e) in ext.iter().enumerate() {
        let k = g.degree(i);
        if k == 0 {
            isolated.push(i);
            per_node.push(None);
        } else {
            let mu = node_mu(e, k);
            sum += mu;
            per_node.push(Some(mu));
        }
    }
    let counted = g.n() - isolated.len();
    if counted == 0 {
        return Err(PlantingError::IsolatedNode);
    }
    Ok(Mixing {
        per_node,
        mean: sum / counted as f64,
        isolated,
    })
}

#[inline]
fn node_mu(ext: usize, k: usize) -> f64 {
    ext as f64 / k as f64
}

fn external_degrees(g: &Graph, p: &Partition) -> Vec<usize> {
    (0..g.n())
        .map(|i| {
            let c = p.community_of(i);
            g.neighbors(i).iter().filter(|&&j| p.community_of(j) != c).count()
        })
        .collect()
}

/// `round((1 - mu)·k)` with halves rounded up.
#[inline]
pub fn internal_target(k: usize, mu: f64) -> usize {
    ((1.0 - mu) * k as f64 + 0.5).floor() as usize
}

/// Places nodes into communities with room for their internal degree.
///
/// Fails when some node's internal target does not fit the largest community.
pub fn assign_communities(
    degrees: &[usize],
    sizes: &[usize],
    mu: f64,
    rng: &mut RandomSource,
) -> Result<Partition, PlantingError> {
    let largest = check_sizes(sizes, degrees.len())?;
    let targets: Vec<usize> = degrees.iter().map(|&k| internal_target(k, mu)).collect();
    if let Some((node, &internal)) = targets.iter().enumerate().find(|(_, &t)| t + 1 > largest) {
        return Err(PlantingError::Unassignable {
            node,
            internal,
            largest,
        });
    }
    assign_with_targets(&targets, sizes, rng)
}

/// Like [`assign_communities`], but internal targets that no community could
/// host are lowered to the best feasible value instead of failing.
///
/// Nodes are ranked by internal target and matched against community slots
/// ranked by size; the node at rank `r` is capped at the size of the
/// community owning slot `r`, minus one. This keeps the placement feasible
/// when hubs outgrow every community.
pub fn assign_communities_saturating(
    degrees: &[usize],
    sizes: &[usize],
    mu: f64,
    rng: &mut RandomSource,
) -> Result<Partition, PlantingError> {
    check_sizes(sizes, degrees.len())?;
    let mut targets: Vec<usize> = degrees.iter().map(|&k| internal_target(k, mu)).collect();
    let mut slot_caps: Vec<usize> = Vec::with_capacity(degrees.len());
    let mut desc = sizes.to_vec();
    desc.sort_unstable_by(|a, b| b.cmp(a));
    for s in desc {
        slot_caps.extend(std::iter::repeat(s - 1).take(s));
    }
    let mut order: Vec<usize> = (0..targets.len()).collect();
    order.sort_by(|&a, &b| targets[b].cmp(&targets[a]).then(a.cmp(&b)));
    for (rank, &node) in order.iter().enumerate() {
        targets[node] = targets[node].min(slot_caps[rank]);
    }
    assign_with_targets(&targets, sizes, rng)
}

fn check_sizes(sizes: &[usize], n: usize) -> Result<usize, PlantingError> {
    let largest = *sizes.iter().max().ok_or(PlantingError::EmptySizes)?;
    let sum: usize = sizes.iter().sum();
    if sum != n {
        return Err(PlantingError::SizeMismatch { sum, n });
    }
    if sizes.iter().any(|&s| s == 0) {
        return Err(PlantingError::InvalidParams("zero-size community".into()));
    }
    Ok(largest)
}

/// Random fill with eviction: each node joins a uniformly chosen community
/// large enough for it; a full community evicts a random member back into
/// the queue. After `50·n` placements without finishing, the placement is
/// redone most-constrained-first.
fn assign_with_targets(
    targets: &[usize],
    sizes: &[usize],
    rng: &mut RandomSource,
) -> Result<Partition, PlantingError> {
    let mut by_size: Vec<usize> = (0..sizes.len()).collect();
    by_size.sort_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(a.cmp(&b)));
    let members = match fill_with_eviction(targets, sizes, &by_size, rng) {
        Some(m) => m,
        None => fill_constrained_first(targets, sizes, &by_size, rng)?,
    };
    let mut labels = vec![0; targets.len()];
    for (c, block) in members.iter().enumerate() {
        for &v in block {
            labels[v] = c;
        }
    }
    Ok(Partition::from_dense(labels).expect("every community is filled"))
}

/// Communities of size `>= target + 1`: a suffix of `by_size`.
fn eligible<'a>(by_size: &'a [usize], sizes: &[usize], target: usize) -> &'a [usize] {
    let first = by_size.partition_point(|&c| sizes[c] < target + 1);
    &by_size[first..]
}

fn fill_with_eviction(
    targets: &[usize],
    sizes: &[usize],
    by_size: &[usize],
    rng: &mut RandomSource,
) -> Option<Vec<Vec<NodeId>>> {
    let n = targets.len();
    let mut members: Vec<Vec<NodeId>> = sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
    let mut queue: Vec<NodeId> = (0..n).collect();
    queue.shuffle(rng);
    let mut queue: std::collections::VecDeque<NodeId> = queue.into();

    let cap = 50 * n.max(1);
    let mut placements = 0;
    while let Some(v) = queue.pop_front() {
        if placements >= cap {
            return None;
        }
        placements += 1;
        let options = eligible(by_size, sizes, targets[v]);
        if options.is_empty() {
            return None;
        }
        let c = options[rng.gen_range(0..options.len())];
        if members[c].len() == sizes[c] {
            let slot = rng.gen_range(0..members[c].len());
            let evicted = std::mem::replace(&mut members[c][slot], v);
            queue.push_back(evicted);
        } else {
            members[c].push(v);
        }
    }
    Some(members)
}

/// Nodes in decreasing target order (random among equal targets), each into
/// a uniformly chosen eligible community with room. Eligible sets are nested,
/// so this succeeds whenever any valid placement exists.
fn fill_constrained_first(
    targets: &[usize],
    sizes: &[usize],
    by_size: &[usize],
    rng: &mut RandomSource,
) -> Result<Vec<Vec<NodeId>>, PlantingError> {
    let mut order: Vec<NodeId> = (0..targets.len()).collect();
    order.shuffle(rng);
    order.sort_by(|&a, &b| targets[b].cmp(&targets[a]));
    let mut members: Vec<Vec<NodeId>> = sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
    let mut open: Vec<usize> = Vec::new();
    for v in order {
        open.clear();
        open.extend(
            eligible(by_size, sizes, targets[v])
                .iter()
                .copied()
                .filter(|&c| members[c].len() < sizes[c]),
        );
        if open.is_empty() {
            return Err(PlantingError::Unassignable {
                node: v,
                internal: targets[v],
                largest: sizes.iter().copied().max().unwrap_or(0),
            });
        }
        let c = open[rng.gen_range(0..open.len())];
        members[c].push(v);
    }
    Ok(members)
}

/// Incremental bookkeeping for the rewiring objective.
struct MixingState<'a> {
    labels: &'a [usize],
    members: Vec<Vec<NodeId>>,
    ext: Vec<usize>,
    target: Vec<usize>,
    objective: u64,
}

impl<'a> MixingState<'a> {
    fn new(g: &Graph, p: &'a Partition, mu: f64) -> Self {
        let labels = p.labels();
        let members = p.blocks();
        let ext = external_degrees(g, p);
        let target: Vec<usize> = (0..g.n())
            .map(|i| {
                let k = g.degree(i);
                let room = members[labels[i]].len() - 1;
                k - internal_target(k, mu).min(room)
            })
            .collect();
        let objective = ext.iter().zip(&target).map(|(&e, &t)| e.abs_diff(t) as u64).sum();
        Self {
            labels,
            members,
            ext,
            target,
            objective,
        }
    }

    #[inline]
    fn surplus(&self, i: NodeId) -> i64 {
        self.ext[i] as i64 - self.target[i] as i64
    }

    #[inline]
    fn crosses(&self, u: NodeId, v: NodeId) -> bool {
        self.labels[u] != self.labels[v]
    }

    /// Objective change if `(i, x), (j, y)` become `(i, j), (x, y)`.
    fn delta(&self, i: NodeId, x: NodeId, j: NodeId, y: NodeId) -> i64 {
        let nodes = [i, x, j, y];
        let mut change = [0i64; 4];
        let slot = |v: NodeId| nodes.iter().position(|&w| w == v).unwrap_or(0);
        for (u, v, sign) in [(i, x, -1), (j, y, -1), (i, j, 1), (x, y, 1)] {
            if self.crosses(u, v) {
                change[slot(u)] += sign;
                change[slot(v)] += sign;
            }
        }
        let mut total = 0;
        for (k, &v) in nodes.iter().enumerate() {
            if nodes[..k].contains(&v) || change[k] == 0 {
                continue;
            }
            let before = self.surplus(v);
            total += (before + change[k]).abs() - before.abs();
        }
        total
    }

    fn apply(&mut self, i: NodeId, x: NodeId, j: NodeId, y: NodeId, delta: i64) {
        for (u, v, add) in [(i, x, false), (j, y, false), (i, j, true), (x, y, true)] {
            if self.crosses(u, v) {
                for w in [u, v] {
                    if add {
                        self.ext[w] += 1;
                    } else {
                        self.ext[w] -= 1;
                    }
                }
            }
        }
        self.objective = (self.objective as i64 + delta) as u64;
    }
}

/// Partner searches between two uniformly random fallback proposals.
const FALLBACK_EVERY: usize = 10;
/// Passes without a new best objective before giving up.
const STALL_PASSES: usize = 3;
/// Random draws when looking for a partner node.
const PARTNER_TRIES: usize = 8;
/// Failed proposals tolerated per node and pass.
const FAILURES_PER_NODE: usize = 40;

/// Rewires `g` toward mixing level `params.mu` under partition `p`.
///
/// Runs until every node sits on its target, a pass accepts no swap, a few
/// passes bring no improvement, or the pass budget runs out. `converged`
/// reports whether the achieved mean lands within tolerance of `mu`;
/// non-convergence is never raised as an error.
pub fn rewire_to_mixing(
    mut g: Graph,
    p: Partition,
    params: &PlantingParams,
    rng: &mut RandomSource,
) -> Result<PlantedNetwork, PlantingError> {
    params.check()?;
    if p.len() != g.n() {
        return Err(PlantingError::PartitionMismatch {
            got: p.len(),
            expected: g.n(),
        });
    }
    let mu = params.mu;
    let mut state = MixingState::new(&g, &p, mu);
    let mut order: Vec<NodeId> = (0..g.n()).collect();
    let mut swaps = 0;
    let mut sweeps = 0;
    let mut best = state.objective;
    let mut idle = 0;

    while sweeps < params.max_sweeps && state.objective > 0 && idle < STALL_PASSES {
        sweeps += 1;
        order.shuffle(rng);
        let mut accepted = 0;
        for &i in &order {
            let mut failures = 0;
            while state.surplus(i) != 0 && failures < FAILURES_PER_NODE {
                let fallback = failures % FALLBACK_EVERY == FALLBACK_EVERY - 1;
                if try_move(&mut g, &mut state, i, fallback, rng) {
                    accepted += 1;
                } else {
                    failures += 1;
                }
            }
        }
        swaps += accepted;
        if accepted == 0 {
            break;
        }
        if state.objective < best {
            best = state.objective;
            idle = 0;
        } else {
            idle += 1;
        }
    }

    let per_node: Vec<f64> = (0..g.n())
        .map(|i| {
            let k = g.degree(i);
            if k == 0 {
                0.0
            } else {
                node_mu(state.ext[i], k)
            }
        })
        .collect();
    let counted = (0..g.n()).filter(|&i| g.degree(i) > 0).count().max(1);
    let achieved_mu_mean = per_node.iter().sum::<f64>() / counted as f64;
    let mu_limit = mu_limit(&p.sizes(), g.n())?;
    let converged = (achieved_mu_mean - mu).abs() <= params.tolerance;
    Ok(PlantedNetwork {
        graph: g,
        truth: p,
        achieved_mu_mean,
        achieved_mu_per_node: per_node,
        mu_limit,
        converged,
        swaps,
        sweeps,
    })
}

/// One proposal for node `i`. Surplus nodes trade an external edge for an
/// internal one, deficit nodes the reverse.
fn try_move(
    g: &mut Graph,
    state: &mut MixingState<'_>,
    i: NodeId,
    fallback: bool,
    rng: &mut RandomSource,
) -> bool {
    let want_internal = state.surplus(i) > 0;
    let nbrs = g.neighbors(i);
    if nbrs.is_empty() {
        return false;
    }
    // First neighbor of the wanted kind, scanning from a random offset.
    let start = rng.gen_range(0..nbrs.len());
    let Some(x) = (0..nbrs.len())
        .map(|k| nbrs[(start + k) % nbrs.len()])
        .find(|&x| state.crosses(i, x) == want_internal)
    else {
        return false;
    };

    let (j, y) = if fallback {
        let (a, b) = g.edges()[rng.gen_range(0..g.edge_count())];
        if rng.gen::<bool>() {
            (a, b)
        } else {
            (b, a)
        }
    } else {
        // Partner j on the wanted side of i and not yet adjacent to it.
        let mut pick = None;
        for _ in 0..PARTNER_TRIES {
            let v = if want_internal {
                let block = &state.members[state.labels[i]];
                block[rng.gen_range(0..block.len())]
            } else {
                rng.gen_range(0..g.n())
            };
            if v != i && v != x && state.crosses(i, v) != want_internal && !g.has_edge(i, v) {
                pick = Some(v);
                break;
            }
        }
        let Some(j) = pick else {
            return false;
        };
        // First neighbor y of j giving a strict improvement.
        let jn = g.neighbors(j);
        if jn.is_empty() {
            return false;
        }
        let start = rng.gen_range(0..jn.len());
        let found = (0..jn.len()).map(|k| jn[(start + k) % jn.len()]).find(|&y| {
            y != i && y != x && !g.has_edge(x, y) && state.delta(i, x, j, y) < 0
        });
        match found {
            Some(y) => (j, y),
            None => return false,
        }
    };

    if j == i || j == x || y == i || y == x {
        return false;
    }
    let delta = state.delta(i, x, j, y);
    if delta > 0 || (delta == 0 && !fallback) {
        return false;
    }
    if !g.double_edge_swap((i, x), (j, y), SwapMode::Straight).is_applied() {
        return false;
    }
    debug_assert!(delta <= 0);
    state.apply(i, x, j, y, delta);
    true
}

/// Draws community sizes for `g`, assigns nodes and rewires.
pub fn plant_graph(
    g: Graph,
    planting: &PlantingParams,
    rng: &mut RandomSource,
) -> Result<PlantedNetwork, PlantingError> {
    planting.check()?;
    let n = g.n();
    let (c_min, c_max) = planting.size_bounds(&g);
    let sizes = build_community_sizes(n, planting.beta, c_min, c_max, rng)?;
    let truth = assign_communities_saturating(&g.degrees(), &sizes, planting.mu, rng)?;
    rewire_to_mixing(g, truth, planting, rng)
}

/// Full pipeline: seed model, community sizes, assignment, rewiring.
pub fn plant(
    seed_model: &SeedModel,
    planting: &PlantingParams,
    rng: &mut RandomSource,
) -> Result<PlantedNetwork, PlantingError> {
    planting.check()?;
    let g = seed_model.generate(rng)?;
    plant_graph(g, planting, rng)
}
