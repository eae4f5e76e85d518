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

//! Seed network models: configuration model, preferential attachment, and
//! evolutionary preferential attachment driven by a prisoner's dilemma game.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::graph::{Graph, GraphError, NodeId};
use crate::rng::RandomSource;
use crate::sampling::{build_degree_sequence, DegreeSequence, SamplingError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenerateError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error("could not remove {remaining} self-loops/multi-edges within {attempts} swap attempts")]
    RepairFailed { remaining: usize, attempts: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmParams {
    pub n: usize,
    pub gamma: f64,
    pub k_max: usize,
    pub target_avg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BaParams {
    pub n: usize,
    pub m0: usize,
    pub m: usize,
}

impl BaParams {
    /// Initial clique as large as the attachment count.
    pub fn new(n: usize, m: usize) -> Self {
        Self { n, m0: m, m }
    }

    fn check(&self) -> Result<(), GenerateError> {
        if self.m == 0 || self.m > self.m0 || self.m0 > self.n {
            return Err(GenerateError::InvalidParams(format!(
                "need n >= m0 >= m >= 1, got n={}, m0={}, m={}",
                self.n, self.m0, self.m
            )));
        }
        Ok(())
    }

    /// `m0(m0-1)/2 + (n-m0)·m`.
    pub fn expected_edges(&self) -> usize {
        self.m0 * (self.m0 - 1) / 2 + (self.n - self.m0) * self.m
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvParams {
    pub n: usize,
    pub m0: usize,
    pub m: usize,
    /// Payoff of a defector facing a cooperator.
    pub b: f64,
    /// Selection pressure; 0 makes attachment uniform.
    pub epsilon: f64,
    /// Arrivals between consecutive game rounds.
    pub play_every: usize,
    pub fitness: EvFitness,
}

/// Which payoff drives attachment.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum EvFitness {
    /// Payoff of the most recent round.
    #[default]
    LastRound,
    /// Payoff summed over every round since arrival. Older nodes compound
    /// their lead, which produces star-like seeds.
    Accumulated,
}

impl EvParams {
    pub fn new(n: usize, m: usize, b: f64, epsilon: f64) -> Self {
        Self {
            n,
            m0: m,
            m,
            b,
            epsilon,
            play_every: 1,
            fitness: EvFitness::LastRound,
        }
    }

    fn check(&self) -> Result<(), GenerateError> {
        BaParams {
            n: self.n,
            m0: self.m0,
            m: self.m,
        }
        .check()?;
        if !(self.b > 1.0) || !self.b.is_finite() {
            return Err(GenerateError::InvalidParams(format!("b must exceed 1, got {}", self.b)));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(GenerateError::InvalidParams(format!(
                "epsilon must lie in [0, 1], got {}",
                self.epsilon
            )));
        }
        if self.play_every == 0 {
            return Err(GenerateError::InvalidParams("play_every must be positive".into()));
        }
        Ok(())
    }
}

/// Degree sequence drawn for the configuration model, then realized as a simple graph.
pub fn generate_cm(p: &CmParams, rng: &mut RandomSource) -> Result<Graph, GenerateError> {
    generate_cm_with_sequence(p, rng).map(|(g, _)| g)
}

pub fn generate_cm_with_sequence(
    p: &CmParams,
    rng: &mut RandomSource,
) -> Result<(Graph, DegreeSequence), GenerateError> {
    if p.k_max >= p.n {
        return Err(GenerateError::InvalidParams(format!(
            "k_max {} must be below n {}",
            p.k_max, p.n
        )));
    }
    let seq = build_degree_sequence(p.n, p.gamma, p.k_max, p.target_avg, rng)?;
    let g = configuration_model(seq.degrees(), rng)?;
    Ok((g, seq))
}

/// Uniform stub matching followed by swap repair of loops and multi-edges.
///
/// Each offending edge is swapped against a uniformly chosen partner edge;
/// the swap is kept only when both new edges are simple and new. Degrees are
/// never changed.
pub fn configuration_model(degrees: &[usize], rng: &mut RandomSource) -> Result<Graph, GenerateError> {
    let n = degrees.len();
    let total: usize = degrees.iter().sum();
    if total % 2 == 1 {
        return Err(GenerateError::InvalidParams("degree sum is odd".into()));
    }
    let mut stubs: Vec<NodeId> = Vec::with_capacity(total);
    for (v, &k) in degrees.iter().enumerate() {
        stubs.extend(std::iter::repeat(v).take(k));
    }
    stubs.shuffle(rng);
    let mut edges: Vec<(NodeId, NodeId)> = stubs.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    if edges.is_empty() {
        return Ok(Graph::with_nodes(n));
    }

    let key = |u: NodeId, v: NodeId| if u < v { (u, v) } else { (v, u) };
    let mut counts: HashMap<(NodeId, NodeId), u32> = HashMap::with_capacity(edges.len());
    for &(u, v) in &edges {
        *counts.entry(key(u, v)).or_insert(0) += 1;
    }
    let is_bad = |counts: &HashMap<(NodeId, NodeId), u32>, (u, v): (NodeId, NodeId)| {
        u == v || counts[&key(u, v)] > 1
    };
    let mut bad: Vec<usize> = (0..edges.len()).filter(|&i| is_bad(&counts, edges[i])).collect();

    let budget = 100 * edges.len();
    let mut attempts = 0;
    while let Some(&i) = bad.last() {
        if !is_bad(&counts, edges[i]) {
            bad.pop();
            continue;
        }
        if attempts >= budget || edges.len() < 2 {
            let remaining = bad.iter().filter(|&&i| is_bad(&counts, edges[i])).count();
            return Err(GenerateError::RepairFailed {
                remaining,
                attempts,
            });
        }
        attempts += 1;
        let j = rng.gen_range(0..edges.len());
        if j == i {
            continue;
        }
        let (a, b) = edges[i];
        let (c, d) = edges[j];
        let (x, y) = if rng.gen::<bool>() {
            ((a, c), (b, d))
        } else {
            ((a, d), (b, c))
        };
        if x.0 == x.1 || y.0 == y.1 || key(x.0, x.1) == key(y.0, y.1) {
            continue;
        }
        if counts.get(&key(x.0, x.1)).copied().unwrap_or(0) > 0
            || counts.get(&key(y.0, y.1)).copied().unwrap_or(0) > 0
        {
            continue;
        }
        for old in [key(a, b), key(c, d)] {
            let slot = counts.get_mut(&old).expect("edge present");
            *slot -= 1;
            if *slot == 0 {
                counts.remove(&old);
            }
        }
        counts.insert(key(x.0, x.1), 1);
        counts.insert(key(y.0, y.1), 1);
        edges[i] = x;
        edges[j] = y;
        bad.pop();
    }

    Ok(Graph::from_edge_list(n, edges)?)
}

/// Endpoint multiset of a growing graph; a uniform draw from it is a
/// degree-proportional draw of a node.
#[derive(Debug, Clone, Default)]
struct AttachmentPool {
    ends: Vec<NodeId>,
}

impl AttachmentPool {
    fn from_graph(g: &Graph, nodes: usize) -> Self {
        let mut ends = Vec::with_capacity(2 * g.edge_count());
        for &(u, v) in g.edges() {
            ends.push(u);
            ends.push(v);
        }
        ends.retain(|&v| v < nodes);
        Self { ends }
    }

    fn add_edge(&mut self, u: NodeId, v: NodeId) {
        self.ends.push(u);
        self.ends.push(v);
    }

    /// `m` distinct nodes among `0..nodes`, each successive pick proportional to
    /// degree among those not yet picked. Falls back to uniform when every
    /// degree is zero.
    fn draw_distinct(&self, nodes: usize, m: usize, rng: &mut RandomSource) -> Vec<NodeId> {
        let mut picked: Vec<NodeId> = Vec::with_capacity(m);
        while picked.len() < m {
            let v = if self.ends.is_empty() {
                rng.gen_range(0..nodes)
            } else {
                self.ends[rng.gen_range(0..self.ends.len())]
            };
            if !picked.contains(&v) {
                picked.push(v);
            }
        }
        picked
    }
}

/// Targets one arriving node would pick by preferential attachment onto `g`.
pub fn preferential_targets(g: &Graph, m: usize, rng: &mut RandomSource) -> Vec<NodeId> {
    let nonzero = (0..g.n()).filter(|&v| g.degree(v) > 0).count();
    assert!(
        m <= g.n() && (g.edge_count() == 0 || m <= nonzero),
        "not enough candidate nodes"
    );
    AttachmentPool::from_graph(g, g.n()).draw_distinct(g.n(), m, rng)
}

fn seed_clique(n: usize, m0: usize) -> Graph {
    let mut g = Graph::with_nodes(n);
    for u in 0..m0 {
        for v in u + 1..m0 {
            g.add_edge(u, v).expect("clique edges are distinct");
        }
    }
    g
}

pub fn generate_ba(p: &BaParams, rng: &mut RandomSource) -> Result<Graph, GenerateError> {
    p.check()?;
    let mut g = seed_clique(p.n, p.m0);
    let mut pool = AttachmentPool::from_graph(&g, p.m0);
    for t in p.m0..p.n {
        // With a degree-0 seed (m0 = 1) only the uniform fallback applies.
        for target in pool.draw_distinct(t, p.m, rng) {
            g.add_edge(t, target)?;
            pool.add_edge(t, target);
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Cooperate,
    Defect,
}

/// Payoff to a player using `own` against `other`.
#[inline]
pub fn payoff(own: Strategy, other: Strategy, b: f64) -> f64 {
    match (own, other) {
        (Strategy::Cooperate, Strategy::Cooperate) => 1.0,
        (Strategy::Defect, Strategy::Cooperate) => b,
        _ => 0.0,
    }
}

/// Game state for the nodes that have arrived so far.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvState {
    pub strategies: Vec<Strategy>,
    /// Accumulated payoffs over every round played.
    pub scores: Vec<f64>,
    /// Payoffs of the most recent round.
    pub round_payoffs: Vec<f64>,
}

impl EvState {
    pub fn random(nodes: usize, rng: &mut RandomSource) -> Self {
        let mut s = Self::default();
        for _ in 0..nodes {
            s.push(random_strategy(rng));
        }
        s
    }

    pub fn push(&mut self, strategy: Strategy) {
        self.strategies.push(strategy);
        self.scores.push(0.0);
        self.round_payoffs.push(0.0);
    }

    pub fn len(&self) -> usize {
        self.strategies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strategies.is_empty()
    }

    /// Attachment weight `1 - ε + ε·f/max f` for every node, `f` being the
    /// payoff selected by `fitness`.
    pub fn attachment_weights(&self, epsilon: f64, fitness: EvFitness) -> Vec<f64> {
        let f = match fitness {
            EvFitness::LastRound => &self.round_payoffs,
            EvFitness::Accumulated => &self.scores,
        };
        let max = f.iter().copied().fold(0.0, f64::max);
        f.iter()
            .map(|&s| {
                let f = if max > 0.0 { s / max } else { 0.0 };
                1.0 - epsilon + epsilon * f
            })
            .collect()
    }
}

fn random_strategy(rng: &mut RandomSource) -> Strategy {
    if rng.gen::<bool>() {
        Strategy::Cooperate
    } else {
        Strategy::Defect
    }
}

/// One synchronous round among the first `s.len()` nodes of `g`.
///
/// Every node plays its strategy against all neighbors and banks the round
/// payoff. Then each node looks at one uniformly chosen neighbor `j` and copies
/// its strategy with probability `(P_j - P_i) / (b · max(k_i, k_j))` when the
/// neighbor's round payoff `P_j` is higher.
pub fn play_pd_round(g: &Graph, s: &mut EvState, b: f64, rng: &mut RandomSource) {
    let nodes = s.len();
    for i in 0..nodes {
        let own = s.strategies[i];
        let p: f64 = g
            .neighbors(i)
            .iter()
            .map(|&j| payoff(own, s.strategies[j], b))
            .sum();
        s.round_payoffs[i] = p;
        s.scores[i] += p;
    }

    let mut next = s.strategies.clone();
    for (i, slot) in next.iter_mut().enumerate() {
        let nbrs = g.neighbors(i);
        if nbrs.is_empty() {
            continue;
        }
        let j = nbrs[rng.gen_range(0..nbrs.len())];
        let gap = s.round_payoffs[j] - s.round_payoffs[i];
        let roll: f64 = rng.gen();
        if gap > 0.0 {
            let scale = b * g.degree(i).max(g.degree(j)) as f64;
            if roll < (gap / scale).min(1.0) {
                *slot = s.strategies[j];
            }
        }
    }
    s.strategies = next;
}

/// Weighted sampling of `m` distinct indices without replacement.
///
/// Uses exponential keys `ln(u)/w`; the `m` largest keys are distributed like
/// `m` successive draws proportional to weight. Zero-weight indices are only
/// used, uniformly, when fewer than `m` weights are positive.
pub fn weighted_sample_distinct(weights: &[f64], m: usize, rng: &mut RandomSource) -> Vec<usize> {
    assert!(m <= weights.len(), "cannot draw {m} of {}", weights.len());
    let mut keyed: Vec<(bool, f64, usize)> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            if w > 0.0 {
                (true, u.ln() / w, i)
            } else {
                (false, u, i)
            }
        })
        .collect();
    let cmp = |a: &(bool, f64, usize), b: &(bool, f64, usize)| {
        b.0.cmp(&a.0)
            .then(b.1.total_cmp(&a.1))
            .then(a.2.cmp(&b.2))
    };
    if m < keyed.len() {
        keyed.select_nth_unstable_by(m, cmp);
    }
    keyed.truncate(m);
    keyed.sort_by(cmp);
    keyed.into_iter().map(|(_, _, i)| i).collect()
}

pub fn generate_ev(p: &EvParams, rng: &mut RandomSource) -> Result<Graph, GenerateError> {
    generate_ev_with_state(p, rng).map(|(g, _)| g)
}

/// Same as [`generate_ev`], also returning the final game state.
pub fn generate_ev_with_state(
    p: &EvParams,
    rng: &mut RandomSource,
) -> Result<(Graph, EvState), GenerateError> {
    p.check()?;
    let mut g = seed_clique(p.n, p.m0);
    let mut state = EvState::random(p.m0, rng);
    for t in p.m0..p.n {
        if (t - p.m0) % p.play_every == 0 {
            play_pd_round(&g, &mut state, p.b, rng);
        }
        let weights = state.attachment_weights(p.epsilon, p.fitness);
        let targets = weighted_sample_distinct(&weights, p.m, rng);
        for &target in &targets {
            g.add_edge(t, target)?;
        }
        state.push(random_strategy(rng));
    }
    Ok((g, state))
}
