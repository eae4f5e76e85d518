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

//! Undirected simple graph with sorted adjacency and an edge-slot index.
//!
//! Node ids are dense `0..n`. Every edge is stored once in `edges` as an
//! ordered pair `(u, v)` with `u < v`; `slots` maps the pair to its position
//! so that a degree-preserving swap can rewrite two edges in place.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

pub type NodeId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop ({0}, {1})")]
    SelfLoop(NodeId, NodeId),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(NodeId, NodeId),
    #[error("edge ({u}, {v}) references a node outside 0..{n}")]
    EdgeOutOfRange { u: NodeId, v: NodeId, n: usize },
    #[error("node {node} outside 0..{n}")]
    NodeOutOfRange { node: NodeId, n: usize },
}

/// Which pairing a double-edge swap produces from `(a, b)` and `(c, d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwapMode {
    /// `(a, c)` and `(b, d)`.
    Straight,
    /// `(a, d)` and `(b, c)`.
    Crossed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwapRejection {
    MissingEdge,
    SharedEndpoint,
    WouldDuplicate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwapOutcome {
    Applied {
        added: [(NodeId, NodeId); 2],
    },
    Rejected(SwapRejection),
}

impl SwapOutcome {
    pub fn is_applied(&self) -> bool {
        matches!(self, SwapOutcome::Applied { .. })
    }
}

#[inline]
fn key(u: NodeId, v: NodeId) -> u64 {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    ((a as u64) << 32) | b as u64
}

#[inline]
fn ordered(u: NodeId, v: NodeId) -> (NodeId, NodeId) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Graph {
    adj: Vec<Vec<NodeId>>,
    edges: Vec<(NodeId, NodeId)>,
    slots: HashMap<u64, usize>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.adj == other.adj
    }
}

impl Eq for Graph {}

impl Graph {
    /// Graph with `n` isolated nodes.
    pub fn with_nodes(n: usize) -> Self {
        assert!(n <= u32::MAX as usize, "node count exceeds 32-bit ids");
        Self {
            adj: vec![Vec::new(); n],
            edges: Vec::new(),
            slots: HashMap::new(),
        }
    }

    pub fn from_edge_list<I>(n: usize, pairs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut g = Self::with_nodes(n);
        for (u, v) in pairs {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Inserts `(u, v)`, rejecting self-loops, duplicates and unknown ids.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> Result<(), GraphError> {
        let n = self.n();
        if u >= n || v >= n {
            return Err(GraphError::EdgeOutOfRange { u, v, n });
        }
        if u == v {
            return Err(GraphError::SelfLoop(u, v));
        }
        let k = key(u, v);
        if self.slots.contains_key(&k) {
            return Err(GraphError::DuplicateEdge(u, v));
        }
        self.slots.insert(k, self.edges.len());
        self.edges.push(ordered(u, v));
        insert_sorted(&mut self.adj[u], v);
        insert_sorted(&mut self.adj[v], u);
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, in insertion order (swaps rewrite in place).
    #[inline]
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    #[inline]
    pub fn degree(&self, u: NodeId) -> usize {
        self.adj[u].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    /// Sorted neighbor ids of `u`.
    #[inline]
    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.adj[u]
    }

    #[inline]
    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u != v && self.slots.contains_key(&key(u, v))
    }

    /// Breadth-first hop counts from `s`; `None` marks unreachable nodes.
    pub fn single_source_distances(&self, s: NodeId) -> Result<Vec<Option<usize>>, GraphError> {
        let n = self.n();
        if s >= n {
            return Err(GraphError::NodeOutOfRange { node: s, n });
        }
        let mut dist = vec![None; n];
        let mut queue = VecDeque::new();
        dist[s] = Some(0);
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or(0);
            for &v in &self.adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        Ok(dist)
    }

    /// Replaces `(a, b)` and `(c, d)` by the pairing chosen with `mode`.
    ///
    /// Orientation of `e1` and `e2` matters: it names which endpoint is `a`,
    /// `b`, `c` and `d`. Rejected swaps leave the graph untouched.
    pub fn double_edge_swap(
        &mut self,
        e1: (NodeId, NodeId),
        e2: (NodeId, NodeId),
        mode: SwapMode,
    ) -> SwapOutcome {
        let (a, b) = e1;
        let (c, d) = e2;
        let n = self.n();
        if a >= n || b >= n || c >= n || d >= n {
            return SwapOutcome::Rejected(SwapRejection::MissingEdge);
        }
        let (Some(&s1), Some(&s2)) = (self.slots.get(&key(a, b)), self.slots.get(&key(c, d)))
        else {
            return SwapOutcome::Rejected(SwapRejection::MissingEdge);
        };
        if a == c || a == d || b == c || b == d {
            return SwapOutcome::Rejected(SwapRejection::SharedEndpoint);
        }
        let (x1, x2) = match mode {
            SwapMode::Straight => ((a, c), (b, d)),
            SwapMode::Crossed => ((a, d), (b, c)),
        };
        if self.has_edge(x1.0, x1.1) || self.has_edge(x2.0, x2.1) {
            return SwapOutcome::Rejected(SwapRejection::WouldDuplicate);
        }

        self.slots.remove(&key(a, b));
        self.slots.remove(&key(c, d));
        remove_sorted(&mut self.adj[a], b);
        remove_sorted(&mut self.adj[b], a);
        remove_sorted(&mut self.adj[c], d);
        remove_sorted(&mut self.adj[d], c);

        for (slot, (u, v)) in [(s1, x1), (s2, x2)] {
            self.edges[slot] = ordered(u, v);
            self.slots.insert(key(u, v), slot);
            insert_sorted(&mut self.adj[u], v);
            insert_sorted(&mut self.adj[v], u);
        }
        SwapOutcome::Applied { added: [x1, x2] }
    }

    /// Checks every structural invariant; used by tests and debug assertions.
    pub fn validate(&self) -> Result<(), String> {
        let mut ends = 0;
        for (u, nbrs) in self.adj.iter().enumerate() {
            if nbrs.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("adjacency of {u} not strictly sorted"));
            }
            for &v in nbrs {
                if v == u {
                    return Err(format!("self-loop at {u}"));
                }
                if self.adj[v].binary_search(&u).is_err() {
                    return Err(format!("asymmetric adjacency {u}->{v}"));
                }
                if !self.slots.contains_key(&key(u, v)) {
                    return Err(format!("edge ({u}, {v}) missing from index"));
                }
            }
            ends += nbrs.len();
        }
        if ends != 2 * self.edges.len() || self.slots.len() != self.edges.len() {
            return Err("degree sum does not match edge count".into());
        }
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            if u >= v || self.slots.get(&key(u, v)) != Some(&i) {
                return Err(format!("edge slot {i} inconsistent"));
            }
        }
        Ok(())
    }
}

#[inline]
fn insert_sorted(list: &mut Vec<NodeId>, v: NodeId) {
    if let Err(pos) = list.binary_search(&v) {
        list.insert(pos, v);
    }
}

#[inline]
fn remove_sorted(list: &mut Vec<NodeId>, v: NodeId) {
    if let Ok(pos) = list.binary_search(&v) {
        list.remove(pos);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        Graph::from_edge_list(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    fn complete(n: usize) -> Graph {
        let mut pairs = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                pairs.push((u, v));
            }
        }
        Graph::from_edge_list(n, pairs).unwrap()
    }

    #[test]
    fn path_construction() {
        let g = Graph::from_edge_list(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(g.degrees(), vec![1, 2, 1]);
        assert_eq!(g.edge_count(), 2);
        g.validate().unwrap();
    }

    #[test]
    fn rejects_bad_pairs() {
        assert_eq!(
            Graph::from_edge_list(2, [(0, 0)]),
            Err(GraphError::SelfLoop(0, 0))
        );
        assert_eq!(
            Graph::from_edge_list(4, [(0, 1), (1, 0)]),
            Err(GraphError::DuplicateEdge(1, 0))
        );
        assert_eq!(
            Graph::from_edge_list(2, [(0, 2)]),
            Err(GraphError::EdgeOutOfRange { u: 0, v: 2, n: 2 })
        );
    }

    #[test]
    fn distances() {
        let path = Graph::from_edge_list(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(
            path.single_source_distances(0).unwrap(),
            vec![Some(0), Some(1), Some(2)]
        );

        let two = Graph::from_edge_list(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(
            two.single_source_distances(0).unwrap(),
            vec![Some(0), Some(1), None, None]
        );

        let c5 = cycle(5);
        assert_eq!(
            c5.single_source_distances(0).unwrap(),
            vec![Some(0), Some(1), Some(2), Some(2), Some(1)]
        );
        assert_eq!(
            c5.single_source_distances(5),
            Err(GraphError::NodeOutOfRange { node: 5, n: 5 })
        );
    }

    #[test]
    fn swap_square() {
        let mut g = Graph::from_edge_list(4, [(0, 1), (2, 3)]).unwrap();
        let before = g.degrees();
        let out = g.double_edge_swap((0, 1), (2, 3), SwapMode::Straight);
        assert_eq!(
            out,
            SwapOutcome::Applied {
                added: [(0, 2), (1, 3)]
            }
        );
        assert!(g.has_edge(0, 2) && g.has_edge(1, 3));
        assert!(!g.has_edge(0, 1) && !g.has_edge(2, 3));
        assert_eq!(g.degrees(), before);
        g.validate().unwrap();
    }

    #[test]
    fn swap_shared_endpoint_rejected() {
        let mut g = Graph::from_edge_list(3, [(0, 1), (0, 2)]).unwrap();
        let snapshot = g.clone();
        assert_eq!(
            g.double_edge_swap((0, 1), (0, 2), SwapMode::Straight),
            SwapOutcome::Rejected(SwapRejection::SharedEndpoint)
        );
        assert_eq!(g, snapshot);
    }

    #[test]
    fn swap_missing_edge_rejected() {
        let mut g = Graph::from_edge_list(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(
            g.double_edge_swap((0, 2), (1, 3), SwapMode::Straight),
            SwapOutcome::Rejected(SwapRejection::MissingEdge)
        );
    }

    #[test]
    fn k4_swaps_always_rejected() {
        // Every pairing of two disjoint K4 edges lands on an edge that is
        // already present.
        let mut g = complete(4);
        let snapshot = g.clone();
        let edges = g.edges().to_vec();
        for &e1 in &edges {
            for &e2 in &edges {
                for mode in [SwapMode::Straight, SwapMode::Crossed] {
                    let out = g.double_edge_swap(e1, e2, mode);
                    assert!(!out.is_applied());
                }
            }
        }
        assert_eq!(g, snapshot);
    }
}
