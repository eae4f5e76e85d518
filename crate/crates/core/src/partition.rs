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

//! Node-to-community assignment with dense community ids.

use std::collections::HashMap;

use thiserror::Error;

use crate::graph::NodeId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("community {label} of node {node} is outside 0..{count}")]
    LabelOutOfRange {
        node: NodeId,
        label: usize,
        count: usize,
    },
    #[error("community {0} has no members")]
    EmptyCommunity(usize),
    #[error("node {0} assigned more than once")]
    DuplicateNode(NodeId),
    #[error("node {0} has no community")]
    MissingNode(NodeId),
    #[error("node {node} outside 0..{n}")]
    NodeOutOfRange { node: NodeId, n: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    labels: Vec<usize>,
    count: usize,
}

impl Partition {
    /// Accepts labels already dense in `0..q` with every community used.
    pub fn from_dense(labels: Vec<usize>) -> Result<Self, PartitionError> {
        let count = labels.iter().map(|&l| l + 1).max().unwrap_or(0);
        let mut used = vec![false; count];
        for &l in &labels {
            used[l] = true;
        }
        if let Some(c) = used.iter().position(|&u| !u) {
            return Err(PartitionError::EmptyCommunity(c));
        }
        Ok(Self { labels, count })
    }

    /// Compacts arbitrary labels to `0..q` in order of first appearance.
    pub fn from_labels<L>(labels: &[L]) -> Self
    where
        L: Copy + Eq + std::hash::Hash,
    {
        let mut ids: HashMap<L, usize> = HashMap::new();
        let dense = labels
            .iter()
            .map(|l| {
                let next = ids.len();
                *ids.entry(*l).or_insert(next)
            })
            .collect();
        Self {
            labels: dense,
            count: ids.len(),
        }
    }

    /// Builds from explicit blocks; every node of `0..n` must appear once.
    pub fn from_blocks(n: usize, blocks: &[Vec<NodeId>]) -> Result<Self, PartitionError> {
        let mut labels = vec![usize::MAX; n];
        let mut count = 0;
        for block in blocks.iter().filter(|b| !b.is_empty()) {
            for &v in block {
                if v >= n {
                    return Err(PartitionError::NodeOutOfRange { node: v, n });
                }
                if labels[v] != usize::MAX {
                    return Err(PartitionError::DuplicateNode(v));
                }
                labels[v] = count;
            }
            count += 1;
        }
        if let Some(v) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(PartitionError::MissingNode(v));
        }
        Ok(Self { labels, count })
    }

    /// Everything in one community.
    pub fn trivial(n: usize) -> Self {
        Self {
            labels: vec![0; n],
            count: usize::from(n > 0),
        }
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            labels: (0..n).collect(),
            count: n,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    #[inline]
    pub fn community_count(&self) -> usize {
        self.count
    }

    #[inline]
    pub fn community_of(&self, node: NodeId) -> usize {
        self.labels[node]
    }

    #[inline]
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.count];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    pub fn blocks(&self) -> Vec<Vec<NodeId>> {
        let mut blocks = vec![Vec::new(); self.count];
        for (v, &l) in self.labels.iter().enumerate() {
            blocks[l].push(v);
        }
        blocks
    }

    /// Size of the biggest community.
    pub fn largest(&self) -> usize {
        self.sizes().into_iter().max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compaction_follows_first_appearance() {
        let p = Partition::from_labels(&[10, 99, 10, 99, 7]);
        assert_eq!(p.labels(), &[0, 1, 0, 1, 2]);
        assert_eq!(p.community_count(), 3);
        assert_eq!(p.sizes(), vec![2, 2, 1]);
    }

    #[test]
    fn dense_requires_every_label_used() {
        assert_eq!(
            Partition::from_dense(vec![0, 2, 2]),
            Err(PartitionError::EmptyCommunity(1))
        );
        assert!(Partition::from_dense(vec![1, 0, 1]).is_ok());
    }

    #[test]
    fn blocks_roundtrip() {
        let p = Partition::from_blocks(4, &[vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(p.blocks(), vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(
            Partition::from_blocks(3, &[vec![0, 1]]),
            Err(PartitionError::MissingNode(2))
        );
        assert_eq!(
            Partition::from_blocks(3, &[vec![0, 1], vec![1, 2]]),
            Err(PartitionError::DuplicateNode(1))
        );
    }

    #[test]
    fn trivial_and_singletons() {
        assert_eq!(Partition::trivial(5).community_count(), 1);
        assert_eq!(Partition::singletons(5).community_count(), 5);
        assert_eq!(Partition::trivial(0).community_count(), 0);
        assert_eq!(Partition::trivial(5).largest(), 5);
    }
}
