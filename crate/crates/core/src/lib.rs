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

//! Benchmark graphs with planted communities.
//!
//! A seed network from one of three growth models (configuration model,
//! preferential attachment, evolutionary preferential attachment) is rewired
//! with degree-preserving swaps until a drawn community structure reaches a
//! target mixing coefficient. The crate also measures topology reports, runs
//! three built-in detection algorithms and scores partitions with normalized
//! mutual information.

pub mod detection;
pub mod evaluation;
pub mod generators;
pub mod graph;
pub mod metrics;
pub mod partition;
pub mod planting;
pub mod rng;
pub mod sampling;

pub use graph::{Graph, GraphError, NodeId, SwapMode, SwapOutcome};
pub use partition::{Partition, PartitionError};
pub use rng::RandomSource;
