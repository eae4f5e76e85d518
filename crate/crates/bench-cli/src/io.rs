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

//! Edge-list and membership files.
//!
//! Edge lists hold one `u<TAB>v` pair per line with `u < v`. Membership files
//! hold one `node<TAB>community` pair per node. Lines starting with `#` and
//! blank lines are ignored by the readers. The edge-list writer adds a
//! `# nodes <n>` comment so trailing isolated nodes survive a round trip.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use lfr_core::{Graph, GraphError, NodeId, Partition};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("node {0} has no community")]
    MissingNode(NodeId),
    #[error("node {0} is listed twice")]
    DuplicateNode(NodeId),
}

const NODES_TAG: &str = "# nodes ";

fn read(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Content lines as `(1-based line number, fields)`.
fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            None
        } else {
            Some((i + 1, line.split_whitespace().collect()))
        }
    })
}

fn parse_pair<'a>(
    path: &Path,
    line: usize,
    fields: &[&'a str],
) -> Result<(u64, u64), IoError> {
    let bad = |message: String| IoError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    if fields.len() != 2 {
        return Err(bad(format!("expected two fields, found {}", fields.len())));
    }
    let a = fields[0]
        .parse::<u64>()
        .map_err(|_| bad(format!("not a non-negative integer: {:?}", fields[0])))?;
    let b = fields[1]
        .parse::<u64>()
        .map_err(|_| bad(format!("not a non-negative integer: {:?}", fields[1])))?;
    Ok((a, b))
}

pub fn format_edge_list(g: &Graph) -> String {
    let mut out = String::with_capacity(g.edge_count() * 12 + 16);
    let _ = writeln!(out, "{NODES_TAG}{}", g.n());
    let mut edges = g.edges().to_vec();
    edges.sort_unstable();
    for (u, v) in edges {
        let _ = writeln!(out, "{u}\t{v}");
    }
    out
}

pub fn parse_edge_list(path: &Path, text: &str) -> Result<Graph, IoError> {
    let mut declared = None;
    for line in text.lines() {
        if let Some(rest) = line.trim().strip_prefix(NODES_TAG) {
            declared = rest.trim().parse::<usize>().ok();
            break;
        }
    }
    let mut pairs = Vec::new();
    let mut top = 0usize;
    for (line, fields) in records(text) {
        let (a, b) = parse_pair(path, line, &fields)?;
        let (a, b) = (a as usize, b as usize);
        top = top.max(a + 1).max(b + 1);
        pairs.push((line, a, b));
    }
    let n = declared.unwrap_or(0).max(top);
    let mut g = Graph::with_nodes(n);
    for (line, a, b) in pairs {
        g.add_edge(a, b).map_err(|e: GraphError| IoError::Parse {
            path: path.to_path_buf(),
            line,
            message: e.to_string(),
        })?;
    }
    Ok(g)
}

pub fn write_edge_list(g: &Graph, path: &Path) -> Result<(), IoError> {
    write(path, &format_edge_list(g))
}

pub fn read_edge_list(path: &Path) -> Result<Graph, IoError> {
    parse_edge_list(path, &read(path)?)
}

pub fn format_membership(p: &Partition) -> String {
    let mut out = String::with_capacity(p.len() * 8);
    for (v, c) in p.labels().iter().enumerate() {
        let _ = writeln!(out, "{v}\t{c}");
    }
    out
}

/// Parses a membership file over nodes `0..expected_n`. Community labels are
/// arbitrary integers, compacted in order of first appearance by node id.
pub fn parse_membership(path: &Path, text: &str, expected_n: usize) -> Result<Partition, IoError> {
    let mut labels: Vec<Option<u64>> = vec![None; expected_n];
    for (line, fields) in records(text) {
        let (node, label) = parse_pair(path, line, &fields)?;
        let node = node as usize;
        if node >= expected_n {
            return Err(IoError::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("node {node} outside 0..{expected_n}"),
            });
        }
        if labels[node].replace(label).is_some() {
            return Err(IoError::DuplicateNode(node));
        }
    }
    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(v, l)| l.ok_or(IoError::MissingNode(v)))
        .collect::<Result<Vec<u64>, _>>()?;
    Ok(Partition::from_labels(&labels))
}

pub fn write_membership(p: &Partition, path: &Path) -> Result<(), IoError> {
    write(path, &format_membership(p))
}

/// Reads an externally produced partition of `expected_n` nodes.
pub fn ingest_external_partition(path: &Path, expected_n: usize) -> Result<Partition, IoError> {
    parse_membership(path, &read(path)?, expected_n)
}

/// Number of content lines in a membership file, for callers that do not
/// know the node count up front.
pub fn count_membership_entries(path: &Path) -> Result<usize, IoError> {
    Ok(records(&read(path)?).count())
}

/// Writes `g` and `truth` under `dir` and reads them back.
pub fn io_roundtrip(g: &Graph, truth: &Partition, dir: &Path) -> Result<(Graph, Partition), IoError> {
    let edges = dir.join("edges.tsv");
    let membership = dir.join("membership.tsv");
    write_edge_list(g, &edges)?;
    write_membership(truth, &membership)?;
    let g2 = read_edge_list(&edges)?;
    let p2 = ingest_external_partition(&membership, g2.n())?;
    Ok((g2, p2))
}
