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

//! Brute-force reference implementations for small graphs.

#![allow(dead_code)]

use lfr_core::{Graph, Partition, RandomSource};
use rand::Rng;

/// G(n, p) with a fixed seed.
pub fn random_graph(n: usize, p: f64, rng: &mut RandomSource) -> Graph {
    let mut g = Graph::with_nodes(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}

pub fn star(n: usize) -> Graph {
    Graph::from_edge_list(n, (1..n).map(|v| (0, v))).unwrap()
}

pub fn complete(n: usize) -> Graph {
    Graph::from_edge_list(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
}

/// All-pairs hop counts by Floyd-Warshall; `None` when unreachable.
pub fn all_distances(g: &Graph) -> Vec<Vec<Option<usize>>> {
    let n = g.n();
    let mut d = vec![vec![None; n]; n];
    for u in 0..n {
        d[u][u] = Some(0);
        for &v in g.neighbors(u) {
            d[u][v] = Some(1);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].map_or(true, |c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

/// Every shortest path from `s` to `t`, as node sequences.
pub fn shortest_paths(g: &Graph, s: usize, t: usize) -> Vec<Vec<usize>> {
    let d = all_distances(g);
    let Some(len) = d[s][t] else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let mut path = vec![s];
    fn walk(
        g: &Graph,
        d: &[Vec<Option<usize>>],
        t: usize,
        len: usize,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let u = *path.last().unwrap();
        if path.len() - 1 == len {
            if u == t {
                out.push(path.clone());
            }
            return;
        }
        for &v in g.neighbors(u) {
            if d[v][t] == Some(len - path.len()) {
                path.push(v);
                walk(g, d, t, len, path, out);
                path.pop();
            }
        }
    }
    walk(g, &d, t, len, &mut path, &mut out);
    out
}

/// Mean over ordered reachable pairs.
pub fn avg_distance(g: &Graph) -> Option<f64> {
    let d = all_distances(g);
    let mut sum = 0usize;
    let mut pairs = 0usize;
    for (i, row) in d.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if i != j {
                if let Some(x) = x {
                    sum += x;
                    pairs += 1;
                }
            }
        }
    }
    (pairs > 0).then(|| sum as f64 / pairs as f64)
}

/// Pair-by-pair betweenness, unordered pairs counted once.
pub fn betweenness(g: &Graph) -> Vec<f64> {
    let n = g.n();
    let mut bc = vec![0.0; n];
    for s in 0..n {
        for t in s + 1..n {
            let paths = shortest_paths(g, s, t);
            if paths.is_empty() {
                continue;
            }
            let total = paths.len() as f64;
            for p in &paths {
                for &v in &p[1..p.len() - 1] {
                    bc[v] += 1.0 / total;
                }
            }
        }
    }
    bc
}

/// `(component size - 1) / Σ distances`, 0 when isolated.
pub fn closeness(g: &Graph) -> Vec<f64> {
    let d = all_distances(g);
    d.iter()
        .enumerate()
        .map(|(i, row)| {
            let reach: Vec<usize> = row
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .filter_map(|(_, x)| *x)
                .collect();
            let sum: usize = reach.iter().sum();
            if sum == 0 {
                0.0
            } else {
                reach.len() as f64 / sum as f64
            }
        })
        .collect()
}

/// `(global, mean local)`; the local mean skips nodes of degree below 2.
pub fn transitivity(g: &Graph) -> (f64, f64) {
    let n = g.n();
    let mut closed = 0usize;
    let mut triples = 0usize;
    let mut local_sum = 0.0;
    let mut eligible = 0usize;
    for v in 0..n {
        let nb = g.neighbors(v);
        let mut links = 0usize;
        for a in 0..nb.len() {
            for b in a + 1..nb.len() {
                triples += 1;
                if g.has_edge(nb[a], nb[b]) {
                    links += 1;
                    closed += 1;
                }
            }
        }
        let k = nb.len();
        if k >= 2 {
            local_sum += links as f64 / (k * (k - 1) / 2) as f64;
            eligible += 1;
        }
    }
    let global = if triples == 0 { 0.0 } else { closed as f64 / triples as f64 };
    let local = if eligible == 0 { 0.0 } else { local_sum / eligible as f64 };
    (global, local)
}

/// Pearson correlation over both orientations of every edge.
pub fn assortativity(g: &Graph) -> Option<f64> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(u, v) in g.edges() {
        let (a, b) = (g.degree(u) as f64, g.degree(v) as f64);
        xs.extend([a, b]);
        ys.extend([b, a]);
    }
    if xs.is_empty() {
        return None;
    }
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let vx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let vy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        None
    } else {
        Some(cov / (vx * vy).sqrt())
    }
}

fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    values.iter().map(|c| max - c).sum()
}

/// Freeman centralization with the normalizer measured on an actual star.
pub fn centralization(g: &Graph, f: impl Fn(&Graph) -> Vec<f64>) -> f64 {
    let n = g.n();
    (spread(&f(g)) / spread(&f(&star(n)))).clamp(0.0, 1.0)
}

pub fn degrees_f64(g: &Graph) -> Vec<f64> {
    g.degrees().into_iter().map(|k| k as f64).collect()
}

/// `(1/2M) Σ_ij [A_ij - k_i k_j / 2M] δ(c_i, c_j)` over ordered pairs.
pub fn modularity(g: &Graph, labels: &[usize]) -> f64 {
    let m2 = 2.0 * g.edge_count() as f64;
    let n = g.n();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                let a = if g.has_edge(i, j) { 1.0 } else { 0.0 };
                q += a - g.degree(i) as f64 * g.degree(j) as f64 / m2;
            }
        }
    }
    q / m2
}

/// Danon-form NMI by direct summation over label values.
pub fn nmi(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len() as f64;
    let ka = a.iter().max().map_or(0, |&x| x + 1);
    let kb = b.iter().max().map_or(0, |&x| x + 1);
    let mut nij = vec![vec![0.0; kb]; ka];
    let mut ni = vec![0.0; ka];
    let mut nj = vec![0.0; kb];
    for (&x, &y) in a.iter().zip(b) {
        nij[x][y] += 1.0;
        ni[x] += 1.0;
        nj[y] += 1.0;
    }
    let mut num = 0.0;
    for i in 0..ka {
        for j in 0..kb {
            if nij[i][j] > 0.0 {
                num += nij[i][j] * (nij[i][j] * n / (ni[i] * nj[j])).ln();
            }
        }
    }
    let h = |v: &[f64]| v.iter().filter(|&&x| x > 0.0).map(|&x| x * (x / n).ln()).sum::<f64>();
    let den = h(&ni) + h(&nj);
    if den == 0.0 {
        if a == b {
            1.0
        } else {
            0.0
        }
    } else {
        -2.0 * num / den
    }
}

/// Every set partition of `0..n` as restricted growth strings.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    fn rec(i: usize, top: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for c in 0..=top {
            cur[i] = c;
            rec(i + 1, top.max(c + 1), cur, out);
        }
    }
    if n == 0 {
        out.push(Vec::new());
    } else {
        rec(1, 1, &mut cur, &mut out);
    }
    out
}

/// Highest modularity over every partition.
pub fn best_modularity(g: &Graph) -> f64 {
    set_partitions(g.n())
        .iter()
        .map(|l| modularity(g, l))
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn random_partition(n: usize, k: usize, rng: &mut RandomSource) -> Partition {
    let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
    Partition::from_labels(&labels)
}
