// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Erdős–Rényi graph generation, BFS connectivity and degree statistics.

use std::collections::{BTreeMap, VecDeque};

use rand::Rng;

use crate::error::{check_probability, Error, Result};
use crate::rng::{derive_seed, stream_from_seed, Stream};

/// Default cap on connectivity retries.
pub const DEFAULT_MAX_ATTEMPTS: u32 = 1000;

/// Undirected simple graph on nodes `0..n`.
///
/// Adjacency lists are sorted and free of self-loops and duplicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    /// Graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Self {
        Self {
            adjacency: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    /// Builds a graph from an undirected edge list.
    ///
    /// Rejects self-loops, out-of-range endpoints and repeated edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::config("a graph needs at least one node"));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::config(format!(
                    "edge ({u}, {v}) out of range for {n} nodes"
                )));
            }
            if u == v {
                return Err(Error::config(format!("self-loop at node {u}")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::config("duplicate edge in edge list"));
            }
        }
        Ok(Self {
            adjacency,
            edge_count: edges.len(),
        })
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    /// Undirected edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }
}

/// Samples G(n, p_link).
///
/// One uniform draw in `[0, 1)` is consumed per unordered pair `u < v`,
/// pairs visited lexicographically; the edge exists iff the draw is
/// `<= p_link`. Two calls that see the same draw sequence therefore produce
/// nested edge sets when `p_link` increases.
pub fn generate_er<R: Rng + ?Sized>(n: usize, p_link: f64, stream: &mut R) -> Result<Graph> {
    if n < 2 {
        return Err(Error::config(format!(
            "node count must be at least 2, got {n}"
        )));
    }
    check_probability("p_link", p_link)?;

    let mut adjacency = vec![Vec::new(); n];
    let mut edge_count = 0;
    for u in 0..n {
        for v in (u + 1)..n {
            let r: f64 = stream.random();
            if r <= p_link {
                adjacency[u].push(v);
                adjacency[v].push(u);
                edge_count += 1;
            }
        }
    }
    // Pairs are visited in increasing (u, v), so every list is already sorted.
    Ok(Graph {
        adjacency,
        edge_count,
    })
}

/// True iff a BFS from node 0 reaches every node.
pub fn is_connected(g: &Graph) -> bool {
    let n = g.node_count();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::with_capacity(n);
    seen[0] = true;
    queue.push_back(0);
    let mut visited = 1;
    while let Some(u) = queue.pop_front() {
        for &v in g.neighbors(u) {
            if !seen[v] {
                seen[v] = true;
                visited += 1;
                queue.push_back(v);
            }
        }
    }
    visited == n
}

/// Stream read by attempt `attempt` of [`generate_connected_er`].
pub fn attempt_stream(seed: u64, attempt: u32) -> Stream {
    stream_from_seed(derive_seed(seed, &[u64::from(attempt)]))
}

/// Draws G(n, p_link) until the sample is connected.
///
/// Attempt `a` (0-based) reads from its own stream derived from
/// `(seed, a)`, so the accepted graph and the attempt count are a pure
/// function of the arguments. Returns the graph and the number of attempts
/// consumed.
pub fn generate_connected_er(
    n: usize,
    p_link: f64,
    seed: u64,
    max_attempts: u32,
) -> Result<(Graph, u32)> {
    if max_attempts == 0 {
        return Err(Error::config("max_attempts must be at least 1"));
    }
    for attempt in 0..max_attempts {
        let mut stream = attempt_stream(seed, attempt);
        let g = generate_er(n, p_link, &mut stream)?;
        if is_connected(&g) {
            return Ok((g, attempt + 1));
        }
    }
    Err(Error::GenerationFailed {
        n,
        p_link,
        max_attempts,
    })
}

/// Descriptive statistics of one graph's degree sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeStats {
    pub mean_degree: f64,
    /// Population standard deviation (divides by n).
    pub stddev_degree: f64,
    pub histogram: BTreeMap<usize, usize>,
}

pub fn degree_stats(g: &Graph) -> DegreeStats {
    let n = g.node_count() as f64;
    let mut histogram = BTreeMap::new();
    for u in 0..g.node_count() {
        *histogram.entry(g.degree(u)).or_insert(0) += 1;
    }
    let mean = 2.0 * g.edge_count() as f64 / n;
    let var = (0..g.node_count())
        .map(|u| {
            let d = g.degree(u) as f64 - mean;
            d * d
        })
        .sum::<f64>()
        / n;
    DegreeStats {
        mean_degree: mean,
        stddev_degree: var.sqrt(),
        histogram,
    }
}
