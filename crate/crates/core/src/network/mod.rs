//! Undirected simple graphs and the three topologies compared by the
//! experiments: the deterministic hierarchical (modular) network, the
//! fixed-budget preferential-attachment network and the uniform random
//! network.

mod hierarchical;
mod random;
mod scale_free;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use hierarchical::{build_hierarchical, hierarchical_link_count, hierarchical_peripheral};
pub use random::build_random;
pub use scale_free::{attachment_schedule, build_scale_free};

pub type Node = usize;

/// An undirected simple graph on nodes `0..L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    adjacency: Vec<Vec<Node>>,
    /// Sorted `(u, v)` pairs with `u < v`.
    edges: Vec<(Node, Node)>,
}

impl Network {
    /// Builds a network from an edge list, rejecting self-loops, duplicates
    /// and out-of-range endpoints.
    pub fn from_edges(
        node_count: usize,
        edges: impl IntoIterator<Item = (Node, Node)>,
    ) -> Result<Self> {
        let mut list: Vec<(Node, Node)> = Vec::new();
        for (u, v) in edges {
            if u >= node_count || v >= node_count {
                return Err(Error::param(format!(
                    "edge ({u}, {v}) outside 0..{node_count}"
                )));
            }
            if u == v {
                return Err(Error::param(format!("self-loop at node {u}")));
            }
            list.push((u.min(v), u.max(v)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::param(format!("duplicate edge {:?}", w[0])));
        }
        let mut adjacency = vec![Vec::new(); node_count];
        for &(u, v) in &list {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        Ok(Self {
            adjacency,
            edges: list,
        })
    }

    pub fn complete(node_count: usize) -> Self {
        let edges = (0..node_count).flat_map(|u| (u + 1..node_count).map(move |v| (u, v)));
        Self::from_edges(node_count, edges).expect("complete graph is simple")
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(Node, Node)] {
        &self.edges
    }

    /// Sorted neighbour list of `i`.
    pub fn neighbors(&self, i: Node) -> &[Node] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: Node) -> usize {
        self.adjacency[i].len()
    }

    pub fn has_edge(&self, u: Node, v: Node) -> bool {
        self.adjacency
            .get(u)
            .is_some_and(|n| n.binary_search(&v).is_ok())
    }

    /// Local clustering `2 n_i / (k_i (k_i - 1))`, where `n_i` counts links
    /// among the neighbours of `i`. Nodes with fewer than two neighbours get 0.
    pub fn clustering_coefficient(&self, i: Node) -> Result<f64> {
        let nbrs = self
            .adjacency
            .get(i)
            .ok_or_else(|| Error::param(format!("node {i} outside 0..{}", self.node_count())))?;
        let k = nbrs.len();
        if k < 2 {
            return Ok(0.0);
        }
        let mut links = 0usize;
        for (a, &u) in nbrs.iter().enumerate() {
            links += nbrs[a + 1..]
                .iter()
                .filter(|&&v| self.has_edge(u, v))
                .count();
        }
        Ok(2.0 * links as f64 / (k * (k - 1)) as f64)
    }

    /// Lowest-indexed node of maximum degree.
    pub fn main_hub(&self) -> Node {
        self.hubs(1)[0]
    }

    /// The `count` highest-degree nodes, by decreasing degree then increasing
    /// index.
    pub fn hubs(&self, count: usize) -> Vec<Node> {
        let mut order: Vec<Node> = (0..self.node_count()).collect();
        order.sort_by(|&a, &b| self.degree(b).cmp(&self.degree(a)).then(a.cmp(&b)));
        order.truncate(count.max(1).min(self.node_count()));
        order
    }

    /// Writes one `u v` pair per line, `u < v`, sorted.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(self.edges.len() * 8);
        for (u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    /// Parses an edge list. The node count is `node_count` if given, else one
    /// more than the largest endpoint.
    pub fn from_edge_list(text: &str, node_count: Option<usize>) -> Result<Self> {
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace().map(str::parse::<Node>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(u)), Some(Ok(v)), None) => edges.push((u, v)),
                _ => {
                    return Err(Error::param(format!(
                        "line {}: expected \"u v\", got {line:?}",
                        lineno + 1
                    )))
                }
            }
        }
        let inferred = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
        Self::from_edges(node_count.unwrap_or(inferred), edges)
    }

    pub fn save_edge_list(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_edge_list()).map_err(|e| Error::io(path, e))
    }

    pub fn load_edge_list(path: &Path, node_count: Option<usize>) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_edge_list(&text, node_count).map_err(|e| Error::Format {
            path: path.into(),
            message: e.to_string(),
        })
    }
}

/// Degree and clustering summary of a network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkStats {
    pub node_count: usize,
    pub edge_count: usize,
    pub degree_histogram: BTreeMap<usize, usize>,
    pub max_degree: usize,
    pub max_degree_nodes: Vec<Node>,
    pub mean_clustering: f64,
    pub per_node_clustering: Vec<f64>,
}

pub fn network_stats(net: &Network) -> NetworkStats {
    let mut degree_histogram = BTreeMap::new();
    for i in 0..net.node_count() {
        *degree_histogram.entry(net.degree(i)).or_insert(0) += 1;
    }
    let max_degree = degree_histogram.keys().next_back().copied().unwrap_or(0);
    let max_degree_nodes = (0..net.node_count())
        .filter(|&i| net.degree(i) == max_degree)
        .collect();
    let per_node_clustering: Vec<f64> = (0..net.node_count())
        .map(|i| net.clustering_coefficient(i).expect("valid node"))
        .collect();
    let mean_clustering = if per_node_clustering.is_empty() {
        0.0
    } else {
        per_node_clustering.iter().sum::<f64>() / per_node_clustering.len() as f64
    };
    NetworkStats {
        node_count: net.node_count(),
        edge_count: net.edge_count(),
        degree_histogram,
        max_degree,
        max_degree_nodes,
        mean_clustering,
        per_node_clustering,
    }
}

pub fn main_hub(net: &Network) -> Node {
    net.main_hub()
}
