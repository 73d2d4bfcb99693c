//! Simple connected undirected graphs with eagerly computed metric data.

mod builders;
mod io;
mod metrics;
mod subdivision;

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::bitset::VertexSet;

pub use builders::{build_named, Built, Family, GraphSpec};
pub use io::{GraphJson, to_dot};
pub use metrics::{girth, is_bipartite, shortest_cycle, Bipartition};
pub use subdivision::{
    subdivide, subdivide_edge, SubdivisionMap, Thread, ThreadPoint, VertexRole,
};

/// Dense 0-based vertex index.
pub type Vertex = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("malformed graph spec `{0}`")]
    MalformedSpec(String),
    #[error("{family}: parameter {name}={value} is below the minimum {min}")]
    ParameterTooSmall {
        family: &'static str,
        name: &'static str,
        value: u32,
        min: u32,
    },
    #[error("graph has no vertices")]
    Empty,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("vertex {0} out of range")]
    VertexOutOfRange(Vertex),
    #[error("edge {0}-{1} is not present")]
    EdgeNotPresent(Vertex, Vertex),
    #[error("label count {labels} does not match vertex count {vertices}")]
    LabelMismatch { labels: usize, vertices: usize },
    #[error("subdivision length must be at least 1")]
    ZeroSubdivision,
    #[error("io: {0}")]
    Io(String),
}

/// An immutable simple connected undirected graph.
///
/// Construction computes all-pairs hop distances, the closed neighbourhood
/// of every vertex and, for every vertex `v`, the distance spheres around
/// `v`. The game engine reads those masks directly.
#[derive(Clone)]
pub struct Graph {
    labels: Vec<String>,
    adjacency: Vec<Vec<Vertex>>,
    edge_count: usize,
    dist: Vec<u32>,
    closed_nbhd: Vec<VertexSet>,
    spheres: Vec<Vec<VertexSet>>,
}

impl Graph {
    /// Builds a graph from labels and an edge list. Duplicate edges collapse.
    pub fn new(labels: Vec<String>, edges: &[(Vertex, Vertex)]) -> Result<Graph, GraphError> {
        let n = labels.len();
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u as usize >= n {
                return Err(GraphError::VertexOutOfRange(u));
            }
            if v as usize >= n {
                return Err(GraphError::VertexOutOfRange(v));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
        }
        for nb in adjacency.iter_mut() {
            nb.sort_unstable();
            nb.dedup();
        }
        let edge_count = adjacency.iter().map(Vec::len).sum::<usize>() / 2;

        let mut dist = vec![u32::MAX; n * n];
        for s in 0..n {
            bfs_into(&adjacency, s, &mut dist[s * n..(s + 1) * n]);
        }
        if dist[..n].contains(&u32::MAX) {
            return Err(GraphError::Disconnected);
        }

        let closed_nbhd = (0..n)
            .map(|v| {
                let mut s = VertexSet::from_vertices(n, adjacency[v].iter().copied());
                s.insert(v as Vertex);
                s
            })
            .collect();
        let spheres = (0..n)
            .map(|v| {
                let row = &dist[v * n..(v + 1) * n];
                let ecc = *row.iter().max().unwrap() as usize;
                let mut sph = vec![VertexSet::empty(n); ecc + 1];
                for (u, &d) in row.iter().enumerate() {
                    sph[d as usize].insert(u as Vertex);
                }
                sph
            })
            .collect();

        Ok(Graph {
            labels,
            adjacency,
            edge_count,
            dist,
            closed_nbhd,
            spheres,
        })
    }

    /// Graph with labels `"0"`, `"1"`, ...
    pub fn unlabeled(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Graph, GraphError> {
        Graph::new((0..n).map(|i| i.to_string()).collect(), edges)
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: Vertex) -> &str {
        &self.labels[v as usize]
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<Vertex> {
        self.labels.iter().position(|l| l == label).map(|i| i as Vertex)
    }

    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adjacency[v as usize]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency[v as usize].len()
    }

    #[inline]
    pub fn distance(&self, u: Vertex, v: Vertex) -> u32 {
        self.dist[u as usize * self.vertex_count() + v as usize]
    }

    pub fn distance_row(&self, u: Vertex) -> &[u32] {
        let n = self.vertex_count();
        &self.dist[u as usize * n..(u as usize + 1) * n]
    }

    pub fn eccentricity(&self, v: Vertex) -> u32 {
        (self.spheres[v as usize].len() - 1) as u32
    }

    pub fn is_adjacent(&self, u: Vertex, v: Vertex) -> bool {
        self.adjacency[u as usize].binary_search(&v).is_ok()
    }

    /// Closed neighbourhood `N[v]` as a bit-set.
    #[inline]
    pub fn closed_neighborhood(&self, v: Vertex) -> &VertexSet {
        &self.closed_nbhd[v as usize]
    }

    /// `spheres(v)[d]` is the set of vertices at distance exactly `d` from `v`.
    #[inline]
    pub fn spheres(&self, v: Vertex) -> &[VertexSet] {
        &self.spheres[v as usize]
    }

    /// Edges `(u, v)` with `u < v`, ordered lexicographically.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (u, nb) in self.adjacency.iter().enumerate() {
            for &v in nb {
                if (u as Vertex) < v {
                    out.push((u as Vertex, v));
                }
            }
        }
        out
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        0..self.vertex_count() as Vertex
    }

    pub fn full_set(&self) -> VertexSet {
        VertexSet::full(self.vertex_count())
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<(), GraphError> {
        if (v as usize) < self.vertex_count() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange(v))
        }
    }

    /// Same labels and same adjacency.
    pub fn same_as(&self, other: &Graph) -> bool {
        self.labels == other.labels && self.adjacency == other.adjacency
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("vertices", &self.vertex_count())
            .field("edges", &self.edge_count)
            .finish()
    }
}

fn bfs_into(adjacency: &[Vec<Vertex>], source: usize, out: &mut [u32]) {
    let mut queue = VecDeque::new();
    out[source] = 0;
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let du = out[u];
        for &v in &adjacency[u] {
            if out[v as usize] == u32::MAX {
                out[v as usize] = du + 1;
                queue.push_back(v as usize);
            }
        }
    }
}
