use rustc_hash::FxHashMap;
use serde::Serialize;

use super::{Graph, GraphError, Vertex};

/// A subdivision path. `internal[i]` is at distance `i + 1` from
/// `endpoint_u` along the thread.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Thread {
    pub endpoint_u: Vertex,
    pub endpoint_v: Vertex,
    pub internal: Vec<Vertex>,
}

/// A position on a thread, `offset` edges from `endpoint_u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ThreadPoint {
    pub thread: u32,
    pub offset: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VertexRole {
    /// An original vertex; the payload is its index in the base graph.
    Original(Vertex),
    /// An internal thread vertex.
    Inner(ThreadPoint),
}

/// Bookkeeping for `G^(1/m)`.
///
/// Original vertices keep their base-graph indices, so base vertex `i` is
/// vertex `i` of the subdivided graph. Internal vertices follow, thread by
/// thread in lexicographic edge order.
#[derive(Debug, Clone, Serialize)]
pub struct SubdivisionMap {
    pub base_vertex_count: usize,
    pub m: u32,
    pub original_vertices: Vec<Vertex>,
    pub threads: Vec<Thread>,
    roles: Vec<VertexRole>,
    #[serde(skip)]
    by_endpoints: FxHashMap<(Vertex, Vertex), u32>,
}

impl SubdivisionMap {
    pub fn role(&self, v: Vertex) -> VertexRole {
        self.roles[v as usize]
    }

    pub fn is_original(&self, v: Vertex) -> bool {
        matches!(self.roles[v as usize], VertexRole::Original(_))
    }

    pub fn thread_count(&self) -> usize {
        self.threads.len()
    }

    /// Vertex at `offset` along thread `t` (0 and `m` are the endpoints).
    pub fn point(&self, t: u32, offset: u32) -> Vertex {
        let th = &self.threads[t as usize];
        if offset == 0 {
            th.endpoint_u
        } else if offset == self.m {
            th.endpoint_v
        } else {
            th.internal[offset as usize - 1]
        }
    }

    /// Thread joining two original vertices, if they are adjacent in the base graph.
    pub fn thread_between(&self, a: Vertex, b: Vertex) -> Option<u32> {
        let key = if a < b { (a, b) } else { (b, a) };
        self.by_endpoints.get(&key).copied()
    }

    /// Vertex on the `a⋯b` thread at distance `offset` from `a`.
    pub fn point_from(&self, a: Vertex, b: Vertex, offset: u32) -> Option<Vertex> {
        let t = self.thread_between(a, b)?;
        if offset > self.m {
            return None;
        }
        let th = &self.threads[t as usize];
        let off = if th.endpoint_u == a { offset } else { self.m - offset };
        Some(self.point(t, off))
    }

    /// Thread containing an internal vertex, oriented from `from`: returns
    /// the other endpoint and the distance from `from` along the thread.
    pub fn orient(&self, v: Vertex, from: Vertex) -> Option<(Vertex, u32)> {
        match self.roles[v as usize] {
            VertexRole::Original(_) => None,
            VertexRole::Inner(p) => {
                let th = &self.threads[p.thread as usize];
                if th.endpoint_u == from {
                    Some((th.endpoint_v, p.offset))
                } else if th.endpoint_v == from {
                    Some((th.endpoint_u, self.m - p.offset))
                } else {
                    None
                }
            }
        }
    }

    /// Central vertex of an even-length thread.
    pub fn midpoint(&self, t: u32) -> Option<Vertex> {
        self.m.is_multiple_of(2).then(|| self.point(t, self.m / 2))
    }

    /// The two vertices of the central edge of an odd-length thread,
    /// nearer `endpoint_u` first.
    pub fn near_midpoints(&self, t: u32) -> Option<(Vertex, Vertex)> {
        (self.m % 2 == 1).then(|| (self.point(t, self.m / 2), self.point(t, self.m / 2 + 1)))
    }
}

/// Replaces every edge of `g` by a path of length `m`.
pub fn subdivide(g: &Graph, m: u32) -> Result<(Graph, SubdivisionMap), GraphError> {
    if m == 0 {
        return Err(GraphError::ZeroSubdivision);
    }
    let n = g.vertex_count();
    let mut labels: Vec<String> = g.labels().to_vec();
    let mut roles: Vec<VertexRole> = (0..n as Vertex).map(VertexRole::Original).collect();
    let mut edges = Vec::new();
    let mut threads = Vec::new();
    let mut by_endpoints = FxHashMap::default();

    for (t, (u, v)) in g.edges().into_iter().enumerate() {
        let mut internal = Vec::with_capacity(m as usize - 1);
        let mut prev = u;
        for i in 1..m {
            let w = labels.len() as Vertex;
            labels.push(format!("{}-{}/{}", g.label(u), g.label(v), i));
            roles.push(VertexRole::Inner(ThreadPoint {
                thread: t as u32,
                offset: i,
            }));
            edges.push((prev, w));
            internal.push(w);
            prev = w;
        }
        edges.push((prev, v));
        by_endpoints.insert((u, v), t as u32);
        threads.push(Thread {
            endpoint_u: u,
            endpoint_v: v,
            internal,
        });
    }

    let graph = Graph::new(labels, &edges)?;
    let map = SubdivisionMap {
        base_vertex_count: n,
        m,
        original_vertices: (0..n as Vertex).collect(),
        threads,
        roles,
        by_endpoints,
    };
    Ok((graph, map))
}

/// Replaces the single edge `u`-`v` by a path of length `k + 1` through `k`
/// new vertices, appended after the existing ones.
pub fn subdivide_edge(g: &Graph, edge: (Vertex, Vertex), k: u32) -> Result<Graph, GraphError> {
    let (a, b) = edge;
    g.check_vertex(a)?;
    g.check_vertex(b)?;
    if !g.is_adjacent(a, b) {
        return Err(GraphError::EdgeNotPresent(a, b));
    }
    let (u, v) = if a < b { (a, b) } else { (b, a) };
    let mut labels = g.labels().to_vec();
    let mut edges: Vec<(Vertex, Vertex)> =
        g.edges().into_iter().filter(|&e| e != (u, v)).collect();
    let mut prev = u;
    for i in 1..=k {
        let w = labels.len() as Vertex;
        labels.push(format!("{}-{}/{}", g.label(u), g.label(v), i));
        edges.push((prev, w));
        prev = w;
    }
    edges.push((prev, v));
    Graph::new(labels, &edges)
}
