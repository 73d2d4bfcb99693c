use std::collections::VecDeque;

use super::{Graph, Vertex};

/// Answer of [`is_bipartite`] together with a witness that can be checked
/// without trusting the search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bipartition {
    /// `coloring[v]` is 0 or 1 and every edge joins different colours.
    Bipartite { coloring: Vec<u8> },
    /// A closed walk `c[0] c[1] ... c[k-1] c[0]` of odd length `k`.
    OddCycle(Vec<Vertex>),
}

impl Bipartition {
    pub fn is_bipartite(&self) -> bool {
        matches!(self, Bipartition::Bipartite { .. })
    }

    /// Re-checks the witness against `g`.
    pub fn verify(&self, g: &Graph) -> bool {
        match self {
            Bipartition::Bipartite { coloring } => {
                coloring.len() == g.vertex_count()
                    && g.edges()
                        .iter()
                        .all(|&(u, v)| coloring[u as usize] != coloring[v as usize])
            }
            Bipartition::OddCycle(c) => {
                c.len() % 2 == 1
                    && (0..c.len()).all(|i| g.is_adjacent(c[i], c[(i + 1) % c.len()]))
            }
        }
    }
}

pub fn is_bipartite(g: &Graph) -> Bipartition {
    let n = g.vertex_count();
    let mut color = vec![u8::MAX; n];
    let mut parent = vec![u32::MAX; n];
    let mut queue = VecDeque::new();
    color[0] = 0;
    queue.push_back(0 as Vertex);
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if color[w as usize] == u8::MAX {
                color[w as usize] = 1 - color[u as usize];
                parent[w as usize] = u;
                queue.push_back(w);
            } else if color[w as usize] == color[u as usize] {
                return Bipartition::OddCycle(odd_cycle(&parent, u, w));
            }
        }
    }
    Bipartition::Bipartite { coloring: color }
}

/// Joins the tree paths of two same-coloured adjacent vertices at their
/// lowest common ancestor.
fn odd_cycle(parent: &[u32], u: Vertex, w: Vertex) -> Vec<Vertex> {
    let ancestors = |mut x: Vertex| {
        let mut out = vec![x];
        while parent[x as usize] != u32::MAX {
            x = parent[x as usize];
            out.push(x);
        }
        out
    };
    let pu = ancestors(u);
    let pw = ancestors(w);
    let mut i = pu.len();
    let mut j = pw.len();
    while i > 0 && j > 0 && pu[i - 1] == pw[j - 1] {
        i -= 1;
        j -= 1;
    }
    // pu[i] == pw[j] is the common ancestor.
    let mut cycle: Vec<Vertex> = pu[..=i].to_vec();
    cycle.extend(pw[..j].iter().rev());
    cycle
}

/// A shortest cycle, as its vertex sequence, or `None` for forests.
pub fn shortest_cycle(g: &Graph) -> Option<Vec<Vertex>> {
    let n = g.vertex_count();
    let mut best: Option<Vec<Vertex>> = None;
    let mut dist = vec![u32::MAX; n];
    let mut parent = vec![u32::MAX; n];
    for root in 0..n as Vertex {
        dist.fill(u32::MAX);
        parent.fill(u32::MAX);
        dist[root as usize] = 0;
        let mut queue = VecDeque::from([root]);
        'bfs: while let Some(u) = queue.pop_front() {
            if let Some(b) = &best {
                if 2 * dist[u as usize] + 1 >= b.len() as u32 {
                    break;
                }
            }
            for &w in g.neighbors(u) {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dist[u as usize] + 1;
                    parent[w as usize] = u;
                    queue.push_back(w);
                } else if parent[u as usize] != w {
                    let len = dist[u as usize] + dist[w as usize] + 1;
                    if best.as_ref().is_none_or(|b| (len as usize) < b.len()) {
                        let c = tree_cycle(&parent, u, w);
                        if c.len() == len as usize {
                            best = Some(c);
                            continue 'bfs;
                        }
                    }
                }
            }
        }
    }
    best
}

fn tree_cycle(parent: &[u32], u: Vertex, w: Vertex) -> Vec<Vertex> {
    let path = |mut x: Vertex| {
        let mut out = vec![x];
        while parent[x as usize] != u32::MAX {
            x = parent[x as usize];
            out.push(x);
        }
        out
    };
    let pu = path(u);
    let pw = path(w);
    let mut i = pu.len();
    let mut j = pw.len();
    while i > 0 && j > 0 && pu[i - 1] == pw[j - 1] {
        i -= 1;
        j -= 1;
    }
    let mut cycle: Vec<Vertex> = pu[..=i].to_vec();
    cycle.extend(pw[..j].iter().rev());
    cycle
}

/// Length of a shortest cycle; `None` stands for infinite girth.
pub fn girth(g: &Graph) -> Option<u32> {
    shortest_cycle(g).map(|c| c.len() as u32)
}
