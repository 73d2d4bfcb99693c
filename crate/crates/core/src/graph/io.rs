use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{Graph, GraphError, Vertex};

/// Wire format: `{"labels": [...], "edges": [[i, j], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub labels: Vec<String>,
    pub edges: Vec<[Vertex; 2]>,
}

impl GraphJson {
    pub fn from_graph(g: &Graph) -> GraphJson {
        GraphJson {
            labels: g.labels().to_vec(),
            edges: g.edges().into_iter().map(|(u, v)| [u, v]).collect(),
        }
    }

    pub fn into_graph(self) -> Result<Graph, GraphError> {
        let edges: Vec<_> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        Graph::new(self.labels, &edges)
    }

    pub fn parse(text: &str) -> Result<Graph, GraphError> {
        let gj: GraphJson =
            serde_json::from_str(text).map_err(|e| GraphError::MalformedSpec(e.to_string()))?;
        gj.into_graph()
    }
}

/// Graphviz rendering with vertices emitted in index order.
pub fn to_dot(g: &Graph, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph \"{}\" {{", name.replace('"', "'"));
    for v in g.vertices() {
        let _ = writeln!(out, "  {v} [label=\"{}\"];", g.label(v).replace('"', "'"));
    }
    for (u, v) in g.edges() {
        let _ = writeln!(out, "  {u} -- {v};");
    }
    out.push_str("}\n");
    out
}
