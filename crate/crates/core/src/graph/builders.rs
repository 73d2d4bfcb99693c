use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{subdivide, subdivide_edge, Graph, GraphError, SubdivisionMap, Vertex};

/// A named graph family instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    Complete { n: u32 },
    CompleteBipartite { a: u32, b: u32 },
    Cycle { n: u32 },
    Path { n: u32 },
    /// The 6-cycle/7-cycle graph sharing the edge `v3v9`.
    H,
    /// `H` with the edge `v5v6` subdivided once.
    HPrime,
    Petersen,
    Heawood,
    EdgeList { n: u32, edges: Vec<(Vertex, Vertex)> },
}

/// A family instance plus an optional uniform subdivision length.
///
/// String form: `K:5`, `Kab:2,3`, `C:6`, `P:4`, `H`, `Hprime`, `Petersen`,
/// `Heawood`, `E:0-1,1-2,2-0`; a suffix `^m` subdivides every edge into a
/// path of length `m` (`K:6^3`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct GraphSpec {
    pub family: Family,
    pub m: Option<u32>,
}

/// A built graph and, for subdivided specs, its thread bookkeeping.
#[derive(Debug, Clone)]
pub struct Built {
    pub spec: GraphSpec,
    pub graph: Graph,
    pub subdivision: Option<SubdivisionMap>,
}

impl GraphSpec {
    pub fn new(family: Family) -> Self {
        GraphSpec { family, m: None }
    }

    pub fn subdivided(family: Family, m: u32) -> Self {
        GraphSpec { family, m: Some(m) }
    }

    pub fn with_m(mut self, m: Option<u32>) -> Self {
        if m.is_some() {
            self.m = m;
        }
        self
    }

    pub fn build(&self) -> Result<Built, GraphError> {
        build_named(self)
    }
}

impl FromStr for GraphSpec {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, GraphError> {
        let bad = || GraphError::MalformedSpec(s.to_string());
        let s_trim = s.trim();
        let (body, m) = match s_trim.rsplit_once('^') {
            Some((body, m)) => (body, Some(m.trim().parse::<u32>().map_err(|_| bad())?)),
            None => (s_trim, None),
        };
        let (name, args) = match body.split_once(':') {
            Some((name, args)) => (name.trim(), Some(args.trim())),
            None => (body.trim(), None),
        };
        let nums = |args: Option<&str>, count: usize| -> Result<Vec<u32>, GraphError> {
            let args = args.ok_or_else(bad)?;
            let v: Vec<u32> = args
                .split(',')
                .map(|x| x.trim().parse::<u32>())
                .collect::<Result<_, _>>()
                .map_err(|_| bad())?;
            if v.len() != count {
                return Err(bad());
            }
            Ok(v)
        };
        let family = match name {
            "K" => Family::Complete { n: nums(args, 1)?[0] },
            "Kab" => {
                let v = nums(args, 2)?;
                Family::CompleteBipartite { a: v[0], b: v[1] }
            }
            "C" => Family::Cycle { n: nums(args, 1)?[0] },
            "P" => Family::Path { n: nums(args, 1)?[0] },
            "H" if args.is_none() => Family::H,
            "Hprime" | "H'" if args.is_none() => Family::HPrime,
            "Petersen" if args.is_none() => Family::Petersen,
            "Heawood" if args.is_none() => Family::Heawood,
            "E" => {
                let mut edges = Vec::new();
                for e in args.ok_or_else(bad)?.split(',') {
                    let (u, v) = e.split_once('-').ok_or_else(bad)?;
                    let u = u.trim().parse::<u32>().map_err(|_| bad())?;
                    let v = v.trim().parse::<u32>().map_err(|_| bad())?;
                    edges.push((u, v));
                }
                let n = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
                Family::EdgeList { n, edges }
            }
            _ => return Err(bad()),
        };
        Ok(GraphSpec { family, m })
    }
}

impl From<GraphSpec> for String {
    fn from(s: GraphSpec) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for GraphSpec {
    type Error = GraphError;

    fn try_from(s: String) -> Result<Self, GraphError> {
        s.parse()
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Complete { n } => write!(f, "K:{n}"),
            Family::CompleteBipartite { a, b } => write!(f, "Kab:{a},{b}"),
            Family::Cycle { n } => write!(f, "C:{n}"),
            Family::Path { n } => write!(f, "P:{n}"),
            Family::H => write!(f, "H"),
            Family::HPrime => write!(f, "Hprime"),
            Family::Petersen => write!(f, "Petersen"),
            Family::Heawood => write!(f, "Heawood"),
            Family::EdgeList { edges, .. } => {
                write!(f, "E:")?;
                for (i, (u, v)) in edges.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{u}-{v}")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family)?;
        if let Some(m) = self.m {
            write!(f, "^{m}")?;
        }
        Ok(())
    }
}

fn at_least(family: &'static str, name: &'static str, value: u32, min: u32) -> Result<(), GraphError> {
    if value < min {
        Err(GraphError::ParameterTooSmall {
            family,
            name,
            value,
            min,
        })
    } else {
        Ok(())
    }
}

/// Builds the graph a spec names, subdividing when the spec carries `m`.
pub fn build_named(spec: &GraphSpec) -> Result<Built, GraphError> {
    let base = build_family(&spec.family)?;
    match spec.m {
        None => Ok(Built {
            spec: spec.clone(),
            graph: base,
            subdivision: None,
        }),
        Some(m) => {
            let (graph, map) = subdivide(&base, m)?;
            Ok(Built {
                spec: spec.clone(),
                graph,
                subdivision: Some(map),
            })
        }
    }
}

fn build_family(family: &Family) -> Result<Graph, GraphError> {
    match family {
        Family::Complete { n } => complete(*n),
        Family::CompleteBipartite { a, b } => complete_bipartite(*a, *b),
        Family::Cycle { n } => cycle(*n),
        Family::Path { n } => path(*n),
        Family::H => graph_h(),
        Family::HPrime => graph_h_prime(),
        Family::Petersen => petersen(),
        Family::Heawood => heawood(),
        Family::EdgeList { n, edges } => Graph::unlabeled(*n as usize, edges),
    }
}

pub(crate) fn complete(n: u32) -> Result<Graph, GraphError> {
    at_least("K", "n", n, 2)?;
    let labels = (1..=n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    Graph::new(labels, &edges)
}

/// Part `A` is vertices `0..a` (labels `A1..`), part `B` follows (`B1..`).
pub(crate) fn complete_bipartite(a: u32, b: u32) -> Result<Graph, GraphError> {
    at_least("Kab", "a", a, 1)?;
    at_least("Kab", "b", b, 1)?;
    let labels = (1..=a)
        .map(|i| format!("A{i}"))
        .chain((1..=b).map(|i| format!("B{i}")))
        .collect();
    let mut edges = Vec::new();
    for u in 0..a {
        for v in 0..b {
            edges.push((u, a + v));
        }
    }
    Graph::new(labels, &edges)
}

pub(crate) fn cycle(n: u32) -> Result<Graph, GraphError> {
    at_least("C", "n", n, 3)?;
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::unlabeled(n as usize, &edges)
}

pub(crate) fn path(n: u32) -> Result<Graph, GraphError> {
    at_least("P", "n", n, 1)?;
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::unlabeled(n as usize, &edges)
}

/// Cycle `v1..v11` plus the chord `v3v9`.
pub(crate) fn graph_h() -> Result<Graph, GraphError> {
    let labels = (1..=11).map(|i| format!("v{i}")).collect();
    let mut edges: Vec<_> = (0..11).map(|i| (i, (i + 1) % 11)).collect();
    edges.push((2, 8));
    Graph::new(labels, &edges)
}

pub(crate) fn graph_h_prime() -> Result<Graph, GraphError> {
    subdivide_edge(&graph_h()?, (4, 5), 1)
}

pub(crate) fn petersen() -> Result<Graph, GraphError> {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
    }
    Graph::unlabeled(10, &edges)
}

/// LCF notation `[5,-5]^7`.
pub(crate) fn heawood() -> Result<Graph, GraphError> {
    let mut edges: Vec<_> = (0..14).map(|i| (i, (i + 1) % 14)).collect();
    for i in (0..14).step_by(2) {
        edges.push((i, (i + 5) % 14));
    }
    Graph::unlabeled(14, &edges)
}
