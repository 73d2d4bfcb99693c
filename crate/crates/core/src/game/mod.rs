//! One round of the game over knowledge states.
//!
//! A knowledge state is the set of vertices the robber may occupy after the
//! cop's latest answer. A round expands it to its closed neighbourhood (the
//! robber moves or stays), then splits the expansion by distance from the
//! probed vertex; the answer selects one class.

mod transcript;

use serde::Serialize;
use thiserror::Error;

use crate::bitset::VertexSet;
use crate::graph::{Graph, Vertex};

pub use transcript::{GraphRef, Round, RoundRecord, Transcript, TranscriptFile};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("knowledge state must be nonempty")]
    EmptyState,
    #[error("vertex {0} out of range")]
    VertexOutOfRange(Vertex),
    #[error("answer {answer} to probe {probe} is inconsistent with every candidate")]
    InconsistentAnswer { probe: Vertex, answer: u32 },
    #[error("state universe {state} does not match graph size {graph}")]
    UniverseMismatch { state: usize, graph: usize },
    #[error("transcript graph: {0}")]
    Graph(String),
}

/// Nonempty set of possible robber positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct KnowledgeState(VertexSet);

impl KnowledgeState {
    /// The full vertex set: the robber may start anywhere.
    pub fn initial(g: &Graph) -> KnowledgeState {
        KnowledgeState(g.full_set())
    }

    pub fn new(g: &Graph, set: VertexSet) -> Result<KnowledgeState, GameError> {
        if set.universe() != g.vertex_count() {
            return Err(GameError::UniverseMismatch {
                state: set.universe(),
                graph: g.vertex_count(),
            });
        }
        if set.is_empty() {
            return Err(GameError::EmptyState);
        }
        Ok(KnowledgeState(set))
    }

    pub fn from_vertices<I: IntoIterator<Item = Vertex>>(
        g: &Graph,
        vs: I,
    ) -> Result<KnowledgeState, GameError> {
        let mut set = VertexSet::empty(g.vertex_count());
        for v in vs {
            g.check_vertex(v).map_err(|_| GameError::VertexOutOfRange(v))?;
            set.insert(v);
        }
        KnowledgeState::new(g, set)
    }

    pub fn set(&self) -> &VertexSet {
        &self.0
    }

    pub fn into_set(self) -> VertexSet {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; present for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// The cop has won: exactly one candidate remains.
    pub fn is_located(&self) -> bool {
        self.0.is_singleton()
    }

    pub fn to_vec(&self) -> Vec<Vertex> {
        self.0.to_vec()
    }
}

/// `S ∪ N(S)`: every position reachable by one robber move from `S`.
pub fn expand(g: &Graph, s: &VertexSet) -> VertexSet {
    let mut out = VertexSet::empty(g.vertex_count());
    for v in s {
        out.union_with(g.closed_neighborhood(v));
    }
    out
}

/// Word-level [`expand`] into a caller-provided buffer.
#[inline]
pub fn expand_words(g: &Graph, s: &VertexSet, out: &mut [u64]) {
    out.fill(0);
    for v in s {
        for (o, w) in out.iter_mut().zip(g.closed_neighborhood(v).words()) {
            *o |= w;
        }
    }
}

/// Expanded candidates split by their distance from the probe.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbePartition {
    pub probe: Vertex,
    /// Nonempty classes in increasing distance order.
    pub classes: Vec<(u32, VertexSet)>,
}

impl ProbePartition {
    pub fn class(&self, answer: u32) -> Option<&VertexSet> {
        self.classes
            .iter()
            .find(|(d, _)| *d == answer)
            .map(|(_, c)| c)
    }

    pub fn answers(&self) -> impl Iterator<Item = u32> + '_ {
        self.classes.iter().map(|(d, _)| *d)
    }

    pub fn sizes(&self) -> Vec<(u32, usize)> {
        self.classes.iter().map(|(d, c)| (*d, c.len())).collect()
    }

    /// Every class is a singleton: this probe locates the robber outright.
    pub fn is_decisive(&self) -> bool {
        self.classes.iter().all(|(_, c)| c.is_singleton())
    }
}

pub fn probe_partition(g: &Graph, expanded: &VertexSet, probe: Vertex) -> ProbePartition {
    let classes = g
        .spheres(probe)
        .iter()
        .enumerate()
        .filter_map(|(d, sphere)| {
            let c = expanded.intersection(sphere);
            (!c.is_empty()).then_some((d as u32, c))
        })
        .collect();
    ProbePartition { probe, classes }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundOutcome {
    pub state: KnowledgeState,
    pub won: bool,
}

/// One full round: robber move, probe, answer.
pub fn apply_round(
    g: &Graph,
    s: &KnowledgeState,
    probe: Vertex,
    answer: u32,
) -> Result<RoundOutcome, GameError> {
    g.check_vertex(probe)
        .map_err(|_| GameError::VertexOutOfRange(probe))?;
    let sphere = g
        .spheres(probe)
        .get(answer as usize)
        .ok_or(GameError::InconsistentAnswer { probe, answer })?;
    let class = expand(g, s.set()).intersection(sphere);
    if class.is_empty() {
        return Err(GameError::InconsistentAnswer { probe, answer });
    }
    let won = class.is_singleton();
    Ok(RoundOutcome {
        state: KnowledgeState(class),
        won,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphSpec;

    fn graph(s: &str) -> Graph {
        s.parse::<GraphSpec>().unwrap().build().unwrap().graph
    }

    fn set(g: &Graph, vs: &[Vertex]) -> VertexSet {
        VertexSet::from_vertices(g.vertex_count(), vs.iter().copied())
    }

    #[test]
    fn expand_on_cycle() {
        let g = graph("C:6");
        assert_eq!(expand(&g, &set(&g, &[0])).to_vec(), vec![0, 1, 5]);
        assert_eq!(expand(&g, &g.full_set()), g.full_set());
    }

    #[test]
    fn expand_on_h() {
        let g = graph("H");
        // v2, v4 -> v1..v5
        assert_eq!(expand(&g, &set(&g, &[1, 3])).to_vec(), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn partition_of_six_cycle() {
        let g = graph("C:6");
        let p = probe_partition(&g, &g.full_set(), 0);
        let got: Vec<(u32, Vec<Vertex>)> =
            p.classes.iter().map(|(d, c)| (*d, c.to_vec())).collect();
        assert_eq!(
            got,
            vec![(0, vec![0]), (1, vec![1, 5]), (2, vec![2, 4]), (3, vec![3])]
        );
        assert_eq!(p.sizes(), vec![(0, 1), (1, 2), (2, 2), (3, 1)]);
    }

    #[test]
    fn partition_singleton_and_h_case_one() {
        let g = graph("H");
        let p = probe_partition(&g, &set(&g, &[4]), 4);
        assert_eq!(p.sizes(), vec![(0, 1)]);
        let p = probe_partition(&g, &set(&g, &[1, 3]), 0);
        assert_eq!(p.classes.len(), 2);
        assert_eq!(p.class(1).unwrap().to_vec(), vec![1]);
        // v1..v4 is a shortest path, so v4 sits at distance 3
        assert_eq!(p.class(3).unwrap().to_vec(), vec![3]);
        let p = probe_partition(&g, &expand(&g, &set(&g, &[1, 3])), 0);
        assert!(p.is_decisive());
    }

    #[test]
    fn rounds() {
        let h = graph("H");
        let s = KnowledgeState::from_vertices(&h, [1, 3]).unwrap();
        let out = apply_round(&h, &s, 0, 1).unwrap();
        assert!(out.won);
        assert_eq!(out.state.to_vec(), vec![1]);

        let c6 = graph("C:6");
        let out = apply_round(&c6, &KnowledgeState::initial(&c6), 0, 2).unwrap();
        assert!(!out.won);
        assert_eq!(out.state.to_vec(), vec![2, 4]);

        let one = KnowledgeState::from_vertices(&c6, [3]).unwrap();
        assert!(apply_round(&c6, &one, 3, 0).unwrap().won);
        assert_eq!(
            apply_round(&c6, &one, 3, 3).unwrap_err(),
            GameError::InconsistentAnswer { probe: 3, answer: 3 }
        );
        assert_eq!(
            apply_round(&c6, &one, 3, 40).unwrap_err(),
            GameError::InconsistentAnswer { probe: 3, answer: 40 }
        );
    }

    #[test]
    fn knowledge_state_validation() {
        let g = graph("C:6");
        assert_eq!(
            KnowledgeState::new(&g, VertexSet::empty(6)).unwrap_err(),
            GameError::EmptyState
        );
        assert_eq!(
            KnowledgeState::from_vertices(&g, [9]).unwrap_err(),
            GameError::VertexOutOfRange(9)
        );
    }
}
