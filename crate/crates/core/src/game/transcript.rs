use serde::{Deserialize, Serialize};

use super::{apply_round, GameError, KnowledgeState};
use crate::bitset::VertexSet;
use crate::graph::{Graph, GraphJson, GraphSpec, Vertex};

/// How a transcript names its graph: a builder spec or an inline graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphRef {
    Spec(GraphSpec),
    Inline(GraphJson),
}

impl GraphRef {
    pub fn inline(g: &Graph) -> GraphRef {
        GraphRef::Inline(GraphJson::from_graph(g))
    }

    pub fn build(&self) -> Result<Graph, GameError> {
        match self {
            GraphRef::Spec(s) => s
                .build()
                .map(|b| b.graph)
                .map_err(|e| GameError::Graph(e.to_string())),
            GraphRef::Inline(j) => j
                .clone()
                .into_graph()
                .map_err(|e| GameError::Graph(e.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Round {
    pub probe: Vertex,
    pub answer: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundRecord {
    pub probe: Vertex,
    pub answer: u32,
    pub state: KnowledgeState,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RoundWire {
    probe: Vertex,
    answer: u32,
    /// Informational; recomputed on load.
    #[serde(default, skip_deserializing, skip_serializing_if = "Option::is_none")]
    candidates: Option<Vec<Vertex>>,
}

/// On-disk form. `start` defaults to the full vertex set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TranscriptFile {
    pub graph: GraphRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Vec<Vertex>>,
    rounds: Vec<RoundWire>,
}

impl TranscriptFile {
    pub fn rounds(&self) -> Vec<Round> {
        self.rounds
            .iter()
            .map(|r| Round {
                probe: r.probe,
                answer: r.answer,
            })
            .collect()
    }
}

/// Probes, answers and the knowledge state after each round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub graph: GraphRef,
    start: KnowledgeState,
    rounds: Vec<RoundRecord>,
}

impl Transcript {
    pub fn new(graph_ref: GraphRef, g: &Graph) -> Transcript {
        Transcript {
            graph: graph_ref,
            start: KnowledgeState::initial(g),
            rounds: Vec::new(),
        }
    }

    pub fn starting_at(graph_ref: GraphRef, start: KnowledgeState) -> Transcript {
        Transcript {
            graph: graph_ref,
            start,
            rounds: Vec::new(),
        }
    }

    pub fn start(&self) -> &KnowledgeState {
        &self.start
    }

    pub fn current(&self) -> &KnowledgeState {
        self.rounds.last().map_or(&self.start, |r| &r.state)
    }

    pub fn rounds(&self) -> &[RoundRecord] {
        &self.rounds
    }

    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    pub fn is_won(&self) -> bool {
        self.current().is_located()
    }

    pub fn push(&mut self, g: &Graph, probe: Vertex, answer: u32) -> Result<&RoundRecord, GameError> {
        let out = apply_round(g, self.current(), probe, answer)?;
        self.rounds.push(RoundRecord {
            probe,
            answer,
            state: out.state,
        });
        Ok(self.rounds.last().unwrap())
    }

    pub fn replay(
        graph_ref: GraphRef,
        g: &Graph,
        start: Option<KnowledgeState>,
        rounds: &[Round],
    ) -> Result<Transcript, GameError> {
        let mut t = match start {
            Some(s) => Transcript::starting_at(graph_ref, s),
            None => Transcript::new(graph_ref, g),
        };
        for r in rounds {
            t.push(g, r.probe, r.answer)?;
        }
        Ok(t)
    }

    pub fn to_file(&self) -> TranscriptFile {
        let full = self.start.len() == self.start.set().universe();
        TranscriptFile {
            graph: self.graph.clone(),
            start: (!full).then(|| self.start.to_vec()),
            rounds: self
                .rounds
                .iter()
                .map(|r| RoundWire {
                    probe: r.probe,
                    answer: r.answer,
                    candidates: Some(r.state.to_vec()),
                })
                .collect(),
        }
    }

    /// Rebuilds the graph from the file's reference and recomputes every state.
    pub fn from_file(file: &TranscriptFile) -> Result<(Graph, Transcript), GameError> {
        let g = file.graph.build()?;
        let start = match &file.start {
            None => None,
            Some(vs) => Some(KnowledgeState::from_vertices(&g, vs.iter().copied())?),
        };
        let t = Transcript::replay(file.graph.clone(), &g, start, &file.rounds())?;
        Ok((g, t))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("transcript serializes")
    }

    pub fn from_json(text: &str) -> Result<(Graph, Transcript), GameError> {
        let file: TranscriptFile =
            serde_json::from_str(text).map_err(|e| GameError::Graph(e.to_string()))?;
        Transcript::from_file(&file)
    }

    pub fn states(&self) -> impl Iterator<Item = &VertexSet> {
        self.rounds.iter().map(|r| r.state.set())
    }
}
