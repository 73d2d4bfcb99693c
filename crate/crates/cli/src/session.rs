//! Interactive play sessions, independent of the transport.

use std::sync::Arc;
use std::time::Instant;

use robloc_core::game::{expand, probe_partition, GraphRef, Transcript};
use robloc_core::graph::{Built, GraphJson, SubdivisionMap};
use robloc_core::solver::{adversarial_answer, Policy, SolvedStates};
use robloc_core::{Graph, GraphSpec, SolveResult, Verdict, Vertex, VertexSet};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// The human probes; the engine answers as an omniscient robber.
    HumanCop,
    /// The human moves a robber; the engine probes.
    HumanRobber,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    InProgress,
    CopWon,
    Aborted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlayError {
    /// Vertex index or label does not exist, or the move is not to a neighbour.
    InvalidVertex(String),
    /// The action does not fit the session's mode or the game is over.
    OutOfTurn(String),
}

impl std::fmt::Display for PlayError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PlayError::InvalidVertex(s) | PlayError::OutOfTurn(s) => f.write_str(s),
        }
    }
}

/// A vertex given by index or by label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VertexRef {
    Index(u32),
    Label(String),
}

impl VertexRef {
    pub fn resolve(&self, g: &Graph) -> Result<Vertex, PlayError> {
        match self {
            VertexRef::Index(v) if (*v as usize) < g.vertex_count() => Ok(*v),
            VertexRef::Index(v) => Err(PlayError::InvalidVertex(format!(
                "vertex {v} out of range 0..{}",
                g.vertex_count()
            ))),
            VertexRef::Label(l) => g
                .vertex_by_label(l)
                .or_else(|| l.parse::<u32>().ok().filter(|&v| (v as usize) < g.vertex_count()))
                .ok_or_else(|| PlayError::InvalidVertex(format!("no vertex labelled {l:?}"))),
        }
    }
}

/// What the solver said about the session's graph.
#[derive(Clone)]
pub struct Analysis {
    pub verdict: Verdict,
    pub capture_bound: Option<u32>,
    pub policy: Option<Policy>,
    pub states: Option<Arc<SolvedStates>>,
}

impl From<SolveResult> for Analysis {
    fn from(r: SolveResult) -> Analysis {
        Analysis {
            verdict: r.verdict,
            capture_bound: r.capture_bound,
            policy: r.policy,
            states: r.states,
        }
    }
}

pub struct Session {
    pub id: String,
    pub spec: Option<GraphSpec>,
    pub graph: Graph,
    pub subdivision: Option<SubdivisionMap>,
    pub mode: Mode,
    pub status: Status,
    pub transcript: Transcript,
    pub analysis: Analysis,
    /// The human robber's true vertex, once placed.
    pub robber: Option<Vertex>,
    pub last_used: Instant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundView {
    pub probe: Vertex,
    pub answer: u32,
    pub candidates: Vec<Vertex>,
}

/// Result of one probe, by the human or the engine.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeOutcome {
    pub probe: Vertex,
    pub answer: u32,
    pub candidates: Vec<Vertex>,
    pub won: bool,
    pub round: usize,
    /// Set when the engine cop probed by heuristic rather than a solved policy.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub non_optimal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub id: String,
    pub spec: Option<String>,
    pub mode: Mode,
    pub status: Status,
    pub verdict: Verdict,
    pub capture_bound: Option<u32>,
    pub graph: GraphJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subdivision: Option<serde_json::Value>,
    pub candidates: Vec<Vertex>,
    pub transcript: Vec<RoundView>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub robber: Option<Vertex>,
    /// The engine cop plays a heuristic: the solver gave no policy.
    pub non_optimal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSize {
    pub answer: u32,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbePreview {
    pub probe: Vertex,
    pub classes: Vec<ClassSize>,
    /// The answer the engine robber would give.
    pub adversary_answer: u32,
}

impl Session {
    pub fn new(id: String, built: Built, mode: Mode, analysis: Analysis) -> Session {
        let graph_ref = GraphRef::Spec(built.spec.clone());
        Session {
            id,
            transcript: Transcript::new(graph_ref, &built.graph),
            spec: Some(built.spec),
            graph: built.graph,
            subdivision: built.subdivision,
            mode,
            status: Status::InProgress,
            analysis,
            robber: None,
            last_used: Instant::now(),
        }
    }

    /// A session on a graph without a builder spec, such as an imported one.
    pub fn from_graph(id: String, graph: Graph, mode: Mode, analysis: Analysis) -> Session {
        Session {
            id,
            transcript: Transcript::new(GraphRef::inline(&graph), &graph),
            spec: None,
            graph,
            subdivision: None,
            mode,
            status: Status::InProgress,
            analysis,
            robber: None,
            last_used: Instant::now(),
        }
    }

    pub fn candidates(&self) -> &VertexSet {
        self.transcript.current().set()
    }

    fn record(&mut self, probe: Vertex, answer: u32, non_optimal: bool) -> ProbeOutcome {
        let rec = self
            .transcript
            .push(&self.graph, probe, answer)
            .expect("answer is a key of the probe partition");
        let won = rec.state.is_located();
        let candidates = rec.state.to_vec();
        if won {
            self.status = Status::CopWon;
        }
        ProbeOutcome {
            probe,
            answer,
            candidates,
            won,
            round: self.transcript.len(),
            non_optimal,
        }
    }

    fn require(&self, mode: Mode, action: &str) -> Result<(), PlayError> {
        if self.mode != mode {
            return Err(PlayError::OutOfTurn(format!(
                "{action} is not allowed in {} mode",
                match self.mode {
                    Mode::HumanCop => "human-cop",
                    Mode::HumanRobber => "human-robber",
                }
            )));
        }
        if self.status != Status::InProgress {
            return Err(PlayError::OutOfTurn("the game is over".into()));
        }
        Ok(())
    }

    /// Human cop probes `v`; the engine robber answers adversarially.
    pub fn probe(&mut self, v: &VertexRef) -> Result<ProbeOutcome, PlayError> {
        let probe = v.resolve(&self.graph)?;
        self.require(Mode::HumanCop, "probe")?;
        let part = probe_partition(&self.graph, &expand(&self.graph, self.candidates()), probe);
        let answer = adversarial_answer(&part, self.analysis.states.as_deref());
        Ok(self.record(probe, answer, false))
    }

    /// Human robber moves to `v` (any vertex on the first move, else a
    /// neighbour or the current vertex); the engine cop then probes and the
    /// robber's position answers truthfully.
    pub fn move_robber(&mut self, v: &VertexRef) -> Result<ProbeOutcome, PlayError> {
        let to = v.resolve(&self.graph)?;
        self.require(Mode::HumanRobber, "move")?;
        if let Some(from) = self.robber {
            if from != to && !self.graph.is_adjacent(from, to) {
                return Err(PlayError::InvalidVertex(format!(
                    "vertex {to} is not adjacent to the robber at {from}"
                )));
            }
        }
        self.robber = Some(to);
        let (probe, non_optimal) = self.engine_probe();
        let answer = self.graph.distance(probe, to);
        Ok(self.record(probe, answer, non_optimal))
    }

    /// Solver policy probe when there is one for the current state, else the
    /// heuristic.
    pub fn engine_probe(&self) -> (Vertex, bool) {
        let s = self.candidates();
        match self.analysis.policy.as_ref().and_then(|p| p.probe(s)) {
            Some(v) => (v, false),
            None => (info_gain_probe(&self.graph, s), true),
        }
    }

    /// Class sizes every probe would offer from the current state.
    pub fn preview(&self) -> Vec<ProbePreview> {
        let e = expand(&self.graph, self.candidates());
        self.graph
            .vertices()
            .map(|v| {
                let part = probe_partition(&self.graph, &e, v);
                ProbePreview {
                    probe: v,
                    classes: part
                        .sizes()
                        .into_iter()
                        .map(|(answer, size)| ClassSize { answer, size })
                        .collect(),
                    adversary_answer: adversarial_answer(&part, self.analysis.states.as_deref()),
                }
            })
            .collect()
    }

    pub fn view(&self) -> SessionView {
        SessionView {
            id: self.id.clone(),
            spec: self.spec.as_ref().map(ToString::to_string),
            mode: self.mode,
            status: self.status,
            verdict: self.analysis.verdict,
            capture_bound: self.analysis.capture_bound,
            graph: GraphJson::from_graph(&self.graph),
            subdivision: self
                .subdivision
                .as_ref()
                .and_then(|m| serde_json::to_value(m).ok()),
            candidates: self.candidates().to_vec(),
            transcript: self
                .transcript
                .rounds()
                .iter()
                .map(|r| RoundView {
                    probe: r.probe,
                    answer: r.answer,
                    candidates: r.state.to_vec(),
                })
                .collect(),
            robber: self.robber,
            non_optimal: self.mode == Mode::HumanRobber && self.analysis.policy.is_none(),
        }
    }
}

/// Probe minimising the expected number of remaining candidates (the sum of
/// squared class sizes); ties go to the lowest index.
pub fn info_gain_probe(g: &Graph, s: &VertexSet) -> Vertex {
    let e = expand(g, s);
    g.vertices()
        .min_by_key(|&v| {
            probe_partition(g, &e, v)
                .sizes()
                .iter()
                .map(|&(_, k)| k * k)
                .sum::<usize>()
        })
        .expect("graph has a vertex")
}
