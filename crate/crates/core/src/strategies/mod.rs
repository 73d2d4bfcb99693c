//! Scripted cop strategies and robber answer policies, with exhaustive
//! adversarial checkers.
//!
//! A cop strategy is a deterministic state machine: it sees the current
//! knowledge state and its own memory, names a probe, then folds the answer
//! into its memory. [`verify_cop_strategy`] plays it against every answer
//! sequence, memoizing on (memory, knowledge state).

mod bipartite;
mod evasion;
mod h;
mod kn;
mod robber;

use std::fmt::Debug;
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitset::VertexSet;
use crate::graph::{Built, Family, Graph, GraphSpec, Vertex};
use crate::solver::{longest_path, Expansion, PolicyCheck};

pub use bipartite::{
    strategy_k2b_half, strategy_kab, strategy_star, K2bHalfStrategy, KabMemory, KabStrategy,
    StarStrategy,
};
pub use evasion::{verify_evasion_family, EvasionCheck, EvasionFamily};
pub use h::{strategy_h, HStrategy};
pub use kn::{strategy_kn, KnMemory, KnStrategy};
pub use robber::{
    robber_policy_girth6, robber_policy_ka3_half, robber_policy_kab, robber_policy_kn_small_m,
    verify_robber_policy, Girth6Policy, Ka3HalfPolicy, KabRobberPolicy, KnSmallMPolicy,
    PairMemory, RobberAnswerPolicy, RobberPolicyCheck,
};

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum StrategyError {
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("no case applies at state {state:?}")]
    NoCase { state: Vec<Vertex> },
    #[error("unknown strategy {0:?}")]
    UnknownId(String),
}

impl StrategyError {
    pub(crate) fn no_case(s: &VertexSet) -> StrategyError {
        StrategyError::NoCase { state: s.to_vec() }
    }
}

/// A deterministic cop.
pub trait CopStrategy {
    type Memory: Clone + Eq + Hash + Debug + Serialize;

    fn name(&self) -> &'static str;

    fn start(&self) -> Self::Memory;

    fn next_probe(&self, mem: &Self::Memory, s: &VertexSet) -> Result<Vertex, StrategyError>;

    /// Memory after `probe` at state `before` was answered, leaving `after`.
    fn observe(
        &self,
        mem: &Self::Memory,
        before: &VertexSet,
        probe: Vertex,
        answer: u32,
        after: &VertexSet,
    ) -> Result<Self::Memory, StrategyError>;
}

/// Verification outcome for a named strategy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyReport {
    pub strategy: String,
    #[serde(flatten)]
    pub check: PolicyCheck,
}

impl StrategyReport {
    pub fn wins(&self) -> bool {
        self.check.wins
    }

    pub fn capture_bound(&self) -> Option<u32> {
        self.check.wins.then_some(self.check.worst_case).flatten()
    }
}

/// Plays `s` from the full vertex set against every answer sequence.
/// Wins iff every branch locates the robber within `round_cap` probes; the
/// reported bound is the exact worst case.
pub fn verify_cop_strategy<S: CopStrategy>(g: &Graph, s: &S, round_cap: u32) -> StrategyReport {
    let root = (s.start(), g.full_set());
    let n = g.vertex_count();
    let out = longest_path(
        root,
        |(mem, state): &(S::Memory, VertexSet)| {
            let probe = s.next_probe(mem, state).map_err(|e| e.to_string())?;
            if probe as usize >= n {
                return Err(format!("strategy emitted invalid probe {probe}"));
            }
            let mut kids = Vec::new();
            for (answer, class) in crate::solver::answers(g, state, probe) {
                let next = if class.is_singleton() {
                    None
                } else {
                    let m = s
                        .observe(mem, state, probe, answer, &class)
                        .map_err(|e| e.to_string())?;
                    Some((m, class.clone()))
                };
                kids.push(Expansion {
                    probe,
                    answer,
                    state: class,
                    next,
                });
            }
            Ok(kids)
        },
        Some(round_cap),
    );
    StrategyReport {
        strategy: s.name().to_string(),
        check: PolicyCheck::from_outcome(out, Some(round_cap)),
    }
}

/// Builds `spec` and checks that `g` is that graph, labels included.
pub(crate) fn expect_graph(g: &Graph, spec: GraphSpec) -> Result<Built, StrategyError> {
    let built = spec
        .build()
        .map_err(|e| StrategyError::NotApplicable(e.to_string()))?;
    if !built.graph.same_as(g) {
        return Err(StrategyError::NotApplicable(format!(
            "graph is not {}",
            built.spec
        )));
    }
    Ok(built)
}

/// Strategy ids accepted by [`AnyStrategy::for_spec`].
pub const STRATEGY_IDS: [&str; 5] = ["H", "star", "k2b-half", "kab", "kn"];

/// Any scripted strategy, selected by id.
#[derive(Debug, Clone)]
pub enum AnyStrategy {
    H(HStrategy),
    Star(StarStrategy),
    K2bHalf(K2bHalfStrategy),
    Kab(KabStrategy),
    Kn(KnStrategy),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum AnyMemory {
    None,
    Star(u32),
    Kab(KabMemory),
    Kn(KnMemory),
}

impl AnyStrategy {
    /// Instantiates strategy `id` for the graph named by `spec`, taking the
    /// family parameters from the spec.
    pub fn for_spec(id: &str, spec: &GraphSpec, g: &Graph) -> Result<AnyStrategy, StrategyError> {
        let wrong = || {
            StrategyError::NotApplicable(format!("strategy {id} does not apply to {spec}"))
        };
        let m = spec.m.unwrap_or(1);
        match (id.to_ascii_lowercase().as_str(), &spec.family) {
            ("h", Family::H) if m == 1 => strategy_h(g).map(AnyStrategy::H),
            ("star", &Family::CompleteBipartite { a, b }) if m == 1 && a.min(b) == 1 => {
                strategy_star(g, a.max(b)).map(AnyStrategy::Star)
            }
            ("k2b-half", &Family::CompleteBipartite { a: 2, b }) if m == 2 => {
                strategy_k2b_half(g, b).map(AnyStrategy::K2bHalf)
            }
            ("kab", &Family::CompleteBipartite { a, b }) => {
                strategy_kab(g, a, b, m).map(AnyStrategy::Kab)
            }
            ("kn", &Family::Complete { n }) => strategy_kn(g, n, m).map(AnyStrategy::Kn),
            (other, _) if !STRATEGY_IDS.iter().any(|s| s.eq_ignore_ascii_case(other)) => {
                Err(StrategyError::UnknownId(id.to_string()))
            }
            _ => Err(wrong()),
        }
    }
}

impl CopStrategy for AnyStrategy {
    type Memory = AnyMemory;

    fn name(&self) -> &'static str {
        match self {
            AnyStrategy::H(s) => s.name(),
            AnyStrategy::Star(s) => s.name(),
            AnyStrategy::K2bHalf(s) => s.name(),
            AnyStrategy::Kab(s) => s.name(),
            AnyStrategy::Kn(s) => s.name(),
        }
    }

    fn start(&self) -> AnyMemory {
        match self {
            AnyStrategy::H(_) | AnyStrategy::K2bHalf(_) => AnyMemory::None,
            AnyStrategy::Star(s) => AnyMemory::Star(s.start()),
            AnyStrategy::Kab(s) => AnyMemory::Kab(s.start()),
            AnyStrategy::Kn(s) => AnyMemory::Kn(s.start()),
        }
    }

    fn next_probe(&self, mem: &AnyMemory, s: &VertexSet) -> Result<Vertex, StrategyError> {
        match (self, mem) {
            (AnyStrategy::H(h), AnyMemory::None) => h.next_probe(&(), s),
            (AnyStrategy::K2bHalf(k), AnyMemory::None) => k.next_probe(&(), s),
            (AnyStrategy::Star(st), AnyMemory::Star(m)) => st.next_probe(m, s),
            (AnyStrategy::Kab(k), AnyMemory::Kab(m)) => k.next_probe(m, s),
            (AnyStrategy::Kn(k), AnyMemory::Kn(m)) => k.next_probe(m, s),
            _ => Err(StrategyError::no_case(s)),
        }
    }

    fn observe(
        &self,
        mem: &AnyMemory,
        before: &VertexSet,
        probe: Vertex,
        answer: u32,
        after: &VertexSet,
    ) -> Result<AnyMemory, StrategyError> {
        Ok(match (self, mem) {
            (AnyStrategy::H(_) | AnyStrategy::K2bHalf(_), AnyMemory::None) => AnyMemory::None,
            (AnyStrategy::Star(st), AnyMemory::Star(m)) => {
                AnyMemory::Star(st.observe(m, before, probe, answer, after)?)
            }
            (AnyStrategy::Kab(k), AnyMemory::Kab(m)) => {
                AnyMemory::Kab(k.observe(m, before, probe, answer, after)?)
            }
            (AnyStrategy::Kn(k), AnyMemory::Kn(m)) => {
                AnyMemory::Kn(k.observe(m, before, probe, answer, after)?)
            }
            _ => return Err(StrategyError::no_case(after)),
        })
    }
}
