//! Exact decision of locatability.
//!
//! The solver explores every knowledge state reachable from the full vertex
//! set, then computes the least fixpoint
//!
//! ```text
//! W_0     = singletons
//! W_{k+1} = W_k ∪ { S : some probe sends every answer class into W_k }
//! ```
//!
//! by synchronous sweeps: sweep `k` assigns rank `k` to every unresolved
//! state with a probe whose non-singleton classes all have rank `< k`. The
//! graph is locatable iff the full set receives a rank; that rank is the
//! capture bound. States left unranked form a robber-win certificate.

mod adversary;
mod arena;
mod explore;
mod grid;
mod verify;

pub(crate) use verify::answers;

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bitset::VertexSet;
use crate::graph::{Graph, Vertex};
use crate::par::{map_slice, Parallelism};

pub use adversary::adversarial_answer;
pub use arena::StateArena;
pub use explore::StateGraph;
pub use grid::{locatability_grid, Grid, GridCell, GridFamily, GridRequest};
pub use verify::{
    longest_path, verify_certificate, verify_policy, CertificateCheck, Expansion, FnPolicy,
    PathOutcome, PlayStep, PolicyCheck, PolicyFailure, PolicyLookup,
};

/// Marks a state whose rank is not (yet) known.
pub const UNRANKED: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveBudget {
    pub max_states: usize,
    pub max_seconds: f64,
    /// Cap on fixpoint sweeps; `None` means the number of explored states.
    pub max_rank: Option<u32>,
    /// Approximate cap on the state graph's heap footprint.
    #[serde(default = "default_max_bytes")]
    pub max_bytes: usize,
}

fn default_max_bytes() -> usize {
    3 << 30
}

impl Default for SolveBudget {
    fn default() -> Self {
        SolveBudget {
            max_states: 5_000_000,
            max_seconds: 60.0,
            max_rank: None,
            max_bytes: default_max_bytes(),
        }
    }
}

impl SolveBudget {
    pub fn with_states(mut self, max_states: usize) -> Self {
        self.max_states = max_states;
        self
    }

    pub fn with_seconds(mut self, secs: f64) -> Self {
        self.max_seconds = secs;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    CopWins,
    RobberWins,
    Unknown,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::CopWins => "CopWins",
            Verdict::RobberWins => "RobberWins",
            Verdict::Unknown => "Unknown",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub states_explored: usize,
    pub and_nodes: usize,
    pub edges: usize,
    pub fixpoint_iterations: u32,
    pub wall_seconds: f64,
}

/// Every explored state with its rank and, when ranked, the lowest probe
/// witnessing that rank.
pub struct SolvedStates {
    arena: StateArena,
    rank: Vec<u32>,
    probe: Vec<Vertex>,
}

impl SolvedStates {
    pub fn len(&self) -> usize {
        self.arena.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arena.is_empty()
    }

    pub fn id(&self, s: &VertexSet) -> Option<u32> {
        self.arena.get_set(s)
    }

    pub fn set(&self, id: u32) -> VertexSet {
        self.arena.set(id)
    }

    pub fn rank_by_id(&self, id: u32) -> Option<u32> {
        let r = self.rank[id as usize];
        (r != UNRANKED).then_some(r)
    }

    pub fn probe_by_id(&self, id: u32) -> Option<Vertex> {
        self.rank_by_id(id).map(|_| self.probe[id as usize])
    }

    /// Rank of a state: `Some(0)` for singletons, `None` for explored
    /// non-winning states and for states never explored.
    pub fn rank(&self, s: &VertexSet) -> Option<u32> {
        if s.is_singleton() {
            return Some(0);
        }
        self.id(s).and_then(|id| self.rank_by_id(id))
    }

    /// `Some(true)` for cop-winning, `Some(false)` for explored robber-winning,
    /// `None` for states outside the explored graph.
    pub fn is_winning(&self, s: &VertexSet) -> Option<bool> {
        if s.is_singleton() {
            return Some(true);
        }
        self.id(s).map(|id| self.rank[id as usize] != UNRANKED)
    }
}

/// Solver-extracted cop policy: defined on every ranked explored state.
#[derive(Clone)]
pub struct Policy {
    table: Arc<SolvedStates>,
}

impl Policy {
    pub fn probe(&self, s: &VertexSet) -> Option<Vertex> {
        self.table.id(s).and_then(|id| self.table.probe_by_id(id))
    }

    pub fn rank(&self, s: &VertexSet) -> Option<u32> {
        self.table.rank(s)
    }

    pub fn len(&self) -> usize {
        self.table.rank.iter().filter(|&&r| r != UNRANKED).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(state, probe, rank)` for every ranked state, sorted by state.
    pub fn entries(&self) -> Vec<(VertexSet, Vertex, u32)> {
        let mut out: Vec<_> = (0..self.table.len() as u32)
            .filter_map(|id| {
                self.table
                    .rank_by_id(id)
                    .map(|r| (self.table.set(id), self.table.probe[id as usize], r))
            })
            .collect();
        out.sort_by_key(|e| e.0.to_vec());
        out
    }

    pub fn to_json(&self) -> PolicyJson {
        PolicyJson {
            entries: self
                .entries()
                .into_iter()
                .map(|(s, probe, rank)| PolicyEntry {
                    state: s.to_vec(),
                    probe,
                    rank,
                })
                .collect(),
        }
    }
}

impl PolicyLookup for Policy {
    fn probe_for(&self, s: &VertexSet) -> Option<Vertex> {
        self.probe(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyEntry {
    pub state: Vec<Vertex>,
    pub probe: Vertex,
    pub rank: u32,
}

/// Policy wire format; states are sorted vertex-index arrays.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyJson {
    pub entries: Vec<PolicyEntry>,
}

impl PolicyJson {
    pub fn lookup(&self, universe: usize) -> BTreeMap<VertexSet, Vertex> {
        self.entries
            .iter()
            .map(|e| {
                (
                    VertexSet::from_vertices(universe, e.state.iter().copied()),
                    e.probe,
                )
            })
            .collect()
    }
}

/// Robber-win certificate: a family of knowledge states, sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub states: Vec<Vec<Vertex>>,
}

impl Certificate {
    pub fn from_sets<I: IntoIterator<Item = VertexSet>>(sets: I) -> Certificate {
        let mut states: Vec<Vec<Vertex>> = sets.into_iter().map(|s| s.to_vec()).collect();
        states.sort();
        states.dedup();
        Certificate { states }
    }

    pub fn sets(&self, universe: usize) -> Vec<VertexSet> {
        self.states
            .iter()
            .map(|s| VertexSet::from_vertices(universe, s.iter().copied()))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

pub struct SolveResult {
    pub verdict: Verdict,
    pub capture_bound: Option<u32>,
    pub policy: Option<Policy>,
    pub certificate: Option<Certificate>,
    pub stats: SolveStats,
    /// Why the verdict is `Unknown`.
    pub exhausted: Option<String>,
    /// All explored states and their ranks (absent when exploration did not finish).
    pub states: Option<Arc<SolvedStates>>,
}

impl SolveResult {
    pub fn summary(&self) -> SolveSummary {
        SolveSummary {
            verdict: self.verdict,
            capture_bound: self.capture_bound,
            policy_size: self.policy.as_ref().map(Policy::len),
            certificate_size: self.certificate.as_ref().map(Certificate::len),
            stats: self.stats.clone(),
            exhausted: self.exhausted.clone(),
        }
    }
}

/// JSON view of a result without the policy or certificate bodies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub verdict: Verdict,
    pub capture_bound: Option<u32>,
    pub policy_size: Option<usize>,
    pub certificate_size: Option<usize>,
    pub stats: SolveStats,
    pub exhausted: Option<String>,
}

/// Decides locatability with the default worker configuration.
pub fn solve(g: &Graph, budget: &SolveBudget) -> SolveResult {
    solve_with(g, budget, Parallelism::Auto)
}

pub fn solve_with(g: &Graph, budget: &SolveBudget, par: Parallelism) -> SolveResult {
    par.install(|| solve_inner(g, budget, par))
}

fn solve_inner(g: &Graph, budget: &SolveBudget, par: Parallelism) -> SolveResult {
    let started = Instant::now();
    let root = g.full_set();
    if root.is_singleton() {
        return SolveResult {
            verdict: Verdict::CopWins,
            capture_bound: Some(0),
            policy: Some(Policy {
                table: Arc::new(SolvedStates {
                    arena: StateArena::new(1),
                    rank: Vec::new(),
                    probe: Vec::new(),
                }),
            }),
            certificate: None,
            stats: SolveStats::default(),
            exhausted: None,
            states: None,
        };
    }

    let sg = match explore::explore(g, &root, budget, par, started) {
        Ok(sg) => sg,
        Err((why, n)) => {
            return unknown(
                SolveStats {
                    states_explored: n,
                    wall_seconds: started.elapsed().as_secs_f64(),
                    ..SolveStats::default()
                },
                match why {
                    explore::Exhausted::States(n) => format!("state budget exceeded ({n} states)"),
                    explore::Exhausted::Time(t) => format!("time budget exceeded ({t:.1} s)"),
                    explore::Exhausted::Memory(b) => {
                        format!("memory budget exceeded ({} MiB)", b >> 20)
                    }
                },
            );
        }
    };

    let mut stats = SolveStats {
        states_explored: sg.state_count(),
        and_nodes: sg.node_probe.len(),
        edges: sg.edge_count(),
        ..SolveStats::default()
    };
    let max_rank = budget.max_rank.unwrap_or(sg.state_count() as u32);

    let n_states = sg.state_count();
    let mut rank = vec![UNRANKED; n_states];
    let mut probe = vec![0 as Vertex; n_states];
    let mut unresolved: Vec<u32> = (0..n_states as u32).collect();
    let mut k = 0u32;
    loop {
        if rank[0] != UNRANKED && unresolved.is_empty() {
            break;
        }
        k += 1;
        if k > max_rank {
            stats.fixpoint_iterations = k - 1;
            stats.wall_seconds = started.elapsed().as_secs_f64();
            return unknown(stats, format!("rank cap {max_rank} reached"));
        }
        let rank_ref = &rank;
        let sg_ref = &sg;
        let found: Vec<Option<Vertex>> = map_slice(par, &unresolved, |&s| {
            let mut best: Option<Vertex> = None;
            for node in sg_ref.nodes(s) {
                if sg_ref
                    .node_children(node)
                    .iter()
                    .all(|&c| rank_ref[c as usize] < k)
                {
                    let p = sg_ref.node_probe[node];
                    best = Some(best.map_or(p, |b: Vertex| b.min(p)));
                }
            }
            best
        });
        let mut changed = false;
        let mut keep = Vec::with_capacity(unresolved.len());
        for (&s, f) in unresolved.iter().zip(found) {
            match f {
                Some(p) => {
                    rank[s as usize] = k;
                    probe[s as usize] = p;
                    changed = true;
                }
                None => keep.push(s),
            }
        }
        unresolved = keep;
        if !changed {
            break;
        }
        if started.elapsed().as_secs_f64() > budget.max_seconds {
            stats.fixpoint_iterations = k;
            stats.wall_seconds = started.elapsed().as_secs_f64();
            return unknown(stats, "time budget exceeded during fixpoint".into());
        }
    }
    stats.fixpoint_iterations = k;

    let table = Arc::new(SolvedStates {
        arena: sg.arena,
        rank,
        probe,
    });
    stats.wall_seconds = started.elapsed().as_secs_f64();
    let root_rank = table.rank[0];
    if root_rank != UNRANKED {
        SolveResult {
            verdict: Verdict::CopWins,
            capture_bound: Some(root_rank),
            policy: Some(Policy {
                table: table.clone(),
            }),
            certificate: None,
            stats,
            exhausted: None,
            states: Some(table),
        }
    } else {
        let cert = Certificate::from_sets(
            (0..table.len() as u32)
                .filter(|&id| table.rank[id as usize] == UNRANKED)
                .map(|id| table.set(id)),
        );
        SolveResult {
            verdict: Verdict::RobberWins,
            capture_bound: None,
            policy: None,
            certificate: Some(cert),
            stats,
            exhausted: None,
            states: Some(table),
        }
    }
}

fn unknown(stats: SolveStats, why: String) -> SolveResult {
    SolveResult {
        verdict: Verdict::Unknown,
        capture_bound: None,
        policy: None,
        certificate: None,
        stats,
        exhausted: Some(why),
        states: None,
    }
}
