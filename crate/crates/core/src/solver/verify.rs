//! Independent checks of solver output. Nothing here reads the solver's
//! ranks or state graph; partitions are recomputed from the game engine.

use std::collections::BTreeMap;
use std::hash::Hash;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::bitset::VertexSet;
use crate::game::{expand, probe_partition};
use crate::graph::{Graph, Vertex};
use crate::par::{map_slice, Parallelism};

/// Anything that names a probe for a knowledge state.
pub trait PolicyLookup {
    fn probe_for(&self, s: &VertexSet) -> Option<Vertex>;
}

impl PolicyLookup for BTreeMap<VertexSet, Vertex> {
    fn probe_for(&self, s: &VertexSet) -> Option<Vertex> {
        self.get(s).copied()
    }
}

impl<P: PolicyLookup + ?Sized> PolicyLookup for &P {
    fn probe_for(&self, s: &VertexSet) -> Option<Vertex> {
        (**self).probe_for(s)
    }
}

/// Wraps a closure as a policy.
pub struct FnPolicy<F>(pub F);

impl<F: Fn(&VertexSet) -> Option<Vertex>> PolicyLookup for FnPolicy<F> {
    fn probe_for(&self, s: &VertexSet) -> Option<Vertex> {
        (self.0)(s)
    }
}

/// One move of a verified play: probe, answer, resulting candidates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayStep {
    pub probe: Vertex,
    pub answer: u32,
    pub candidates: Vec<Vertex>,
}

/// A transition out of a search node.
pub struct Expansion<N> {
    pub probe: Vertex,
    pub answer: u32,
    pub state: VertexSet,
    /// `None` once the cop has won.
    pub next: Option<N>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolicyFailure {
    /// The robber can evade forever; the transcript ends where a state repeats.
    Cycle,
    /// Some play lasts longer than the cap.
    BoundExceeded { cap: u32 },
    /// The player had no valid move; the transcript leads to the offending state.
    Undefined { message: String },
}

pub enum PathOutcome {
    Finite { depth: u32, worst: Vec<PlayStep> },
    Failed { failure: PolicyFailure, path: Vec<PlayStep> },
}

struct Frame<N> {
    node: N,
    kids: Vec<Expansion<N>>,
    next: usize,
    best: u32,
    best_kid: Option<usize>,
}

/// Longest play from `root` over a deterministic cop graph with memoization.
///
/// `expand` lists every answer to the node's move. Depth counts probes until
/// every branch has won. A cycle means the robber evades forever; exceeding
/// `cap` probes on the current path aborts early.
pub fn longest_path<N, F>(root: N, mut expand: F, cap: Option<u32>) -> PathOutcome
where
    N: Clone + Eq + Hash,
    F: FnMut(&N) -> Result<Vec<Expansion<N>>, String>,
{
    enum Mark {
        OnStack,
        Done(u32, Option<usize>),
    }
    // Finished nodes keep their expansion so the worst play can be replayed.
    let mut marks: FxHashMap<N, Mark> = FxHashMap::default();
    let mut done_kids: FxHashMap<N, Vec<Expansion<N>>> = FxHashMap::default();

    let path_of = |stack: &[Frame<N>]| -> Vec<PlayStep> {
        stack
            .iter()
            .filter_map(|f| f.next.checked_sub(1).map(|i| &f.kids[i]))
            .map(|e| PlayStep {
                probe: e.probe,
                answer: e.answer,
                candidates: e.state.to_vec(),
            })
            .collect()
    };

    let open = |node: N, expand: &mut F| -> Result<Frame<N>, String> {
        let kids = expand(&node)?;
        Ok(Frame {
            node,
            kids,
            next: 0,
            best: 0,
            best_kid: None,
        })
    };

    let mut stack: Vec<Frame<N>> = Vec::new();
    match open(root.clone(), &mut expand) {
        Ok(f) => stack.push(f),
        Err(message) => {
            return PathOutcome::Failed {
                failure: PolicyFailure::Undefined { message },
                path: Vec::new(),
            }
        }
    }
    marks.insert(root.clone(), Mark::OnStack);

    while let Some(top) = stack.last_mut() {
        if top.next == top.kids.len() {
            let f = stack.pop().unwrap();
            let depth = f.best + 1;
            marks.insert(f.node.clone(), Mark::Done(depth, f.best_kid));
            if let Some(parent) = stack.last_mut() {
                let i = parent.next - 1;
                if depth > parent.best || parent.best_kid.is_none() {
                    parent.best = parent.best.max(depth);
                    parent.best_kid = Some(i);
                }
            }
            done_kids.insert(f.node, f.kids);
            continue;
        }
        let i = top.next;
        top.next += 1;
        let Some(child) = top.kids[i].next.clone() else {
            if top.best_kid.is_none() {
                top.best_kid = Some(i);
            }
            continue;
        };
        match marks.get(&child) {
            Some(Mark::Done(d, _)) => {
                let d = *d;
                if d > top.best || top.best_kid.is_none() {
                    top.best = top.best.max(d);
                    top.best_kid = Some(i);
                }
            }
            Some(Mark::OnStack) => {
                return PathOutcome::Failed {
                    failure: PolicyFailure::Cycle,
                    path: path_of(&stack),
                };
            }
            None => {
                if let Some(c) = cap {
                    if stack.len() as u32 >= c {
                        return PathOutcome::Failed {
                            failure: PolicyFailure::BoundExceeded { cap: c },
                            path: path_of(&stack),
                        };
                    }
                }
                match open(child.clone(), &mut expand) {
                    Ok(f) => {
                        marks.insert(child, Mark::OnStack);
                        stack.push(f);
                    }
                    Err(message) => {
                        return PathOutcome::Failed {
                            failure: PolicyFailure::Undefined { message },
                            path: path_of(&stack),
                        };
                    }
                }
            }
        }
    }

    let Some(Mark::Done(depth, _)) = marks.get(&root) else {
        unreachable!("root is finished once the stack empties")
    };
    let mut worst = Vec::new();
    let mut node = root;
    while let Some(Mark::Done(_, Some(k))) = marks.get(&node) {
        let e = &done_kids[&node][*k];
        worst.push(PlayStep {
            probe: e.probe,
            answer: e.answer,
            candidates: e.state.to_vec(),
        });
        match &e.next {
            Some(n) => node = n.clone(),
            None => break,
        }
    }
    PathOutcome::Finite {
        depth: *depth,
        worst,
    }
}

/// Result of an exhaustive adversarial run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyCheck {
    pub wins: bool,
    /// Exact worst-case number of probes, when the cop always wins.
    pub worst_case: Option<u32>,
    /// The longest play on success; the failing play otherwise.
    pub transcript: Vec<PlayStep>,
    pub failure: Option<PolicyFailure>,
}

impl PolicyCheck {
    pub(crate) fn from_outcome(out: PathOutcome, bound: Option<u32>) -> PolicyCheck {
        match out {
            PathOutcome::Finite { depth, worst } => match bound {
                Some(b) if depth > b => PolicyCheck {
                    wins: false,
                    worst_case: Some(depth),
                    transcript: worst,
                    failure: Some(PolicyFailure::BoundExceeded { cap: b }),
                },
                _ => PolicyCheck {
                    wins: true,
                    worst_case: Some(depth),
                    transcript: worst,
                    failure: None,
                },
            },
            PathOutcome::Failed { failure, path } => PolicyCheck {
                wins: false,
                worst_case: None,
                transcript: path,
                failure: Some(failure),
            },
        }
    }
}

/// Every answer class of probing `probe` from `s`.
pub(crate) fn answers(g: &Graph, s: &VertexSet, probe: Vertex) -> Vec<(u32, VertexSet)> {
    probe_partition(g, &expand(g, s), probe).classes
}

/// Plays `policy` from the full vertex set against every answer sequence.
/// Wins iff every branch reaches a singleton within `bound` probes.
pub fn verify_policy<P: PolicyLookup>(g: &Graph, policy: &P, bound: u32) -> PolicyCheck {
    let root = g.full_set();
    if root.is_singleton() {
        return PolicyCheck {
            wins: true,
            worst_case: Some(0),
            transcript: Vec::new(),
            failure: None,
        };
    }
    let out = longest_path(
        root,
        |s: &VertexSet| {
            let probe = policy
                .probe_for(s)
                .ok_or_else(|| format!("policy undefined at {:?}", s.to_vec()))?;
            if probe as usize >= g.vertex_count() {
                return Err(format!("probe {probe} out of range"));
            }
            Ok(answers(g, s, probe)
                .into_iter()
                .map(|(answer, c)| Expansion {
                    probe,
                    answer,
                    next: (!c.is_singleton()).then(|| c.clone()),
                    state: c,
                })
                .collect())
        },
        Some(bound),
    );
    PolicyCheck::from_outcome(out, Some(bound))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub valid: bool,
    pub reason: Option<String>,
}

impl CertificateCheck {
    fn fail(reason: String) -> CertificateCheck {
        CertificateCheck {
            valid: false,
            reason: Some(reason),
        }
    }
}

/// Checks a robber-win certificate: every member has at least two
/// vertices; the full vertex set is a member or contains one (a larger
/// knowledge state is never better for the cop); and for every member and
/// every probe some answer class with at least two vertices is a member.
pub fn verify_certificate(g: &Graph, family: &[VertexSet], par: Parallelism) -> CertificateCheck {
    if family.is_empty() {
        return CertificateCheck::fail("empty family".into());
    }
    let n = g.vertex_count();
    let mut members: rustc_hash::FxHashSet<&VertexSet> = Default::default();
    for s in family {
        if s.universe() != n {
            return CertificateCheck::fail(format!("state {:?} has the wrong universe", s.to_vec()));
        }
        if s.len() < 2 {
            return CertificateCheck::fail(format!("state {:?} has fewer than two vertices", s.to_vec()));
        }
        members.insert(s);
    }
    let full = g.full_set();
    if !members.contains(&full) && !family.iter().any(|s| s.is_subset(&full)) {
        return CertificateCheck::fail("no member is contained in the full vertex set".into());
    }
    let failures = par.install(|| {
        map_slice(par, family, |s| {
            g.vertices().find(|&v| {
                !answers(g, s, v)
                    .iter()
                    .any(|(_, c)| c.len() >= 2 && members.contains(c))
            })
        })
    });
    for (s, bad) in family.iter().zip(failures) {
        if let Some(v) = bad {
            return CertificateCheck::fail(format!(
                "probe {v} from {:?} leaves no member class",
                s.to_vec()
            ));
        }
    }
    CertificateCheck {
        valid: true,
        reason: None,
    }
}
