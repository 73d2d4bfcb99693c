use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::bitset::VertexSet;
use crate::graph::{Graph, Vertex};
use crate::solver::answers;

/// A family of knowledge states the robber can always return to.
///
/// Accepted when from every member, whatever the cop probes during the next
/// `lookahead` rounds, some answer sequence reaches a superset of a member.
/// A superset of a member is at least as good for the robber as the member
/// itself, so an accepted family certifies evasion forever.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvasionFamily {
    pub states: Vec<VertexSet>,
    pub lookahead: u32,
}

impl EvasionFamily {
    pub fn new(mut states: Vec<VertexSet>, lookahead: u32) -> EvasionFamily {
        states.sort();
        states.dedup();
        EvasionFamily { states, lookahead }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvasionCheck {
    pub accepted: bool,
    /// A member with a cop reply that defeats it, when rejected.
    pub failing_state: Option<Vec<Vertex>>,
    pub failing_probe: Option<Vertex>,
    pub reason: Option<String>,
}

impl EvasionCheck {
    fn reject(reason: String, state: Option<&VertexSet>, probe: Option<Vertex>) -> EvasionCheck {
        EvasionCheck {
            accepted: false,
            failing_state: state.map(VertexSet::to_vec),
            failing_probe: probe,
            reason: Some(reason),
        }
    }
}

struct Checker<'a> {
    g: &'a Graph,
    members: FxHashSet<&'a VertexSet>,
    list: &'a [VertexSet],
    memo: FxHashMap<(VertexSet, u32), bool>,
}

impl Checker<'_> {
    /// First probe the robber cannot answer from `s` within `rounds`, if any.
    fn refute(&mut self, s: &VertexSet, rounds: u32) -> Option<Vertex> {
        for v in self.g.vertices() {
            let classes: Vec<VertexSet> = answers(self.g, s, v)
                .into_iter()
                .map(|(_, c)| c)
                .filter(|c| c.len() >= 2)
                .collect();
            let ok = classes.iter().any(|c| self.members.contains(c))
                || classes
                    .iter()
                    .any(|c| self.list.iter().any(|m| m.is_subset(c)))
                || (rounds > 1 && classes.into_iter().any(|c| self.holds(c, rounds - 1)));
            if !ok {
                return Some(v);
            }
        }
        None
    }

    fn holds(&mut self, s: VertexSet, rounds: u32) -> bool {
        if let Some(&r) = self.memo.get(&(s.clone(), rounds)) {
            return r;
        }
        let r = self.refute(&s, rounds).is_none();
        self.memo.insert((s, rounds), r);
        r
    }
}

pub fn verify_evasion_family(g: &Graph, family: &EvasionFamily) -> EvasionCheck {
    if family.states.is_empty() {
        return EvasionCheck::reject("empty family".into(), None, None);
    }
    if family.lookahead == 0 {
        return EvasionCheck::reject("lookahead must be positive".into(), None, None);
    }
    for s in &family.states {
        if s.universe() != g.vertex_count() || s.len() < 2 {
            return EvasionCheck::reject(
                "members must be states of the graph with at least two vertices".into(),
                Some(s),
                None,
            );
        }
    }
    let mut checker = Checker {
        g,
        members: family.states.iter().collect(),
        list: &family.states,
        memo: FxHashMap::default(),
    };
    for s in &family.states {
        if let Some(v) = checker.refute(s, family.lookahead) {
            return EvasionCheck::reject(
                format!("probe {v} defeats this member within {} rounds", family.lookahead),
                Some(s),
                Some(v),
            );
        }
    }
    EvasionCheck {
        accepted: true,
        failing_state: None,
        failing_probe: None,
        reason: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphSpec;

    fn graph(s: &str) -> Graph {
        s.parse::<GraphSpec>().unwrap().build().unwrap().graph
    }

    #[test]
    fn path_families_fail() {
        let g = graph("P:3");
        let fam = EvasionFamily::new(vec![VertexSet::from_vertices(3, [0, 2])], 1);
        assert!(!verify_evasion_family(&g, &fam).accepted);
        let fam = EvasionFamily::new(vec![g.full_set()], 3);
        assert!(!verify_evasion_family(&g, &fam).accepted);
    }

    #[test]
    fn six_cycle_pairs() {
        let g = graph("C:6");
        let pairs: Vec<VertexSet> = (0..6u32)
            .flat_map(|a| (a + 1..6).map(move |b| (a, b)))
            .filter(|&(a, b)| b - a != 1 && b - a != 5)
            .map(|(a, b)| VertexSet::from_vertices(6, [a, b]))
            .collect();
        assert_eq!(pairs.len(), 9);
        assert!(verify_evasion_family(&g, &EvasionFamily::new(pairs, 1)).accepted);
        // adjacent pairs alone are not enough
        let adjacent = vec![VertexSet::from_vertices(6, [0, 1])];
        assert!(!verify_evasion_family(&g, &EvasionFamily::new(adjacent, 1)).accepted);
    }
}
