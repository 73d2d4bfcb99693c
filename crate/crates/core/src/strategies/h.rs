use serde::Serialize;

use super::{expect_graph, CopStrategy, StrategyError};
use crate::bitset::VertexSet;
use crate::graph::{Family, Graph, GraphSpec, Vertex};

/// `v_i` is vertex `i - 1`.
const fn v(i: u32) -> Vertex {
    i - 1
}

/// The reflection of H fixing `v6` and the shared edge's midline:
/// v1↔v11, v2↔v10, v3↔v9, v4↔v8, v5↔v7.
const fn sigma(x: Vertex) -> Vertex {
    10 - x
}

/// Known two-vertex situations and the probe that resolves each.
const CASES: [((u32, u32), u32); 10] = [
    ((2, 4), 1),
    ((3, 4), 9),
    ((3, 8), 7),
    ((3, 9), 10),
    ((4, 5), 6),
    ((5, 7), 8),
    ((6, 8), 6),
    ((4, 7), 7),
    ((4, 8), 9),
    ((1, 11), 2),
];

/// The explicit cop strategy on H. Probes `v6`; after answer 4 probes `v2`;
/// from `{v1, v3}` probes `v6` again. Every other position it reaches is one
/// of ten two-vertex cases. `{v9, v11}` is handled as the mirror image of
/// `{v1, v3}`.
#[derive(Debug, Clone, Serialize)]
pub struct HStrategy {
    _private: (),
}

pub fn strategy_h(g: &Graph) -> Result<HStrategy, StrategyError> {
    expect_graph(g, GraphSpec::new(Family::H))?;
    Ok(HStrategy { _private: () })
}

impl HStrategy {
    fn direct(s: &VertexSet) -> Option<Vertex> {
        if s.len() == 11 {
            return Some(v(6));
        }
        if s.len() != 2 {
            return None;
        }
        let vs = s.to_vec();
        let pair = (vs[0] + 1, vs[1] + 1);
        match pair {
            (2, 10) => return Some(v(2)),
            (1, 3) => return Some(v(6)),
            _ => {}
        }
        CASES
            .iter()
            .find(|(p, _)| *p == pair)
            .map(|&(_, probe)| v(probe))
    }
}

impl CopStrategy for HStrategy {
    type Memory = ();

    fn name(&self) -> &'static str {
        "H"
    }

    fn start(&self) {}

    fn next_probe(&self, _: &(), s: &VertexSet) -> Result<Vertex, StrategyError> {
        if let Some(p) = Self::direct(s) {
            return Ok(p);
        }
        let mirrored = VertexSet::from_vertices(11, s.iter().map(sigma));
        Self::direct(&mirrored)
            .map(sigma)
            .ok_or_else(|| StrategyError::no_case(s))
    }

    fn observe(&self, _: &(), _: &VertexSet, _: Vertex, _: u32, _: &VertexSet) -> Result<(), StrategyError> {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategies::verify_cop_strategy;

    fn h() -> Graph {
        GraphSpec::new(Family::H).build().unwrap().graph
    }

    #[test]
    fn sigma_is_an_automorphism() {
        let g = h();
        for (a, b) in g.edges() {
            assert!(g.is_adjacent(sigma(a), sigma(b)));
        }
    }

    #[test]
    fn case_probes() {
        let g = h();
        let s = strategy_h(&g).unwrap();
        let probe = |vs: &[u32]| {
            s.next_probe(&(), &VertexSet::from_vertices(11, vs.iter().map(|&i| v(i))))
                .unwrap()
        };
        assert_eq!(s.next_probe(&(), &g.full_set()).unwrap(), v(6));
        assert_eq!(probe(&[2, 4]), v(1));
        assert_eq!(probe(&[1, 11]), v(2));
        assert_eq!(probe(&[9, 11]), v(6));
        assert!(s
            .next_probe(&(), &VertexSet::from_vertices(11, [v(1), v(6)]))
            .is_err());
    }

    #[test]
    fn wins_on_h() {
        let g = h();
        let report = verify_cop_strategy(&g, &strategy_h(&g).unwrap(), 16);
        assert!(report.wins(), "{report:?}");
    }

    #[test]
    fn rejects_other_graphs() {
        let c6 = GraphSpec::new(Family::Cycle { n: 6 }).build().unwrap().graph;
        assert!(strategy_h(&c6).is_err());
    }
}
