use serde::Serialize;

use super::{expect_graph, CopStrategy, StrategyError};
use crate::bitset::VertexSet;
use crate::graph::{Family, Graph, GraphSpec, SubdivisionMap, Vertex};

/// Star `K_{1,b}`: probe the leaves in ascending order, cyclically.
#[derive(Debug, Clone, Serialize)]
pub struct StarStrategy {
    b: u32,
}

pub fn strategy_star(g: &Graph, b: u32) -> Result<StarStrategy, StrategyError> {
    expect_graph(g, GraphSpec::new(Family::CompleteBipartite { a: 1, b }))?;
    Ok(StarStrategy { b })
}

impl CopStrategy for StarStrategy {
    /// Probes made so far, modulo `b`.
    type Memory = u32;

    fn name(&self) -> &'static str {
        "star"
    }

    fn start(&self) -> u32 {
        0
    }

    fn next_probe(&self, count: &u32, _: &VertexSet) -> Result<Vertex, StrategyError> {
        Ok(1 + count % self.b)
    }

    fn observe(&self, count: &u32, _: &VertexSet, _: Vertex, _: u32, _: &VertexSet) -> Result<u32, StrategyError> {
        Ok((count + 1) % self.b)
    }
}

/// `K_{2,b}^(1/2)` with `A = {x, y}`. Driven by the knowledge state alone:
///
/// * robber among some neighbours of `x` (or of `y`): probe the `B` vertex
///   behind the lowest of them;
/// * robber in a subset of `B`: probe its lowest member;
/// * anything else reachable (the full set, or thread midpoints on both
///   sides): probe `x`.
#[derive(Debug, Clone, Serialize)]
pub struct K2bHalfStrategy {
    b: u32,
    #[serde(skip)]
    sub: SubdivisionMap,
    nx: VertexSet,
    ny: VertexSet,
    part_b: VertexSet,
    inner: VertexSet,
}

pub fn strategy_k2b_half(g: &Graph, b: u32) -> Result<K2bHalfStrategy, StrategyError> {
    if b < 2 {
        return Err(StrategyError::NotApplicable(format!("need b >= 2, got {b}")));
    }
    let built = expect_graph(
        g,
        GraphSpec::subdivided(Family::CompleteBipartite { a: 2, b }, 2),
    )?;
    let sub = built.subdivision.expect("subdivided spec");
    let n = g.vertex_count();
    let part_b = VertexSet::from_vertices(n, 2..2 + b);
    let mid = |a: Vertex, bv: Vertex| sub.point_from(a, bv, 1).unwrap();
    let nx = VertexSet::from_vertices(n, part_b.iter().map(|bv| mid(0, bv)));
    let ny = VertexSet::from_vertices(n, part_b.iter().map(|bv| mid(1, bv)));
    let inner = nx.union(&ny);
    Ok(K2bHalfStrategy {
        b,
        sub,
        nx,
        ny,
        part_b,
        inner,
    })
}

impl CopStrategy for K2bHalfStrategy {
    type Memory = ();

    fn name(&self) -> &'static str {
        "k2b-half"
    }

    fn start(&self) {}

    fn next_probe(&self, _: &(), s: &VertexSet) -> Result<Vertex, StrategyError> {
        let behind = |v: Vertex| self.sub.orient(v, 0).or_else(|| self.sub.orient(v, 1));
        if s.is_subset(&self.nx) || s.is_subset(&self.ny) {
            let lowest = s.first().ok_or_else(|| StrategyError::no_case(s))?;
            return Ok(behind(lowest).expect("inner vertex").0);
        }
        if s.is_subset(&self.part_b) {
            return s.first().ok_or_else(|| StrategyError::no_case(s));
        }
        if s.len() == s.universe() || s.is_subset(&self.inner) {
            return Ok(0);
        }
        Err(StrategyError::no_case(s))
    }

    fn observe(&self, _: &(), _: &VertexSet, _: Vertex, _: u32, _: &VertexSet) -> Result<(), StrategyError> {
        Ok(())
    }
}

/// Memory of the `K_{a,b}^(1/m)` strategy. `A` is the smaller part.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum KabMemory {
    /// Probing `A` in turn until the robber is seen in `B` or near some `x ∈ A`.
    AScan { pos: u32 },
    /// The robber is on a thread at `x`; probing `B` in turn.
    BScan { pos: u32 },
    /// The robber is in a known subset `B'` of `B`.
    Subset,
    /// Probing these `B` vertices in turn.
    Targets { targets: Vec<Vertex>, pos: u32 },
    /// The robber is on a thread avoiding `x`; probing `A \ {x}` in turn,
    /// then `targets`.
    AExcept { x: Vertex, targets: Vec<Vertex>, pos: u32 },
}

/// Two-stage strategy for `K_{a,b}^(1/m)`, `m >= 3`, `m >= min{a,b} - 1`.
///
/// Stage one scans `A` until the robber is pinned to `B` or to the threads
/// of one `x ∈ A`, in which case it scans `B`. Stage two shrinks a known
/// subset `B'` by probing next to `y = min B'` on the `x⋯y` thread
/// (`x = min A`) and dispatching on the answer.
#[derive(Debug, Clone, Serialize)]
pub struct KabStrategy {
    m: u32,
    part_a: Vec<Vertex>,
    part_b: Vec<Vertex>,
    b_set: VertexSet,
    #[serde(skip)]
    sub: SubdivisionMap,
}

pub fn strategy_kab(g: &Graph, a: u32, b: u32, m: u32) -> Result<KabStrategy, StrategyError> {
    let lo = a.min(b);
    if lo < 2 || m < 3 || m + 1 < lo {
        return Err(StrategyError::NotApplicable(format!(
            "need min(a,b) >= 2, m >= 3 and m >= min(a,b) - 1; got a={a}, b={b}, m={m}"
        )));
    }
    let built = expect_graph(
        g,
        GraphSpec::subdivided(Family::CompleteBipartite { a, b }, m),
    )?;
    let sub = built.subdivision.expect("subdivided spec");
    let first: Vec<Vertex> = (0..a).collect();
    let second: Vec<Vertex> = (a..a + b).collect();
    let (part_a, part_b) = if a <= b { (first, second) } else { (second, first) };
    let b_set = VertexSet::from_vertices(g.vertex_count(), part_b.iter().copied());
    Ok(KabStrategy {
        m,
        part_a,
        part_b,
        b_set,
        sub,
    })
}

impl KabStrategy {
    fn others(&self, x: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.part_a.iter().copied().filter(move |&u| u != x)
    }
}

impl CopStrategy for KabStrategy {
    type Memory = KabMemory;

    fn name(&self) -> &'static str {
        "kab"
    }

    fn start(&self) -> KabMemory {
        KabMemory::AScan { pos: 0 }
    }

    fn next_probe(&self, mem: &KabMemory, s: &VertexSet) -> Result<Vertex, StrategyError> {
        Ok(match mem {
            KabMemory::AScan { pos } => self.part_a[*pos as usize],
            KabMemory::BScan { pos } => self.part_b[*pos as usize],
            KabMemory::Subset => {
                if !s.is_subset(&self.b_set) {
                    return Err(StrategyError::no_case(s));
                }
                let y = s.first().ok_or_else(|| StrategyError::no_case(s))?;
                self.sub.point_from(y, self.part_a[0], 1).expect("thread exists")
            }
            KabMemory::Targets { targets, pos } => targets[*pos as usize],
            KabMemory::AExcept { x, pos, .. } => self
                .others(*x)
                .nth(*pos as usize)
                .ok_or_else(|| StrategyError::no_case(s))?,
        })
    }

    fn observe(
        &self,
        mem: &KabMemory,
        before: &VertexSet,
        _probe: Vertex,
        answer: u32,
        after: &VertexSet,
    ) -> Result<KabMemory, StrategyError> {
        if after.is_subset(&self.b_set) {
            return Ok(KabMemory::Subset);
        }
        let m = self.m;
        let cycle = |pos: u32, len: usize| (pos + 1) % len as u32;
        Ok(match mem {
            KabMemory::AScan { pos } => {
                if answer < m {
                    KabMemory::BScan { pos: 0 }
                } else {
                    KabMemory::AScan {
                        pos: cycle(*pos, self.part_a.len()),
                    }
                }
            }
            KabMemory::BScan { pos } => KabMemory::BScan {
                pos: cycle(*pos, self.part_b.len()),
            },
            KabMemory::Subset => {
                let y = before.first().ok_or_else(|| StrategyError::no_case(before))?;
                let rest: Vec<Vertex> = before.iter().filter(|&v| v != y).collect();
                if answer == 2 * m - 2 {
                    KabMemory::Targets {
                        targets: rest,
                        pos: 0,
                    }
                } else if answer == 2 || answer == 2 * m {
                    KabMemory::AExcept {
                        x: self.part_a[0],
                        targets: rest,
                        pos: 0,
                    }
                } else {
                    return Err(StrategyError::no_case(after));
                }
            }
            KabMemory::Targets { targets, pos } => KabMemory::Targets {
                targets: targets.clone(),
                pos: cycle(*pos, targets.len()),
            },
            KabMemory::AExcept { x, targets, pos } => {
                if answer < m {
                    KabMemory::Targets {
                        targets: targets.clone(),
                        pos: 0,
                    }
                } else {
                    KabMemory::AExcept {
                        x: *x,
                        targets: targets.clone(),
                        pos: cycle(*pos, self.part_a.len() - 1),
                    }
                }
            }
        })
    }
}
