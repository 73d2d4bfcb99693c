use std::collections::VecDeque;
use std::fmt::Debug;
use std::hash::Hash;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::{expect_graph, EvasionFamily, StrategyError};
use crate::bitset::VertexSet;
use crate::game::{expand, probe_partition, ProbePartition};
use crate::graph::{girth, is_bipartite, shortest_cycle, Family, Graph, GraphSpec, SubdivisionMap, Vertex};
use crate::solver::PlayStep;

/// A deterministic robber: picks an answer from each probe partition.
pub trait RobberAnswerPolicy {
    type Memory: Clone + Eq + Hash + Debug;

    fn name(&self) -> &'static str;

    fn start(&self) -> Self::Memory;

    /// `state` is the knowledge state before the round; the returned
    /// distance must be a key of `partition`.
    fn choose(
        &self,
        mem: &Self::Memory,
        state: &VertexSet,
        partition: &ProbePartition,
    ) -> (u32, Self::Memory);

    /// The family this policy is packaged with. By default it is every
    /// state the policy can be driven to, with lookahead 1.
    fn family(&self, g: &Graph) -> EvasionFamily
    where
        Self: Sized,
    {
        EvasionFamily::new(verify_robber_policy(g, self).states, 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RobberPolicyCheck {
    pub survives: bool,
    /// Distinct (memory, state) positions explored.
    pub positions: usize,
    /// Distinct knowledge states the policy was driven to (the initial
    /// full set included).
    #[serde(skip)]
    pub states: Vec<VertexSet>,
    /// The play that located the robber, when it fails.
    pub transcript: Vec<PlayStep>,
    pub failure: Option<String>,
}

/// Explores every cop probe sequence against `policy`. Fails as soon as the
/// policy lets a probe locate the robber or names an absent distance.
pub fn verify_robber_policy<P: RobberAnswerPolicy>(g: &Graph, policy: &P) -> RobberPolicyCheck {
    type Node<M> = (M, VertexSet);
    let root: Node<P::Memory> = (policy.start(), g.full_set());
    let mut index: FxHashMap<Node<P::Memory>, usize> = FxHashMap::default();
    let mut nodes: Vec<Node<P::Memory>> = vec![root.clone()];
    let mut parent: Vec<Option<(usize, PlayStep)>> = vec![None];
    index.insert(root, 0);
    let mut queue = VecDeque::from([0usize]);

    let transcript = |parent: &[Option<(usize, PlayStep)>], mut at: usize, last: PlayStep| {
        let mut steps = vec![last];
        while let Some((p, step)) = &parent[at] {
            steps.push(step.clone());
            at = *p;
        }
        steps.reverse();
        steps
    };

    while let Some(i) = queue.pop_front() {
        let (mem, state) = nodes[i].clone();
        let expanded = expand(g, &state);
        for v in g.vertices() {
            let part = probe_partition(g, &expanded, v);
            let (d, next) = policy.choose(&mem, &state, &part);
            let Some(class) = part.class(d) else {
                return RobberPolicyCheck {
                    survives: false,
                    positions: nodes.len(),
                    states: Vec::new(),
                    transcript: transcript(&parent, i, PlayStep { probe: v, answer: d, candidates: Vec::new() }),
                    failure: Some(format!("answer {d} to probe {v} is not available")),
                };
            };
            let step = PlayStep {
                probe: v,
                answer: d,
                candidates: class.to_vec(),
            };
            if class.len() < 2 {
                return RobberPolicyCheck {
                    survives: false,
                    positions: nodes.len(),
                    states: Vec::new(),
                    transcript: transcript(&parent, i, step),
                    failure: Some(format!("probe {v} locates the robber")),
                };
            }
            let node = (next, class.clone());
            if !index.contains_key(&node) {
                index.insert(node.clone(), nodes.len());
                nodes.push(node);
                parent.push(Some((i, step)));
                queue.push_back(nodes.len() - 1);
            }
        }
    }
    let mut states: Vec<VertexSet> = nodes.into_iter().map(|(_, s)| s).collect();
    states.sort();
    states.dedup();
    RobberPolicyCheck {
        survives: true,
        positions: index.len(),
        states,
        transcript: Vec::new(),
        failure: None,
    }
}

/// Class holding the most vertices of one group, at least two; ties go to
/// the smaller distance. Returns the distance and the two lowest such
/// vertices.
fn best_pair(part: &ProbePartition, groups: &[VertexSet]) -> Option<(u32, Vertex, Vertex)> {
    let mut best: Option<(usize, u32, Vertex, Vertex)> = None;
    for (d, c) in &part.classes {
        for grp in groups {
            let inter = c.intersection(grp);
            let k = inter.len();
            if k >= 2 && best.is_none_or(|(bk, ..)| k > bk) {
                let mut it = inter.iter();
                let (x, y) = (it.next().unwrap(), it.next().unwrap());
                best = Some((k, *d, x, y));
            }
        }
    }
    best.map(|(_, d, x, y)| (d, x, y))
}

/// The largest class; ties go to the smaller distance.
fn largest(part: &ProbePartition) -> u32 {
    let mut best = &part.classes[0];
    for c in &part.classes {
        if c.1.len() > best.1.len() {
            best = c;
        }
    }
    best.0
}

/// Groups `items` by `key`, returning the largest group and its key; ties
/// go to the smaller key.
fn largest_group(items: &[Vertex], key: impl Fn(Vertex) -> u32) -> (u32, Vec<Vertex>) {
    let mut groups: std::collections::BTreeMap<u32, Vec<Vertex>> = Default::default();
    for &v in items {
        groups.entry(key(v)).or_default().push(v);
    }
    let mut best: Option<(u32, Vec<Vertex>)> = None;
    for (k, vs) in groups {
        if best.as_ref().is_none_or(|(_, b)| vs.len() > b.len()) {
            best = Some((k, vs));
        }
    }
    best.unwrap_or((0, Vec::new()))
}

/// Robber on a bipartite graph of girth 6, staying on a fixed 6-cycle `C`:
/// always answers a distance shared by two non-adjacent vertices of `C`.
#[derive(Debug, Clone)]
pub struct Girth6Policy {
    cycle: Vec<Vertex>,
    pairs: Vec<VertexSet>,
}

pub fn robber_policy_girth6(g: &Graph, cycle: Option<&[Vertex]>) -> Result<Girth6Policy, StrategyError> {
    if !is_bipartite(g).is_bipartite() {
        return Err(StrategyError::NotApplicable("graph is not bipartite".into()));
    }
    if girth(g) != Some(6) {
        return Err(StrategyError::NotApplicable("graph does not have girth 6".into()));
    }
    let cycle: Vec<Vertex> = match cycle {
        Some(c) => c.to_vec(),
        None => shortest_cycle(g).expect("girth 6 graph has a cycle"),
    };
    let n = g.vertex_count();
    let distinct = VertexSet::from_vertices(n, cycle.iter().copied().filter(|&v| (v as usize) < n));
    if cycle.len() != 6
        || distinct.len() != 6
        || (0..6).any(|i| !g.is_adjacent(cycle[i], cycle[(i + 1) % 6]))
    {
        return Err(StrategyError::NotApplicable(format!("{cycle:?} is not a 6-cycle")));
    }
    let pairs = (0..6)
        .flat_map(|i| (i + 2..6).map(move |j| (i, j)))
        .filter(|&(i, j)| j - i != 5)
        .map(|(i, j)| VertexSet::from_vertices(n, [cycle[i], cycle[j]]))
        .collect();
    Ok(Girth6Policy { cycle, pairs })
}

impl Girth6Policy {
    pub fn cycle(&self) -> &[Vertex] {
        &self.cycle
    }
}

impl RobberAnswerPolicy for Girth6Policy {
    type Memory = ();

    fn name(&self) -> &'static str {
        "girth6"
    }

    fn start(&self) {}

    fn choose(&self, _: &(), _: &VertexSet, part: &ProbePartition) -> (u32, ()) {
        let d = part
            .classes
            .iter()
            .find(|(_, c)| self.pairs.iter().any(|p| p.is_subset(c)))
            .map_or_else(|| largest(part), |(d, _)| *d);
        (d, ())
    }

    /// The non-adjacent pairs of `C`, lookahead 1.
    fn family(&self, _: &Graph) -> EvasionFamily {
        EvasionFamily::new(self.pairs.clone(), 1)
    }
}

/// Memory shared by the pair-keeping robbers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum PairMemory {
    Start,
    /// Known to be at one of two original vertices.
    Pair(Vertex, Vertex),
    /// Left `from` `step` rounds ago along one of the `live` threads.
    Transit {
        from: Vertex,
        step: u32,
        live: Vec<Vertex>,
    },
    /// One round of free movement before settling on a new pair.
    Spread,
}

/// Robber on `K_n^(1/m)` with `m < n/2`. From a pair of original vertices
/// it answers equidistant probes by staying put; otherwise it leaves the
/// nearer one and walks down the threads the cop has not ruled out, then
/// settles on two original vertices the next probe cannot separate.
#[derive(Debug, Clone)]
pub struct KnSmallMPolicy {
    m: u32,
    originals: VertexSet,
    sub: SubdivisionMap,
    dist: Graph,
}

pub fn robber_policy_kn_small_m(g: &Graph, n: u32, m: u32) -> Result<KnSmallMPolicy, StrategyError> {
    if m == 0 || 2 * m >= n {
        return Err(StrategyError::NotApplicable(format!("need 1 <= m < n/2; got n={n}, m={m}")));
    }
    let built = expect_graph(g, GraphSpec::subdivided(Family::Complete { n }, m))?;
    Ok(KnSmallMPolicy {
        m,
        originals: VertexSet::from_vertices(g.vertex_count(), 0..n),
        sub: built.subdivision.expect("subdivided spec"),
        dist: built.graph,
    })
}

impl KnSmallMPolicy {
    /// All pairs of original vertices, with lookahead `m`.
    pub fn pair_family(&self) -> EvasionFamily {
        let o = self.originals.to_vec();
        let n = self.originals.universe();
        let pairs = o
            .iter()
            .enumerate()
            .flat_map(|(i, &a)| o[i + 1..].iter().map(move |&b| VertexSet::from_vertices(n, [a, b])))
            .collect();
        EvasionFamily::new(pairs, self.m)
    }

    fn settle(&self, part: &ProbePartition, d: u32, then: PairMemory) -> (u32, PairMemory) {
        let c = part.class(d).expect("chosen class exists").intersection(&self.originals);
        if c.len() >= 2 {
            let mut it = c.iter();
            (d, PairMemory::Pair(it.next().unwrap(), it.next().unwrap()))
        } else {
            (d, then)
        }
    }
}

impl RobberAnswerPolicy for KnSmallMPolicy {
    type Memory = PairMemory;

    fn name(&self) -> &'static str {
        "kn-small-m"
    }

    fn start(&self) -> PairMemory {
        PairMemory::Start
    }

    fn choose(&self, mem: &PairMemory, _: &VertexSet, part: &ProbePartition) -> (u32, PairMemory) {
        let p = part.probe;
        let g = &self.dist;
        let fallback = || (largest(part), PairMemory::Start);
        let pair = || best_pair(part, std::slice::from_ref(&self.originals));
        match mem {
            PairMemory::Start | PairMemory::Spread => match pair() {
                Some((d, x, y)) => (d, PairMemory::Pair(x, y)),
                None => fallback(),
            },
            &PairMemory::Pair(a, b) => {
                let (da, db) = (g.distance(p, a), g.distance(p, b));
                if da == db {
                    return (da, PairMemory::Pair(a, b));
                }
                let from = if da < db { a } else { b };
                let d = g.distance(p, from) + 1;
                if part.class(d).is_none() {
                    return fallback();
                }
                let live: Vec<Vertex> = self
                    .originals
                    .iter()
                    .filter(|&v| v != from)
                    .filter(|&v| {
                        self.sub
                            .point_from(from, v, 1)
                            .is_some_and(|w| g.distance(p, w) == d)
                    })
                    .collect();
                self.settle(part, d, PairMemory::Transit { from, step: 1, live })
            }
            PairMemory::Transit { from, step, live } => {
                if step + 1 >= self.m {
                    return match pair() {
                        Some((d, x, y)) => (d, PairMemory::Pair(x, y)),
                        None => fallback(),
                    };
                }
                let (d, group) = largest_group(live, |v| {
                    g.distance(p, self.sub.point_from(*from, v, step + 1).unwrap())
                });
                if group.is_empty() || part.class(d).is_none() {
                    return fallback();
                }
                self.settle(
                    part,
                    d,
                    PairMemory::Transit {
                        from: *from,
                        step: step + 1,
                        live: group,
                    },
                )
            }
        }
    }
}

/// Robber on `K_{a,b}^(1/m)`, `a, b >= 3`, `m <= min{a,b} - 2`. Sits on an
/// original vertex `u` every `m` rounds, alternating parts; in between it
/// walks the threads from `u` that the probes have not separated.
#[derive(Debug, Clone)]
pub struct KabRobberPolicy {
    m: u32,
    part_a: VertexSet,
    part_b: VertexSet,
    sub: SubdivisionMap,
    dist: Graph,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum AnchorMemory {
    Start,
    /// At `u` `step` rounds ago, heading to one of `live`.
    Anchor { u: Vertex, step: u32, live: Vec<Vertex> },
}

pub fn robber_policy_kab(g: &Graph, a: u32, b: u32, m: u32) -> Result<KabRobberPolicy, StrategyError> {
    if a < 3 || b < 3 || m == 0 || m + 2 > a.min(b) {
        return Err(StrategyError::NotApplicable(format!(
            "need a, b >= 3 and 1 <= m <= min(a,b) - 2; got a={a}, b={b}, m={m}"
        )));
    }
    let built = expect_graph(g, GraphSpec::subdivided(Family::CompleteBipartite { a, b }, m))?;
    let n = g.vertex_count();
    Ok(KabRobberPolicy {
        m,
        part_a: VertexSet::from_vertices(n, 0..a),
        part_b: VertexSet::from_vertices(n, a..a + b),
        sub: built.subdivision.expect("subdivided spec"),
        dist: built.graph,
    })
}

impl KabRobberPolicy {
    fn opposite(&self, u: Vertex) -> Vec<Vertex> {
        if self.part_a.contains(u) {
            self.part_b.to_vec()
        } else {
            self.part_a.to_vec()
        }
    }

    /// Pairs of original vertices in the same part, lookahead `m`.
    pub fn pair_family(&self) -> EvasionFamily {
        EvasionFamily::new(same_part_pairs(&self.part_a, &self.part_b), self.m)
    }
}

fn same_part_pairs(part_a: &VertexSet, part_b: &VertexSet) -> Vec<VertexSet> {
    let n = part_a.universe();
    [part_a, part_b]
        .into_iter()
        .flat_map(|p| {
            let vs = p.to_vec();
            let mut out = Vec::new();
            for i in 0..vs.len() {
                for j in i + 1..vs.len() {
                    out.push(VertexSet::from_vertices(n, [vs[i], vs[j]]));
                }
            }
            out
        })
        .collect()
}

impl RobberAnswerPolicy for KabRobberPolicy {
    type Memory = AnchorMemory;

    fn name(&self) -> &'static str {
        "kab-small-m"
    }

    fn start(&self) -> AnchorMemory {
        AnchorMemory::Start
    }

    fn choose(&self, mem: &AnchorMemory, _: &VertexSet, part: &ProbePartition) -> (u32, AnchorMemory) {
        let p = part.probe;
        match mem {
            AnchorMemory::Start => {
                let groups = [self.part_a.clone(), self.part_b.clone()];
                match best_pair(part, &groups) {
                    Some((d, u, _)) => (
                        d,
                        AnchorMemory::Anchor {
                            u,
                            step: 0,
                            live: self.opposite(u),
                        },
                    ),
                    None => (largest(part), AnchorMemory::Start),
                }
            }
            AnchorMemory::Anchor { u, step, live } => {
                let (d, group) = largest_group(live, |v| {
                    self.dist
                        .distance(p, self.sub.point_from(*u, v, step + 1).unwrap())
                });
                if group.is_empty() || part.class(d).is_none() {
                    return (largest(part), AnchorMemory::Start);
                }
                if step + 1 == self.m {
                    let u = group[0];
                    (
                        d,
                        AnchorMemory::Anchor {
                            u,
                            step: 0,
                            live: self.opposite(u),
                        },
                    )
                } else {
                    (
                        d,
                        AnchorMemory::Anchor {
                            u: *u,
                            step: step + 1,
                            live: group,
                        },
                    )
                }
            }
        }
    }
}

/// Robber on `K_{a,b}^(1/2)` with `min{a,b} = 3`. Keeps two candidate
/// original vertices in one part; when a probe separates them it spends one
/// round on the thread midpoints and then settles on two vertices of one
/// part that the next probe cannot separate.
#[derive(Debug, Clone)]
pub struct Ka3HalfPolicy {
    part_a: VertexSet,
    part_b: VertexSet,
    dist: Graph,
}

pub fn robber_policy_ka3_half(g: &Graph, a: u32, b: u32) -> Result<Ka3HalfPolicy, StrategyError> {
    if a.min(b) != 3 {
        return Err(StrategyError::NotApplicable(format!(
            "need min(a,b) = 3; got a={a}, b={b}"
        )));
    }
    let built = expect_graph(g, GraphSpec::subdivided(Family::CompleteBipartite { a, b }, 2))?;
    let n = g.vertex_count();
    Ok(Ka3HalfPolicy {
        part_a: VertexSet::from_vertices(n, 0..a),
        part_b: VertexSet::from_vertices(n, a..a + b),
        dist: built.graph,
    })
}

impl RobberAnswerPolicy for Ka3HalfPolicy {
    type Memory = PairMemory;

    fn name(&self) -> &'static str {
        "ka3-half"
    }

    fn start(&self) -> PairMemory {
        PairMemory::Start
    }

    fn choose(&self, mem: &PairMemory, _: &VertexSet, part: &ProbePartition) -> (u32, PairMemory) {
        let groups = [self.part_a.clone(), self.part_b.clone()];
        match mem {
            &PairMemory::Pair(u, v) => {
                let (du, dv) = (self.dist.distance(part.probe, u), self.dist.distance(part.probe, v));
                if du == dv {
                    (du, PairMemory::Pair(u, v))
                } else {
                    let d = du.min(dv) + 1;
                    if part.class(d).is_some() {
                        (d, PairMemory::Spread)
                    } else {
                        (largest(part), PairMemory::Start)
                    }
                }
            }
            _ => match best_pair(part, &groups) {
                Some((d, x, y)) => (d, PairMemory::Pair(x, y)),
                None => (largest(part), PairMemory::Start),
            },
        }
    }

    /// Pairs of original vertices in the same part, lookahead 2.
    fn family(&self, _: &Graph) -> EvasionFamily {
        EvasionFamily::new(same_part_pairs(&self.part_a, &self.part_b), 2)
    }
}
