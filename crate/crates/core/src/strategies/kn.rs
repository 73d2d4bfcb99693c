use std::sync::Mutex;

use rustc_hash::FxHashMap;
use serde::Serialize;

use super::{expect_graph, CopStrategy, StrategyError};
use crate::bitset::VertexSet;
use crate::game::{expand, probe_partition};
use crate::graph::{Family, Graph, GraphSpec, SubdivisionMap, Vertex, VertexRole};

/// `(canonical state, left)` to (most rounds known to fail, fewest known to
/// succeed).
type Memo = FxHashMap<(Vec<u32>, u32), (u32, u32)>;

/// Memory of the `K_n^(1/m)` strategy.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum KnMemory {
    /// Probing original vertices in index order until the robber is seen to
    /// sit on one.
    Stage1 { pos: u32 },
    /// The robber is on an original vertex outside `order[..=r]`.
    /// `order[0]` is the last vertex probed before this stage.
    Stage2 { order: Vec<Vertex>, r: u32 },
    /// The robber left one of `left` candidate original vertices; probing
    /// until the robber is caught or back on fewer candidates.
    Chase { order: Vec<Vertex>, left: u32 },
    /// The robber is on `a` or `b`.
    Stage3 { a: Vertex, b: Vertex },
    /// After the first probe of stage three; closing in.
    Stage3Chase,
}

/// Three-stage cop on `K_n^(1/m)`: first force the robber onto an original
/// vertex, then narrow the candidate original vertices down to two by
/// probing them in turn, then separate the last two.
///
/// While the robber is between original vertices the strategy probes
/// original vertices, midpoints (near-midpoints for odd `m`) and points
/// close to them or to the original vertices. It picks the lowest such probe
/// that forces, in the fewest rounds, a capture or (in stage two) a return to
/// fewer candidate original vertices. The bounded search behind this choice
/// is memoized up to relabelling of the original vertices.
#[derive(Debug, Serialize)]
pub struct KnStrategy {
    n: u32,
    m: u32,
    #[serde(skip)]
    sub: SubdivisionMap,
    #[serde(skip)]
    g: Graph,
    originals: VertexSet,
    /// Probe repertoire while the robber is between original vertices.
    repertoire: Vec<Vertex>,
    #[serde(skip)]
    memo: Mutex<Memo>,
}

impl Clone for KnStrategy {
    fn clone(&self) -> Self {
        KnStrategy {
            n: self.n,
            m: self.m,
            sub: self.sub.clone(),
            g: self.g.clone(),
            originals: self.originals.clone(),
            repertoire: self.repertoire.clone(),
            memo: Mutex::default(),
        }
    }
}

pub fn strategy_kn(g: &Graph, n: u32, m: u32) -> Result<KnStrategy, StrategyError> {
    let ok = 2 * m >= n + 2 || (2 * m >= n && m >= 7);
    if n < 2 || !ok {
        return Err(StrategyError::NotApplicable(format!(
            "need m >= n/2 + 1, or m >= n/2 and m >= 7; got n={n}, m={m}"
        )));
    }
    let built = expect_graph(g, GraphSpec::subdivided(Family::Complete { n }, m))?;
    let sub = built.subdivision.expect("subdivided spec");
    let mut rep = VertexSet::from_vertices(g.vertex_count(), 0..n);
    let (lo, hi) = (m / 2, m.div_ceil(2));
    for t in 0..sub.thread_count() as u32 {
        for off in [lo.saturating_sub(1), lo, hi, hi + 1, 1, 2, m.saturating_sub(2), m - 1] {
            if off > 0 && off < m {
                rep.insert(sub.point(t, off));
            }
        }
    }
    Ok(KnStrategy {
        n,
        m,
        sub,
        g: built.graph,
        originals: VertexSet::from_vertices(g.vertex_count(), 0..n),
        repertoire: rep.to_vec(),
        memo: Mutex::default(),
    })
}

impl KnStrategy {
    /// Longest chase searched, in rounds.
    fn horizon(&self) -> u32 {
        2 * self.m + 4
    }

    fn reached(&self, s: &VertexSet, left: u32) -> bool {
        s.len() <= 1 || (s.is_subset(&self.originals) && (s.len() as u32) < left)
    }

    /// Whether the cop can force `reached(_, left)` from `s` within `rounds`.
    fn forces(&self, s: &VertexSet, left: u32, rounds: u32) -> bool {
        if self.reached(s, left) {
            return true;
        }
        if rounds == 0 {
            return false;
        }
        let key = (self.canonical(s), left);
        if let Some(&(fail, ok)) = self.memo.lock().unwrap().get(&key) {
            if rounds <= fail {
                return false;
            }
            if rounds >= ok {
                return true;
            }
        }
        let r = self.probe_forcing(s, left, rounds).is_some();
        let mut memo = self.memo.lock().unwrap();
        let e = memo.entry(key).or_insert((0, u32::MAX));
        if r {
            e.1 = e.1.min(rounds);
        } else {
            e.0 = e.0.max(rounds);
        }
        r
    }

    fn probe_forcing(&self, s: &VertexSet, left: u32, rounds: u32) -> Option<Vertex> {
        let e = expand(&self.g, s);
        self.repertoire.iter().copied().find(|&v| {
            let mut p = probe_partition(&self.g, &e, v);
            p.classes.sort_by_key(|(_, c)| std::cmp::Reverse(c.len()));
            p.classes.iter().all(|(_, c)| self.forces(c, left, rounds - 1))
        })
    }

    /// Where `v` sits: `(x, z, k)` is `k` steps from original `x` towards
    /// `z`; an original vertex is `(x, x, 0)`.
    fn locate(&self, v: Vertex) -> (u32, u32, u32) {
        match self.sub.role(v) {
            VertexRole::Original(x) => (x, x, 0),
            VertexRole::Inner(tp) => {
                let t = &self.sub.threads[tp.thread as usize];
                (t.endpoint_u, t.endpoint_v, tp.offset)
            }
        }
    }

    /// A key shared by exactly the states that differ by a relabelling of
    /// the original vertices.
    fn canonical(&self, s: &VertexSet) -> Vec<u32> {
        let (n, m) = (self.n as usize, self.m);
        let pts: Vec<(u32, u32, u32)> = s.iter().map(|v| self.locate(v)).collect();
        let mut member = vec![false; n];
        // label[x][z]: offsets, measured from x, of state points on x⋯z
        let mut label = vec![vec![0u64; n]; n];
        let mut involved = vec![false; n];
        for &(x, z, k) in &pts {
            involved[x as usize] = true;
            involved[z as usize] = true;
            if x == z {
                member[x as usize] = true;
            } else {
                label[x as usize][z as usize] |= 1 << k;
                label[z as usize][x as usize] |= 1 << (m - k);
            }
        }
        let inv: Vec<usize> = (0..n).filter(|&x| involved[x]).collect();
        let twins = |x: usize, y: usize| {
            member[x] == member[y]
                && label[x][y] == label[y][x]
                && inv.iter().all(|&z| z == x || z == y || label[x][z] == label[y][z])
        };
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for &x in &inv {
            match classes.iter_mut().find(|c| twins(c[0], x)) {
                Some(c) => c.push(x),
                None => classes.push(vec![x]),
            }
        }
        let signature = |c: &Vec<usize>| {
            let x = c[0];
            let mut row: Vec<(u64, u64)> = inv
                .iter()
                .filter(|&&z| z != x)
                .map(|&z| (label[x][z], label[z][x]))
                .collect();
            row.sort_unstable();
            (member[x], c.len(), row)
        };
        let mut keyed: Vec<_> = classes.into_iter().map(|c| (signature(&c), c)).collect();
        keyed.sort();
        let mut groups: Vec<Vec<Vec<usize>>> = Vec::new();
        for (i, (sig, c)) in keyed.iter().enumerate() {
            if i > 0 && keyed[i - 1].0 == *sig {
                groups.last_mut().unwrap().push(c.clone());
            } else {
                groups.push(vec![c.clone()]);
            }
        }
        let orderings: usize = groups.iter().map(|g| (1..=g.len()).product::<usize>()).product();
        if orderings > 720 {
            let mut raw = vec![u32::MAX];
            raw.extend(s.iter());
            return raw;
        }
        let encode = |pos: &[u32]| {
            let mut code: Vec<u32> = pts
                .iter()
                .map(|&(x, z, k)| {
                    let (p, q) = (pos[x as usize], pos[z as usize]);
                    let (p, q, o) = if p <= q { (p, q, k) } else { (q, p, m - k) };
                    (p * self.n + q) * (m + 1) + o
                })
                .collect();
            code.sort_unstable();
            code
        };
        let mut best: Option<Vec<u32>> = None;
        let mut perms: Vec<Vec<usize>> = groups.iter().map(|g| (0..g.len()).collect()).collect();
        loop {
            let mut pos = vec![0u32; n];
            let mut next = 0;
            for (g, perm) in groups.iter().zip(&perms) {
                for &i in perm {
                    for &x in &g[i] {
                        pos[x] = next;
                        next += 1;
                    }
                }
            }
            let code = encode(&pos);
            if best.as_ref().is_none_or(|b| code < *b) {
                best = Some(code);
            }
            // advance the mixed-radix permutation counter
            let mut advanced = false;
            for perm in perms.iter_mut() {
                if next_permutation(perm) {
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }
        best.unwrap_or_default()
    }

    /// Lowest repertoire probe reaching the goal in the fewest rounds.
    fn chase(&self, s: &VertexSet, left: u32) -> Result<Vertex, StrategyError> {
        (1..=self.horizon())
            .find_map(|d| self.probe_forcing(s, left, d))
            .ok_or_else(|| StrategyError::no_case(s))
    }

    fn stage2_or_3(&self, order: Vec<Vertex>, s: &VertexSet) -> KnMemory {
        let mut left = order.iter().copied().filter(|&v| s.contains(v));
        match (s.len(), left.next(), left.next()) {
            (2, Some(a), Some(b)) => KnMemory::Stage3 { a, b },
            _ => {
                let r = order.iter().position(|&v| s.contains(v)).unwrap_or(1).max(1) as u32 - 1;
                KnMemory::Stage2 { order, r }
            }
        }
    }
}

impl CopStrategy for KnStrategy {
    type Memory = KnMemory;

    fn name(&self) -> &'static str {
        "kn"
    }

    fn start(&self) -> KnMemory {
        KnMemory::Stage1 { pos: 0 }
    }

    fn next_probe(&self, mem: &KnMemory, s: &VertexSet) -> Result<Vertex, StrategyError> {
        match mem {
            KnMemory::Stage1 { pos } => Ok(*pos),
            KnMemory::Stage2 { order, r } => Ok(order[*r as usize + 1]),
            KnMemory::Chase { left, .. } => self.chase(s, *left),
            KnMemory::Stage3Chase => self.chase(s, 0),
            KnMemory::Stage3 { a, b } => Ok(self.sub.point_from(*a, *b, 1).expect("thread exists")),
        }
    }

    fn observe(
        &self,
        mem: &KnMemory,
        before: &VertexSet,
        probe: Vertex,
        _answer: u32,
        after: &VertexSet,
    ) -> Result<KnMemory, StrategyError> {
        let on_originals = after.is_subset(&self.originals);
        Ok(match mem {
            KnMemory::Stage1 { pos } => {
                if on_originals {
                    let mut order = vec![probe];
                    order.extend((0..self.n).filter(|&v| v != probe));
                    self.stage2_or_3(order, after)
                } else {
                    KnMemory::Stage1 {
                        pos: (pos + 1) % self.n,
                    }
                }
            }
            KnMemory::Stage2 { order, .. } if on_originals => self.stage2_or_3(order.clone(), after),
            KnMemory::Stage2 { order, .. } => KnMemory::Chase {
                order: order.clone(),
                left: before.len() as u32,
            },
            KnMemory::Chase { order, left } => {
                if self.reached(after, *left) {
                    self.stage2_or_3(order.clone(), after)
                } else {
                    KnMemory::Chase {
                        order: order.clone(),
                        left: *left,
                    }
                }
            }
            KnMemory::Stage3 { .. } | KnMemory::Stage3Chase => KnMemory::Stage3Chase,
        })
    }
}

/// Steps `p` to the next permutation in lexicographic order; on the last
/// one, resets it to the first and returns false.
fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        p.reverse();
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
