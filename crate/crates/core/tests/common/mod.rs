//! Checks shared by the oracle tests and the acceptance run. Each returns the
//! first disagreement as an error.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robloc_core::game::{apply_round, expand, probe_partition};
use robloc_core::graph::{Graph, GraphSpec, Vertex};
use robloc_core::solver::{solve_with, verify_certificate, verify_policy, SolveResult};
use robloc_core::{KnowledgeState, Parallelism, SolveBudget, Verdict, VertexSet};

/// Connected graphs on at most 7 vertices.
pub const SMALL: [&str; 30] = [
    "P:1", "P:2", "P:3", "P:4", "P:5", "P:6", "P:7",
    "C:3", "C:4", "C:5", "C:6", "C:7",
    "K:4", "K:5", "K:6", "K:7",
    "Kab:1,3", "Kab:1,5", "Kab:2,3", "Kab:2,4", "Kab:3,3", "Kab:3,4",
    "E:0-1,1-2,2-0,2-3",
    "E:0-1,0-2,1-2,1-3,2-3",
    "E:0-1,1-2,2-3,3-0,2-4,3-4",
    "E:0-1,1-2,2-0,1-3,2-4",
    "E:0-1,1-2,2-3,3-4,4-5,5-0,0-3",
    "E:0-1,0-2,0-3,1-4,2-5,3-6",
    "E:0-1,1-2,2-3,3-4,4-5,5-6,6-0,0-3",
    "E:0-1,1-2,2-3,3-4,4-5,5-0,1-4,2-6",
];

/// Graphs on at most 12 vertices for the all-pairs checks.
pub const MEDIUM: [&str; 10] = [
    "H", "Hprime", "C:8", "C:12", "Petersen", "K:4^2", "K:3^3", "Kab:2,3^2", "Kab:2,2^2", "P:12",
];

pub const THREADED: [&str; 7] = ["H", "Hprime", "C:6", "K:4^2", "K:5^3", "Kab:3,3^3", "Petersen"];

pub fn graph(spec: &str) -> Graph {
    spec.parse::<GraphSpec>().unwrap().build().unwrap().graph
}

pub fn run(g: &Graph, par: Parallelism) -> SolveResult {
    solve_with(g, &SolveBudget::default(), par)
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

/// The game on raw vertex masks, written without the engine.
struct Naive<'a> {
    g: &'a Graph,
    memo: HashMap<(u64, u32), bool>,
}

impl Naive<'_> {
    fn expand(&self, s: u64) -> u64 {
        let mut out = s;
        for v in 0..self.g.vertex_count() as Vertex {
            if s >> v & 1 == 1 {
                for &w in self.g.neighbors(v) {
                    out |= 1 << w;
                }
            }
        }
        out
    }

    fn classes(&self, s: u64, probe: Vertex) -> Vec<u64> {
        let e = self.expand(s);
        let mut by_dist: HashMap<u32, u64> = HashMap::new();
        for v in 0..self.g.vertex_count() as Vertex {
            if e >> v & 1 == 1 {
                *by_dist.entry(self.g.distance(probe, v)).or_default() |= 1 << v;
            }
        }
        by_dist.into_values().collect()
    }

    fn reachable(&self) -> usize {
        let full = (1u64 << self.g.vertex_count()) - 1;
        let mut seen = HashSet::from([full]);
        let mut q = VecDeque::from([full]);
        while let Some(s) = q.pop_front() {
            for p in 0..self.g.vertex_count() as Vertex {
                for c in self.classes(s, p) {
                    if c.count_ones() > 1 && seen.insert(c) {
                        q.push_back(c);
                    }
                }
            }
        }
        seen.len()
    }

    /// Whether the cop can locate the robber from `s` within `depth` probes.
    fn wins(&mut self, s: u64, depth: u32) -> bool {
        if s.count_ones() <= 1 {
            return true;
        }
        if depth == 0 {
            return false;
        }
        if let Some(&r) = self.memo.get(&(s, depth)) {
            return r;
        }
        let r = (0..self.g.vertex_count() as Vertex)
            .any(|p| self.classes(s, p).into_iter().all(|c| self.wins(c, depth - 1)));
        self.memo.insert((s, depth), r);
        r
    }
}

pub fn naive_agreement() -> Result<(), String> {
    for spec in SMALL {
        let g = graph(spec);
        let mut oracle = Naive { g: &g, memo: HashMap::new() };
        let depth = oracle.reachable() as u32;
        let full = (1u64 << g.vertex_count()) - 1;
        let oracle_bound = (0..=depth).find(|&d| oracle.wins(full, d));
        let r = run(&g, Parallelism::Auto);
        match oracle_bound {
            Some(k) => {
                ensure!(r.verdict == Verdict::CopWins, "{spec}: expected CopWins, got {:?}", r.verdict);
                ensure!(r.capture_bound == Some(k), "{spec}: bound {:?}, naive {k}", r.capture_bound);
            }
            None => ensure!(r.verdict == Verdict::RobberWins, "{spec}: expected RobberWins, got {:?}", r.verdict),
        }
    }
    Ok(())
}

pub fn subset_monotone() -> Result<(), String> {
    for spec in SMALL.iter().chain(&MEDIUM) {
        let g = graph(spec);
        let r = run(&g, Parallelism::Auto);
        if g.vertex_count() == 1 {
            continue;
        }
        let solved = r.states.ok_or_else(|| format!("{spec}: solver did not finish"))?;
        let sets: Vec<(VertexSet, Option<u32>)> = (0..solved.len() as u32)
            .map(|id| (solved.set(id), solved.rank_by_id(id)))
            .collect();
        for (t, rt) in &sets {
            let Some(kt) = rt else { continue };
            for (s, rs) in &sets {
                if s.is_subset(t) {
                    ensure!(rs.is_some_and(|ks| ks <= *kt), "{spec}: {s:?} within {t:?}");
                }
            }
        }
    }
    Ok(())
}

pub fn thread_independent() -> Result<(), String> {
    for spec in THREADED {
        let g = graph(spec);
        let a = run(&g, Parallelism::Sequential);
        let b = run(&g, Parallelism::Threads(4));
        ensure!(a.verdict == b.verdict, "{spec}: verdict");
        ensure!(a.capture_bound == b.capture_bound, "{spec}: bound");
        ensure!(a.certificate == b.certificate, "{spec}: certificate");
        ensure!(
            a.policy.as_ref().map(|p| p.entries()) == b.policy.as_ref().map(|p| p.entries()),
            "{spec}: policy"
        );
        let (sa, sb) = (a.states.unwrap(), b.states.unwrap());
        ensure!(sa.len() == sb.len(), "{spec}: state count");
        for id in 0..sa.len() as u32 {
            ensure!(
                sa.set(id) == sb.set(id)
                    && sa.rank_by_id(id) == sb.rank_by_id(id)
                    && sa.probe_by_id(id) == sb.probe_by_id(id),
                "{spec}: state {id}"
            );
        }
    }
    Ok(())
}

pub fn duality() -> Result<(), String> {
    for spec in SMALL.iter().chain(&MEDIUM) {
        let g = graph(spec);
        let r = run(&g, Parallelism::Auto);
        match r.verdict {
            Verdict::CopWins => {
                let bound = r.capture_bound.unwrap();
                let check = verify_policy(&g, r.policy.as_ref().unwrap(), bound);
                ensure!(check.wins, "{spec}: {check:?}");
                ensure!(check.worst_case == Some(bound), "{spec}: worst case {:?}", check.worst_case);
                let only_full = verify_certificate(&g, &[g.full_set()], Parallelism::Auto);
                ensure!(!only_full.valid, "{spec}: certificate accepted on a cop-win graph");
            }
            Verdict::RobberWins => {
                let fam = r.certificate.unwrap().sets(g.vertex_count());
                ensure!(verify_certificate(&g, &fam, Parallelism::Auto).valid, "{spec}: certificate");
            }
            Verdict::Unknown => return Err(format!("{spec}: budget exhausted")),
        }
    }
    Ok(())
}

/// Random connected graph on `2..=max_n` vertices: a random tree plus extra edges.
fn random_graph(rng: &mut ChaCha8Rng, max_n: usize) -> Graph {
    let n = rng.gen_range(2..=max_n);
    let mut edges: Vec<(Vertex, Vertex)> =
        (1..n as Vertex).map(|i| (rng.gen_range(0..i), i)).collect();
    for _ in 0..rng.gen_range(0..=2 * n) {
        let (u, v) = (rng.gen_range(0..n as Vertex), rng.gen_range(0..n as Vertex));
        if u != v {
            edges.push((u.min(v), u.max(v)));
        }
    }
    edges.sort_unstable();
    edges.dedup();
    Graph::unlabeled(n, &edges).unwrap()
}

/// Completeness and refinement of probe partitions on `cases` seeded random
/// (graph, state, probe) triples.
pub fn partition_triples(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..cases {
        let g = random_graph(&mut rng, 12);
        let n = g.vertex_count();
        let mask: u64 = rng.gen_range(1..1u64 << n);
        let s = VertexSet::from_vertices(n, (0..n as Vertex).filter(|&v| mask >> v & 1 == 1));
        let probe = rng.gen_range(0..n as Vertex);
        let e = expand(&g, &s);
        ensure!(s.is_subset(&e), "case {case}: expansion lost a vertex");
        let part = probe_partition(&g, &e, probe);
        let mut union = VertexSet::empty(n);
        let ks = KnowledgeState::new(&g, s.clone()).unwrap();
        for (d, c) in &part.classes {
            ensure!(!c.is_empty() && !union.intersects(c), "case {case}: classes overlap");
            ensure!(c.iter().all(|v| g.distance(probe, v) == *d), "case {case}: class {d}");
            union.union_with(c);
            let out = apply_round(&g, &ks, probe, *d).map_err(|e| e.to_string())?;
            ensure!(out.state.set() == c, "case {case}: round result");
            ensure!(out.won == c.is_singleton(), "case {case}: win flag");
        }
        ensure!(union == e, "case {case}: classes do not cover N[S]");
    }
    Ok(())
}
