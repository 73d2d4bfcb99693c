use std::collections::VecDeque;

use proptest::prelude::*;
use robloc_core::game::{apply_round, expand, probe_partition, GraphRef, Transcript};
use robloc_core::graph::{girth, is_bipartite, subdivide, Graph, GraphSpec, Vertex};
use robloc_core::strategies::{
    robber_policy_girth6, robber_policy_ka3_half, robber_policy_kab, robber_policy_kn_small_m,
    RobberAnswerPolicy,
};
use robloc_core::VertexSet;

/// Random connected graph on `1..=max_n` vertices: a random tree plus extra
/// edges.
fn connected_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n)
        .prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec(any::<prop::sample::Index>(), n),
                prop::collection::vec((0..n as u32, 0..n as u32), 0..=2 * n),
            )
        })
        .prop_map(|(n, parents, extra)| {
            let mut edges: Vec<(Vertex, Vertex)> = (1..n)
                .map(|i| (parents[i].index(i) as Vertex, i as Vertex))
                .collect();
            edges.extend(extra.into_iter().filter(|(u, v)| u != v));
            let mut norm: Vec<_> = edges.into_iter().map(|(u, v)| (u.min(v), u.max(v))).collect();
            norm.sort_unstable();
            norm.dedup();
            Graph::unlabeled(n, &norm).expect("connected by construction")
        })
}

fn subset(g: &Graph, mask: u64) -> VertexSet {
    let n = g.vertex_count();
    let s = VertexSet::from_vertices(n, (0..n as Vertex).filter(|&v| mask >> v & 1 == 1));
    if s.is_empty() {
        VertexSet::singleton(n, (mask % n as u64) as Vertex)
    } else {
        s
    }
}

fn bfs(g: &Graph, src: Vertex) -> Vec<u32> {
    let mut d = vec![u32::MAX; g.vertex_count()];
    d[src as usize] = 0;
    let mut q = VecDeque::from([src]);
    while let Some(u) = q.pop_front() {
        for &w in g.neighbors(u) {
            if d[w as usize] == u32::MAX {
                d[w as usize] = d[u as usize] + 1;
                q.push_back(w);
            }
        }
    }
    d
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn partition_is_complete_and_refining(g in connected_graph(12), mask in any::<u64>(), p in any::<prop::sample::Index>()) {
        let s = subset(&g, mask);
        let probe = p.index(g.vertex_count()) as Vertex;
        let e = expand(&g, &s);
        prop_assert!(s.is_subset(&e));
        let part = probe_partition(&g, &e, probe);
        let mut union = VertexSet::empty(g.vertex_count());
        let mut total = 0;
        for (d, c) in &part.classes {
            prop_assert!(!c.is_empty());
            prop_assert!(!union.intersects(c));
            prop_assert!(*d <= g.eccentricity(probe));
            for v in c {
                prop_assert_eq!(g.distance(probe, v), *d);
            }
            union.union_with(c);
            total += c.len();
            let ks = robloc_core::KnowledgeState::new(&g, s.clone()).unwrap();
            let out = apply_round(&g, &ks, probe, *d).unwrap();
            prop_assert_eq!(out.state.set(), c);
            prop_assert!(out.state.set().is_subset(&e));
            prop_assert_eq!(out.won, c.is_singleton());
        }
        prop_assert_eq!(total, e.len());
        prop_assert_eq!(union, e);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn partitions_are_monotone(g in connected_graph(12), t_mask in any::<u64>(), s_mask in any::<u64>(), p in any::<prop::sample::Index>()) {
        let t = subset(&g, t_mask);
        let s = t.intersection(&subset(&g, s_mask));
        prop_assume!(!s.is_empty());
        let probe = p.index(g.vertex_count()) as Vertex;
        let (es, et) = (expand(&g, &s), expand(&g, &t));
        let ps = probe_partition(&g, &es, probe);
        let pt = probe_partition(&g, &et, probe);
        for (d, c) in &ps.classes {
            let big = pt.class(*d).expect("class present in the superset");
            prop_assert_eq!(&big.intersection(&es), c);
        }
    }

    #[test]
    fn transcripts_replay_exactly(g in connected_graph(10), moves in prop::collection::vec((any::<prop::sample::Index>(), any::<prop::sample::Index>()), 0..12)) {
        let mut t = Transcript::new(GraphRef::inline(&g), &g);
        for (p, a) in moves {
            if t.is_won() {
                break;
            }
            let probe = p.index(g.vertex_count()) as Vertex;
            let part = probe_partition(&g, &expand(&g, t.current().set()), probe);
            let answer = part.classes[a.index(part.classes.len())].0;
            t.push(&g, probe, answer).unwrap();
        }
        let (g2, back) = Transcript::from_json(&t.to_json()).unwrap();
        prop_assert!(g2.same_as(&g));
        prop_assert_eq!(back.len(), t.len());
        for (x, y) in back.states().zip(t.states()) {
            prop_assert_eq!(x.words(), y.words());
        }
    }

    #[test]
    fn distances_match_bfs(g in connected_graph(30)) {
        for u in g.vertices() {
            let d = bfs(&g, u);
            for v in g.vertices() {
                prop_assert_eq!(g.distance(u, v), d[v as usize]);
            }
        }
    }

    #[test]
    fn bipartite_graphs_have_even_girth(g in connected_graph(14)) {
        let b = is_bipartite(&g);
        prop_assert!(b.verify(&g));
        if b.is_bipartite() {
            prop_assert!(girth(&g).is_none_or(|k| k % 2 == 0));
        }
        let (g2, _) = subdivide(&g, 2).unwrap();
        prop_assert!(is_bipartite(&g2).is_bipartite());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn subdivision_scales_distances(g in connected_graph(8), m in 1u32..=4) {
        let (h, map) = subdivide(&g, m).unwrap();
        prop_assert_eq!(h.vertex_count(), g.vertex_count() + g.edge_count() * (m as usize - 1));
        for u in g.vertices() {
            for v in g.vertices() {
                prop_assert_eq!(h.distance(u, v), m * g.distance(u, v));
            }
            prop_assert!(map.is_original(u));
        }
    }
}

/// Drives `policy` with `probes` and checks every answer is a legal,
/// non-locating class.
fn policy_answers_validly<P: RobberAnswerPolicy>(g: &Graph, policy: &P, probes: &[prop::sample::Index]) -> Result<(), TestCaseError> {
    let mut mem = policy.start();
    let mut state = g.full_set();
    for p in probes {
        let probe = p.index(g.vertex_count()) as Vertex;
        let part = probe_partition(g, &expand(g, &state), probe);
        let (d, next) = policy.choose(&mem, &state, &part);
        let class = part.class(d);
        prop_assert!(class.is_some(), "distance {} not offered", d);
        let class = class.unwrap();
        prop_assert!(class.len() >= 2);
        state = class.clone();
        mem = next;
    }
    Ok(())
}

fn graph(spec: &str) -> Graph {
    spec.parse::<GraphSpec>().unwrap().build().unwrap().graph
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn robber_policies_answer_validly(probes in prop::collection::vec(any::<prop::sample::Index>(), 1..40)) {
        let c6 = graph("C:6");
        policy_answers_validly(&c6, &robber_policy_girth6(&c6, None).unwrap(), &probes)?;
        let heawood = graph("Heawood");
        policy_answers_validly(&heawood, &robber_policy_girth6(&heawood, None).unwrap(), &probes)?;
        let k5 = graph("K:5^2");
        policy_answers_validly(&k5, &robber_policy_kn_small_m(&k5, 5, 2).unwrap(), &probes)?;
        let k7 = graph("K:7^3");
        policy_answers_validly(&k7, &robber_policy_kn_small_m(&k7, 7, 3).unwrap(), &probes)?;
        let k33 = graph("Kab:3,3");
        policy_answers_validly(&k33, &robber_policy_kab(&k33, 3, 3, 1).unwrap(), &probes)?;
        let k44 = graph("Kab:4,4^2");
        policy_answers_validly(&k44, &robber_policy_kab(&k44, 4, 4, 2).unwrap(), &probes)?;
        let k34 = graph("Kab:3,4^2");
        policy_answers_validly(&k34, &robber_policy_ka3_half(&k34, 3, 4).unwrap(), &probes)?;
    }
}
