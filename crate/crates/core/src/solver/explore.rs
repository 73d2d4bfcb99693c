//! Forward exploration of the reachable knowledge-state graph.
//!
//! States are explored in id order; ids are handed out in discovery order,
//! so the frontier is always a contiguous id range. Each chunk of the
//! frontier is expanded in parallel against a read-only arena, then new
//! children are interned on one thread in (state, probe, distance) order.
//! The resulting ids do not depend on the number of workers.

use std::time::Instant;

use rustc_hash::FxHashMap;

use super::arena::StateArena;
use super::SolveBudget;
use crate::game::expand_words;
use crate::graph::{Graph, Vertex};
use crate::par::{map_range, Parallelism};
use crate::VertexSet;

const CHUNK: usize = 2048;

/// The explored AND-OR graph. State `s` owns the AND nodes
/// `node_start[s]..node_start[s + 1]`; node `k` was first produced by probe
/// `node_probe[k]` and has the non-singleton children
/// `children[child_start[k]..child_start[k + 1]]`.
///
/// Probes producing identical child lists are stored once under the lowest
/// such probe. A state with a decisive probe (all classes singletons) keeps
/// only the lowest decisive probe, as an AND node without children.
pub struct StateGraph {
    pub arena: StateArena,
    pub node_start: Vec<u64>,
    pub node_probe: Vec<Vertex>,
    pub child_start: Vec<u64>,
    pub children: Vec<u32>,
}

impl StateGraph {
    pub fn state_count(&self) -> usize {
        self.arena.len()
    }

    pub fn nodes(&self, s: u32) -> std::ops::Range<usize> {
        self.node_start[s as usize] as usize..self.node_start[s as usize + 1] as usize
    }

    pub fn node_children(&self, k: usize) -> &[u32] {
        &self.children[self.child_start[k] as usize..self.child_start[k + 1] as usize]
    }

    pub fn edge_count(&self) -> usize {
        self.children.len()
    }

    pub fn heap_bytes(&self) -> usize {
        self.arena.heap_bytes()
            + self.children.capacity() * 4
            + self.node_probe.capacity() * 4
            + (self.node_start.capacity() + self.child_start.capacity()) * 8
    }
}

#[derive(Debug, Clone)]
pub enum Exhausted {
    States(usize),
    Time(f64),
    Memory(usize),
}

#[derive(Clone, Copy)]
enum Child {
    Known(u32),
    New(u32),
}

struct Local {
    decisive: Option<Vertex>,
    nodes: Vec<(Vertex, Vec<Child>)>,
    fresh: Vec<Box<[u64]>>,
}

fn expand_one(g: &Graph, arena: &StateArena, id: u32) -> Local {
    let stride = arena.stride();
    let set = arena.set(id);
    let mut expanded = vec![0u64; stride];
    expand_words(g, &set, &mut expanded);

    let mut local_ids: FxHashMap<Box<[u64]>, Child> = FxHashMap::default();
    let mut fresh: Vec<Box<[u64]>> = Vec::new();
    let mut nodes = Vec::with_capacity(g.vertex_count());
    let mut decisive = None;
    let mut class = vec![0u64; stride];

    for v in g.vertices() {
        let mut kids = Vec::new();
        for sphere in g.spheres(v) {
            let mut count = 0u32;
            for ((c, e), s) in class.iter_mut().zip(&expanded).zip(sphere.words()) {
                *c = e & s;
                count += c.count_ones();
            }
            if count < 2 {
                continue;
            }
            let child = match local_ids.get(class.as_slice()) {
                Some(&c) => c,
                None => {
                    let c = match arena.get(&class) {
                        Some(k) => Child::Known(k),
                        None => {
                            fresh.push(class.clone().into_boxed_slice());
                            Child::New(fresh.len() as u32 - 1)
                        }
                    };
                    local_ids.insert(class.clone().into_boxed_slice(), c);
                    c
                }
            };
            kids.push(child);
        }
        if kids.is_empty() && decisive.is_none() {
            decisive = Some(v);
        }
        nodes.push((v, kids));
    }
    Local {
        decisive,
        nodes,
        fresh,
    }
}

/// Explores every knowledge state reachable from `root`.
pub fn explore(
    g: &Graph,
    root: &VertexSet,
    budget: &SolveBudget,
    par: Parallelism,
    started: Instant,
) -> Result<StateGraph, (Exhausted, usize)> {
    let mut sg = StateGraph {
        arena: StateArena::new(g.vertex_count()),
        node_start: vec![0],
        node_probe: Vec::new(),
        child_start: vec![0],
        children: Vec::new(),
    };
    sg.arena.insert(root.words());

    let mut processed = 0usize;
    let mut ids: Vec<u32> = Vec::new();
    let mut seen_nodes: FxHashMap<Vec<u32>, ()> = FxHashMap::default();
    while processed < sg.arena.len() {
        let hi = sg.arena.len().min(processed + CHUNK);
        let arena = &sg.arena;
        let locals = map_range(par, hi - processed, |i| {
            expand_one(g, arena, (processed + i) as u32)
        });

        for local in locals {
            ids.clear();
            for f in &local.fresh {
                ids.push(sg.arena.insert(f).0);
            }
            let resolve = |c: &Child| match c {
                Child::Known(k) => *k,
                Child::New(k) => ids[*k as usize],
            };
            if let Some(p) = local.decisive {
                sg.node_probe.push(p);
                sg.child_start.push(sg.children.len() as u64);
            } else {
                seen_nodes.clear();
                for (probe, kids) in &local.nodes {
                    let mut list: Vec<u32> = kids.iter().map(resolve).collect();
                    list.sort_unstable();
                    list.dedup();
                    if seen_nodes.contains_key(&list) {
                        continue;
                    }
                    sg.node_probe.push(*probe);
                    sg.children.extend_from_slice(&list);
                    sg.child_start.push(sg.children.len() as u64);
                    seen_nodes.insert(list, ());
                }
            }
            sg.node_start.push(sg.node_probe.len() as u64);
        }
        processed = hi;

        if sg.arena.len() > budget.max_states {
            return Err((Exhausted::States(sg.arena.len()), sg.arena.len()));
        }
        let bytes = sg.heap_bytes();
        if bytes > budget.max_bytes {
            return Err((Exhausted::Memory(bytes), sg.arena.len()));
        }
        let elapsed = started.elapsed().as_secs_f64();
        if elapsed > budget.max_seconds {
            return Err((Exhausted::Time(elapsed), sg.arena.len()));
        }
    }
    Ok(sg)
}
