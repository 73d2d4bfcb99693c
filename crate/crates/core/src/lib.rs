//! Exact solving, scripted strategies and adversarial verification for the
//! Robber Locating game.
//!
//! A cop probes one vertex per round and learns the robber's current
//! distance from it; the robber moves to a neighbour (or stays) before each
//! probe. The cop wins once the set of consistent robber positions is a
//! single vertex. A graph is *locatable* when the cop can force that in
//! bounded time against an omniscient robber.
//!
//! * [`graph`]: graphs, named families, subdivisions and metric queries.
//! * [`game`]: knowledge states, probe partitions and transcripts.
//! * [`solver`]: the least-fixpoint decision procedure with policy and
//!   certificate extraction, plus their independent verifiers.
//! * [`strategies`]: hand-written cop strategies and robber answer policies
//!   for the families studied, with exhaustive adversarial checkers.

pub mod bitset;
pub mod game;
pub mod graph;
pub mod par;
pub mod solver;
pub mod strategies;

pub use bitset::VertexSet;
pub use game::{KnowledgeState, ProbePartition, Transcript};
pub use graph::{Graph, GraphSpec, Vertex};
pub use par::Parallelism;
pub use solver::{solve, SolveBudget, SolveResult, Verdict};
