//! Samplers, matchings and rainbow splittings for k-out random graph
//! models.
//!
//! The crate has three layers:
//!
//! * graph containers and deterministic seeding ([`graph`], [`seed`]);
//! * samplers for the random models and the coupling between them
//!   ([`models`]), bipartite matching machinery ([`matching`]) and the
//!   color-multiplicity bounds ([`bounds`]);
//! * the splitting pipeline ([`decomposition`]), property checkers
//!   ([`verify`]) and the Monte Carlo harness behind the CLI
//!   ([`harness`]).

pub mod bounds;
pub mod decomposition;
pub mod error;
pub mod graph;
pub mod guide;
pub mod harness;
pub mod io;
pub mod matching;
pub mod models;
pub mod seed;
pub mod stats;
pub mod verify;

pub use decomposition::{DecompositionResult, OrderingPlan};
pub use error::{Error, Result};
pub use graph::{BipartiteGraph, ColoredGraph, Graph, Orientation};
pub use matching::{GaleRyserOutcome, KMatching, KMatchingFamily, Matching, MatchingFamily};
pub use models::{CouplingOutcome, KOutSample};
pub use seed::Seed;
pub use verify::{Method, Outcome, PropertyVerdict, Witness};
