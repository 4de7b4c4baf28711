//! Budgeted information disclosure on bipartite agent/target graphs.
//!
//! Agents on the left of a [`BipartiteGraph`] emulate one of their adjacent
//! targets uniformly at random, restricted by which target labels a planner
//! has revealed. The crate evaluates the resulting social welfare (exactly or
//! in floating point), runs the family of budgeted reveal algorithms in
//! [`reveal`], and layers group fairness, targeted interventions, geometric
//! coverage and a train/test learning harness on top.
//!
//! Exact arithmetic uses [`Exact`] (`Ratio<i128>`); every algorithm is generic
//! over [`Scalar`] so the same code runs on `f64` for large graphs.

pub mod coverage;
mod error;
pub mod fairness;
pub mod graph;
pub mod graphgen;
pub mod intervention;
pub mod learning;
mod par;
pub mod reveal;
pub mod welfare;

pub use error::{Error, Result};
pub use par::is_parallel;
pub use graph::{AgentClass, AgentDegrees, BipartiteGraph, Label};
pub use reveal::{CandidateMode, RevealResult};
pub use welfare::{Exact, MassKind, RevealSet, Scalar, WelfareReport, WelfareState};
