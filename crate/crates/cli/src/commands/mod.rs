pub mod coverage;
pub mod fairness;
pub mod gen;
pub mod intervene;
pub mod learn;
pub mod reveal;

use std::time::Instant;

use disclose::{BipartiteGraph, Exact, Scalar};
use serde::Serialize;

use crate::config::Backend;

/// The backend actually used for `graph`.
pub fn resolve_backend(backend: Backend, graph: &BipartiteGraph) -> Backend {
    match backend {
        Backend::Auto if Exact::fits(graph.max_degree(), graph.num_agents()) => Backend::Exact,
        Backend::Auto => Backend::Float,
        b => b,
    }
}

pub fn backend_name(backend: Backend) -> &'static str {
    match backend {
        Backend::Exact => "exact",
        Backend::Float => "float",
        Backend::Auto => "auto",
    }
}

/// Runs `f`, returning its value and the elapsed milliseconds.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let value = f();
    (value, start.elapsed().as_secs_f64() * 1e3)
}

#[derive(Debug, Serialize)]
pub struct GraphInfo {
    pub id: String,
    pub agents: usize,
    pub targets: usize,
    pub positive_targets: usize,
    pub negative_bound: usize,
    pub groups: usize,
    pub empty_welfare: String,
}

impl GraphInfo {
    pub fn new<W: Scalar>(id: &str, graph: &BipartiteGraph) -> Self {
        GraphInfo {
            id: id.to_owned(),
            agents: graph.num_agents(),
            targets: graph.num_targets(),
            positive_targets: graph.positive_targets().len(),
            negative_bound: graph.negative_bound(),
            groups: graph.groups().map_or(0, |_| graph.num_groups()),
            empty_welfare: disclose::welfare::empty_welfare::<W>(graph).to_string(),
        }
    }
}
