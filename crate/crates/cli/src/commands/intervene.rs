use disclose::intervention::{post_reveal_intervention, pre_reveal_intervention, InterventionResult};
use disclose::reveal::greedy_reveal;
use disclose::{CandidateMode, Exact, MassKind, RevealSet, Scalar};
use serde::Serialize;

use super::{backend_name, resolve_backend, timed, GraphInfo};
use crate::config::{Backend, ExperimentConfig, NamedGraph};
use crate::error::CliResult;
use crate::output::{emit, ResultRow, RESULT_HEADER};
use crate::pool;

#[derive(Debug, Serialize)]
struct Detail {
    run_id: usize,
    algorithm: &'static str,
    #[serde(rename = "K")]
    budget: usize,
    #[serde(rename = "B")]
    interventions: Option<usize>,
    solution: Vec<usize>,
    intervened_agents: Vec<usize>,
    welfare: String,
    gain: String,
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    command: &'static str,
    backend: &'static str,
    graph: GraphInfo,
    config: &'a ExperimentConfig,
    rows: Vec<Detail>,
}

pub fn run(cfg: &ExperimentConfig) -> CliResult<()> {
    let named = cfg.load_graph()?;
    match resolve_backend(cfg.backend()?, &named.graph) {
        Backend::Float => go::<f64>(cfg, &named, Backend::Float),
        _ => go::<Exact>(cfg, &named, Backend::Exact),
    }
}

fn go<W: Scalar>(cfg: &ExperimentConfig, named: &NamedGraph, backend: Backend) -> CliResult<()> {
    let g = &named.graph;
    let budgets = named.budgets(cfg);
    let bs = cfg.interventions.clone().unwrap_or_else(|| vec![1]);
    let points: Vec<(usize, usize)> = budgets.iter().flat_map(|&k| bs.iter().map(move |&b| (k, b))).collect();
    let runs = pool::map(&points, |&(k, b)| {
        let (pre, pre_ms) = timed(|| pre_reveal_intervention::<W>(g, k, b));
        let (post, post_ms) = timed(|| post_reveal_intervention::<W>(g, k, b));
        (pre.map(|r| (r, pre_ms)), post.map(|r| (r, post_ms)))
    });
    let greedy = pool::map(&budgets, |&k| {
        timed(|| greedy_reveal::<W>(g, CandidateMode::Both, k, &RevealSet::new(), MassKind::True))
    });

    let mut rows = Vec::new();
    let mut details = Vec::new();
    let mut push = |name: &'static str, k: usize, b: Option<usize>, r: InterventionResult<W>, ms: f64| {
        let run_id = rows.len();
        rows.push(ResultRow {
            run_id,
            graph: named.id.clone(),
            algorithm: name.into(),
            mode: CandidateMode::Both.as_str().into(),
            budget: Some(k),
            interventions: b,
            welfare: Some(r.total_welfare.to_f64()),
            gain: Some(r.gain.to_f64()),
            runtime_ms: cfg.timing().then_some(ms),
            ..Default::default()
        });
        details.push(Detail {
            run_id,
            algorithm: name,
            budget: k,
            interventions: b,
            solution: r.revealed.order().to_vec(),
            intervened_agents: r.intervened_agents,
            welfare: r.total_welfare.to_string(),
            gain: r.gain.to_string(),
        });
    };
    for (&k, (res, ms)) in budgets.iter().zip(greedy) {
        let res = res?;
        let baseline = InterventionResult {
            revealed: res.solution,
            intervened_agents: Vec::new(),
            total_welfare: res.welfare.clone(),
            baseline_welfare: res.welfare,
            gain: W::zero(),
        };
        push("greedy", k, None, baseline, ms);
    }
    for (&(k, b), (pre, post)) in points.iter().zip(runs) {
        let (pre, pre_ms) = pre?;
        push("pre-reveal", k, Some(b), pre, pre_ms);
        let (post, post_ms) = post?;
        push("post-reveal", k, Some(b), post, post_ms);
    }
    let summary = Summary {
        command: "intervene",
        backend: backend_name(backend),
        graph: GraphInfo::new::<W>(&named.id, g),
        config: cfg,
        rows: details,
    };
    emit(cfg.out.as_deref(), &RESULT_HEADER, &rows, &summary)
}
