use disclose::fairness::{group_gain, group_opt, per_group_reveal, prioritized_greedy, GroupAlgorithm};
use disclose::{CandidateMode, Exact, RevealSet, Scalar};
use serde::Serialize;

use super::{backend_name, resolve_backend, timed, GraphInfo};
use crate::config::{Backend, ExperimentConfig, NamedGraph};
use crate::error::{CliError, CliResult};
use crate::output::{emit, ratio, FairnessRow, FAIRNESS_HEADER};
use crate::pool;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Algo {
    PerGroup(GroupAlgorithm),
    Prioritized,
}

impl Algo {
    fn parse(s: &str) -> CliResult<Self> {
        Ok(match s.trim() {
            "per-group-greedy" | "greedy" => Algo::PerGroup(GroupAlgorithm::Greedy),
            "per-group-proxy" | "proxy-greedy" => Algo::PerGroup(GroupAlgorithm::ProxyGreedy),
            "prioritized" => Algo::Prioritized,
            other => return Err(CliError::Config(format!("unknown fairness algorithm `{other}`"))),
        })
    }

    fn name(self) -> &'static str {
        match self {
            Algo::PerGroup(GroupAlgorithm::Greedy) => "per-group-greedy",
            Algo::PerGroup(GroupAlgorithm::ProxyGreedy) => "per-group-proxy",
            Algo::Prioritized => "prioritized",
        }
    }
}

#[derive(Debug, Serialize)]
struct Detail {
    run_id: usize,
    algorithm: &'static str,
    #[serde(rename = "K")]
    budget: usize,
    group: usize,
    solution: Vec<usize>,
    gain: String,
    opt_gain: Option<String>,
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    command: &'static str,
    backend: &'static str,
    graph: GraphInfo,
    config: &'a ExperimentConfig,
    rows: Vec<Detail>,
}

/// Per group: the set it was served by, its gain and its budget.
type Outcome<W> = Vec<(usize, RevealSet, W, usize)>;

pub fn run(cfg: &ExperimentConfig) -> CliResult<()> {
    let named = cfg.load_graph()?;
    if named.graph.groups().is_none() {
        return Err(CliError::Config("fairness needs group labels: add them to the graph or pass --groups".into()));
    }
    match resolve_backend(cfg.backend()?, &named.graph) {
        Backend::Float => go::<f64>(cfg, &named, Backend::Float),
        _ => go::<Exact>(cfg, &named, Backend::Exact),
    }
}

fn go<W: Scalar>(cfg: &ExperimentConfig, named: &NamedGraph, backend: Backend) -> CliResult<()> {
    let g = &named.graph;
    let mode = cfg.mode()?;
    let priority = cfg.priority.unwrap_or(0);
    let algos = match &cfg.algos {
        Some(list) => list.iter().map(|a| Algo::parse(a)).collect::<CliResult<Vec<_>>>()?,
        None => vec![Algo::PerGroup(GroupAlgorithm::Greedy)],
    };
    let budgets = named.budgets(cfg);
    let points: Vec<(usize, Algo)> = budgets.iter().flat_map(|&k| algos.iter().map(move |&a| (k, a))).collect();

    let outcomes = pool::map(&points, |&(k, algo)| -> CliResult<(Outcome<W>, f64)> {
        let (res, ms) = timed(|| -> disclose::Result<Outcome<W>> {
            match algo {
                Algo::PerGroup(which) => Ok(per_group_reveal::<W>(g, k, which, mode)?
                    .groups
                    .into_iter()
                    .map(|o| (o.group, o.solution, o.gain, k.div_ceil(g.num_groups())))
                    .collect()),
                Algo::Prioritized => {
                    let run = prioritized_greedy::<W>(g, k, priority)?;
                    (0..g.num_groups())
                        .map(|a| Ok((a, run.solution.clone(), group_gain::<W>(g, &run.solution, a)?, k)))
                        .collect()
                }
            }
        });
        Ok((res?, ms))
    });

    let want_opt = cfg.opt.unwrap_or(false);
    let mut rows = Vec::new();
    let mut details = Vec::new();
    for (&(k, algo), outcome) in points.iter().zip(outcomes) {
        let (groups, ms) = outcome?;
        let opt_mode = match algo {
            Algo::PerGroup(_) => mode,
            Algo::Prioritized => CandidateMode::Both,
        };
        for (group, solution, gain, group_budget) in groups {
            let opt = if want_opt { Some(group_opt::<W>(g, group, k, opt_mode)?) } else { None };
            let opt_f = opt.as_ref().map(Scalar::to_f64);
            let run_id = rows.len();
            rows.push(FairnessRow {
                run_id,
                graph: named.id.clone(),
                algorithm: algo.name().into(),
                mode: opt_mode.as_str().into(),
                budget: k,
                group,
                group_budget,
                gain: gain.to_f64(),
                opt_gain: opt_f,
                ratio: ratio(gain.to_f64(), opt_f),
                runtime_ms: cfg.timing().then_some(ms),
            });
            details.push(Detail {
                run_id,
                algorithm: algo.name(),
                budget: k,
                group,
                solution: solution.order().to_vec(),
                gain: gain.to_string(),
                opt_gain: opt.map(|o| o.to_string()),
            });
        }
    }
    let summary = Summary {
        command: "fairness",
        backend: backend_name(backend),
        graph: GraphInfo::new::<W>(&named.id, g),
        config: cfg,
        rows: details,
    };
    emit(cfg.out.as_deref(), &FAIRNESS_HEADER, &rows, &summary)
}
