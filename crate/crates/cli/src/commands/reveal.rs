use std::str::FromStr;

use disclose::reveal::{
    bruteforce_reveal, greedy_reveal, heuristic_reveal, interactive_heuristic_reveal, lookahead_reveal,
    proxy_greedy_reveal, random_reveal, Inner,
};
use disclose::welfare::{empty_welfare, social_welfare};
use disclose::{CandidateMode, Exact, MassKind, RevealResult, RevealSet, Scalar};
use serde::Serialize;

use super::{backend_name, resolve_backend, timed, GraphInfo};
use crate::config::{Backend, ExperimentConfig, NamedGraph};
use crate::error::{CliError, CliResult};
use crate::output::{emit, ratio, ResultRow, RESULT_HEADER};
use crate::pool;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    Greedy,
    ProxyGreedy,
    Bruteforce,
    Lookahead,
    Heuristic,
    HeuristicRandom,
    Interactive,
    Random,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Greedy => "greedy",
            Algo::ProxyGreedy => "proxy-greedy",
            Algo::Bruteforce => "bruteforce",
            Algo::Lookahead => "lookahead",
            Algo::Heuristic => "heuristic",
            Algo::HeuristicRandom => "heuristic-random",
            Algo::Interactive => "interactive",
            Algo::Random => "random",
        }
    }

    fn seeded(self) -> bool {
        matches!(self, Algo::HeuristicRandom | Algo::Random)
    }

    /// Whether the candidate mode setting applies.
    fn uses_mode(self) -> bool {
        matches!(self, Algo::Greedy | Algo::Bruteforce | Algo::Lookahead | Algo::Random)
    }
}

impl FromStr for Algo {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        Ok(match s.trim() {
            "greedy" => Algo::Greedy,
            "proxy-greedy" | "proxy_greedy" | "proxy" => Algo::ProxyGreedy,
            "bruteforce" | "opt" => Algo::Bruteforce,
            "lookahead" => Algo::Lookahead,
            "heuristic" => Algo::Heuristic,
            "heuristic-random" | "heuristic_random" => Algo::HeuristicRandom,
            "interactive" => Algo::Interactive,
            "random" => Algo::Random,
            other => return Err(CliError::Config(format!("unknown algorithm `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy)]
struct Point {
    budget: usize,
    algo: Algo,
    depth: Option<usize>,
}

#[derive(Debug, Serialize)]
struct Step {
    target: usize,
    gain: String,
}

#[derive(Debug, Serialize)]
struct Detail {
    run_id: usize,
    algorithm: &'static str,
    #[serde(rename = "K")]
    budget: Option<usize>,
    d: Option<usize>,
    solution: Vec<usize>,
    welfare: String,
    gain: String,
    proxy_welfare: String,
    opt_welfare: Option<String>,
    trace: Vec<Step>,
    /// `F(∅) + (1 − 1/e)/c · (OPT − F(∅))`, for proxy greedy when `c` is set.
    #[serde(skip_serializing_if = "Option::is_none")]
    proxy_guarantee: Option<f64>,
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    command: &'a str,
    backend: &'static str,
    graph: GraphInfo,
    config: &'a ExperimentConfig,
    rows: Vec<Detail>,
}

/// Runs the algorithm grid on one graph. `implicit_opt` computes the optimum
/// whenever the search guard allows it.
pub fn run(cfg: &ExperimentConfig, command: &str, default_algos: &[&str], implicit_opt: bool) -> CliResult<()> {
    let named = cfg.load_graph()?;
    if let Some(c) = cfg.c {
        if !named.graph.is_c_bounded(c) {
            return Err(CliError::Data(format!(
                "graph has an agent with {} negative neighbors, above c = {c}",
                named.graph.negative_bound()
            )));
        }
    }
    match resolve_backend(cfg.backend()?, &named.graph) {
        Backend::Float => go::<f64>(cfg, &named, command, default_algos, implicit_opt, Backend::Float),
        _ => go::<Exact>(cfg, &named, command, default_algos, implicit_opt, Backend::Exact),
    }
}

fn algo_list(cfg: &ExperimentConfig, defaults: &[&str]) -> CliResult<Vec<Algo>> {
    match &cfg.algos {
        Some(list) => list.iter().map(|a| Algo::from_str(a)).collect(),
        None => defaults.iter().map(|a| Algo::from_str(a)).collect(),
    }
}

fn run_point<W: Scalar>(
    named: &NamedGraph,
    mode: CandidateMode,
    seed: u64,
    p: Point,
) -> disclose::Result<RevealResult<W>> {
    let g = &named.graph;
    let k = p.budget;
    match p.algo {
        Algo::Greedy => greedy_reveal(g, mode, k, &RevealSet::new(), MassKind::True),
        Algo::ProxyGreedy => proxy_greedy_reveal(g, k),
        Algo::Bruteforce => bruteforce_reveal(g, mode, k),
        Algo::Lookahead => lookahead_reveal(g, mode, k, p.depth.expect("lookahead points carry a depth")),
        Algo::Heuristic => heuristic_reveal(g, k, Inner::Greedy, seed),
        Algo::HeuristicRandom => heuristic_reveal(g, k, Inner::Random, seed),
        Algo::Interactive => interactive_heuristic_reveal(g, k),
        Algo::Random => random_reveal(g, mode, k, seed),
    }
}

fn go<W: Scalar>(
    cfg: &ExperimentConfig,
    named: &NamedGraph,
    command: &str,
    default_algos: &[&str],
    implicit_opt: bool,
    backend: Backend,
) -> CliResult<()> {
    let g = &named.graph;
    let mode = cfg.mode()?;
    let seed = cfg.seed();
    let algos = algo_list(cfg, default_algos)?;
    let budgets = named.budgets(cfg);
    let depths = cfg.depths.clone().unwrap_or_else(|| vec![2]);

    let mut points = Vec::new();
    for &budget in &budgets {
        for &algo in &algos {
            if algo == Algo::Lookahead {
                points.extend(depths.iter().map(|&d| Point { budget, algo, depth: Some(d) }));
            } else {
                points.push(Point { budget, algo, depth: None });
            }
        }
    }

    // The optimum over all targets, per budget.
    let explicit_opt = cfg.opt == Some(true) || algos.contains(&Algo::Bruteforce);
    let want_opt = explicit_opt || cfg.opt.unwrap_or(implicit_opt);
    let opts: Vec<Option<W>> = if want_opt {
        pool::map(&budgets, |&k| match bruteforce_reveal::<W>(g, CandidateMode::Both, k) {
            Ok(r) => Ok(Some(r.welfare)),
            Err(disclose::Error::SearchSpaceTooLarge { .. }) if !explicit_opt => Ok(None),
            Err(e) => Err(CliError::from(e)),
        })
        .into_iter()
        .collect::<CliResult<_>>()?
    } else {
        vec![None; budgets.len()]
    };
    let opt_at = |k: usize| opts[budgets.iter().position(|&b| b == k).expect("budget in grid")].clone();

    let results = pool::map(&points, |&p| {
        let (res, ms) = timed(|| run_point::<W>(named, mode, seed, p));
        res.map(|r| (r, ms))
    });

    let base = empty_welfare::<W>(g);
    let mut rows = Vec::new();
    let mut details = Vec::new();

    let everything: RevealSet = (0..g.num_targets()).collect();
    let baselines = [("none", RevealSet::new()), ("full", everything)];
    for (name, set) in baselines {
        let welfare = social_welfare::<W>(g, &set, MassKind::True)?;
        let proxy = social_welfare::<W>(g, &set, MassKind::Proxy)?;
        let run_id = rows.len();
        rows.push(ResultRow {
            run_id,
            graph: named.id.clone(),
            algorithm: name.into(),
            welfare: Some(welfare.to_f64()),
            gain: Some((welfare.clone() - base.clone()).to_f64()),
            proxy_welfare: Some(proxy.to_f64()),
            ..Default::default()
        });
        details.push(Detail {
            run_id,
            algorithm: name,
            budget: None,
            d: None,
            solution: set.sorted(),
            welfare: welfare.to_string(),
            gain: (welfare - base.clone()).to_string(),
            proxy_welfare: proxy.to_string(),
            opt_welfare: None,
            trace: Vec::new(),
            proxy_guarantee: None,
        });
    }

    for (p, res) in points.iter().zip(results) {
        let (r, ms) = res?;
        let opt = opt_at(p.budget);
        let welfare = r.welfare.to_f64();
        let opt_f = opt.as_ref().map(Scalar::to_f64);
        let run_id = rows.len();
        rows.push(ResultRow {
            run_id,
            graph: named.id.clone(),
            algorithm: p.algo.name().into(),
            mode: if p.algo.uses_mode() {
                mode.as_str().into()
            } else if p.algo == Algo::ProxyGreedy {
                CandidateMode::Both.as_str().into()
            } else {
                "split".into()
            },
            budget: Some(p.budget),
            d: p.depth,
            seed: p.algo.seeded().then_some(seed),
            welfare: Some(welfare),
            gain: Some((r.welfare.clone() - base.clone()).to_f64()),
            proxy_welfare: Some(r.proxy_welfare.to_f64()),
            opt_welfare: opt_f,
            ratio: ratio(welfare, opt_f),
            runtime_ms: cfg.timing().then_some(ms),
            ..Default::default()
        });
        let proxy_guarantee = match (cfg.c, &opt) {
            (Some(c), Some(o)) if p.algo == Algo::ProxyGreedy => {
                let b = base.to_f64();
                Some(b + (1.0 - (-1.0f64).exp()) / c as f64 * (o.to_f64() - b))
            }
            _ => None,
        };
        details.push(Detail {
            run_id,
            algorithm: p.algo.name(),
            budget: Some(p.budget),
            d: p.depth,
            solution: r.solution.order().to_vec(),
            welfare: r.welfare.to_string(),
            gain: (r.welfare - base.clone()).to_string(),
            proxy_welfare: r.proxy_welfare.to_string(),
            opt_welfare: opt.map(|o| o.to_string()),
            trace: r.trace.into_iter().map(|s| Step { target: s.target, gain: s.gain.to_string() }).collect(),
            proxy_guarantee,
        });
    }

    let summary = Summary {
        command,
        backend: backend_name(backend),
        graph: GraphInfo::new::<W>(&named.id, g),
        config: cfg,
        rows: details,
    };
    emit(cfg.out.as_deref(), &RESULT_HEADER, &rows, &summary)
}
