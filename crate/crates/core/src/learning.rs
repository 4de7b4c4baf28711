//! Train/test harness: learn a reveal set on a sample of agents and measure how
//! well it serves agents it has never seen.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AgentClass, BipartiteGraph};
use crate::par;
use crate::reveal::{greedy_reveal, CandidateMode};
use crate::welfare::{social_welfare, MassKind, RevealSet, Scalar};

/// Share of agents used for training unless stated otherwise.
pub const DEFAULT_TRAIN_RATIO: f64 = 0.7;

/// Agent partition with both sides sharing the full target set.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitGraphs {
    pub train: BipartiteGraph,
    pub test: BipartiteGraph,
    pub train_agents: Vec<usize>,
    pub test_agents: Vec<usize>,
}

/// Seeded partition of the agents; `round(ratio·n)` of them train.
pub fn split_train_test(graph: &BipartiteGraph, ratio: f64, seed: u64) -> Result<SplitGraphs> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidArgument(format!("train ratio {ratio} must lie strictly between 0 and 1")));
    }
    let n = graph.num_agents();
    let n_train = (ratio * n as f64).round() as usize;
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut train_agents = perm[..n_train].to_vec();
    let mut test_agents = perm[n_train..].to_vec();
    if train_agents.is_empty() || test_agents.is_empty() {
        return Err(Error::TooFewAgents { train: train_agents.len(), test: test_agents.len() });
    }
    train_agents.sort_unstable();
    test_agents.sort_unstable();
    Ok(SplitGraphs {
        train: graph.induced_by_agents(&train_agents)?,
        test: graph.induced_by_agents(&test_agents)?,
        train_agents,
        test_agents,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Metric {
    /// Welfare over agents with at least one positive neighbor.
    Perf1,
    /// Welfare over all agents.
    Perf2,
    /// Welfare of helpable agents over their count.
    Perf3,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Perf1, Metric::Perf2, Metric::Perf3];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Perf1 => "perf1",
            Metric::Perf2 => "perf2",
            Metric::Perf3 => "perf3",
        }
    }
}

/// A percentage; `zero_denominator` marks a value forced to 0 because no
/// agent qualified for the denominator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerfScore {
    pub metric: Metric,
    pub value: f64,
    pub zero_denominator: bool,
}

/// Evaluates `set` on the agents of `graph` as a percentage.
pub fn perf<W: Scalar>(graph: &BipartiteGraph, set: &RevealSet, metric: Metric) -> Result<PerfScore> {
    let welfare = social_welfare::<W>(graph, set, MassKind::True)?.to_f64();
    let classes: Vec<AgentClass> = (0..graph.num_agents()).map(|x| graph.degrees_unchecked(x).class()).collect();
    let count = |f: &dyn Fn(AgentClass) -> bool| classes.iter().filter(|&&c| f(c)).count();
    let (numerator, denominator) = match metric {
        Metric::Perf1 => (welfare, count(&|c| matches!(c, AgentClass::OnlyPositive | AgentClass::Helpable))),
        Metric::Perf2 => (welfare, classes.len()),
        Metric::Perf3 => (
            welfare - count(&|c| c == AgentClass::OnlyPositive) as f64,
            count(&|c| c == AgentClass::Helpable),
        ),
    };
    Ok(if denominator == 0 {
        PerfScore { metric, value: 0.0, zero_denominator: true }
    } else {
        PerfScore { metric, value: 100.0 * numerator / denominator as f64, zero_denominator: false }
    })
}

fn all_metrics<W: Scalar>(graph: &BipartiteGraph, set: &RevealSet) -> Result<[PerfScore; 3]> {
    Ok([perf::<W>(graph, set, Metric::Perf1)?, perf::<W>(graph, set, Metric::Perf2)?, perf::<W>(graph, set, Metric::Perf3)?])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialPerf {
    pub trial: usize,
    pub seed: u64,
    pub solution: Vec<usize>,
    pub train: [PerfScore; 3],
    pub test: [PerfScore; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Train,
    Test,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Train => "train",
            Side::Test => "test",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerfSummary {
    pub side: Side,
    pub metric: Metric,
    pub mean: f64,
    /// Sample standard deviation (0 for a single trial).
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LearningTable {
    pub trials: Vec<TrialPerf>,
    pub summary: Vec<PerfSummary>,
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Trial `i` splits with seed `base_seed + i`, runs greedy over all targets
/// at `budget` on the training agents, and scores both sides.
pub fn run_learning_trials<W: Scalar>(
    graph: &BipartiteGraph,
    budget: usize,
    n_trials: usize,
    base_seed: u64,
    ratio: f64,
) -> Result<LearningTable> {
    if n_trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    let ids: Vec<usize> = (0..n_trials).collect();
    let trials = par::map(&ids, |&trial| -> Result<TrialPerf> {
        let seed = base_seed.wrapping_add(trial as u64);
        let split = split_train_test(graph, ratio, seed)?;
        let run = greedy_reveal::<W>(&split.train, CandidateMode::Both, budget, &RevealSet::new(), MassKind::True)?;
        Ok(TrialPerf {
            trial,
            seed,
            solution: run.solution.order().to_vec(),
            train: all_metrics::<W>(&split.train, &run.solution)?,
            test: all_metrics::<W>(&split.test, &run.solution)?,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut summary = Vec::with_capacity(6);
    for side in [Side::Train, Side::Test] {
        for (k, metric) in Metric::ALL.into_iter().enumerate() {
            let values: Vec<f64> = trials
                .iter()
                .map(|t| match side {
                    Side::Train => t.train[k].value,
                    Side::Test => t.test[k].value,
                })
                .collect();
            let (mean, sd) = mean_sd(&values);
            summary.push(PerfSummary { side, metric, mean, sd });
        }
    }
    Ok(LearningTable { trials, summary })
}

/// `|F_train(S)/n_train − F_test(S)/n_test|`.
pub fn per_agent_gap<W: Scalar>(train: &BipartiteGraph, test: &BipartiteGraph, set: &RevealSet) -> Result<f64> {
    let per_agent = |g: &BipartiteGraph| -> Result<f64> {
        let f = social_welfare::<W>(g, set, MassKind::True)?.to_f64();
        Ok(if g.num_agents() == 0 { 0.0 } else { f / g.num_agents() as f64 })
    };
    Ok((per_agent(train)? - per_agent(test)?).abs())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub per_trial: Vec<f64>,
    pub mean: f64,
}

/// Per-agent welfare gap between the training and test agents of a greedy
/// set learned on the training side, per trial.
pub fn generalization_gap<W: Scalar>(
    graph: &BipartiteGraph,
    budget: usize,
    n_trials: usize,
    base_seed: u64,
    ratio: f64,
) -> Result<GapReport> {
    if n_trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    let ids: Vec<usize> = (0..n_trials).collect();
    let per_trial = par::map(&ids, |&trial| -> Result<f64> {
        let split = split_train_test(graph, ratio, base_seed.wrapping_add(trial as u64))?;
        let run = greedy_reveal::<W>(&split.train, CandidateMode::Both, budget, &RevealSet::new(), MassKind::True)?;
        per_agent_gap::<W>(&split.train, &split.test, &run.solution)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mean = per_trial.iter().sum::<f64>() / per_trial.len() as f64;
    Ok(GapReport { per_trial, mean })
}
