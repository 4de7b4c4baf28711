use disclose::learning::{generalization_gap, run_learning_trials, LearningTable, DEFAULT_TRAIN_RATIO};
use disclose::{Exact, Scalar};
use serde::Serialize;

use super::gen::{sources, Source};
use super::{backend_name, resolve_backend};
use crate::config::{Backend, ExperimentConfig};
use crate::error::{CliError, CliResult};
use crate::output::{emit, LearningRow, LEARNING_HEADER};
use crate::pool;

#[derive(Debug, Serialize)]
struct Cell {
    dataset: String,
    method: String,
    param: String,
    #[serde(rename = "K")]
    budget: usize,
    backend: &'static str,
    table: LearningTable,
    mean_gap: f64,
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    command: &'static str,
    config: &'a ExperimentConfig,
    cells: Vec<Cell>,
}

fn one<W: Scalar>(s: &Source, k: usize, trials: usize, seed: u64, ratio: f64) -> CliResult<(LearningTable, Vec<f64>)> {
    let table = run_learning_trials::<W>(&s.graph, k, trials, seed, ratio)?;
    let gap = generalization_gap::<W>(&s.graph, k, trials, seed, ratio)?;
    Ok((table, gap.per_trial))
}

/// Train/test trials for every graph source and budget. Rows carry the three
/// metrics per side plus the per-agent welfare gap as split `gap`.
pub fn run(cfg: &ExperimentConfig) -> CliResult<()> {
    let trials = cfg.trials.unwrap_or(100);
    let ratio = cfg.train_ratio.unwrap_or(DEFAULT_TRAIN_RATIO);
    let seed = cfg.seed();
    let backend = cfg.backend()?;
    let srcs = sources(cfg)?;
    let default_k = cfg.budgets.clone().unwrap_or_else(|| vec![5]);
    if trials == 0 {
        return Err(CliError::Config("--trials must be at least 1".into()));
    }
    let points: Vec<(usize, usize)> =
        (0..srcs.len()).flat_map(|i| default_k.iter().map(move |&k| (i, k))).collect();
    let results = pool::map(&points, |&(i, k)| {
        let s = &srcs[i];
        let b = resolve_backend(backend, &s.graph);
        let out = match b {
            Backend::Float => one::<f64>(s, k, trials, seed, ratio),
            _ => one::<Exact>(s, k, trials, seed, ratio),
        };
        out.map(|o| (o, b))
    });
    let mut rows = Vec::new();
    let mut cells = Vec::new();
    for (&(i, k), res) in points.iter().zip(results) {
        let ((table, gaps), b) = res?;
        let s = &srcs[i];
        let row = |trial: usize, split: &'static str, metric: &'static str, value: f64| LearningRow {
            dataset: s.dataset.clone(),
            method: s.method.clone(),
            param: s.param.clone(),
            budget: k,
            trial,
            split,
            metric,
            value,
        };
        for t in &table.trials {
            for p in &t.train {
                rows.push(row(t.trial, "train", p.metric.as_str(), p.value));
            }
            for p in &t.test {
                rows.push(row(t.trial, "test", p.metric.as_str(), p.value));
            }
            rows.push(row(t.trial, "gap", "welfare_per_agent", gaps[t.trial]));
        }
        cells.push(Cell {
            dataset: s.dataset.clone(),
            method: s.method.clone(),
            param: s.param.clone(),
            budget: k,
            backend: backend_name(b),
            mean_gap: gaps.iter().sum::<f64>() / gaps.len() as f64,
            table,
        });
    }
    emit(cfg.out.as_deref(), &LEARNING_HEADER, &rows, &Summary { command: "learn", config: cfg, cells })
}
