use std::fs::File;

use disclose::coverage::{greedy_coverage, CoverageInstance};
use serde::Serialize;

use super::timed;
use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::output::{emit, ResultRow, RESULT_HEADER};
use crate::pool;

#[derive(Debug, Serialize)]
struct Detail {
    run_id: usize,
    #[serde(rename = "R")]
    radius: f64,
    radii: Vec<f64>,
    covered_agents: Vec<usize>,
    steps: usize,
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    command: &'static str,
    instance: String,
    agents: usize,
    targets: usize,
    config: &'a ExperimentConfig,
    rows: Vec<Detail>,
}

pub fn run(cfg: &ExperimentConfig) -> CliResult<()> {
    let path = cfg.input.as_ref().ok_or_else(|| CliError::Config("coverage needs --input INSTANCE.csv".into()))?;
    let file = File::open(path).map_err(|e| CliError::Data(format!("cannot open {}: {e}", path.display())))?;
    let instance = CoverageInstance::from_csv(file)?;
    let id = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    let budgets = cfg.radii.clone().unwrap_or_else(|| vec![1.0]);
    let runs = pool::map(&budgets, |&r| {
        let (res, ms) = timed(|| greedy_coverage(&instance, r));
        res.map(|res| (res, ms))
    });
    let mut rows = Vec::new();
    let mut details = Vec::new();
    for (&r, run) in budgets.iter().zip(runs) {
        let (res, ms) = run?;
        let run_id = rows.len();
        rows.push(ResultRow {
            run_id,
            graph: id.clone(),
            algorithm: "greedy-coverage".into(),
            radius: Some(r),
            welfare: Some(res.covered_count() as f64),
            runtime_ms: cfg.timing().then_some(ms),
            ..Default::default()
        });
        details.push(Detail {
            run_id,
            radius: r,
            covered_agents: (0..res.covered.len()).filter(|&j| res.covered[j]).collect(),
            radii: res.radii,
            steps: res.steps,
        });
    }
    let summary = Summary {
        command: "coverage",
        instance: id,
        agents: instance.agents.len(),
        targets: instance.targets.len(),
        config: cfg,
        rows: details,
    };
    emit(cfg.out.as_deref(), &RESULT_HEADER, &rows, &summary)
}
