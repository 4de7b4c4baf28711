use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliResult;

pub const RESULT_HEADER: [&str; 15] = [
    "run_id",
    "graph",
    "algorithm",
    "mode",
    "K",
    "B",
    "R",
    "d",
    "seed",
    "welfare",
    "gain",
    "proxy_welfare",
    "opt_welfare",
    "ratio",
    "runtime_ms",
];

pub const LEARNING_HEADER: [&str; 8] = ["dataset", "method", "param", "K", "trial", "split", "metric", "value"];

pub const FAIRNESS_HEADER: [&str; 11] =
    ["run_id", "graph", "algorithm", "mode", "K", "group", "group_budget", "gain", "opt_gain", "ratio", "runtime_ms"];

pub const STATS_HEADER: [&str; 11] =
    ["dataset", "method", "param", "n", "m_neg", "m_pos", "avg_lhs", "only_pos", "only_neg", "empty", "uni_pos"];

/// One line of the results CSV; `None` prints as an empty cell.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ResultRow {
    pub run_id: usize,
    pub graph: String,
    pub algorithm: String,
    pub mode: String,
    #[serde(rename = "K")]
    pub budget: Option<usize>,
    #[serde(rename = "B")]
    pub interventions: Option<usize>,
    #[serde(rename = "R")]
    pub radius: Option<f64>,
    pub d: Option<usize>,
    pub seed: Option<u64>,
    pub welfare: Option<f64>,
    pub gain: Option<f64>,
    pub proxy_welfare: Option<f64>,
    pub opt_welfare: Option<f64>,
    pub ratio: Option<f64>,
    pub runtime_ms: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LearningRow {
    pub dataset: String,
    pub method: String,
    pub param: String,
    #[serde(rename = "K")]
    pub budget: usize,
    pub trial: usize,
    pub split: &'static str,
    pub metric: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FairnessRow {
    pub run_id: usize,
    pub graph: String,
    pub algorithm: String,
    pub mode: String,
    #[serde(rename = "K")]
    pub budget: usize,
    pub group: usize,
    pub group_budget: usize,
    pub gain: f64,
    pub opt_gain: Option<f64>,
    pub ratio: Option<f64>,
    pub runtime_ms: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StatsRow {
    pub dataset: String,
    pub method: String,
    pub param: String,
    pub n: usize,
    pub m_neg: usize,
    pub m_pos: usize,
    pub avg_lhs: f64,
    pub only_pos: usize,
    pub only_neg: usize,
    pub empty: usize,
    pub uni_pos: usize,
}

/// `welfare / opt`, undefined when the optimum is zero.
pub fn ratio(welfare: f64, opt: Option<f64>) -> Option<f64> {
    opt.filter(|&o| o > 0.0).map(|o| welfare / o)
}

pub fn csv_bytes<T: Serialize>(header: &[&str], rows: &[T]) -> CliResult<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.into_inner().map_err(|e| crate::error::CliError::Data(e.to_string()))
}

fn summary_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// Writes the CSV to `out` (or stdout) and, next to a file output, the JSON
/// summary.
pub fn emit<T: Serialize, S: Serialize>(out: Option<&Path>, header: &[&str], rows: &[T], summary: &S) -> CliResult<()> {
    let bytes = csv_bytes(header, rows)?;
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(path, bytes)?;
            let mut json = serde_json::to_string_pretty(summary)?;
            json.push('\n');
            std::fs::write(summary_path(path), json)?;
        }
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(())
}
