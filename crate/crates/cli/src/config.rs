use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use disclose::graphgen::{make_fixture, FixtureSpec, GraphMethod, SyntheticSpec};
use disclose::{BipartiteGraph, CandidateMode};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Every experiment knob. The same struct is read from `--config` JSON and
/// from flags; flags win field by field.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Only meaningful in a config file; must match the subcommand if set.
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,

    /// Graph JSON file.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Built-in fixture, e.g. `FIG2` or `FAM-POSNEG:3`.
    #[arg(long)]
    pub fixture: Option<String>,
    /// Dataset CSV (gen, learn) or coverage instance CSV (coverage).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Label column of the dataset CSV.
    #[arg(long)]
    pub label: Option<String>,
    /// Label value counted as positive; otherwise labels must be 0/1 or true/false.
    #[arg(long)]
    pub positive: Option<String>,
    /// Random graph `agents,targets,edge_prob,positive_frac` instead of a dataset.
    #[arg(long, value_parser = parse_synthetic)]
    pub synthetic: Option<SyntheticSpec>,
    /// Graph construction rule: `kmax` (alias `knn`) or `threshold`.
    #[arg(long)]
    pub method: Option<String>,
    /// Construction parameters to sweep (k for kmax, distance for threshold).
    #[arg(long, value_delimiter = ',')]
    pub params: Option<Vec<f64>>,

    /// Algorithms to run, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub algos: Option<Vec<String>>,
    /// Candidate targets: `positive`, `negative` or `both`.
    #[arg(long)]
    pub mode: Option<String>,
    /// Reveal budgets.
    #[arg(long = "K", value_delimiter = ',')]
    #[serde(rename = "K")]
    pub budgets: Option<Vec<usize>>,
    /// Intervention budgets.
    #[arg(long = "B", value_delimiter = ',')]
    #[serde(rename = "B")]
    pub interventions: Option<Vec<usize>>,
    /// Coverage radius budgets.
    #[arg(long = "R", value_delimiter = ',')]
    #[serde(rename = "R")]
    pub radii: Option<Vec<f64>>,
    /// Lookahead depths.
    #[arg(long = "d", value_delimiter = ',')]
    #[serde(rename = "d")]
    pub depths: Option<Vec<usize>>,
    /// Negative-degree bound used to report the proxy guarantee.
    #[arg(long)]
    pub c: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Learning trials.
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub train_ratio: Option<f64>,
    /// Group favored by prioritized greedy.
    #[arg(long)]
    pub priority: Option<usize>,
    /// Group of every agent, overriding the graph's own.
    #[arg(long, value_delimiter = ',')]
    pub groups: Option<Vec<usize>>,

    /// Output CSV (stdout when absent); a JSON summary goes next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `exact`, `float` or `auto` (exact when it cannot overflow).
    #[arg(long)]
    pub backend: Option<String>,
    /// Fill the runtime_ms column.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub timing: Option<bool>,
    /// Also compute the exhaustive optimum and the ratio to it.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub opt: Option<bool>,
}

fn parse_synthetic(s: &str) -> Result<SyntheticSpec, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [agents, targets, p, q] = parts.as_slice() else {
        return Err("expected agents,targets,edge_prob,positive_frac".into());
    };
    let bad = |what: &str| format!("bad {what} in `{s}`");
    Ok(SyntheticSpec {
        agents: agents.parse().map_err(|_| bad("agent count"))?,
        targets: targets.parse().map_err(|_| bad("target count"))?,
        edge_prob: p.parse().map_err(|_| bad("edge probability"))?,
        positive_frac: q.parse().map_err(|_| bad("positive fraction"))?,
    })
}

macro_rules! overlay {
    ($flags:expr, $file:expr, $($field:ident),* $(,)?) => {
        ExperimentConfig { $($field: $flags.$field.or($file.$field),)* }
    };
}

impl ExperimentConfig {
    /// Reads a JSON config; unknown keys are rejected.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
    }

    /// `self` (flags) over `file`.
    pub fn over(self, file: ExperimentConfig) -> ExperimentConfig {
        overlay!(
            self, file, command, graph, fixture, input, label, positive, synthetic, method, params, algos, mode,
            budgets, interventions, radii, depths, c, seed, trials, train_ratio, priority, groups, out, backend,
            timing, opt,
        )
    }

    pub fn check_command(&self, name: &str) -> CliResult<()> {
        match &self.command {
            Some(c) if c != name => {
                Err(CliError::Config(format!("config is for `{c}` but the `{name}` subcommand was run")))
            }
            _ => Ok(()),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn timing(&self) -> bool {
        self.timing.unwrap_or(false)
    }

    pub fn mode(&self) -> CliResult<CandidateMode> {
        match &self.mode {
            None => Ok(CandidateMode::Both),
            Some(m) => CandidateMode::from_str(m).map_err(CliError::from),
        }
    }

    pub fn backend(&self) -> CliResult<Backend> {
        match self.backend.as_deref().unwrap_or("auto") {
            "auto" => Ok(Backend::Auto),
            "exact" => Ok(Backend::Exact),
            "float" => Ok(Backend::Float),
            other => Err(CliError::Config(format!("unknown backend `{other}` (exact, float, auto)"))),
        }
    }

    /// Graph construction rules to sweep.
    pub fn methods(&self) -> CliResult<Vec<GraphMethod>> {
        let params = self.params.clone().unwrap_or_else(|| vec![5.0]);
        let method = self.method.as_deref().unwrap_or("kmax");
        params
            .into_iter()
            .map(|p| match method {
                "kmax" | "knn" if p >= 1.0 && p.fract() == 0.0 => Ok(GraphMethod::Knn(p as usize)),
                "kmax" | "knn" => Err(CliError::Config(format!("k_max must be a positive integer, got {p}"))),
                "threshold" => Ok(GraphMethod::Threshold(p)),
                other => Err(CliError::Config(format!("unknown method `{other}` (kmax, threshold)"))),
            })
            .collect()
    }

    pub fn positive_value(&self) -> Option<&str> {
        self.positive.as_deref()
    }

    /// The single graph named by `graph` or `fixture`, with `groups` applied.
    pub fn load_graph(&self) -> CliResult<NamedGraph> {
        let named = match (&self.graph, &self.fixture) {
            (Some(_), Some(_)) => return Err(CliError::Config("give either --graph or --fixture, not both".into())),
            (Some(path), None) => NamedGraph::from_file(path)?,
            (None, Some(spec)) => NamedGraph::fixture(spec)?,
            (None, None) => return Err(CliError::Config("a graph is required: --graph FILE or --fixture NAME".into())),
        };
        match &self.groups {
            Some(groups) => Ok(NamedGraph { graph: named.graph.with_groups(Some(groups.clone()))?, ..named }),
            None => Ok(named),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Float,
    Auto,
}

#[derive(Debug, Clone)]
pub struct NamedGraph {
    pub id: String,
    pub graph: BipartiteGraph,
    /// Natural budget when the graph is a fixture.
    pub default_budget: Option<usize>,
}

impl NamedGraph {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("cannot read graph {}: {e}", path.display())))?;
        let graph = BipartiteGraph::from_json(&text)?;
        let id = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
        Ok(NamedGraph { id, graph, default_budget: None })
    }

    pub fn fixture(spec: &str) -> CliResult<Self> {
        let spec = FixtureSpec::from_str(spec)?;
        Ok(NamedGraph { id: spec.to_string(), graph: make_fixture(&spec)?, default_budget: spec.natural_budget() })
    }

    pub fn budgets(&self, cfg: &ExperimentConfig) -> Vec<usize> {
        cfg.budgets.clone().unwrap_or_else(|| vec![self.default_budget.unwrap_or(1)])
    }
}
