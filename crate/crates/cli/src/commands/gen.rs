use disclose::graphgen::{build_graph, graph_stats, prepare_dataset, random_graph, FeatureTable};
use disclose::BipartiteGraph;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::output::{emit, StatsRow, STATS_HEADER};

/// A graph together with the dataset and construction that produced it.
#[derive(Debug, Clone)]
pub struct Source {
    pub dataset: String,
    pub method: String,
    pub param: String,
    pub graph: BipartiteGraph,
}

impl Source {
    pub fn file_name(&self) -> String {
        let mut name = self.dataset.clone();
        for part in [&self.method, &self.param] {
            if !part.is_empty() {
                name.push('-');
                name.push_str(part);
            }
        }
        format!("{}.json", name.replace(['/', ':', ' '], "_"))
    }
}

/// Graphs named by the config: one per construction parameter for a
/// dataset, otherwise the single synthetic, file or fixture graph.
pub fn sources(cfg: &ExperimentConfig) -> CliResult<Vec<Source>> {
    let given = [cfg.input.is_some(), cfg.synthetic.is_some(), cfg.graph.is_some() || cfg.fixture.is_some()];
    if given.iter().filter(|&&g| g).count() != 1 {
        return Err(CliError::Config(
            "give exactly one graph source: --input DATASET, --synthetic SPEC, --graph FILE or --fixture NAME".into(),
        ));
    }
    if let Some(path) = &cfg.input {
        let label = cfg.label.as_deref().ok_or_else(|| CliError::Config("--input needs --label COLUMN".into()))?;
        let table = FeatureTable::from_csv_path(path, label, cfg.positive_value())?;
        let data = prepare_dataset(&table, cfg.seed())?;
        let dataset = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
        return cfg
            .methods()?
            .into_iter()
            .map(|m| {
                Ok(Source {
                    dataset: dataset.clone(),
                    method: m.name().into(),
                    param: m.value(),
                    graph: build_graph(&data.lhs, &data.rhs, &data.rhs_labels, m)?.graph,
                })
            })
            .collect();
    }
    if let Some(spec) = &cfg.synthetic {
        if !(0.0..=1.0).contains(&spec.edge_prob) || !(0.0..=1.0).contains(&spec.positive_frac) {
            return Err(CliError::Config("synthetic probabilities must lie in [0, 1]".into()));
        }
        return Ok(vec![Source {
            dataset: "synthetic".into(),
            method: "random".into(),
            param: format!("{}x{}", spec.agents, spec.targets),
            graph: random_graph(spec, cfg.seed()),
        }]);
    }
    let named = cfg.load_graph()?;
    Ok(vec![Source { dataset: named.id, method: String::new(), param: String::new(), graph: named.graph }])
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    command: &'static str,
    config: &'a ExperimentConfig,
    graphs: Vec<String>,
}

/// Writes every graph as JSON plus `stats.csv` into the `--out` directory.
pub fn run(cfg: &ExperimentConfig) -> CliResult<()> {
    let dir = cfg.out.as_ref().ok_or_else(|| CliError::Config("gen needs --out DIRECTORY".into()))?;
    std::fs::create_dir_all(dir)?;
    let mut rows = Vec::new();
    let mut files = Vec::new();
    for s in sources(cfg)? {
        let name = s.file_name();
        let mut json = s.graph.to_json();
        json.push('\n');
        std::fs::write(dir.join(&name), json)?;
        files.push(name);
        let st = graph_stats(&s.graph);
        rows.push(StatsRow {
            dataset: s.dataset,
            method: s.method,
            param: s.param,
            n: st.n,
            m_neg: st.m_neg,
            m_pos: st.m_pos,
            avg_lhs: st.avg_lhs,
            only_pos: st.only_pos,
            only_neg: st.only_neg,
            empty: st.empty,
            uni_pos: st.uni_pos,
        });
    }
    emit(Some(&dir.join("stats.csv")), &STATS_HEADER, &rows, &Summary { command: "gen", config: cfg, graphs: files })
}
