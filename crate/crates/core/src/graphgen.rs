//! Graph construction: feature tables to geometric bipartite graphs, closed-form
//! counterexample fixtures, and seeded random graphs.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AgentClass, BipartiteGraph, Label};
use crate::par;

/// Rows kept after deduplication before subsampling kicks in.
pub const MAX_ROWS: usize = 500;
/// Fraction of prepared rows assigned to the target side.
pub const RHS_FRACTION: f64 = 0.1;

/// Numeric feature matrix with binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<bool>,
}

fn parse_label(raw: &str, positive: Option<&str>) -> Result<bool> {
    if let Some(p) = positive {
        return Ok(raw == p);
    }
    match raw.to_ascii_lowercase().as_str() {
        "1" | "+1" | "1.0" | "true" | "yes" => Ok(true),
        "0" | "-1" | "0.0" | "false" | "no" => Ok(false),
        _ => Err(Error::Data(format!("label `{raw}` is not binary; pass the positive label value"))),
    }
}

impl FeatureTable {
    /// Reads a headed CSV. Non-numeric columns are label-encoded by sorted
    /// distinct value. Labels come from `label_column`; when `positive` is set,
    /// a row is positive iff its label equals it.
    pub fn from_csv<R: Read>(reader: R, label_column: &str, positive: Option<&str>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
        let label_idx = header
            .iter()
            .position(|h| h == label_column)
            .ok_or_else(|| Error::Data(format!("no label column `{label_column}`")))?;
        let mut raw: Vec<Vec<String>> = Vec::new();
        let mut labels = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let mut row = Vec::with_capacity(header.len() - 1);
            for (j, field) in rec.iter().enumerate() {
                if field.is_empty() {
                    return Err(Error::Data(format!("missing value in row {} column `{}`", line + 1, header[j])));
                }
                if j == label_idx {
                    labels.push(parse_label(field, positive)?);
                } else {
                    row.push(field.to_owned());
                }
            }
            raw.push(row);
        }
        let columns: Vec<String> =
            header.iter().enumerate().filter(|&(j, _)| j != label_idx).map(|(_, h)| h.clone()).collect();
        let mut rows = vec![Vec::with_capacity(columns.len()); raw.len()];
        for j in 0..columns.len() {
            let numeric: Option<Vec<f64>> = raw.iter().map(|r| r[j].parse::<f64>().ok()).collect();
            let values = match numeric {
                Some(v) if v.iter().all(|x| x.is_finite()) => v,
                _ => {
                    let codes: BTreeMap<&str, usize> = raw
                        .iter()
                        .map(|r| r[j].as_str())
                        .collect::<std::collections::BTreeSet<_>>()
                        .into_iter()
                        .enumerate()
                        .map(|(i, s)| (s, i))
                        .collect();
                    raw.iter().map(|r| codes[r[j].as_str()] as f64).collect()
                }
            };
            for (row, v) in rows.iter_mut().zip(values) {
                row.push(v);
            }
        }
        Ok(FeatureTable { columns, rows, labels })
    }

    pub fn from_csv_path(path: &Path, label_column: &str, positive: Option<&str>) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
        Self::from_csv(file, label_column, positive)
    }
}

/// Agent features, target features and target labels.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedData {
    pub lhs: Vec<Vec<f64>>,
    pub rhs: Vec<Vec<f64>>,
    pub rhs_labels: Vec<Label>,
}

fn standardize(rows: &mut [Vec<f64>]) {
    let n = rows.len() as f64;
    let dims = rows.first().map_or(0, Vec::len);
    for j in 0..dims {
        let mean = rows.iter().map(|r| r[j]).sum::<f64>() / n;
        let var = rows.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n;
        let sd = var.sqrt();
        for r in rows.iter_mut() {
            r[j] = if sd > 1e-12 { (r[j] - mean) / sd } else { 0.0 };
        }
    }
}

/// Deduplicates, subsamples to [`MAX_ROWS`], z-scores every column, splits
/// 90/10 into agents and targets by a seeded permutation (the target side gets
/// `ceil(0.1·n)` rows) and drops positively labeled agents.
pub fn prepare_dataset(table: &FeatureTable, seed: u64) -> Result<PreparedData> {
    if table.rows.len() != table.labels.len() {
        return Err(Error::DimensionMismatch { expected: table.rows.len(), found: table.labels.len() });
    }
    let mut seen = HashSet::new();
    let mut rows: Vec<(Vec<f64>, bool)> = Vec::new();
    for (row, &label) in table.rows.iter().zip(&table.labels) {
        let mut key: Vec<u64> = row.iter().map(|v| v.to_bits()).collect();
        key.push(label as u64);
        if seen.insert(key) {
            rows.push((row.clone(), label));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if rows.len() > MAX_ROWS {
        let mut keep = rand::seq::index::sample(&mut rng, rows.len(), MAX_ROWS).into_vec();
        keep.sort_unstable();
        rows = keep.into_iter().map(|i| rows[i].clone()).collect();
    }
    let mut features: Vec<Vec<f64>> = rows.iter().map(|(r, _)| r.clone()).collect();
    standardize(&mut features);
    let n = features.len();
    let n_rhs = (RHS_FRACTION * n as f64).ceil() as usize;
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let (lhs_idx, rhs_idx) = perm.split_at(n - n_rhs);
    let lhs: Vec<Vec<f64>> = lhs_idx.iter().filter(|&&i| !rows[i].1).map(|&i| features[i].clone()).collect();
    if lhs.is_empty() || rhs_idx.is_empty() {
        return Err(Error::EmptyAfterFiltering);
    }
    Ok(PreparedData {
        lhs,
        rhs: rhs_idx.iter().map(|&i| features[i].clone()).collect(),
        rhs_labels: rhs_idx
            .iter()
            .map(|&i| if rows[i].1 { Label::Positive } else { Label::Negative })
            .collect(),
    })
}

/// Neighborhood rule for geometric graphs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "method", content = "param")]
pub enum GraphMethod {
    /// The `k` nearest targets, ties by target row.
    Knn(usize),
    /// Every target within this Euclidean distance.
    Threshold(f64),
}

impl GraphMethod {
    pub fn name(&self) -> &'static str {
        match self {
            GraphMethod::Knn(_) => "kmax",
            GraphMethod::Threshold(_) => "threshold",
        }
    }

    pub fn value(&self) -> String {
        match self {
            GraphMethod::Knn(k) => k.to_string(),
            GraphMethod::Threshold(l) => l.to_string(),
        }
    }
}

/// A geometric graph plus, for each compacted target, its target-side row.
#[derive(Debug, Clone, PartialEq)]
pub struct BuiltGraph {
    pub graph: BipartiteGraph,
    pub target_rows: Vec<usize>,
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Connects agents to targets by `method`, dropping targets no agent uses and
/// renumbering the rest in row order.
pub fn build_graph(
    lhs: &[Vec<f64>],
    rhs: &[Vec<f64>],
    rhs_labels: &[Label],
    method: GraphMethod,
) -> Result<BuiltGraph> {
    if rhs.len() != rhs_labels.len() {
        return Err(Error::DimensionMismatch { expected: rhs.len(), found: rhs_labels.len() });
    }
    let dims = lhs.first().or(rhs.first()).map_or(0, Vec::len);
    if let Some(bad) = lhs.iter().chain(rhs).find(|r| r.len() != dims) {
        return Err(Error::DimensionMismatch { expected: dims, found: bad.len() });
    }
    match method {
        GraphMethod::Knn(0) => return Err(Error::BadParams("k_max must be at least 1".into())),
        GraphMethod::Threshold(l) if l.is_nan() || l < 0.0 => {
            return Err(Error::BadParams(format!("threshold {l} must be a nonnegative number")))
        }
        _ => {}
    }
    let rows: Vec<Vec<usize>> = par::map(lhs, |agent| {
        let dist: Vec<f64> = rhs.iter().map(|t| euclidean(agent, t)).collect();
        let mut chosen: Vec<usize> = match method {
            GraphMethod::Knn(k) => {
                let mut order: Vec<usize> = (0..rhs.len()).collect();
                order.sort_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(a.cmp(&b)));
                order.truncate(k);
                order
            }
            GraphMethod::Threshold(l) => (0..rhs.len()).filter(|&j| dist[j] <= l).collect(),
        };
        chosen.sort_unstable();
        chosen
    });
    let mut used = vec![false; rhs.len()];
    for &j in rows.iter().flatten() {
        used[j] = true;
    }
    let target_rows: Vec<usize> = (0..rhs.len()).filter(|&j| used[j]).collect();
    let mut compact = vec![usize::MAX; rhs.len()];
    for (i, &j) in target_rows.iter().enumerate() {
        compact[j] = i;
    }
    let adjacency = rows.into_iter().map(|r| r.into_iter().map(|j| compact[j]).collect()).collect();
    let labels = target_rows.iter().map(|&j| rhs_labels[j]).collect();
    Ok(BuiltGraph { graph: BipartiteGraph::new(labels, adjacency, None)?, target_rows })
}

/// Structural summary of a graph, one row of the dataset statistics tables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphStats {
    pub n: usize,
    pub m_neg: usize,
    pub m_pos: usize,
    pub avg_lhs: f64,
    pub only_pos: usize,
    pub only_neg: usize,
    pub empty: usize,
    /// Positive targets adjacent to every helpable agent (0 if there are none).
    pub uni_pos: usize,
}

pub fn graph_stats(graph: &BipartiteGraph) -> GraphStats {
    let n = graph.num_agents();
    let classes: Vec<AgentClass> = (0..n).map(|x| AgentClass::of(graph.degrees_unchecked(x))).collect();
    let count = |c: AgentClass| classes.iter().filter(|&&k| k == c).count();
    let helpable: Vec<usize> = (0..n).filter(|&x| classes[x] == AgentClass::Helpable).collect();
    let uni_pos = if helpable.is_empty() {
        0
    } else {
        graph
            .positive_targets()
            .into_iter()
            .filter(|&t| helpable.iter().all(|&x| graph.neighbors(x).binary_search(&t).is_ok()))
            .count()
    };
    let edges: usize = (0..n).map(|x| graph.neighbors(x).len()).sum();
    GraphStats {
        n,
        m_neg: graph.negative_targets().len(),
        m_pos: graph.positive_targets().len(),
        avg_lhs: if n == 0 { 0.0 } else { edges as f64 / n as f64 },
        only_pos: count(AgentClass::OnlyPositive),
        only_neg: count(AgentClass::OnlyNegative),
        empty: count(AgentClass::Empty),
        uni_pos,
    }
}

/// Named graph constructions with known optimal and greedy welfare.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FixtureSpec {
    /// Two agents sharing one negative target, each with a private positive.
    Fig1,
    /// Four agents, each with a private positive and both shared negatives.
    Fig2,
    /// Greedy is stuck below optimum when only negatives may be revealed.
    FamNeg(usize),
    /// Greedy prefers positives while revealing all negatives is optimal.
    FamPosNeg(usize),
    /// First-step tie between a positive and a negative.
    FamTie(usize),
    /// Lookahead of depth `κ+1` recovers the optimum.
    FamExp(usize),
    /// Ten agents and nine named targets.
    Tab7,
    /// One agent per element, one positive per set, plus private negatives.
    MaxCoverGadget(Vec<Vec<usize>>),
}

/// Target names of the ten-agent fixture, in index order.
pub const TAB7_TARGET_NAMES: [&str; 9] = ["t0", "t1", "t2", "t3", "t5", "t6", "t7", "t8", "t9"];

impl FixtureSpec {
    /// Budget the family's worst case is stated at.
    pub fn natural_budget(&self) -> Option<usize> {
        match self {
            FixtureSpec::Fig1 => Some(1),
            FixtureSpec::Fig2 => Some(2),
            FixtureSpec::FamNeg(k) | FixtureSpec::FamPosNeg(k) | FixtureSpec::FamExp(k) => Some(k + 1),
            FixtureSpec::FamTie(k) => Some(*k),
            FixtureSpec::Tab7 => Some(3),
            FixtureSpec::MaxCoverGadget(_) => None,
        }
    }
}

impl fmt::Display for FixtureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixtureSpec::Fig1 => write!(f, "FIG1"),
            FixtureSpec::Fig2 => write!(f, "FIG2"),
            FixtureSpec::FamNeg(k) => write!(f, "FAM-NEG:{k}"),
            FixtureSpec::FamPosNeg(k) => write!(f, "FAM-POSNEG:{k}"),
            FixtureSpec::FamTie(k) => write!(f, "FAM-TIE:{k}"),
            FixtureSpec::FamExp(k) => write!(f, "FAM-EXP:{k}"),
            FixtureSpec::Tab7 => write!(f, "TAB7"),
            FixtureSpec::MaxCoverGadget(sets) => {
                let sets: Vec<String> = sets
                    .iter()
                    .map(|s| s.iter().map(usize::to_string).collect::<Vec<_>>().join("-"))
                    .collect();
                write!(f, "MAXCOVER-GADGET:{}", sets.join("/"))
            }
        }
    }
}

impl FromStr for FixtureSpec {
    type Err = Error;

    /// `NAME` or `NAME:κ`; the gadget takes sets as `0-1/1-2/2`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let kappa = || -> Result<usize> {
            arg.ok_or_else(|| Error::BadParams(format!("{name} needs a parameter, e.g. {name}:4")))?
                .parse()
                .map_err(|_| Error::BadParams(format!("bad parameter in `{s}`")))
        };
        let spec = match name.to_ascii_uppercase().as_str() {
            "FIG1" => FixtureSpec::Fig1,
            "FIG2" => FixtureSpec::Fig2,
            "TAB7" => FixtureSpec::Tab7,
            "FAM-NEG" => FixtureSpec::FamNeg(kappa()?),
            "FAM-POSNEG" => FixtureSpec::FamPosNeg(kappa()?),
            "FAM-TIE" => FixtureSpec::FamTie(kappa()?),
            "FAM-EXP" => FixtureSpec::FamExp(kappa()?),
            "MAXCOVER-GADGET" => {
                let arg = arg.ok_or_else(|| Error::BadParams("gadget needs sets, e.g. 0-1/1-2".into()))?;
                let sets = arg
                    .split('/')
                    .map(|set| {
                        set.split('-')
                            .map(|e| e.trim().parse::<usize>())
                            .collect::<std::result::Result<Vec<_>, _>>()
                            .map_err(|_| Error::BadParams(format!("bad set `{set}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                FixtureSpec::MaxCoverGadget(sets)
            }
            _ => return Err(Error::BadParams(format!("unknown fixture `{name}`"))),
        };
        Ok(spec)
    }
}

fn need(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::BadParams(what.to_owned()))
    }
}

/// `p` agents, each with its own positive and all of `q` shared negatives.
fn private_positive_shared_negatives(p: usize, q: usize) -> BipartiteGraph {
    let mut labels = vec![Label::Positive; p];
    labels.extend(vec![Label::Negative; q]);
    let adjacency = (0..p).map(|i| std::iter::once(i).chain(p..p + q).collect()).collect();
    BipartiteGraph::new(labels, adjacency, None).expect("well-formed fixture")
}

/// Builds a fixture. Positive targets always precede negative ones.
pub fn make_fixture(spec: &FixtureSpec) -> Result<BipartiteGraph> {
    use Label::{Negative as N, Positive as P};
    Ok(match spec {
        FixtureSpec::Fig1 => BipartiteGraph::new(vec![P, P, N], vec![vec![0, 2], vec![1, 2]], None)?,
        FixtureSpec::Fig2 => private_positive_shared_negatives(4, 2),
        &FixtureSpec::FamPosNeg(k) => {
            need(k >= 3, "FAM-POSNEG needs κ ≥ 3")?;
            private_positive_shared_negatives(k * k, k + 1)
        }
        &FixtureSpec::FamTie(k) => {
            need(k >= 3, "FAM-TIE needs κ ≥ 3")?;
            private_positive_shared_negatives(k * k, k)
        }
        &FixtureSpec::FamExp(k) => {
            need(k >= 7, "FAM-EXP needs κ ≥ 7")?;
            private_positive_shared_negatives(k * k / (k - 2) + k, k + 1)
        }
        &FixtureSpec::FamNeg(k) => {
            need(k >= 4, "FAM-NEG needs κ ≥ 4")?;
            // a large group sharing κ+1 negatives, and κ+1 agents each with a
            // private positive/negative pair
            let big = k * k / 2;
            let small = k + 1;
            let m_pos = big + small;
            let mut labels = vec![P; m_pos];
            labels.extend(vec![N; 2 * small]);
            let shared = m_pos..m_pos + small;
            let mut adjacency: Vec<Vec<usize>> =
                (0..big).map(|i| std::iter::once(i).chain(shared.clone()).collect()).collect();
            adjacency.extend((0..small).map(|j| vec![big + j, m_pos + small + j]));
            let groups = [vec![0; big], vec![1; small]].concat();
            BipartiteGraph::new(labels, adjacency, Some(groups))?
        }
        FixtureSpec::Tab7 => {
            let labels = [vec![P; 5], vec![N; 4]].concat();
            let index = |name: &str| TAB7_TARGET_NAMES.iter().position(|&t| t == name).expect("known target");
            let rows: [&[&str]; 10] = [
                &["t8", "t9"],
                &["t3", "t6", "t9"],
                &["t0", "t6", "t7", "t8", "t9"],
                &["t5", "t9"],
                &["t7"],
                &["t6", "t7", "t9"],
                &["t9"],
                &["t1", "t2", "t6", "t7"],
                &["t7", "t8"],
                &["t1", "t9"],
            ];
            let adjacency = rows.iter().map(|r| r.iter().map(|t| index(t)).collect()).collect();
            BipartiteGraph::new(labels, adjacency, None)?
        }
        FixtureSpec::MaxCoverGadget(sets) => {
            let n = sets.iter().flatten().max().map_or(0, |&e| e + 1);
            let mut member: Vec<Vec<usize>> = vec![Vec::new(); n];
            for (s, set) in sets.iter().enumerate() {
                for &e in set {
                    if !member[e].contains(&s) {
                        member[e].push(s);
                    }
                }
            }
            need(member.iter().all(|m| !m.is_empty()), "every element must belong to a set")?;
            let mut labels = vec![P; sets.len()];
            let mut adjacency = Vec::with_capacity(n);
            for m in member {
                let start = labels.len();
                labels.extend(vec![N; m.len()]);
                let mut row = m;
                row.sort_unstable();
                row.extend(start..labels.len());
                adjacency.push(row);
            }
            BipartiteGraph::new(labels, adjacency, None)?
        }
    })
}

/// Parameters of an Erdős–Rényi style bipartite graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub agents: usize,
    pub targets: usize,
    pub edge_prob: f64,
    pub positive_frac: f64,
}

/// Labels each target positive with probability `positive_frac` and adds each
/// agent/target edge independently with probability `edge_prob`.
pub fn random_graph(spec: &SyntheticSpec, seed: u64) -> BipartiteGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels = (0..spec.targets)
        .map(|_| if rng.gen_bool(spec.positive_frac) { Label::Positive } else { Label::Negative })
        .collect();
    let adjacency = (0..spec.agents)
        .map(|_| (0..spec.targets).filter(|_| rng.gen_bool(spec.edge_prob)).collect())
        .collect();
    BipartiteGraph::new(labels, adjacency, None).expect("generated graph is valid")
}
