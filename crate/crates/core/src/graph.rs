//! The immutable bipartite world model: agents on the left, labeled targets on
//! the right, and agent-to-target adjacency.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hidden label of a target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn is_positive(self) -> bool {
        matches!(self, Label::Positive)
    }

    pub fn sign(self) -> i8 {
        match self {
            Label::Positive => 1,
            Label::Negative => -1,
        }
    }

    pub fn from_sign(sign: i64) -> Option<Label> {
        match sign {
            1 => Some(Label::Positive),
            -1 => Some(Label::Negative),
            _ => None,
        }
    }
}

/// Positive/negative neighbor counts of one agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AgentDegrees {
    pub pos: usize,
    pub neg: usize,
}

impl AgentDegrees {
    pub fn total(&self) -> usize {
        self.pos + self.neg
    }

    pub fn class(&self) -> AgentClass {
        AgentClass::of(*self)
    }
}

/// Structural class of an agent, a total function of its degrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AgentClass {
    Empty,
    OnlyPositive,
    OnlyNegative,
    /// At least one positive and one negative neighbor.
    Helpable,
}

impl AgentClass {
    pub fn of(d: AgentDegrees) -> AgentClass {
        match (d.pos > 0, d.neg > 0) {
            (false, false) => AgentClass::Empty,
            (true, false) => AgentClass::OnlyPositive,
            (false, true) => AgentClass::OnlyNegative,
            (true, true) => AgentClass::Helpable,
        }
    }
}

/// Unweighted bipartite graph between `n` agents and `m` labeled targets.
///
/// Adjacency is stored agent to targets, strictly increasing per agent. The
/// reverse index (target to agents) is built on first use.
#[derive(Debug, Clone)]
pub struct BipartiteGraph {
    labels: Vec<Label>,
    adjacency: Vec<Vec<usize>>,
    groups: Option<Vec<usize>>,
    pos_degree: Vec<usize>,
    reverse: OnceLock<Vec<Vec<usize>>>,
}

impl PartialEq for BipartiteGraph {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
            && self.adjacency == other.adjacency
            && self.groups == other.groups
    }
}

impl BipartiteGraph {
    /// Builds and validates a graph.
    pub fn new(
        labels: Vec<Label>,
        adjacency: Vec<Vec<usize>>,
        groups: Option<Vec<usize>>,
    ) -> Result<Self> {
        let pos_degree = adjacency
            .iter()
            .map(|nbrs| {
                nbrs.iter()
                    .filter(|&&t| labels.get(t).is_some_and(|l| l.is_positive()))
                    .count()
            })
            .collect();
        let g = BipartiteGraph {
            labels,
            adjacency,
            groups,
            pos_degree,
            reverse: OnceLock::new(),
        };
        g.validate()?;
        Ok(g)
    }

    /// Checks every structural invariant.
    pub fn validate(&self) -> Result<()> {
        let m = self.labels.len();
        for (agent, nbrs) in self.adjacency.iter().enumerate() {
            for w in nbrs.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::InvalidAdjacency {
                        agent,
                        reason: format!("neighbors {} and {} not strictly increasing", w[0], w[1]),
                    });
                }
            }
            if let Some(&t) = nbrs.iter().find(|&&t| t >= m) {
                return Err(Error::InvalidAdjacency {
                    agent,
                    reason: format!("target {t} out of range (m = {m})"),
                });
            }
        }
        if let Some(groups) = &self.groups {
            if groups.len() != self.adjacency.len() {
                return Err(Error::BadGroupId(format!(
                    "{} group ids for {} agents",
                    groups.len(),
                    self.adjacency.len()
                )));
            }
        }
        Ok(())
    }

    pub fn num_agents(&self) -> usize {
        self.adjacency.len()
    }

    pub fn num_targets(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, target: usize) -> Label {
        self.labels[target]
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    pub fn neighbors(&self, agent: usize) -> &[usize] {
        &self.adjacency[agent]
    }

    pub fn groups(&self) -> Option<&[usize]> {
        self.groups.as_deref()
    }

    /// Number of groups `w` (largest id plus one), or 0 without groups.
    pub fn num_groups(&self) -> usize {
        self.groups
            .as_ref()
            .map(|g| g.iter().max().map_or(0, |&x| x + 1))
            .unwrap_or(0)
    }

    pub fn group_of(&self, agent: usize) -> Option<usize> {
        self.groups.as_ref().map(|g| g[agent])
    }

    /// Agents whose group id equals `group`.
    pub fn group_members(&self, group: usize) -> Result<Vec<usize>> {
        let groups = self.groups.as_ref().ok_or(Error::NoGroups)?;
        Ok((0..groups.len()).filter(|&x| groups[x] == group).collect())
    }

    /// Same graph with a different (or no) group assignment.
    pub fn with_groups(&self, groups: Option<Vec<usize>>) -> Result<Self> {
        BipartiteGraph::new(self.labels.clone(), self.adjacency.clone(), groups)
    }

    /// Agents adjacent to `target` (reverse neighborhood), ascending.
    pub fn agents_of(&self, target: usize) -> &[usize] {
        &self.reverse()[target]
    }

    fn reverse(&self) -> &Vec<Vec<usize>> {
        self.reverse.get_or_init(|| {
            let mut rev = vec![Vec::new(); self.labels.len()];
            for (x, nbrs) in self.adjacency.iter().enumerate() {
                for &t in nbrs {
                    rev[t].push(x);
                }
            }
            rev
        })
    }

    pub fn degrees(&self, agent: usize) -> Result<AgentDegrees> {
        let n = self.num_agents();
        if agent >= n {
            return Err(Error::IndexOutOfRange { what: "agent", index: agent, len: n });
        }
        Ok(self.degrees_unchecked(agent))
    }

    pub(crate) fn degrees_unchecked(&self, agent: usize) -> AgentDegrees {
        let pos = self.pos_degree[agent];
        AgentDegrees { pos, neg: self.adjacency[agent].len() - pos }
    }

    pub fn class(&self, agent: usize) -> Result<AgentClass> {
        Ok(self.degrees(agent)?.class())
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// True iff every agent has at most `c` negative neighbors.
    pub fn is_c_bounded(&self, c: usize) -> bool {
        (0..self.num_agents()).all(|x| self.degrees_unchecked(x).neg <= c)
    }

    /// Smallest `c` for which the graph is c-bounded (at least 1).
    pub fn negative_bound(&self) -> usize {
        (0..self.num_agents())
            .map(|x| self.degrees_unchecked(x).neg)
            .max()
            .unwrap_or(0)
            .max(1)
    }

    pub fn positive_targets(&self) -> Vec<usize> {
        (0..self.num_targets()).filter(|&t| self.labels[t].is_positive()).collect()
    }

    pub fn negative_targets(&self) -> Vec<usize> {
        (0..self.num_targets()).filter(|&t| !self.labels[t].is_positive()).collect()
    }

    /// Subgraph on the given agents (in the given order), keeping every target
    /// and its label. Group ids carry over.
    pub fn induced_by_agents(&self, agents: &[usize]) -> Result<Self> {
        let n = self.num_agents();
        if let Some(&x) = agents.iter().find(|&&x| x >= n) {
            return Err(Error::IndexOutOfRange { what: "agent", index: x, len: n });
        }
        let adjacency = agents.iter().map(|&x| self.adjacency[x].clone()).collect();
        let groups = self.groups.as_ref().map(|g| agents.iter().map(|&x| g[x]).collect());
        BipartiteGraph::new(self.labels.clone(), adjacency, groups)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GraphJson::from(self)).expect("graph serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: GraphJson = serde_json::from_str(s)?;
        raw.try_into()
    }
}

/// Wire format: `{n, m, labels:[±1...], adjacency:[[...],...], groups?:[...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub n: usize,
    pub m: usize,
    pub labels: Vec<i64>,
    pub adjacency: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groups: Option<Vec<usize>>,
}

impl From<&BipartiteGraph> for GraphJson {
    fn from(g: &BipartiteGraph) -> Self {
        GraphJson {
            n: g.num_agents(),
            m: g.num_targets(),
            labels: g.labels.iter().map(|l| l.sign() as i64).collect(),
            adjacency: g.adjacency.clone(),
            groups: g.groups.clone(),
        }
    }
}

impl TryFrom<GraphJson> for BipartiteGraph {
    type Error = Error;

    fn try_from(raw: GraphJson) -> Result<Self> {
        if raw.labels.len() != raw.m {
            return Err(Error::MissingLabel { expected: raw.m, found: raw.labels.len() });
        }
        if raw.adjacency.len() != raw.n {
            return Err(Error::InvalidAdjacency {
                agent: raw.adjacency.len().min(raw.n),
                reason: format!("{} adjacency lists for n = {}", raw.adjacency.len(), raw.n),
            });
        }
        let labels = raw
            .labels
            .iter()
            .enumerate()
            .map(|(t, &s)| {
                Label::from_sign(s).ok_or_else(|| {
                    Error::Data(format!("label of target {t} must be +1 or -1, found {s}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        BipartiteGraph::new(labels, raw.adjacency, raw.groups)
    }
}
