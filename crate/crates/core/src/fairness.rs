//! Group-aware reveal: per-group gains and optima, even budget splits, and a
//! greedy that breaks exact ties in favor of one group.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;
use crate::par;
use crate::reveal::{best_extension, greedy_reveal, CandidateMode, RevealResult};
use crate::welfare::{ensure_representable, MassKind, RevealSet, Scalar, WelfareState};

fn members(graph: &BipartiteGraph, group: usize) -> Result<Vec<usize>> {
    let w = graph.num_groups();
    let members = graph.group_members(group)?;
    if group >= w {
        return Err(Error::IndexOutOfRange { what: "group", index: group, len: w });
    }
    Ok(members)
}

/// Welfare gain of `set` summed over the agents of `group` only.
pub fn group_gain<W: Scalar>(graph: &BipartiteGraph, set: &RevealSet, group: usize) -> Result<W> {
    let agents = members(graph, group)?;
    let mut state = WelfareState::<W>::scoped(graph, MassKind::True, &agents)?;
    let base = state.total().clone();
    set.validate(graph.num_targets())?;
    for &t in set.order() {
        state.reveal(t)?;
    }
    Ok(state.total().clone() - base)
}

/// Best gain group `group` can receive from at most `k` revealed candidates.
pub fn group_opt<W: Scalar>(graph: &BipartiteGraph, group: usize, k: usize, mode: CandidateMode) -> Result<W> {
    ensure_representable::<W>(graph)?;
    let agents = members(graph, group)?;
    let state = WelfareState::<W>::scoped(graph, MassKind::True, &agents)?;
    Ok(best_extension(&state, &mode.candidates(graph), k)?.1)
}

/// Objective each group's own run optimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupAlgorithm {
    Greedy,
    ProxyGreedy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupOutcome<W> {
    pub group: usize,
    pub solution: RevealSet,
    pub gain: W,
    /// `OPT` for this group at some budget, when computed.
    pub opt_reference: Option<W>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupReport<W> {
    pub budget_per_group: usize,
    pub groups: Vec<GroupOutcome<W>>,
}

impl<W: Scalar> GroupReport<W> {
    /// Fills every group's reference optimum at budget `k` by exhaustive search.
    pub fn with_opt_reference(mut self, graph: &BipartiteGraph, k: usize, mode: CandidateMode) -> Result<Self> {
        for g in &mut self.groups {
            g.opt_reference = Some(group_opt(graph, g.group, k, mode)?);
        }
        Ok(self)
    }
}

/// Runs the chosen algorithm separately for each group, on the subgraph of
/// that group's agents (all targets kept), with budget `⌈K/w⌉` each.
pub fn per_group_reveal<W: Scalar>(
    graph: &BipartiteGraph,
    budget: usize,
    algorithm: GroupAlgorithm,
    mode: CandidateMode,
) -> Result<GroupReport<W>> {
    if graph.groups().is_none() {
        return Err(Error::NoGroups);
    }
    let w = graph.num_groups();
    if budget < w {
        return Err(Error::BudgetBelowGroupCount { budget, groups: w });
    }
    let per_group = budget.div_ceil(w);
    let objective = match algorithm {
        GroupAlgorithm::Greedy => MassKind::True,
        GroupAlgorithm::ProxyGreedy => MassKind::Proxy,
    };
    let ids: Vec<usize> = (0..w).collect();
    let groups = par::map(&ids, |&a| -> Result<GroupOutcome<W>> {
        let sub = graph.induced_by_agents(&graph.group_members(a)?)?;
        let run: RevealResult<W> = greedy_reveal(&sub, mode, per_group, &RevealSet::new(), objective)?;
        let gain = group_gain(graph, &run.solution, a)?;
        Ok(GroupOutcome { group: a, solution: run.solution, gain, opt_reference: None })
    });
    Ok(GroupReport { budget_per_group: per_group, groups: groups.into_iter().collect::<Result<_>>()? })
}

/// Greedy over all targets where exact ties in total marginal gain go to the
/// target helping `priority_group` most, then to the smallest index.
///
/// Ties are only meaningful in exact arithmetic, so float backends are refused.
pub fn prioritized_greedy<W: Scalar>(
    graph: &BipartiteGraph,
    budget: usize,
    priority_group: usize,
) -> Result<RevealResult<W>> {
    if !W::EXACT {
        return Err(Error::ExactArithmeticRequired);
    }
    ensure_representable::<W>(graph)?;
    members(graph, priority_group)?;
    let groups = graph.groups().ok_or(Error::NoGroups)?;
    let mut state = WelfareState::<W>::new(graph, MassKind::True);
    for _ in 0..budget {
        let open: Vec<usize> = (0..graph.num_targets()).filter(|&t| !state.is_revealed(t)).collect();
        let scored = {
            let s = &state;
            par::map_large(&open, |&t| (s.gain(t), s.gain_where(t, |x| groups[x] == priority_group)))
        };
        let mut best: Option<usize> = None;
        for (i, (total, prio)) in scored.iter().enumerate() {
            let better = match best {
                None => true,
                Some(b) => match total.tol_cmp(&scored[b].0) {
                    Ordering::Greater => true,
                    Ordering::Equal => prio.tol_cmp(&scored[b].1) == Ordering::Greater,
                    Ordering::Less => false,
                },
            };
            if better {
                best = Some(i);
            }
        }
        match best {
            Some(i) if scored[i].0.is_positive() => {
                state.reveal(open[i])?;
            }
            _ => break,
        }
    }
    RevealResult::evaluate(graph, state.to_reveal_set())
}
