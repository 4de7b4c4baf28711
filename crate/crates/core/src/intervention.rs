//! Targeted interventions: directly connecting the lowest-mass agents to a
//! positive target, either before or after a greedy reveal.

use std::cmp::Ordering;

use crate::error::Result;
use crate::graph::BipartiteGraph;
use crate::reveal::{greedy_reveal, CandidateMode, RevealResult};
use crate::welfare::{MassKind, RevealSet, Scalar, WelfareState};

#[derive(Debug, Clone, PartialEq)]
pub struct InterventionResult<W> {
    pub revealed: RevealSet,
    /// Intervened agents, ascending by mass then index.
    pub intervened_agents: Vec<usize>,
    pub total_welfare: W,
    /// `F(S_g)` of plain greedy on the full graph.
    pub baseline_welfare: W,
    pub gain: W,
}

fn greedy<W: Scalar>(graph: &BipartiteGraph, budget: usize) -> Result<RevealResult<W>> {
    greedy_reveal(graph, CandidateMode::Both, budget, &RevealSet::new(), MassKind::True)
}

/// The `B′` agents of smallest mass, where `B′ = min(B, #{mass < 1})`, or none
/// if the graph has no positive target to connect them to.
pub fn high_risk_agents<W: Scalar>(graph: &BipartiteGraph, masses: &[W], budget: usize) -> Vec<usize> {
    if graph.positive_targets().is_empty() {
        return Vec::new();
    }
    let mut order: Vec<usize> = (0..masses.len()).filter(|&x| masses[x] < W::one()).collect();
    order.sort_by(|&a, &b| masses[a].partial_cmp(&masses[b]).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
    order.truncate(budget);
    order
}

fn masses_after<W: Scalar>(graph: &BipartiteGraph, set: &RevealSet) -> Result<Vec<W>> {
    let state = WelfareState::<W>::from_set(graph, MassKind::True, set)?;
    Ok((0..graph.num_agents()).map(|x| state.agent_mass(x).clone()).collect())
}

/// Intervenes on the lowest-mass agents under no reveal, then runs greedy on
/// the remaining agents. Intervened agents count with mass 1.
pub fn pre_reveal_intervention<W: Scalar>(
    graph: &BipartiteGraph,
    budget: usize,
    interventions: usize,
) -> Result<InterventionResult<W>> {
    let baseline = greedy::<W>(graph, budget)?.welfare;
    let chosen = high_risk_agents(graph, &masses_after::<W>(graph, &RevealSet::new())?, interventions);
    let mut removed = vec![false; graph.num_agents()];
    for &x in &chosen {
        removed[x] = true;
    }
    let rest: Vec<usize> = (0..graph.num_agents()).filter(|&x| !removed[x]).collect();
    let reduced = graph.induced_by_agents(&rest)?;
    let run = greedy::<W>(&reduced, budget)?;
    let total = run.welfare + W::from_count(chosen.len());
    Ok(InterventionResult {
        revealed: run.solution,
        intervened_agents: chosen,
        gain: total.clone() - baseline.clone(),
        total_welfare: total,
        baseline_welfare: baseline,
    })
}

/// Runs greedy on the full graph, then lifts the lowest-mass agents to 1.
pub fn post_reveal_intervention<W: Scalar>(
    graph: &BipartiteGraph,
    budget: usize,
    interventions: usize,
) -> Result<InterventionResult<W>> {
    let run = greedy::<W>(graph, budget)?;
    let masses = masses_after::<W>(graph, &run.solution)?;
    let chosen = high_risk_agents(graph, &masses, interventions);
    let lift = chosen.iter().fold(W::zero(), |acc, &x| acc + (W::one() - masses[x].clone()));
    let total = run.welfare.clone() + lift;
    Ok(InterventionResult {
        revealed: run.solution,
        intervened_agents: chosen,
        gain: total.clone() - run.welfare.clone(),
        total_welfare: total,
        baseline_welfare: run.welfare,
    })
}

/// `(F(S_ig) − F(S_g), F(S_gi) − F(S_g))` against plain greedy on the full graph.
pub fn intervention_gains<W: Scalar>(graph: &BipartiteGraph, budget: usize, interventions: usize) -> Result<(W, W)> {
    let pre = pre_reveal_intervention::<W>(graph, budget, interventions)?;
    let post = post_reveal_intervention::<W>(graph, budget, interventions)?;
    Ok((pre.gain, post.gain))
}
