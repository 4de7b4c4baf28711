//! Budgeted target-reveal algorithms.
//!
//! Every algorithm breaks ties by smallest target index. Exhaustive searches
//! additionally prefer smaller sets at equal welfare, then the lexicographically
//! smallest sorted set, so `lookahead_reveal` with `d = K` returns exactly the
//! `bruteforce_reveal` solution.

use std::cmp::Ordering;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Label};
use crate::par;
use crate::welfare::{ensure_representable, welfare_of_mask, MassKind, RevealSet, Scalar, WelfareState};

/// Upper bound on subsets an exhaustive search may visit.
pub const SEARCH_LIMIT: u128 = 10_000_000;

// Searches smaller than this stay on the calling thread.
const PAR_SUBSETS: u128 = 4096;

/// Which targets an algorithm may reveal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateMode {
    PositiveOnly,
    NegativeOnly,
    Both,
}

impl CandidateMode {
    pub fn admits(self, label: Label) -> bool {
        match self {
            CandidateMode::PositiveOnly => label == Label::Positive,
            CandidateMode::NegativeOnly => label == Label::Negative,
            CandidateMode::Both => true,
        }
    }

    /// Admitted targets in ascending index order.
    pub fn candidates(self, graph: &BipartiteGraph) -> Vec<usize> {
        (0..graph.num_targets()).filter(|&t| self.admits(graph.label(t))).collect()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CandidateMode::PositiveOnly => "positive",
            CandidateMode::NegativeOnly => "negative",
            CandidateMode::Both => "both",
        }
    }
}

impl std::str::FromStr for CandidateMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "positive" | "pos" | "+" => Ok(CandidateMode::PositiveOnly),
            "negative" | "neg" | "-" => Ok(CandidateMode::NegativeOnly),
            "both" | "all" => Ok(CandidateMode::Both),
            _ => Err(Error::InvalidArgument(format!("unknown candidate mode `{s}`"))),
        }
    }
}

/// One reveal and the true welfare it added at that point.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep<W> {
    pub target: usize,
    pub gain: W,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RevealResult<W> {
    pub solution: RevealSet,
    /// True welfare `F(solution)`, whatever objective drove the search.
    pub welfare: W,
    pub proxy_welfare: W,
    /// True marginal gains along `solution.order()`.
    pub trace: Vec<TraceStep<W>>,
}

impl<W: Scalar> RevealResult<W> {
    /// Evaluates `solution` from scratch.
    pub fn evaluate(graph: &BipartiteGraph, solution: RevealSet) -> Result<Self> {
        solution.validate(graph.num_targets())?;
        let mut state = WelfareState::<W>::new(graph, MassKind::True);
        let mut trace = Vec::with_capacity(solution.len());
        for &t in solution.order() {
            let gain = state.reveal(t)?;
            trace.push(TraceStep { target: t, gain });
        }
        let mask = solution.mask(graph.num_targets());
        Ok(RevealResult {
            welfare: welfare_of_mask(graph, &mask, MassKind::True),
            proxy_welfare: welfare_of_mask(graph, &mask, MassKind::Proxy),
            solution,
            trace,
        })
    }
}

/// Index of the best gain, first on ties.
fn argmax<W: Scalar>(gains: &[W]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, g) in gains.iter().enumerate() {
        match best {
            Some(b) if g.tol_cmp(&gains[b]) != Ordering::Greater => {}
            _ => best = Some(i),
        }
    }
    best
}

/// Runs greedy additions on `state`, at most `budget` of them, over `candidates`.
pub(crate) fn greedy_extend<W: Scalar>(state: &mut WelfareState<'_, W>, candidates: &[usize], budget: usize) {
    for _ in 0..budget {
        let open: Vec<usize> = candidates.iter().copied().filter(|&t| !state.is_revealed(t)).collect();
        let gains = {
            let s = &*state;
            par::map_large(&open, |&t| s.gain(t))
        };
        let Some(i) = argmax(&gains) else { break };
        if !gains[i].is_positive() {
            break;
        }
        state.reveal(open[i]).expect("candidate is unrevealed");
    }
}

/// Classic greedy: repeatedly reveals the candidate with the largest marginal
/// gain under `objective`, adding at most `budget` targets to `initial` and
/// stopping early once no candidate gains anything.
pub fn greedy_reveal<W: Scalar>(
    graph: &BipartiteGraph,
    mode: CandidateMode,
    budget: usize,
    initial: &RevealSet,
    objective: MassKind,
) -> Result<RevealResult<W>> {
    ensure_representable::<W>(graph)?;
    let mut state = WelfareState::<W>::from_set(graph, objective, initial)?;
    greedy_extend(&mut state, &mode.candidates(graph), budget);
    RevealResult::evaluate(graph, state.to_reveal_set())
}

/// Greedy on the proxy objective over all targets.
pub fn proxy_greedy_reveal<W: Scalar>(graph: &BipartiteGraph, budget: usize) -> Result<RevealResult<W>> {
    greedy_reveal(graph, CandidateMode::Both, budget, &RevealSet::new(), MassKind::Proxy)
}

/// Number of subsets of size `1..=max_size` drawn from `n` items, saturating.
pub fn subset_count(n: usize, max_size: usize) -> u128 {
    let mut total: u128 = 0;
    let mut c: u128 = 1;
    for j in 1..=max_size.min(n) {
        c = c.saturating_mul((n + 1 - j) as u128) / j as u128;
        total = total.saturating_add(c);
    }
    total
}

fn check_search(n: usize, max_size: usize) -> Result<()> {
    let subsets = subset_count(n, max_size) + 1;
    if subsets > SEARCH_LIMIT {
        Err(Error::SearchSpaceTooLarge { subsets, limit: SEARCH_LIMIT })
    } else {
        Ok(())
    }
}

struct Best<W> {
    gain: W,
    set: Vec<usize>,
}

impl<W: Scalar> Best<W> {
    /// Higher gain, then fewer targets, then lexicographically smaller.
    fn beats(&self, other: &Best<W>) -> bool {
        match self.gain.tol_cmp(&other.gain) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => match self.set.len().cmp(&other.set.len()) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => self.set < other.set,
            },
        }
    }
}

// Depth-first over combinations in lexicographic order. Because a prefix is
// visited before its extensions, the first set seen at a given (gain, size)
// is the lexicographically smallest one, so only strict improvements replace.
fn dfs<W: Scalar>(
    state: &mut WelfareState<'_, W>,
    base: &W,
    candidates: &[usize],
    start: usize,
    max_size: usize,
    path: &mut Vec<usize>,
    best: &mut Best<W>,
) {
    let gain = state.total().clone() - base.clone();
    match gain.tol_cmp(&best.gain) {
        Ordering::Greater => {
            *best = Best { gain, set: path.clone() };
        }
        Ordering::Equal if path.len() < best.set.len() => {
            *best = Best { gain, set: path.clone() };
        }
        _ => {}
    }
    if path.len() == max_size {
        return;
    }
    for i in start..candidates.len() {
        let t = candidates[i];
        state.reveal(t).expect("candidate is unrevealed");
        path.push(t);
        dfs(state, base, candidates, i + 1, max_size, path, best);
        path.pop();
        state.undo();
    }
}

/// Best extension of `state` by at most `max_size` of `candidates` (which
/// must be unrevealed and ascending). The empty extension competes with gain 0.
pub(crate) fn best_extension<W: Scalar>(
    state: &WelfareState<'_, W>,
    candidates: &[usize],
    max_size: usize,
) -> Result<(Vec<usize>, W)> {
    check_search(candidates.len(), max_size)?;
    let base = state.total().clone();
    let empty = Best { gain: W::zero(), set: Vec::new() };
    if max_size == 0 || candidates.is_empty() {
        return Ok((empty.set, empty.gain));
    }
    let firsts: Vec<usize> = (0..candidates.len()).collect();
    let large = subset_count(candidates.len(), max_size) >= PAR_SUBSETS;
    let branches = par::map_if(large, &firsts, |&i| {
        let mut local = state.clone();
        let t = candidates[i];
        local.reveal(t).expect("candidate is unrevealed");
        let mut path = vec![t];
        let mut best = Best { gain: local.total().clone() - base.clone(), set: path.clone() };
        dfs(&mut local, &base, candidates, i + 1, max_size, &mut path, &mut best);
        best
    });
    let mut best = empty;
    for b in branches {
        if b.beats(&best) {
            best = b;
        }
    }
    Ok((best.set, best.gain))
}

/// Exhaustive search over all candidate subsets of size at most `budget`.
pub fn bruteforce_reveal<W: Scalar>(
    graph: &BipartiteGraph,
    mode: CandidateMode,
    budget: usize,
) -> Result<RevealResult<W>> {
    ensure_representable::<W>(graph)?;
    let candidates = mode.candidates(graph);
    let state = WelfareState::<W>::new(graph, MassKind::True);
    let (set, _) = best_extension(&state, &candidates, budget)?;
    RevealResult::evaluate(graph, RevealSet::from_targets(set)?)
}

/// d-step lookahead: each round reveals the best subset of at most
/// `min(d, remaining budget)` candidates, stopping when it gains nothing.
pub fn lookahead_reveal<W: Scalar>(
    graph: &BipartiteGraph,
    mode: CandidateMode,
    budget: usize,
    depth: usize,
) -> Result<RevealResult<W>> {
    if depth == 0 || depth > budget.max(1) {
        return Err(Error::DepthOutOfRange { depth, budget });
    }
    ensure_representable::<W>(graph)?;
    let candidates = mode.candidates(graph);
    let mut state = WelfareState::<W>::new(graph, MassKind::True);
    while state.len() < budget {
        let open: Vec<usize> = candidates.iter().copied().filter(|&t| !state.is_revealed(t)).collect();
        let (set, gain) = best_extension(&state, &open, depth.min(budget - state.len()))?;
        if set.is_empty() || !gain.is_positive() {
            break;
        }
        for t in set {
            state.reveal(t)?;
        }
    }
    RevealResult::evaluate(graph, state.to_reveal_set())
}

/// Inner routine for the split heuristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Inner {
    Greedy,
    Random,
}

fn seeded(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn sample(candidates: &[usize], amount: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let amount = amount.min(candidates.len());
    rand::seq::index::sample(rng, candidates.len(), amount)
        .into_iter()
        .map(|i| candidates[i])
        .collect()
}

/// Greedy order over one mode; a budget-`b` greedy run is its length-`b` prefix.
fn greedy_order<W: Scalar>(graph: &BipartiteGraph, mode: CandidateMode, budget: usize) -> Vec<usize> {
    let mut state = WelfareState::<W>::new(graph, MassKind::True);
    greedy_extend(&mut state, &mode.candidates(graph), budget);
    state.revealed().to_vec()
}

fn is_large(graph: &BipartiteGraph) -> bool {
    graph.num_agents() * graph.num_targets() >= 4096
}

/// Picks the best result, earliest on ties.
fn best_of<W: Scalar>(results: Vec<RevealResult<W>>) -> RevealResult<W> {
    let mut best: Option<RevealResult<W>> = None;
    for r in results {
        match &best {
            Some(b) if r.welfare.tol_cmp(&b.welfare) != Ordering::Greater => {}
            _ => best = Some(r),
        }
    }
    best.expect("at least one split")
}

/// Split heuristic: for every `κ` in `0..=K`, spends `κ` on positives and
/// `K − κ` on negatives independently, keeping the best union.
pub fn heuristic_reveal<W: Scalar>(
    graph: &BipartiteGraph,
    budget: usize,
    inner: Inner,
    seed: u64,
) -> Result<RevealResult<W>> {
    ensure_representable::<W>(graph)?;
    let splits: Vec<usize> = (0..=budget).collect();
    let results = match inner {
        Inner::Greedy => {
            let pos = greedy_order::<W>(graph, CandidateMode::PositiveOnly, budget);
            let neg = greedy_order::<W>(graph, CandidateMode::NegativeOnly, budget);
            par::map_if(is_large(graph), &splits, |&k| {
                let set = pos[..k.min(pos.len())]
                    .iter()
                    .chain(&neg[..(budget - k).min(neg.len())])
                    .copied();
                RevealResult::evaluate(graph, set.collect())
            })
        }
        Inner::Random => {
            let pos = CandidateMode::PositiveOnly.candidates(graph);
            let neg = CandidateMode::NegativeOnly.candidates(graph);
            par::map_if(is_large(graph), &splits, |&k| {
                let mut rng = seeded(seed, k as u64);
                let mut set = sample(&pos, k, &mut rng);
                set.extend(sample(&neg, budget - k, &mut rng));
                RevealResult::evaluate(graph, set.into_iter().collect())
            })
        }
    };
    Ok(best_of(results.into_iter().collect::<Result<Vec<_>>>()?))
}

/// Interactive split heuristic: for every `κ`, the second greedy run starts
/// from the first run's set. Both orders are tried; the negatives-second
/// winner is kept only when strictly better.
pub fn interactive_heuristic_reveal<W: Scalar>(graph: &BipartiteGraph, budget: usize) -> Result<RevealResult<W>> {
    ensure_representable::<W>(graph)?;
    let pos_candidates = CandidateMode::PositiveOnly.candidates(graph);
    let neg_candidates = CandidateMode::NegativeOnly.candidates(graph);
    let pos = greedy_order::<W>(graph, CandidateMode::PositiveOnly, budget);
    let neg = greedy_order::<W>(graph, CandidateMode::NegativeOnly, budget);
    let splits: Vec<usize> = (0..=budget).collect();
    let run = |first: &[usize], second: &[usize], k: usize| {
        let initial: RevealSet = first[..k.min(first.len())].iter().copied().collect();
        let mut state = WelfareState::<W>::from_set(graph, MassKind::True, &initial)?;
        greedy_extend(&mut state, second, budget - k);
        RevealResult::<W>::evaluate(graph, state.to_reveal_set())
    };
    let plus = par::map_if(is_large(graph), &splits, |&k| run(&neg, &pos_candidates, k));
    let minus = par::map_if(is_large(graph), &splits, |&k| run(&pos, &neg_candidates, k));
    let plus = best_of(plus.into_iter().collect::<Result<Vec<_>>>()?);
    let minus = best_of(minus.into_iter().collect::<Result<Vec<_>>>()?);
    Ok(if minus.welfare.tol_cmp(&plus.welfare) == Ordering::Greater { minus } else { plus })
}

/// Uniform sample of `min(K, |candidates|)` targets without replacement.
pub fn random_reveal<W: Scalar>(
    graph: &BipartiteGraph,
    mode: CandidateMode,
    budget: usize,
    seed: u64,
) -> Result<RevealResult<W>> {
    ensure_representable::<W>(graph)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let set = sample(&mode.candidates(graph), budget, &mut rng);
    RevealResult::evaluate(graph, set.into_iter().collect())
}
