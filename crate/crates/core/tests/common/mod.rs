#![allow(dead_code)]

use disclose::graph::Label::{self, Negative as N, Positive as P};
use disclose::welfare::{MassKind, WelfareState};
use disclose::{BipartiteGraph, Exact, Scalar};
use num_rational::Ratio;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn r(n: i128, d: i128) -> Exact {
    Ratio::new(n, d)
}

pub fn int(n: i128) -> Exact {
    Ratio::from_integer(n)
}

/// A rational just above `1 − 1/e`, so `x ≥ BOUND·y` implies the true bound.
pub fn one_minus_inv_e() -> Exact {
    Ratio::new(632_120_558_828_558, 1_000_000_000_000_000)
}

pub fn graph(labels: &[i8], adjacency: &[&[usize]]) -> BipartiteGraph {
    let labels = labels.iter().map(|&s| if s > 0 { P } else { N }).collect();
    BipartiteGraph::new(labels, adjacency.iter().map(|a| a.to_vec()).collect(), None).unwrap()
}

/// Whether every label vector is enumerated, or only positives-first ones
/// (enough whenever the property is invariant under target relabeling).
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Labelings {
    All,
    PositivesFirst,
}

/// Calls `f` on every bipartite graph with at most `max_n` agents and `max_m`
/// targets, up to agent order (neighborhoods form a multiset).
pub fn for_each_graph(max_n: usize, max_m: usize, labelings: Labelings, mut f: impl FnMut(&BipartiteGraph)) {
    for m in 0..=max_m {
        let subsets: Vec<Vec<usize>> =
            (0..1usize << m).map(|mask| (0..m).filter(|&t| mask >> t & 1 == 1).collect()).collect();
        let label_sets: Vec<Vec<Label>> = match labelings {
            Labelings::All => (0..1usize << m)
                .map(|mask| (0..m).map(|t| if mask >> t & 1 == 1 { P } else { N }).collect())
                .collect(),
            Labelings::PositivesFirst => (0..=m).map(|p| (0..m).map(|t| if t < p { P } else { N }).collect()).collect(),
        };
        for n in 0..=max_n {
            let mut choice = vec![0usize; n];
            loop {
                let adjacency: Vec<Vec<usize>> = choice.iter().map(|&c| subsets[c].clone()).collect();
                for labels in &label_sets {
                    f(&BipartiteGraph::new(labels.clone(), adjacency.clone(), None).unwrap());
                }
                match (0..n).rev().find(|&i| choice[i] + 1 < subsets.len()) {
                    Some(i) => {
                        let v = choice[i] + 1;
                        choice[i..].iter_mut().for_each(|c| *c = v);
                    }
                    None => break,
                }
            }
        }
    }
}

/// Welfare of every subset of `targets` (bit `i` of the index selects
/// `targets[i]`), computed by walking the subset lattice with one state.
pub fn subset_welfare<W: Scalar>(graph: &BipartiteGraph, kind: MassKind, targets: &[usize]) -> Vec<W> {
    fn walk<W: Scalar>(s: &mut WelfareState<'_, W>, targets: &[usize], i: usize, mask: usize, out: &mut [W]) {
        if i == targets.len() {
            out[mask] = s.total().clone();
            return;
        }
        walk(s, targets, i + 1, mask, out);
        s.reveal(targets[i]).unwrap();
        walk(s, targets, i + 1, mask | 1 << i, out);
        s.undo();
    }
    let mut state = WelfareState::<W>::new(graph, kind);
    let mut out = vec![W::zero(); 1 << targets.len()];
    walk(&mut state, targets, 0, 0, &mut out);
    out
}

/// Random graph with every agent holding at most `c` negative neighbors.
pub fn random_c_bounded(rng: &mut ChaCha8Rng, max_n: usize, max_m: usize, c: usize) -> BipartiteGraph {
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(1..=max_m);
    let labels: Vec<Label> = (0..m).map(|_| if rng.gen_bool(0.5) { P } else { N }).collect();
    let p = rng.gen_range(0.2..0.8);
    let adjacency = (0..n)
        .map(|_| {
            let mut negs = 0;
            (0..m)
                .filter(|&t| {
                    if !rng.gen_bool(p) {
                        return false;
                    }
                    if labels[t] == N {
                        negs += 1;
                        return negs <= c;
                    }
                    true
                })
                .collect()
        })
        .collect();
    BipartiteGraph::new(labels, adjacency, None).unwrap()
}

/// Random graph with `1..=max_n` agents and `1..=max_m` targets.
pub fn random_small(rng: &mut ChaCha8Rng, max_n: usize, max_m: usize) -> BipartiteGraph {
    random_c_bounded(rng, max_n, max_m, usize::MAX)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Proptest strategy over small graphs.
pub fn arb_graph(max_n: usize, max_m: usize) -> impl Strategy<Value = BipartiteGraph> {
    (1..=max_m).prop_flat_map(move |m| {
        (
            proptest::collection::vec(any::<bool>(), m),
            proptest::collection::vec(proptest::collection::vec(any::<bool>(), m), 0..=max_n),
        )
            .prop_map(|(labels, rows)| {
                let labels = labels.into_iter().map(|b| if b { P } else { N }).collect();
                let adjacency =
                    rows.into_iter().map(|row| (0..row.len()).filter(|&t| row[t]).collect()).collect();
                BipartiteGraph::new(labels, adjacency, None).unwrap()
            })
    })
}

/// A graph together with a subset of its targets, as a membership mask.
pub fn arb_graph_and_set(max_n: usize, max_m: usize) -> impl Strategy<Value = (BipartiteGraph, Vec<bool>)> {
    arb_graph(max_n, max_m).prop_flat_map(|g| {
        let m = g.num_targets();
        (Just(g), proptest::collection::vec(any::<bool>(), m))
    })
}

pub fn set_of(mask: &[bool]) -> disclose::RevealSet {
    (0..mask.len()).filter(|&t| mask[t]).collect()
}
