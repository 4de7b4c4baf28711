mod common;

use common::{int, r};
use disclose::graphgen::{make_fixture, FixtureSpec};
use disclose::reveal::{
    bruteforce_reveal, greedy_reveal, heuristic_reveal, interactive_heuristic_reveal, lookahead_reveal,
    proxy_greedy_reveal, random_reveal, Inner,
};
use disclose::welfare::{empty_welfare, social_welfare};
use disclose::{CandidateMode, Error, Exact, MassKind, RevealResult, RevealSet};
use proptest::prelude::*;

fn greedy(g: &disclose::BipartiteGraph, mode: CandidateMode, k: usize) -> RevealResult<Exact> {
    greedy_reveal(g, mode, k, &RevealSet::new(), MassKind::True).unwrap()
}

/// Every algorithm at budget `k` on `g`.
fn all_results(g: &disclose::BipartiteGraph, k: usize, seed: u64) -> Vec<(&'static str, RevealResult<Exact>)> {
    let mut out = vec![
        ("greedy", greedy(g, CandidateMode::Both, k)),
        ("greedy+", greedy(g, CandidateMode::PositiveOnly, k)),
        ("greedy-", greedy(g, CandidateMode::NegativeOnly, k)),
        ("proxy", proxy_greedy_reveal(g, k).unwrap()),
        ("bruteforce", bruteforce_reveal(g, CandidateMode::Both, k).unwrap()),
        ("heuristic", heuristic_reveal(g, k, Inner::Greedy, seed).unwrap()),
        ("heuristic-random", heuristic_reveal(g, k, Inner::Random, seed).unwrap()),
        ("interactive", interactive_heuristic_reveal(g, k).unwrap()),
        ("random", random_reveal(g, CandidateMode::Both, k, seed).unwrap()),
    ];
    if k >= 2 {
        out.push(("lookahead2", lookahead_reveal(g, CandidateMode::Both, k, 2).unwrap()));
    }
    out
}

#[test]
fn tie_family_needs_depth_two() {
    let g = make_fixture(&FixtureSpec::FamTie(3)).unwrap();
    let deep = lookahead_reveal::<Exact>(&g, CandidateMode::Both, 3, 2).unwrap();
    assert_eq!(deep.welfare, int(9));
    assert!(deep.solution.sorted().iter().all(|&t| !g.label(t).is_positive()));
    let shallow = lookahead_reveal::<Exact>(&g, CandidateMode::Both, 3, 1).unwrap();
    assert_eq!(shallow.welfare, r(9, 2));
}

#[test]
fn exponential_family_needs_full_depth() {
    let g = make_fixture(&FixtureSpec::FamExp(7)).unwrap();
    let full = lookahead_reveal::<Exact>(&g, CandidateMode::Both, 8, 8).unwrap();
    let opt = bruteforce_reveal::<Exact>(&g, CandidateMode::Both, 8).unwrap();
    assert_eq!(full.welfare, opt.welfare);
    assert_eq!(full.welfare, int(16));
    let shallow = lookahead_reveal::<Exact>(&g, CandidateMode::Both, 8, 1).unwrap();
    assert_eq!(shallow.welfare, r(80, 9));
    assert!(shallow.solution.sorted().iter().all(|&t| g.label(t).is_positive()));
}

#[test]
fn lookahead_depth_one_is_greedy() {
    for spec in [FixtureSpec::Fig2, FixtureSpec::FamPosNeg(4), FixtureSpec::FamTie(3), FixtureSpec::Tab7] {
        let g = make_fixture(&spec).unwrap();
        for k in 1..=4 {
            let a = lookahead_reveal::<Exact>(&g, CandidateMode::Both, k, 1).unwrap();
            assert_eq!(a.solution, greedy(&g, CandidateMode::Both, k).solution, "{spec} K={k}");
        }
    }
}

#[test]
fn lookahead_rejects_bad_depths() {
    let g = make_fixture(&FixtureSpec::Fig2).unwrap();
    assert!(matches!(lookahead_reveal::<Exact>(&g, CandidateMode::Both, 2, 0), Err(Error::DepthOutOfRange { .. })));
    assert!(matches!(lookahead_reveal::<Exact>(&g, CandidateMode::Both, 2, 3), Err(Error::DepthOutOfRange { .. })));
}

/// On the positive/negative family the proxy objective prefers positives
/// throughout: a positive adds 4/5 proxy welfare, a negative 9/20.
#[test]
fn proxy_greedy_on_posneg_family() {
    let g = make_fixture(&FixtureSpec::FamPosNeg(3)).unwrap();
    let run = proxy_greedy_reveal::<Exact>(&g, 4).unwrap();
    assert_eq!(run.solution.order(), &[0, 1, 2, 3]);
    assert_eq!(run.welfare, int(5));
    assert_eq!(bruteforce_reveal::<Exact>(&g, CandidateMode::Both, 4).unwrap().welfare, int(9));
}

#[test]
fn greedy_on_fig2_negatives() {
    let g = make_fixture(&FixtureSpec::Fig2).unwrap();
    let run = greedy(&g, CandidateMode::NegativeOnly, 2);
    assert_eq!(run.solution.sorted(), vec![4, 5]);
    assert_eq!(run.welfare, int(4));
    assert_eq!(run.trace.iter().map(|s| s.gain).collect::<Vec<_>>(), vec![r(2, 3), int(2)]);
}

#[test]
fn zero_budget_keeps_empty_welfare() {
    let g = make_fixture(&FixtureSpec::Tab7).unwrap();
    let base = empty_welfare::<Exact>(&g);
    for (name, res) in all_results(&g, 0, 1) {
        assert!(res.solution.is_empty(), "{name}");
        assert_eq!(res.welfare, base, "{name}");
    }
}

#[test]
fn random_heuristic_is_seeded() {
    let g = make_fixture(&FixtureSpec::Tab7).unwrap();
    let a = heuristic_reveal::<Exact>(&g, 3, Inner::Random, 42).unwrap();
    assert_eq!(a, heuristic_reveal::<Exact>(&g, 3, Inner::Random, 42).unwrap());
    let b = random_reveal::<Exact>(&g, CandidateMode::Both, 3, 42).unwrap();
    assert_eq!(b, random_reveal::<Exact>(&g, CandidateMode::Both, 3, 42).unwrap());
}

#[test]
fn float_and_exact_greedy_agree_on_fixtures() {
    for spec in [FixtureSpec::Fig2, FixtureSpec::FamPosNeg(5), FixtureSpec::FamExp(8), FixtureSpec::Tab7] {
        let g = make_fixture(&spec).unwrap();
        let k = spec.natural_budget().unwrap_or(3);
        let e = greedy(&g, CandidateMode::Both, k);
        let f = greedy_reveal::<f64>(&g, CandidateMode::Both, k, &RevealSet::new(), MassKind::True).unwrap();
        assert_eq!(e.solution, f.solution, "{spec}");
        assert!((disclose::Scalar::to_f64(&e.welfare) - f.welfare).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn results_respect_budget_and_reevaluate(g in common::arb_graph(6, 7), k in 0usize..4, seed in any::<u64>()) {
        for (name, res) in all_results(&g, k, seed) {
            prop_assert!(res.solution.len() <= k, "{}", name);
            let f = social_welfare::<Exact>(&g, &res.solution, MassKind::True).unwrap();
            let fp = social_welfare::<Exact>(&g, &res.solution, MassKind::Proxy).unwrap();
            prop_assert_eq!(&res.welfare, &f, "{}", name);
            prop_assert_eq!(&res.proxy_welfare, &fp, "{}", name);
            let traced = res.trace.iter().fold(empty_welfare::<Exact>(&g), |a, s| a + s.gain);
            prop_assert_eq!(traced, f, "{}", name);
        }
    }

    #[test]
    fn bruteforce_dominates(g in common::arb_graph(6, 7), k in 0usize..4, seed in any::<u64>()) {
        let opt = bruteforce_reveal::<Exact>(&g, CandidateMode::Both, k).unwrap().welfare;
        for (name, res) in all_results(&g, k, seed) {
            prop_assert!(res.welfare <= opt, "{}", name);
        }
    }

    #[test]
    fn positive_greedy_guarantee(g in common::arb_graph(6, 8), k in 1usize..5) {
        let base = empty_welfare::<Exact>(&g);
        let gr = greedy(&g, CandidateMode::PositiveOnly, k).welfare - base;
        let opt = bruteforce_reveal::<Exact>(&g, CandidateMode::PositiveOnly, k).unwrap().welfare - base;
        prop_assert!(gr >= common::one_minus_inv_e() * opt);
    }

    #[test]
    fn proxy_greedy_guarantee(seed in any::<u64>(), c in 1usize..=3, k in 1usize..4) {
        let g = common::random_c_bounded(&mut common::rng(seed), 6, 8, c);
        let base = empty_welfare::<Exact>(&g);
        let gain = proxy_greedy_reveal::<Exact>(&g, k).unwrap().welfare - base;
        let opt = bruteforce_reveal::<Exact>(&g, CandidateMode::Both, k).unwrap().welfare - base;
        prop_assert!(gain * int(c as i128) >= common::one_minus_inv_e() * opt);
    }

    /// With at most `c` negatives per agent, any set (even an empty one)
    /// keeps a `1/(c+1)` share of the optimum.
    #[test]
    fn c_bounded_floor(seed in any::<u64>(), c in 1usize..=3, k in 0usize..4) {
        let g = common::random_c_bounded(&mut common::rng(seed), 6, 8, c);
        let opt = bruteforce_reveal::<Exact>(&g, CandidateMode::Both, k).unwrap().welfare;
        for (name, res) in all_results(&g, k, seed) {
            prop_assert!(res.welfare * int(c as i128 + 1) >= opt, "{}", name);
        }
    }

    #[test]
    fn greedy_prefixes_nest(g in common::arb_graph(6, 7), k in 1usize..5) {
        let small = greedy(&g, CandidateMode::Both, k - 1);
        let big = greedy(&g, CandidateMode::Both, k);
        prop_assert!(big.solution.order().starts_with(small.solution.order()));
    }
}
