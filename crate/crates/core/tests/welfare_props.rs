mod common;

use common::{int, r, Labelings};
use disclose::graphgen::{make_fixture, FixtureSpec};
use disclose::welfare::{marginal_gain, social_welfare, welfare_report, WelfareState};
use disclose::{BipartiteGraph, Exact, MassKind, RevealSet, Scalar};
use proptest::prelude::*;

/// Welfare from the closed-form mass, written out independently.
fn naive_welfare(g: &BipartiteGraph, set: &[bool], kind: MassKind) -> Exact {
    let mut total = int(0);
    for x in 0..g.num_agents() {
        let nb = g.neighbors(x);
        let n = nb.len() as i128;
        let pos = nb.iter().filter(|&&t| g.label(t).is_positive()).count() as i128;
        let hit_pos = nb.iter().any(|&t| set[t] && g.label(t).is_positive());
        let k = nb.iter().filter(|&&t| set[t] && !g.label(t).is_positive()).count() as i128;
        total += if hit_pos {
            int(1)
        } else if pos == 0 {
            int(0)
        } else {
            match kind {
                MassKind::True => r(pos, n - k),
                MassKind::Proxy if k == 0 => r(pos, n),
                MassKind::Proxy => r(pos, n - 1) * (int(1) + r(k - 1, n)),
            }
        };
    }
    total
}

#[test]
fn negatives_can_be_supermodular() {
    let g = make_fixture(&FixtureSpec::Fig2).unwrap();
    let empty = marginal_gain::<Exact>(&g, &RevealSet::new(), 5, MassKind::True).unwrap();
    let after = marginal_gain::<Exact>(&g, &RevealSet::from_targets([4]).unwrap(), 5, MassKind::True).unwrap();
    assert_eq!((empty, after), (r(2, 3), int(2)));
    assert!(empty < after);
}

#[test]
fn proxy_marginal_of_a_negative_is_constant_after_the_first() {
    let g = make_fixture(&FixtureSpec::Fig2).unwrap();
    let first = marginal_gain::<Exact>(&g, &RevealSet::new(), 5, MassKind::Proxy).unwrap();
    let second = marginal_gain::<Exact>(&g, &RevealSet::from_targets([4]).unwrap(), 5, MassKind::Proxy).unwrap();
    assert_eq!(first, second);
}

#[test]
fn report_matches_separate_evaluations() {
    let g = make_fixture(&FixtureSpec::Fig2).unwrap();
    let s = RevealSet::from_targets([4, 5]).unwrap();
    let rep = welfare_report::<Exact>(&g, &s).unwrap();
    assert_eq!((rep.welfare, rep.gain, rep.proxy_welfare, rep.proxy_gain), (int(4), r(8, 3), r(8, 3), r(4, 3)));
    assert_eq!(rep.masses, vec![int(1); 4]);
    assert_eq!(rep.proxy_masses, vec![r(2, 3); 4]);
}

/// Exhaustive over graphs with at most 4 agents and 5 targets: marginal gains
/// of positives shrink as more positives are revealed.
#[test]
fn positive_reveals_are_submodular_exhaustive() {
    let mut graphs = 0;
    common::for_each_graph(4, 5, Labelings::PositivesFirst, |g| {
        graphs += 1;
        let pos = g.positive_targets();
        let v = common::subset_welfare::<Exact>(g, MassKind::True, &pos);
        let p = pos.len();
        for b in 0usize..1 << p {
            let mut a = b;
            loop {
                for t in (0..p).filter(|&t| b >> t & 1 == 0) {
                    assert!(
                        v[a | 1 << t] - v[a] >= v[b | 1 << t] - v[b],
                        "A={a:b} B={b:b} t={t} on {}",
                        g.to_json()
                    );
                }
                if a == 0 {
                    break;
                }
                a = (a - 1) & b;
            }
        }
    });
    assert!(graphs > 300_000);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn matches_closed_form((g, mask) in common::arb_graph_and_set(7, 7)) {
        let s = common::set_of(&mask);
        for kind in [MassKind::True, MassKind::Proxy] {
            prop_assert_eq!(social_welfare::<Exact>(&g, &s, kind).unwrap(), naive_welfare(&g, &mask, kind));
        }
    }

    #[test]
    fn welfare_is_monotone((g, mask) in common::arb_graph_and_set(7, 7), pick in any::<prop::sample::Index>()) {
        let open: Vec<usize> = (0..g.num_targets()).filter(|&t| !mask[t]).collect();
        prop_assume!(!open.is_empty());
        let t = open[pick.index(open.len())];
        let s = common::set_of(&mask);
        for kind in [MassKind::True, MassKind::Proxy] {
            prop_assert!(marginal_gain::<Exact>(&g, &s, t, kind).unwrap() >= int(0));
        }
    }

    #[test]
    fn incremental_matches_full((g, mask) in common::arb_graph_and_set(7, 7), pick in any::<prop::sample::Index>()) {
        let open: Vec<usize> = (0..g.num_targets()).filter(|&t| !mask[t]).collect();
        prop_assume!(!open.is_empty());
        let t = open[pick.index(open.len())];
        let s = common::set_of(&mask);
        let mut with = s.clone();
        with.insert(t).unwrap();
        for kind in [MassKind::True, MassKind::Proxy] {
            let inc = marginal_gain::<Exact>(&g, &s, t, kind).unwrap();
            let full = social_welfare::<Exact>(&g, &with, kind).unwrap() - social_welfare::<Exact>(&g, &s, kind).unwrap();
            prop_assert_eq!(inc, full);
            let inc = marginal_gain::<f64>(&g, &s, t, kind).unwrap();
            let full = social_welfare::<f64>(&g, &with, kind).unwrap() - social_welfare::<f64>(&g, &s, kind).unwrap();
            prop_assert!((inc - full).abs() <= 1e-12);
            let state = WelfareState::<Exact>::from_set(&g, kind, &s).unwrap();
            prop_assert_eq!(state.gain(t), marginal_gain::<Exact>(&g, &s, t, kind).unwrap());
        }
    }

    #[test]
    fn proxy_sandwich(seed in any::<u64>(), c in 1usize..=3, bits in any::<u16>()) {
        let g = common::random_c_bounded(&mut common::rng(seed), 7, 8, c);
        let mask: Vec<bool> = (0..g.num_targets()).map(|t| bits >> t & 1 == 1).collect();
        let s = common::set_of(&mask);
        let f = social_welfare::<Exact>(&g, &s, MassKind::True).unwrap();
        let fp = social_welfare::<Exact>(&g, &s, MassKind::Proxy).unwrap();
        let base = social_welfare::<Exact>(&g, &RevealSet::new(), MassKind::True).unwrap();
        let c = int(c as i128);
        prop_assert!(fp <= f && f <= c * fp);
        prop_assert!(fp - base <= f - base && f - base <= c * (fp - base));
    }

    #[test]
    fn welfare_stays_within_bounds((g, mask) in common::arb_graph_and_set(7, 7)) {
        let s = common::set_of(&mask);
        let f = social_welfare::<f64>(&g, &s, MassKind::True).unwrap();
        prop_assert!(f >= 0.0 && f <= g.num_agents() as f64 + 1e-12);
        let exact = social_welfare::<Exact>(&g, &s, MassKind::True).unwrap();
        prop_assert!(exact.to_f64().tol_eq(&f));
    }

    #[test]
    fn undo_restores_state((g, mask) in common::arb_graph_and_set(7, 7)) {
        let mut s = WelfareState::<f64>::new(&g, MassKind::Proxy);
        let start = *s.total();
        let order: Vec<usize> = (0..g.num_targets()).filter(|&t| mask[t]).collect();
        for &t in &order {
            s.reveal(t).unwrap();
        }
        for _ in &order {
            s.undo();
        }
        prop_assert_eq!(*s.total(), start);
        prop_assert!(s.is_empty());
    }
}
