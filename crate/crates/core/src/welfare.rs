//! Exact and proxy welfare evaluation.
//!
//! An agent with `δ⁺` positive and `δ⁻` negative neighbors, of which `k`
//! negatives have been revealed (and no positive), places probability
//! `δ⁺ / (δ⁺ + δ⁻ − k)` on positive targets. Revealing any adjacent positive
//! lifts it to 1. The proxy mass credits every revealed negative beyond the
//! first with only the increment the first one produced, which makes the proxy
//! welfare submodular:
//!
//! ```text
//! Q_p = δ⁺ / (|N| − [k ≥ 1]) · (1 + max(0, k − 1) / |N|)
//! ```
//!
//! Agents with `δ⁺ = 0` always carry mass 0 in both kinds.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Sub, SubAssign};

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;
use crate::par;

/// Exact rational welfare.
pub type Exact = Ratio<i128>;

/// Arithmetic backend for welfare values.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + AddAssign
    + SubAssign
{
    /// Whether equality is exact (ties are meaningful).
    const EXACT: bool;

    fn zero() -> Self;
    fn from_ratio(num: u64, den: u64) -> Self;
    fn to_f64(&self) -> f64;
    /// Equality, exact for rationals and relative 1e-9 for floats.
    fn tol_eq(&self, other: &Self) -> bool;
    /// Strictly greater than zero (beyond float noise).
    fn is_positive(&self) -> bool;

    fn one() -> Self {
        Self::from_ratio(1, 1)
    }

    fn from_count(n: usize) -> Self {
        Self::from_ratio(n as u64, 1)
    }

    /// Whether values on a graph of this shape stay representable.
    fn fits(_max_degree: usize, _agents: usize) -> bool {
        true
    }

    fn tol_cmp(&self, other: &Self) -> Ordering {
        if self.tol_eq(other) {
            Ordering::Equal
        } else {
            self.partial_cmp(other).unwrap_or(Ordering::Equal)
        }
    }

    fn scale(&self, factor: f64) -> f64 {
        self.to_f64() * factor
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }

    fn from_ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn tol_eq(&self, other: &Self) -> bool {
        let scale = self.abs().max(other.abs()).max(1.0);
        (self - other).abs() <= 1e-9 * scale
    }

    fn is_positive(&self) -> bool {
        *self > 1e-12
    }
}

impl Scalar for Exact {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }

    fn from_ratio(num: u64, den: u64) -> Self {
        Ratio::new(num as i128, den as i128)
    }

    fn to_f64(&self) -> f64 {
        let (n, d) = (*self.numer(), *self.denom());
        (n / d) as f64 + (n % d) as f64 / d as f64
    }

    fn tol_eq(&self, other: &Self) -> bool {
        self == other
    }

    fn is_positive(&self) -> bool {
        *self > Zero::zero()
    }

    /// Every mass has a denominator dividing `lcm(1..=max_degree)`, so sums of
    /// `agents` masses stay below `agents · lcm` in numerator magnitude.
    fn fits(max_degree: usize, agents: usize) -> bool {
        let mut lcm: i128 = 1;
        for d in 1..=max_degree.max(1) as i128 {
            lcm = match lcm.checked_mul(d / lcm.gcd(&d)) {
                Some(v) => v,
                None => return false,
            };
        }
        lcm.checked_mul(agents as i128 + 1)
            .and_then(|v| v.checked_mul(16))
            .is_some()
    }
}

/// Fails with [`Error::ExactOverflow`] when `W` cannot represent welfare on `graph`.
pub fn ensure_representable<W: Scalar>(graph: &BipartiteGraph) -> Result<()> {
    if W::fits(graph.max_degree(), graph.num_agents()) {
        Ok(())
    } else {
        Err(Error::ExactOverflow { max_degree: graph.max_degree() })
    }
}

/// Which probability mass to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MassKind {
    True,
    Proxy,
}

/// Mass of one agent from its degrees and revealed-neighbor counts.
pub(crate) fn mass<W: Scalar>(
    kind: MassKind,
    pos_deg: usize,
    deg: usize,
    pos_hits: usize,
    neg_hits: usize,
) -> W {
    if pos_hits > 0 {
        return W::one();
    }
    if pos_deg == 0 {
        return W::zero();
    }
    match kind {
        MassKind::True => W::from_ratio(pos_deg as u64, (deg - neg_hits) as u64),
        MassKind::Proxy if neg_hits == 0 => W::from_ratio(pos_deg as u64, deg as u64),
        MassKind::Proxy => W::from_ratio(
            (pos_deg * (deg + neg_hits - 1)) as u64,
            ((deg - 1) * deg) as u64,
        ),
    }
}

/// A set of revealed targets, remembering insertion order.
#[derive(Debug, Clone, Default, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RevealSet {
    order: Vec<usize>,
}

impl PartialEq for RevealSet {
    fn eq(&self, other: &Self) -> bool {
        self.sorted() == other.sorted()
    }
}

impl RevealSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_targets<I: IntoIterator<Item = usize>>(targets: I) -> Result<Self> {
        let mut s = RevealSet::new();
        for t in targets {
            s.insert(t)?;
        }
        Ok(s)
    }

    pub fn insert(&mut self, target: usize) -> Result<()> {
        if self.contains(target) {
            return Err(Error::AlreadyRevealed(target));
        }
        self.order.push(target);
        Ok(())
    }

    pub fn contains(&self, target: usize) -> bool {
        self.order.contains(&target)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Targets in the order they were revealed.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn sorted(&self) -> Vec<usize> {
        let mut v = self.order.clone();
        v.sort_unstable();
        v
    }

    /// Checks that every member indexes one of `m` targets.
    pub fn validate(&self, m: usize) -> Result<()> {
        match self.order.iter().find(|&&t| t >= m) {
            Some(&t) => Err(Error::IndexOutOfRange { what: "target", index: t, len: m }),
            None => Ok(()),
        }
    }

    pub(crate) fn mask(&self, m: usize) -> Vec<bool> {
        let mut mask = vec![false; m];
        for &t in &self.order {
            mask[t] = true;
        }
        mask
    }
}

impl FromIterator<usize> for RevealSet {
    /// Collects targets, silently skipping duplicates.
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = RevealSet::new();
        for t in iter {
            let _ = s.insert(t);
        }
        s
    }
}

fn hits(graph: &BipartiteGraph, mask: &[bool], agent: usize) -> (usize, usize) {
    let mut pos = 0;
    let mut neg = 0;
    for &t in graph.neighbors(agent) {
        if mask[t] {
            if graph.label(t).is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
        }
    }
    (pos, neg)
}

fn mass_masked<W: Scalar>(graph: &BipartiteGraph, mask: &[bool], agent: usize, kind: MassKind) -> W {
    let d = graph.degrees_unchecked(agent);
    let (pos, neg) = hits(graph, mask, agent);
    mass(kind, d.pos, d.total(), pos, neg)
}

fn checked_mask(graph: &BipartiteGraph, set: &RevealSet) -> Result<Vec<bool>> {
    set.validate(graph.num_targets())?;
    Ok(set.mask(graph.num_targets()))
}

/// Probability mass agent `agent` places on positive targets given `set`.
pub fn agent_mass<W: Scalar>(
    graph: &BipartiteGraph,
    set: &RevealSet,
    agent: usize,
    kind: MassKind,
) -> Result<W> {
    graph.degrees(agent)?;
    let mask = checked_mask(graph, set)?;
    Ok(mass_masked(graph, &mask, agent, kind))
}

/// Sum of agent masses: `F(S)` for [`MassKind::True`], `F_p(S)` for proxy.
pub fn social_welfare<W: Scalar>(graph: &BipartiteGraph, set: &RevealSet, kind: MassKind) -> Result<W> {
    let mask = checked_mask(graph, set)?;
    Ok(welfare_of_mask(graph, &mask, kind))
}

pub(crate) fn welfare_of_mask<W: Scalar>(graph: &BipartiteGraph, mask: &[bool], kind: MassKind) -> W {
    let n = graph.num_agents();
    if n < par::PAR_MIN {
        return (0..n).fold(W::zero(), |acc, x| acc + mass_masked::<W>(graph, mask, x, kind));
    }
    let agents: Vec<usize> = (0..n).collect();
    par::map(&agents, |&x| mass_masked::<W>(graph, mask, x, kind))
        .into_iter()
        .fold(W::zero(), |acc, q| acc + q)
}

/// Welfare with nothing revealed, `F(∅)`.
pub fn empty_welfare<W: Scalar>(graph: &BipartiteGraph) -> W {
    welfare_of_mask(graph, &vec![false; graph.num_targets()], MassKind::True)
}

/// `F(S) − F(∅)`, or `F_p(S) − F(∅)` for proxy (the baseline is always true welfare).
pub fn welfare_gain<W: Scalar>(graph: &BipartiteGraph, set: &RevealSet, kind: MassKind) -> Result<W> {
    Ok(social_welfare::<W>(graph, set, kind)? - empty_welfare(graph))
}

/// `F(S ∪ {t}) − F(S)`, touching only agents adjacent to `target`.
pub fn marginal_gain<W: Scalar>(
    graph: &BipartiteGraph,
    set: &RevealSet,
    target: usize,
    kind: MassKind,
) -> Result<W> {
    let m = graph.num_targets();
    if target >= m {
        return Err(Error::IndexOutOfRange { what: "target", index: target, len: m });
    }
    if set.contains(target) {
        return Err(Error::AlreadyRevealed(target));
    }
    let mask = checked_mask(graph, set)?;
    let positive = graph.label(target).is_positive();
    let mut delta = W::zero();
    for &x in graph.agents_of(target) {
        let d = graph.degrees_unchecked(x);
        let (pos, neg) = hits(graph, &mask, x);
        let before: W = mass(kind, d.pos, d.total(), pos, neg);
        let after: W = if positive {
            mass(kind, d.pos, d.total(), pos + 1, neg)
        } else {
            mass(kind, d.pos, d.total(), pos, neg + 1)
        };
        delta += after - before;
    }
    Ok(delta)
}

/// True and proxy welfare of one reveal set, with per-agent masses.
#[derive(Debug, Clone, PartialEq)]
pub struct WelfareReport<W> {
    pub welfare: W,
    pub gain: W,
    pub proxy_welfare: W,
    pub proxy_gain: W,
    pub masses: Vec<W>,
    pub proxy_masses: Vec<W>,
}

pub fn welfare_report<W: Scalar>(graph: &BipartiteGraph, set: &RevealSet) -> Result<WelfareReport<W>> {
    let mask = checked_mask(graph, set)?;
    let masses: Vec<W> =
        (0..graph.num_agents()).map(|x| mass_masked(graph, &mask, x, MassKind::True)).collect();
    let proxy_masses: Vec<W> =
        (0..graph.num_agents()).map(|x| mass_masked(graph, &mask, x, MassKind::Proxy)).collect();
    let welfare = masses.iter().cloned().fold(W::zero(), |a, b| a + b);
    let proxy_welfare = proxy_masses.iter().cloned().fold(W::zero(), |a, b| a + b);
    let base = empty_welfare::<W>(graph);
    Ok(WelfareReport {
        gain: welfare.clone() - base.clone(),
        proxy_gain: proxy_welfare.clone() - base,
        welfare,
        proxy_welfare,
        masses,
        proxy_masses,
    })
}

/// Incremental welfare tracker for one search.
///
/// Caches per-agent revealed-neighbor counts and masses so that the marginal
/// gain of a target costs `O(deg(t))`. An optional scope restricts the sum to
/// a subset of agents (group objectives).
#[derive(Debug, Clone)]
pub struct WelfareState<'g, W: Scalar> {
    graph: &'g BipartiteGraph,
    kind: MassKind,
    scope: Option<Vec<bool>>,
    pos_hits: Vec<u32>,
    neg_hits: Vec<u32>,
    masses: Vec<W>,
    total: W,
    // totals before each reveal, so undo restores them without float drift
    history: Vec<W>,
    revealed: Vec<bool>,
    order: Vec<usize>,
}

impl<'g, W: Scalar> WelfareState<'g, W> {
    pub fn new(graph: &'g BipartiteGraph, kind: MassKind) -> Self {
        let n = graph.num_agents();
        let masses: Vec<W> = (0..n)
            .map(|x| {
                let d = graph.degrees_unchecked(x);
                mass(kind, d.pos, d.total(), 0, 0)
            })
            .collect();
        let total = masses.iter().cloned().fold(W::zero(), |a, b| a + b);
        WelfareState {
            graph,
            kind,
            scope: None,
            pos_hits: vec![0; n],
            neg_hits: vec![0; n],
            masses,
            total,
            history: Vec::new(),
            revealed: vec![false; graph.num_targets()],
            order: Vec::new(),
        }
    }

    /// State whose total counts only `agents`.
    pub fn scoped(graph: &'g BipartiteGraph, kind: MassKind, agents: &[usize]) -> Result<Self> {
        let n = graph.num_agents();
        let mut scope = vec![false; n];
        for &x in agents {
            if x >= n {
                return Err(Error::IndexOutOfRange { what: "agent", index: x, len: n });
            }
            scope[x] = true;
        }
        let mut s = Self::new(graph, kind);
        s.total = (0..n).filter(|&x| scope[x]).fold(W::zero(), |a, x| a + s.masses[x].clone());
        s.scope = Some(scope);
        Ok(s)
    }

    /// State after revealing `set` in order.
    pub fn from_set(graph: &'g BipartiteGraph, kind: MassKind, set: &RevealSet) -> Result<Self> {
        set.validate(graph.num_targets())?;
        let mut s = Self::new(graph, kind);
        for &t in set.order() {
            s.reveal(t)?;
        }
        Ok(s)
    }

    pub fn graph(&self) -> &'g BipartiteGraph {
        self.graph
    }

    pub fn kind(&self) -> MassKind {
        self.kind
    }

    pub fn total(&self) -> &W {
        &self.total
    }

    pub fn agent_mass(&self, agent: usize) -> &W {
        &self.masses[agent]
    }

    pub fn is_revealed(&self, target: usize) -> bool {
        self.revealed[target]
    }

    pub fn revealed(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn to_reveal_set(&self) -> RevealSet {
        RevealSet { order: self.order.clone() }
    }

    fn in_scope(&self, agent: usize) -> bool {
        self.scope.as_ref().is_none_or(|s| s[agent])
    }

    fn mass_with(&self, agent: usize, extra_pos: u32, extra_neg: u32) -> W {
        let d = self.graph.degrees_unchecked(agent);
        mass(
            self.kind,
            d.pos,
            d.total(),
            (self.pos_hits[agent] + extra_pos) as usize,
            (self.neg_hits[agent] + extra_neg) as usize,
        )
    }

    fn delta_for(&self, agent: usize, positive: bool) -> W {
        let after = if positive { self.mass_with(agent, 1, 0) } else { self.mass_with(agent, 0, 1) };
        after - self.masses[agent].clone()
    }

    /// Marginal gain of revealing an unrevealed `target`.
    pub fn gain(&self, target: usize) -> W {
        self.gain_where(target, |_| true)
    }

    /// Marginal gain restricted to in-scope agents satisfying `keep`.
    pub fn gain_where(&self, target: usize, keep: impl Fn(usize) -> bool) -> W {
        debug_assert!(!self.revealed[target]);
        let positive = self.graph.label(target).is_positive();
        let mut delta = W::zero();
        for &x in self.graph.agents_of(target) {
            if self.in_scope(x) && keep(x) {
                delta += self.delta_for(x, positive);
            }
        }
        delta
    }

    /// Reveals `target` and returns its marginal gain.
    pub fn reveal(&mut self, target: usize) -> Result<W> {
        let m = self.graph.num_targets();
        if target >= m {
            return Err(Error::IndexOutOfRange { what: "target", index: target, len: m });
        }
        if self.revealed[target] {
            return Err(Error::AlreadyRevealed(target));
        }
        let positive = self.graph.label(target).is_positive();
        let mut delta = W::zero();
        for &x in self.graph.agents_of(target) {
            if positive {
                self.pos_hits[x] += 1;
            } else {
                self.neg_hits[x] += 1;
            }
            let new = self.mass_with(x, 0, 0);
            if self.in_scope(x) {
                delta += new.clone() - self.masses[x].clone();
            }
            self.masses[x] = new;
        }
        self.history.push(self.total.clone());
        self.total += delta.clone();
        self.revealed[target] = true;
        self.order.push(target);
        Ok(delta)
    }

    /// Undoes the most recent reveal.
    pub fn undo(&mut self) -> Option<usize> {
        let target = self.order.pop()?;
        let positive = self.graph.label(target).is_positive();
        for &x in self.graph.agents_of(target) {
            if positive {
                self.pos_hits[x] -= 1;
            } else {
                self.neg_hits[x] -= 1;
            }
            self.masses[x] = self.mass_with(x, 0, 0);
        }
        self.total = self.history.pop().expect("history tracks reveals");
        self.revealed[target] = false;
        Some(target)
    }
}
