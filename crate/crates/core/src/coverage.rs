//! Coverage-radius model: positive targets grow radii under a shared budget
//! and an agent is reached once it lies within some target's radius.

use std::io::Read;

use serde::Serialize;

use crate::error::{Error, Result};

const EPS: f64 = 1e-12;

/// Agent and target points in `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageInstance {
    pub agents: Vec<Vec<f64>>,
    pub targets: Vec<Vec<f64>>,
}

impl CoverageInstance {
    pub fn new(agents: Vec<Vec<f64>>, targets: Vec<Vec<f64>>) -> Result<Self> {
        let dims = agents.first().or(targets.first()).map_or(0, Vec::len);
        for p in agents.iter().chain(&targets) {
            if p.len() != dims {
                return Err(Error::DimensionMismatch { expected: dims, found: p.len() });
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::Data("coordinates must be finite".into()));
            }
        }
        Ok(CoverageInstance { agents, targets })
    }

    /// Parses rows `kind,x1,...,xd` with `kind` either `agent` or `target`.
    /// A leading header row is skipped.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
        let mut agents = Vec::new();
        let mut targets = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let kind = rec.get(0).unwrap_or_default();
            let coords = || -> Result<Vec<f64>> {
                rec.iter()
                    .skip(1)
                    .map(|v| v.parse::<f64>().map_err(|_| Error::Data(format!("row {}: bad coordinate `{v}`", i + 1))))
                    .collect()
            };
            match kind {
                "agent" => agents.push(coords()?),
                "target" => targets.push(coords()?),
                _ if i == 0 => continue,
                other => return Err(Error::Data(format!("row {}: kind `{other}` is neither agent nor target", i + 1))),
            }
        }
        Self::new(agents, targets)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageResult {
    pub radii: Vec<f64>,
    pub covered: Vec<bool>,
    /// Number of radius expansions performed.
    pub steps: usize,
}

impl CoverageResult {
    pub fn covered_count(&self) -> usize {
        self.covered.iter().filter(|&&c| c).count()
    }

    pub fn radius_sum(&self) -> f64 {
        self.radii.iter().sum()
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Greedy radius expansion. Each step grows the target whose nearest uncovered
/// agent is cheapest to reach (ties to the smaller target index), covering
/// every agent within the new radius, until the next step would exceed the
/// remaining budget or every agent is covered.
pub fn greedy_coverage(instance: &CoverageInstance, budget: f64) -> Result<CoverageResult> {
    if !budget.is_finite() || budget < 0.0 {
        return Err(Error::InvalidArgument(format!("radius budget {budget} must be a nonnegative number")));
    }
    let n = instance.agents.len();
    let m = instance.targets.len();
    let sorted: Vec<Vec<(f64, usize)>> = instance
        .targets
        .iter()
        .map(|t| {
            let mut d: Vec<(f64, usize)> =
                instance.agents.iter().enumerate().map(|(j, a)| (distance(t, a), j)).collect();
            d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            d
        })
        .collect();
    let mut pointer = vec![0usize; m];
    let mut radii = vec![0.0f64; m];
    let mut covered = vec![false; n];
    let mut uncovered = n;
    let mut remaining = budget;
    let mut steps = 0;
    while uncovered > 0 {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..m {
            while pointer[i] < n && covered[sorted[i][pointer[i]].1] {
                pointer[i] += 1;
            }
            if pointer[i] == n {
                continue;
            }
            let cost = (sorted[i][pointer[i]].0 - radii[i]).max(0.0);
            if best.is_none_or(|(_, c)| cost < c - EPS) {
                best = Some((i, cost));
            }
        }
        let Some((i, cost)) = best else { break };
        if cost > remaining + EPS {
            break;
        }
        let step = cost.min(remaining);
        radii[i] += step;
        remaining -= step;
        steps += 1;
        while pointer[i] < n && sorted[i][pointer[i]].0 <= radii[i] + EPS {
            let agent = sorted[i][pointer[i]].1;
            if !covered[agent] {
                covered[agent] = true;
                uncovered -= 1;
            }
            pointer[i] += 1;
        }
    }
    Ok(CoverageResult { radii, covered, steps })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(agents: &[f64], targets: &[f64]) -> CoverageInstance {
        CoverageInstance::new(agents.iter().map(|&a| vec![a]).collect(), targets.iter().map(|&t| vec![t]).collect())
            .unwrap()
    }

    #[test]
    fn single_target_stops_when_budget_runs_out() {
        let r = greedy_coverage(&line(&[1.0, 2.0, 5.0], &[0.0]), 3.0).unwrap();
        assert_eq!(r.radii, vec![2.0]);
        assert_eq!(r.covered, vec![true, true, false]);
    }

    #[test]
    fn zero_budget_covers_nothing_apart() {
        let r = greedy_coverage(&line(&[1.0, 2.0], &[0.0]), 0.0).unwrap();
        assert_eq!(r.covered_count(), 0);
    }

    #[test]
    fn zero_budget_still_covers_coincident_agents() {
        let r = greedy_coverage(&line(&[0.0, 2.0], &[0.0]), 0.0).unwrap();
        assert_eq!(r.covered, vec![true, false]);
    }

    #[test]
    fn two_unit_steps() {
        let r = greedy_coverage(&line(&[1.0, 9.0], &[0.0, 10.0]), 2.0).unwrap();
        assert_eq!(r.radii, vec![1.0, 1.0]);
        assert_eq!(r.covered_count(), 2);
        assert_eq!(r.steps, 2);
    }

    #[test]
    fn equidistant_agents_covered_together() {
        let r = greedy_coverage(&line(&[-1.0, 1.0], &[0.0]), 1.0).unwrap();
        assert_eq!((r.covered_count(), r.steps), (2, 1));
    }

    #[test]
    fn csv_parsing() {
        let inst = CoverageInstance::from_csv("kind,x\nagent,1\nagent,2\ntarget,0\n".as_bytes()).unwrap();
        assert_eq!(inst, line(&[1.0, 2.0], &[0.0]));
        assert!(CoverageInstance::from_csv("agent,1\nrobot,2\n".as_bytes()).is_err());
        assert!(CoverageInstance::from_csv("agent,1\ntarget,2,3\n".as_bytes()).is_err());
        assert!(greedy_coverage(&inst, -1.0).is_err());
    }
}
