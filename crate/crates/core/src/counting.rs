//! Minimal subcover counts `N(S, R)(ω)` and relative counts `N(R|Q)(ω)`.
//!
//! Iterated covers are never materialized as random sets here. On each
//! fiber only the family of nonempty traces matters, and
//! `𝒬^(k+1)(ω) = 𝒬^(k)(ω) ∨ (T_ω^k)^{-1} 𝒬(ϑ^k ω)` can be built one depth at
//! a time.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::budget::Budget;
use crate::covers::{RandomCover, RandomSet};
use crate::error::{Error, Result};
use crate::model::BundleRds;
use crate::pointset::PointSet;
use crate::rational::to_f64;

/// Smallest number of `candidates` whose union contains `target`; `1` for an
/// empty target, `None` when the candidates do not cover it.
///
/// Exact branch and bound: candidates are clipped to the target, duplicates
/// and dominated sets are dropped, a greedy cover gives the first upper
/// bound, and the search branches on the uncovered point with the fewest
/// candidates.
pub fn min_cover_size(target: &PointSet, candidates: &[PointSet]) -> Option<usize> {
    if target.is_empty() {
        return Some(1);
    }
    let mut clipped: Vec<PointSet> = candidates
        .iter()
        .map(|c| c.intersection(target))
        .filter(|c| !c.is_empty())
        .collect();
    clipped.sort_by(|a, b| b.len().cmp(&a.len()));
    let mut seen = HashSet::new();
    let mut cands: Vec<PointSet> = Vec::new();
    for c in clipped {
        if !seen.insert(c.clone()) {
            continue;
        }
        if cands.iter().any(|k| c.is_subset(k)) {
            continue;
        }
        cands.push(c);
    }
    let mut union = target.cleared();
    for c in &cands {
        union = union.union(c);
    }
    if !target.is_subset(&union) {
        return None;
    }
    if cands.len() == 1 {
        return Some(1);
    }
    let mut containing: Vec<Vec<usize>> = Vec::new();
    for x in target.iter() {
        if containing.len() <= x {
            containing.resize(x + 1, Vec::new());
        }
        containing[x] = (0..cands.len()).filter(|&i| cands[i].contains(x)).collect();
    }
    let mut search = Search {
        cands: &cands,
        containing: &containing,
        best: greedy_cover(target, &cands),
    };
    search.run(target, 0);
    Some(search.best)
}

fn greedy_cover(target: &PointSet, cands: &[PointSet]) -> usize {
    let mut left = target.clone();
    let mut used = 0;
    while !left.is_empty() {
        let best = cands
            .iter()
            .max_by_key(|c| c.intersection(&left).len())
            .expect("candidates cover the target");
        left = left.difference(best);
        used += 1;
    }
    used
}

struct Search<'a> {
    cands: &'a [PointSet],
    containing: &'a [Vec<usize>],
    best: usize,
}

impl Search<'_> {
    fn run(&mut self, uncovered: &PointSet, depth: usize) {
        if uncovered.is_empty() {
            self.best = self.best.min(depth);
            return;
        }
        if depth + 1 >= self.best {
            return;
        }
        let left = uncovered.len();
        let max_gain = self
            .cands
            .iter()
            .map(|c| c.intersection(uncovered).len())
            .max()
            .unwrap_or(0);
        if max_gain == 0 || depth + left.div_ceil(max_gain) >= self.best {
            return;
        }
        let pivot = uncovered
            .iter()
            .min_by_key(|&x| self.containing[x].len())
            .expect("nonempty");
        let mut options: Vec<(usize, usize)> = self.containing[pivot]
            .iter()
            .map(|&i| (self.cands[i].intersection(uncovered).len(), i))
            .collect();
        options.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        for (_, i) in options {
            self.run(&uncovered.difference(&self.cands[i]), depth + 1);
        }
    }
}

/// `N(S, R)(ω)`.
pub fn minimal_subcover(s: &RandomSet, r: &RandomCover, w: usize) -> Result<usize> {
    if w >= r.n_fibers() || s.n_fibers() != r.n_fibers() {
        return Err(Error::Domain(format!("base point {w} or set shape does not match the cover")));
    }
    let traces = r.traces(w);
    min_cover_size(s.at(w), &traces)
        .ok_or_else(|| Error::Domain(format!("the cover does not cover S on fiber {w}")))
}

/// `N(R|Q)(ω) = max_{Q ∈ 𝒬} N(Q, R)(ω)`.
pub fn relative_count(r: &RandomCover, q: &RandomCover, w: usize) -> Result<usize> {
    if r.shape() != q.shape() {
        return Err(Error::Incompatible("covers live on different systems".into()));
    }
    if w >= r.n_fibers() {
        return Err(Error::Domain(format!("base point {w} does not exist")));
    }
    count_traces(&r.traces(w), &q.traces(w), w)
}

/// `N(R|Q) = max_ω N(R|Q)(ω)`.
pub fn relative_count_max(r: &RandomCover, q: &RandomCover) -> Result<usize> {
    (0..r.n_fibers())
        .map(|w| relative_count(r, q, w))
        .try_fold(1, |acc, n| n.map(|n| acc.max(n)))
}

fn count_traces(r: &[PointSet], q: &[PointSet], w: usize) -> Result<usize> {
    let mut best = 1;
    for t in q {
        let n = min_cover_size(t, r)
            .ok_or_else(|| Error::Domain(format!("R does not cover fiber {w}")))?;
        best = best.max(n);
    }
    Ok(best)
}

/// Per-fiber trace families of `𝒬^(k)` for `k = 1, 2, …`.
#[derive(Debug, Clone)]
pub struct TraceIterates<'a> {
    rds: &'a BundleRds,
    base_traces: Vec<Vec<PointSet>>,
    families: Vec<Vec<PointSet>>,
    /// `pos[ω][j]`: local index of `T_ω^k x_j` in `E_{ϑ^k ω}`.
    pos: Vec<Vec<usize>>,
    /// `ϑ^k ω`.
    at: Vec<usize>,
    depth: usize,
    label: String,
}

impl<'a> TraceIterates<'a> {
    /// Depth-1 families of `q` on `rds`.
    pub fn new(q: &RandomCover, rds: &'a BundleRds) -> Result<Self> {
        q.check_system(rds)?;
        let base_traces: Vec<Vec<PointSet>> = (0..rds.n_fibers()).map(|w| q.traces(w)).collect();
        let pos = (0..rds.n_fibers())
            .map(|w| (0..rds.fiber_len(w)).map(|j| rds.step(w, j)).collect())
            .collect();
        let at = (0..rds.n_fibers()).map(|w| rds.base().theta(w)).collect();
        Ok(TraceIterates {
            rds,
            families: base_traces.clone(),
            base_traces,
            pos,
            at,
            depth: 1,
            label: q.label().unwrap_or("cover").to_string(),
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn family(&self, w: usize) -> &[PointSet] {
        &self.families[w]
    }

    pub fn families(&self) -> &[Vec<PointSet>] {
        &self.families
    }

    /// Moves from depth `k` to `k + 1`.
    pub fn advance(&mut self, budget: &Budget) -> Result<()> {
        let rds = self.rds;
        let next: Vec<Result<Vec<PointSet>>> = (0..rds.n_fibers())
            .into_par_iter()
            .map(|w| {
                let n = rds.fiber_len(w);
                let pulled: Vec<PointSet> = self.base_traces[self.at[w]]
                    .iter()
                    .map(|b| PointSet::from_indices(n, (0..n).filter(|&j| b.contains(self.pos[w][j]))))
                    .collect();
                let mut seen = HashSet::new();
                let mut out = Vec::new();
                for a in &self.families[w] {
                    for b in &pulled {
                        let c = a.intersection(b);
                        if !c.is_empty() && seen.insert(c.clone()) {
                            out.push(c);
                            if out.len() > budget.max_fiber_traces {
                                return Err(Error::budget(
                                    format!(
                                        "traces of {} at depth {} on fiber {w}",
                                        self.label,
                                        self.depth + 1
                                    ),
                                    budget.max_fiber_traces,
                                    out.len(),
                                ));
                            }
                        }
                    }
                }
                Ok(out)
            })
            .collect();
        let mut families = Vec::with_capacity(next.len());
        for f in next {
            families.push(f?);
        }
        self.families = families;
        for w in 0..rds.n_fibers() {
            let here = self.at[w];
            for p in self.pos[w].iter_mut() {
                *p = rds.step(here, *p);
            }
            self.at[w] = rds.base().theta(here);
        }
        self.depth += 1;
        Ok(())
    }
}

/// `N(R^(n)|Q^(n))(ω)` for every `ω` at one depth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountProfile {
    pub depth: usize,
    pub counts: Vec<usize>,
    pub r_label: String,
    pub q_label: String,
}

impl CountProfile {
    /// `∫ log N dP`.
    pub fn integrated_log(&self, rds: &BundleRds) -> f64 {
        self.counts
            .iter()
            .enumerate()
            .map(|(w, &n)| to_f64(rds.base().prob(w)) * (n as f64).ln())
            .sum()
    }
}

fn profile_at(r: &TraceIterates, q: &TraceIterates, labels: (&str, &str)) -> Result<CountProfile> {
    let counts = (0..r.families.len())
        .into_par_iter()
        .map(|w| count_traces(r.family(w), q.family(w), w))
        .collect::<Result<Vec<_>>>()?;
    Ok(CountProfile {
        depth: r.depth(),
        counts,
        r_label: labels.0.to_string(),
        q_label: labels.1.to_string(),
    })
}

fn check_pair(r: &RandomCover, q: &RandomCover, rds: &BundleRds) -> Result<()> {
    r.check_system(rds)?;
    q.check_system(rds)
}

/// Profiles for depths `1..=n_max`. A budget failure stops the sequence;
/// the profiles computed so far are returned with the error.
pub fn count_profiles(
    r: &RandomCover,
    q: &RandomCover,
    rds: &BundleRds,
    n_max: usize,
    budget: &Budget,
) -> Result<(Vec<CountProfile>, Option<Error>)> {
    check_pair(r, q, rds)?;
    if n_max == 0 {
        return Err(Error::Domain("depth must be at least 1".into()));
    }
    let labels = (r.label().unwrap_or("R"), q.label().unwrap_or("Q"));
    let mut ri = TraceIterates::new(r, rds)?;
    let mut qi = TraceIterates::new(q, rds)?;
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        if n > budget.max_depth {
            return Ok((out, Some(Error::budget("depth", budget.max_depth, n))));
        }
        if n > 1 {
            if let Err(e) = ri.advance(budget).and_then(|_| qi.advance(budget)) {
                if e.is_budget() {
                    return Ok((out, Some(e)));
                }
                return Err(e);
            }
        }
        out.push(profile_at(&ri, &qi, labels)?);
    }
    Ok((out, None))
}

/// `N(R^(n)|Q^(n))(ω)` for every `ω`.
pub fn count_profile(
    r: &RandomCover,
    q: &RandomCover,
    rds: &BundleRds,
    n: usize,
    budget: &Budget,
) -> Result<CountProfile> {
    let (mut profiles, err) = count_profiles(r, q, rds, n, budget)?;
    match err {
        Some(e) => Err(e),
        None => Ok(profiles.pop().expect("n ≥ 1 profiles")),
    }
}

/// `a_n = Σ_ω P(ω) log N(R^(n)|Q^(n))(ω)`.
pub fn integrated_log_count(
    r: &RandomCover,
    q: &RandomCover,
    rds: &BundleRds,
    n: usize,
    budget: &Budget,
) -> Result<f64> {
    Ok(count_profile(r, q, rds, n, budget)?.integrated_log(rds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covers::{iterate_cover, RandomCover};
    use crate::fixtures::sys_a;

    fn set(n: usize, idx: &[usize]) -> PointSet {
        PointSet::from_indices(n, idx.iter().copied())
    }

    fn brute(target: &PointSet, cands: &[PointSet]) -> Option<usize> {
        if target.is_empty() {
            return Some(1);
        }
        let k = cands.len();
        (0u32..1 << k)
            .filter(|mask| {
                let mut u = target.cleared();
                for (i, c) in cands.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        u = u.union(c);
                    }
                }
                target.is_subset(&u)
            })
            .map(|m| m.count_ones() as usize)
            .min()
    }

    #[test]
    fn minimal_subcover_examples() {
        assert_eq!(min_cover_size(&PointSet::empty(3), &[set(3, &[0])]), Some(1));
        assert_eq!(min_cover_size(&set(3, &[1]), &[set(3, &[0, 1])]), Some(1));
        let tri = [set(3, &[0, 1]), set(3, &[1, 2]), set(3, &[0, 2])];
        assert_eq!(min_cover_size(&set(3, &[0, 1, 2]), &tri), Some(2));
        assert_eq!(min_cover_size(&set(3, &[0, 1, 2]), &tri[..1]), None);
    }

    #[test]
    fn matches_brute_force_on_structured_instances() {
        // all 3-subsets of 6 points: need 2
        let mut cands = Vec::new();
        for a in 0..6 {
            for b in a + 1..6 {
                for c in b + 1..6 {
                    cands.push(set(6, &[a, b, c]));
                }
            }
        }
        let full = PointSet::full(6);
        assert_eq!(min_cover_size(&full, &cands[..12]), brute(&full, &cands[..12]));
        // greedy is suboptimal here, exact search is not
        let target = PointSet::full(6);
        let tricky = [
            set(6, &[0, 1, 2, 3]),
            set(6, &[0, 1, 4]),
            set(6, &[2, 3, 5]),
        ];
        assert_eq!(min_cover_size(&target, &tricky), Some(2));
    }

    #[test]
    fn relative_count_examples() {
        let a = sys_a();
        let s = RandomCover::singletons(&a);
        let t = RandomCover::trivial(&a);
        assert_eq!(relative_count(&s, &t, 0).unwrap(), 2);
        assert_eq!(relative_count(&t, &t, 0).unwrap(), 1);
        assert_eq!(relative_count(&s, &s, 1).unwrap(), 1);
        assert_eq!(relative_count_max(&s, &t).unwrap(), 2);
    }

    #[test]
    fn count_profile_examples() {
        let a = sys_a();
        let b = Budget::default();
        let s = RandomCover::singletons(&a);
        let t = RandomCover::trivial(&a);
        assert_eq!(count_profile(&s, &t, &a, 1, &b).unwrap().counts, vec![2, 2]);
        assert_eq!(count_profile(&s, &t, &a, 2, &b).unwrap().counts[0], 2);
        for n in 1..5 {
            assert_eq!(count_profile(&s, &s, &a, n, &b).unwrap().counts, vec![1, 1]);
        }
        let a1 = integrated_log_count(&s, &t, &a, 1, &b).unwrap();
        assert!((a1 - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn trace_iterates_match_materialized_iterates() {
        let a = sys_a();
        let b = Budget::default();
        let s = RandomCover::singletons(&a);
        let mut it = TraceIterates::new(&s, &a).unwrap();
        for n in 1..6 {
            let full = iterate_cover(&s, &a, n, &b).unwrap();
            for w in 0..2 {
                let mut x: Vec<_> = it.family(w).to_vec();
                let mut y = full.traces(w);
                x.sort_by_key(|p| p.iter().collect::<Vec<_>>());
                y.sort_by_key(|p| p.iter().collect::<Vec<_>>());
                assert_eq!(x, y, "depth {n} fiber {w}");
            }
            it.advance(&b).unwrap();
        }
    }

    #[test]
    fn budget_is_reported() {
        let a = crate::fixtures::identity_system(3);
        let s = RandomCover::singletons(&a);
        let b = Budget {
            max_depth: 3,
            ..Budget::default()
        };
        let (profiles, err) = count_profiles(&s, &s, &a, 5, &b).unwrap();
        assert_eq!(profiles.len(), 3);
        assert!(err.unwrap().is_budget());
    }
}
