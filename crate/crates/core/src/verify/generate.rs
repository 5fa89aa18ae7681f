//! Random finite systems, covers, partitions and measures for the suites.
//!
//! Sizes stay small enough for exhaustive oracles: `|Ω| ≤ 4`, fibers of
//! 1 to 5 points, covers of 2 to 4 elements, measure weights on a lattice
//! with denominators at most 64 before scaling by `P`.

use num::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::covers::{RandomCover, RandomPartition, RandomSet};
use crate::invariant::cesaro_limit;
use crate::measures::FiberedMeasure;
use crate::model::{BundleRds, DrivingSystem, MetricSpace};
use crate::rational::{int, Rational};

/// Share of base maps drawn as permutations.
pub const PERMUTATION_SHARE: f64 = 0.7;

/// `|Ω|` uniform in `1..=max_base`; `ϑ` a permutation with probability
/// [`PERMUTATION_SHARE`], otherwise an arbitrary map. `P` puts lattice
/// weights on the cycles of `ϑ`, uniform along each cycle, and nothing on
/// transient points.
pub fn random_base<R: Rng>(rng: &mut R, max_base: usize) -> DrivingSystem {
    let n = rng.gen_range(1..=max_base.max(1));
    let theta: Vec<usize> = if rng.gen_bool(PERMUTATION_SHARE) {
        let mut p: Vec<usize> = (0..n).collect();
        p.shuffle(rng);
        p
    } else {
        (0..n).map(|_| rng.gen_range(0..n)).collect()
    };
    let cycles = cycles_of(&theta);
    let weights: Vec<i64> = cycles.iter().map(|_| rng.gen_range(1..=8)).collect();
    let total: i64 = weights.iter().sum();
    let mut prob = vec![Rational::zero(); n];
    for (c, cyc) in cycles.iter().enumerate() {
        let each = Rational::new(weights[c].into(), (total * cyc.len() as i64).into());
        for &w in cyc {
            prob[w] = each.clone();
        }
    }
    DrivingSystem::new(prob, theta).expect("shape is consistent")
}

fn cycles_of(theta: &[usize]) -> Vec<Vec<usize>> {
    let n = theta.len();
    let mut on_cycle = vec![false; n];
    for start in 0..n {
        // after n steps every orbit sits on its cycle
        let mut w = start;
        for _ in 0..n {
            w = theta[w];
        }
        on_cycle[w] = true;
    }
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for w in 0..n {
        if !on_cycle[w] || seen[w] {
            continue;
        }
        let mut cyc = vec![w];
        seen[w] = true;
        let mut v = theta[w];
        while v != w {
            seen[v] = true;
            cyc.push(v);
            v = theta[v];
        }
        out.push(cyc);
    }
    out
}

/// Fibers of `1..=max_fiber` points named `{tag}{ω}_{j}`, random fiber maps,
/// and when `metric` is set, distances `|pos(x) − pos(y)|` from distinct
/// integer positions on a line.
pub fn random_system<R: Rng>(
    rng: &mut R,
    base: &DrivingSystem,
    max_fiber: usize,
    metric: bool,
    tag: &str,
) -> BundleRds {
    let k = base.size();
    let sizes: Vec<usize> = (0..k).map(|_| rng.gen_range(1..=max_fiber.max(1))).collect();
    let mut names = Vec::new();
    let mut fibers = Vec::with_capacity(k);
    for (w, &s) in sizes.iter().enumerate() {
        let start = names.len();
        names.extend((0..s).map(|j| format!("{tag}{w}_{j}")));
        fibers.push((start..start + s).collect::<Vec<_>>());
    }
    let images = (0..k)
        .map(|w| {
            let target = &fibers[base.theta(w)];
            (0..sizes[w])
                .map(|_| target[rng.gen_range(0..target.len())])
                .collect()
        })
        .collect();
    let space = if metric {
        let total = names.len();
        let mut pos: Vec<i64> = (0..2 * total as i64).collect();
        pos.shuffle(rng);
        pos.truncate(total);
        let dist = (0..total)
            .map(|i| (0..total).map(|j| int((pos[i] - pos[j]).abs())).collect())
            .collect();
        MetricSpace::with_metric(names, dist)
    } else {
        MetricSpace::unmetrized(names)
    }
    .expect("generated names are distinct");
    BundleRds::new(base.clone(), space, fibers, images).expect("generated systems are valid")
}

/// `k` elements, `2 ≤ k ≤ 4`. Each element takes every point with
/// probability 1/2 and is emptied on a fiber with probability 1/5;
/// uncovered points then join a random element.
pub fn random_cover<R: Rng>(rng: &mut R, rds: &BundleRds) -> RandomCover {
    let k = rng.gen_range(2..=4);
    let mut sets: Vec<Vec<_>> = (0..k)
        .map(|_| {
            (0..rds.n_fibers())
                .map(|w| {
                    let mut s = rds.empty_set(w);
                    if !rng.gen_bool(0.2) {
                        for j in 0..rds.fiber_len(w) {
                            if rng.gen_bool(0.5) {
                                s.insert(j);
                            }
                        }
                    }
                    s
                })
                .collect()
        })
        .collect();
    for w in 0..rds.n_fibers() {
        for j in 0..rds.fiber_len(w) {
            if !sets.iter().any(|e| e[w].contains(j)) {
                let i = rng.gen_range(0..k);
                sets[i][w].insert(j);
            }
        }
    }
    RandomCover::new(rds, sets.into_iter().map(RandomSet::new).collect())
        .expect("every point was placed")
}

/// Every point gets one of `1..=max_cells` labels.
pub fn random_partition<R: Rng>(rng: &mut R, rds: &BundleRds, max_cells: usize) -> RandomPartition {
    let k = rng.gen_range(1..=max_cells.max(1));
    let labels: Vec<Vec<usize>> = (0..rds.n_fibers())
        .map(|w| (0..rds.fiber_len(w)).map(|_| rng.gen_range(0..k)).collect())
        .collect();
    partition_from_labels(rds, &labels, k)
}

/// Cells `{x : labels[ω][x] = i}` for `i < k`; cells empty on every fiber
/// are dropped.
pub fn partition_from_labels(rds: &BundleRds, labels: &[Vec<usize>], k: usize) -> RandomPartition {
    let elements: Vec<RandomSet> = (0..k)
        .map(|i| {
            RandomSet::new(
                (0..rds.n_fibers())
                    .map(|w| {
                        crate::pointset::PointSet::from_indices(
                            rds.fiber_len(w),
                            (0..rds.fiber_len(w)).filter(|&j| labels[w][j] == i),
                        )
                    })
                    .collect(),
            )
        })
        .filter(|e| !e.is_all_empty())
        .collect();
    RandomPartition::new(RandomCover::new(rds, elements).expect("labels cover every point"))
        .expect("labels are disjoint")
}

/// `μ(ω, x) = P(ω) · c_x / Σ_y c_y` with integer `c_x ∈ 0..=8`, at least one
/// positive, so every `μ_ω` has denominator at most 40.
pub fn random_measure<R: Rng>(rng: &mut R, rds: &BundleRds) -> FiberedMeasure {
    let weights = (0..rds.n_fibers())
        .map(|w| {
            let n = rds.fiber_len(w);
            let mut c: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=8)).collect();
            if c.iter().all(|&v| v == 0) {
                c[rng.gen_range(0..n)] = rng.gen_range(1..=8);
            }
            let total: i64 = c.iter().sum();
            let p = rds.base().prob(w);
            c.iter()
                .map(|&v| p * Rational::new(v.into(), total.into()))
                .collect()
        })
        .collect();
    FiberedMeasure::new(rds, weights).expect("marginal is P by construction")
}

/// The Cesàro limit of a random measure.
pub fn random_invariant_measure<R: Rng>(rng: &mut R, rds: &BundleRds) -> FiberedMeasure {
    cesaro_limit(&random_measure(rng, rds), rds).expect("shapes match")
}

/// A per-ω radius in `{1/2, 1, 3/2, …, 4}`.
pub fn random_radii<R: Rng>(rng: &mut R, rds: &BundleRds) -> Vec<Rational> {
    (0..rds.n_fibers())
        .map(|_| Rational::new(rng.gen_range(1..=8i64).into(), 2i64.into()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_system;
    use crate::verify::trial_rng;

    #[test]
    fn generated_objects_are_valid_and_reproducible() {
        for t in 0..50 {
            let mut rng = trial_rng(7, t);
            let base = random_base(&mut rng, 4);
            assert!(base.violations().is_empty());
            let rds = random_system(&mut rng, &base, 5, true, "x");
            assert!(validate_system(&rds).is_valid());
            let c = random_cover(&mut rng, &rds);
            assert!((2..=4).contains(&c.len()));
            let p = random_partition(&mut rng, &rds, 4);
            assert!(p.is_partition());
            let mu = random_measure(&mut rng, &rds);
            assert!(FiberedMeasure::new(&rds, mu.weights().to_vec()).is_ok());
            let mut again = trial_rng(7, t);
            let base2 = random_base(&mut again, 4);
            assert_eq!(base2, base);
            assert_eq!(random_system(&mut again, &base2, 5, true, "x"), rds);
        }
    }

    #[test]
    fn transient_base_points_get_no_mass() {
        let theta = vec![1, 1, 0];
        let cyc = cycles_of(&theta);
        assert_eq!(cyc, vec![vec![1]]);
    }
}
