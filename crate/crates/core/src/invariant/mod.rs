//! Invariant measures on finite systems: invariance defect, exact Cesàro
//! limits, lifts along factor maps, the invariant polytope and the
//! separated-set and diagonal constructions.

mod constructions;
mod polytope;

pub use constructions::{
    bowen_ball, diagonal_measure, lebesgue_number, separated_empirical, DiagonalMeasure,
    FiberConstruction, SeparatedEmpirical,
};
pub use polytope::{vertex_enumeration, HullCertificate, InvariantPolytope};

use num::Zero;

use crate::error::{Error, Result};
use crate::measures::{pushforward_measure, FiberedMeasure};
use crate::model::{BundleRds, FactorMap};
use crate::rational::{format_rational, Rational};

/// `‖μ ∘ Θ^{-1} − μ‖₁`; zero iff `μ` is `Θ`-invariant.
pub fn invariance_defect(mu: &FiberedMeasure, rds: &BundleRds) -> Result<Rational> {
    mu.check_shape(&rds.fiber_lens())?;
    mu.image(rds).l1_distance(mu)
}

/// Flat indexing of the states `(ω, j)` of `E`.
pub(crate) struct StateIndex {
    offset: Vec<usize>,
    total: usize,
}

impl StateIndex {
    pub(crate) fn new(rds: &BundleRds) -> Self {
        let mut offset = Vec::with_capacity(rds.n_fibers());
        let mut total = 0;
        for w in 0..rds.n_fibers() {
            offset.push(total);
            total += rds.fiber_len(w);
        }
        StateIndex { offset, total }
    }

    pub(crate) fn flat(&self, w: usize, j: usize) -> usize {
        self.offset[w] + j
    }

    pub(crate) fn total(&self) -> usize {
        self.total
    }

    pub(crate) fn split(&self, s: usize) -> (usize, usize) {
        let w = self.offset.partition_point(|&o| o <= s) - 1;
        (w, s - self.offset[w])
    }
}

/// Terminal cycle of every state of the functional graph of `Θ`.
pub(crate) struct CycleStructure {
    pub(crate) cycles: Vec<Vec<usize>>,
    pub(crate) cycle_of: Vec<usize>,
}

pub(crate) fn cycle_structure(rds: &BundleRds, idx: &StateIndex) -> CycleStructure {
    let n = idx.total();
    let next: Vec<usize> = (0..n)
        .map(|s| {
            let (w, j) = idx.split(s);
            let (w2, j2) = rds.skew(w, j);
            idx.flat(w2, j2)
        })
        .collect();
    const UNSEEN: usize = usize::MAX;
    let mut cycle_of = vec![UNSEEN; n];
    let mut on_path = vec![false; n];
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if cycle_of[start] != UNSEEN {
            continue;
        }
        let mut path = Vec::new();
        let mut s = start;
        while cycle_of[s] == UNSEEN && !on_path[s] {
            on_path[s] = true;
            path.push(s);
            s = next[s];
        }
        let id = if cycle_of[s] != UNSEEN {
            cycle_of[s]
        } else {
            let pos = path.iter().position(|&p| p == s).expect("cycle on path");
            let members = path[pos..].to_vec();
            cycles.push(members);
            cycles.len() - 1
        };
        for p in path {
            on_path[p] = false;
            cycle_of[p] = id;
        }
    }
    CycleStructure { cycles, cycle_of }
}

/// `lim_n (1/n) Σ_{i<n} Θ^i ν`, exactly: every point's mass is spread
/// uniformly over the cycle its orbit ends in.
pub fn cesaro_limit(nu: &FiberedMeasure, rds: &BundleRds) -> Result<FiberedMeasure> {
    nu.check_shape(&rds.fiber_lens())?;
    let idx = StateIndex::new(rds);
    let cs = cycle_structure(rds, &idx);
    let mut cycle_mass = vec![Rational::zero(); cs.cycles.len()];
    for w in 0..rds.n_fibers() {
        for j in 0..rds.fiber_len(w) {
            cycle_mass[cs.cycle_of[idx.flat(w, j)]] += nu.weight(w, j);
        }
    }
    let mut weights: Vec<Vec<Rational>> = (0..rds.n_fibers())
        .map(|w| vec![Rational::zero(); rds.fiber_len(w)])
        .collect();
    for (c, members) in cs.cycles.iter().enumerate() {
        if cycle_mass[c].is_zero() {
            continue;
        }
        let each = &cycle_mass[c] / Rational::from_integer(members.len().into());
        for &s in members {
            let (w, j) = idx.split(s);
            weights[w][j] += &each;
        }
    }
    Ok(FiberedMeasure::from_weights(weights))
}

/// An invariant measure on the source of a factor map projecting onto a
/// given invariant measure, with both certificates evaluated exactly.
#[derive(Debug, Clone)]
pub struct Lift {
    pub measure: FiberedMeasure,
    pub defect: Rational,
    pub projects_exactly: bool,
}

impl Lift {
    pub fn certified(&self) -> bool {
        self.defect.is_zero() && self.projects_exactly
    }
}

/// Spreads `μ` uniformly over each `π`-fiber, then takes the Cesàro limit.
pub fn lift_invariant(pi: &FactorMap, mu: &FiberedMeasure) -> Result<Lift> {
    let target = pi.target();
    let d = invariance_defect(mu, target)?;
    if !d.is_zero() {
        return Err(Error::Precondition(format!(
            "measure to lift is not invariant (defect {})",
            format_rational(&d)
        )));
    }
    let src = pi.source();
    let weights = (0..src.n_fibers())
        .map(|w| {
            let mut size = vec![0usize; target.fiber_len(w)];
            for j in 0..src.fiber_len(w) {
                size[pi.apply(w, j)] += 1;
            }
            (0..src.fiber_len(w))
                .map(|j| {
                    let x = pi.apply(w, j);
                    mu.weight(w, x) / Rational::from_integer(size[x].into())
                })
                .collect()
        })
        .collect();
    let nu = FiberedMeasure::from_weights(weights);
    let m = cesaro_limit(&nu, src)?;
    let defect = invariance_defect(&m, src)?;
    let projects_exactly = &pushforward_measure(pi, &m)? == mu;
    Ok(Lift {
        measure: m,
        defect,
        projects_exactly,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{identity_system, static_two_point, sys_a, sys_b};
    use crate::model::product_system;
    use crate::rational::ratio;

    #[test]
    fn defect_examples() {
        let b = sys_b();
        let u = FiberedMeasure::uniform(&b);
        assert!(invariance_defect(&u, &b).unwrap().is_zero());
        let pm = FiberedMeasure::point_masses(&b, &[0]).unwrap();
        assert_eq!(invariance_defect(&pm, &b).unwrap(), ratio(2, 1));
        let id = identity_system(3);
        let pm = FiberedMeasure::point_masses(&id, &[2]).unwrap();
        assert!(invariance_defect(&pm, &id).unwrap().is_zero());
    }

    #[test]
    fn cesaro_examples() {
        let b = sys_b();
        let pm = FiberedMeasure::point_masses(&b, &[0]).unwrap();
        assert_eq!(cesaro_limit(&pm, &b).unwrap(), FiberedMeasure::uniform(&b));
        let u = FiberedMeasure::uniform(&b);
        assert_eq!(cesaro_limit(&u, &b).unwrap(), u);
        // transient b feeds the cycle through c
        let a = sys_a();
        let nu = FiberedMeasure::point_masses(&a, &[1, 1]).unwrap();
        let m = cesaro_limit(&nu, &a).unwrap();
        assert_eq!(m, FiberedMeasure::point_masses(&a, &[0, 0]).unwrap());
    }

    #[test]
    fn lift_examples() {
        let b = sys_b();
        let u = FiberedMeasure::uniform(&b);
        let l = lift_invariant(&FactorMap::identity(&b), &u).unwrap();
        assert!(l.certified());
        assert_eq!(l.measure, u);

        let a = sys_a();
        let ext = product_system(&static_two_point(a.base().clone()), &a).unwrap();
        let pi = ext.project_right();
        let mu = FiberedMeasure::point_masses(&a, &[0, 0]).unwrap();
        let l = lift_invariant(&pi, &mu).unwrap();
        assert!(l.certified());
        // half the mass on each static label
        let w0: Vec<_> = (0..ext.system.fiber_len(0))
            .map(|j| l.measure.weight(0, j).clone())
            .collect();
        assert_eq!(w0, vec![ratio(1, 4), ratio(0, 1), ratio(1, 4), ratio(0, 1)]);
        let bad = FiberedMeasure::uniform(&a);
        assert!(matches!(lift_invariant(&pi, &bad), Err(Error::Precondition(_))));
    }
}
