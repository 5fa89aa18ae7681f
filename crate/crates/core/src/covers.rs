//! Random sets, random covers and partitions, finite σ-algebras given by
//! their atoms, and the cover calculus built from joins and pullbacks.

use std::collections::HashSet;
use std::ops::Deref;

use num::Zero;
use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::measures::FiberedMeasure;
use crate::model::{BundleRds, FactorMap};
use crate::pointset::PointSet;
use crate::rational::{format_rational, Rational};

/// A subset `Q(ω) ⊆ E_ω` for every `ω`, in local indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RandomSet {
    sets: Vec<PointSet>,
}

impl RandomSet {
    pub fn new(sets: Vec<PointSet>) -> Self {
        RandomSet { sets }
    }

    pub fn empty(rds: &BundleRds) -> Self {
        RandomSet::new((0..rds.n_fibers()).map(|w| rds.empty_set(w)).collect())
    }

    pub fn full(rds: &BundleRds) -> Self {
        RandomSet::new((0..rds.n_fibers()).map(|w| rds.full_set(w)).collect())
    }

    /// `E_ω` at `ω = w`, empty elsewhere.
    pub fn fiber_only(rds: &BundleRds, w: usize) -> Self {
        let mut s = Self::empty(rds);
        s.sets[w] = rds.full_set(w);
        s
    }

    /// From per-ω lists of point ids.
    pub fn from_names<S: AsRef<str>>(rds: &BundleRds, names: &[Vec<S>]) -> Result<Self> {
        if names.len() != rds.n_fibers() {
            return Err(Error::Incompatible(format!(
                "random set lists {} fibers, system has {}",
                names.len(),
                rds.n_fibers()
            )));
        }
        let mut sets = Vec::with_capacity(names.len());
        for (w, list) in names.iter().enumerate() {
            let mut s = rds.empty_set(w);
            for n in list {
                let j = rds.local_index(w, n.as_ref()).ok_or_else(|| {
                    Error::Domain(format!("`{}` is not a point of fiber {w}", n.as_ref()))
                })?;
                s.insert(j);
            }
            sets.push(s);
        }
        Ok(RandomSet { sets })
    }

    pub fn to_names(&self, rds: &BundleRds) -> Vec<Vec<String>> {
        self.sets
            .iter()
            .enumerate()
            .map(|(w, s)| s.iter().map(|j| rds.point_name(w, j).to_string()).collect())
            .collect()
    }

    pub fn at(&self, w: usize) -> &PointSet {
        &self.sets[w]
    }

    pub fn fibers(&self) -> &[PointSet] {
        &self.sets
    }

    pub fn n_fibers(&self) -> usize {
        self.sets.len()
    }

    pub fn is_all_empty(&self) -> bool {
        self.sets.iter().all(PointSet::is_empty)
    }

    pub fn intersection(&self, other: &RandomSet) -> RandomSet {
        RandomSet::new(
            self.sets
                .iter()
                .zip(&other.sets)
                .map(|(a, b)| a.intersection(b))
                .collect(),
        )
    }

    pub fn union(&self, other: &RandomSet) -> RandomSet {
        RandomSet::new(
            self.sets
                .iter()
                .zip(&other.sets)
                .map(|(a, b)| a.union(b))
                .collect(),
        )
    }

    pub fn is_subset(&self, other: &RandomSet) -> bool {
        self.sets.iter().zip(&other.sets).all(|(a, b)| a.is_subset(b))
    }

    pub fn fits(&self, rds: &BundleRds) -> bool {
        self.sets.len() == rds.n_fibers()
            && self
                .sets
                .iter()
                .enumerate()
                .all(|(w, s)| s.iter().all(|j| j < rds.fiber_len(w)))
    }
}

/// A finite family of random sets whose union is `E_ω` on every fiber.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomCover {
    elements: Vec<RandomSet>,
    label: Option<String>,
    shape: Vec<usize>,
}

impl RandomCover {
    /// Validates the covering property against `rds`.
    pub fn new(rds: &BundleRds, elements: Vec<RandomSet>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Invalid("a cover needs at least one element".into()));
        }
        for (i, e) in elements.iter().enumerate() {
            if !e.fits(rds) {
                return Err(Error::Incompatible(format!(
                    "cover element {i} does not fit the system"
                )));
            }
        }
        for w in 0..rds.n_fibers() {
            let mut u = rds.empty_set(w);
            for e in &elements {
                u.union_with(e.at(w));
            }
            if u.len() != rds.fiber_len(w) {
                return Err(Error::Invalid(format!("elements do not cover fiber {w}")));
            }
        }
        Ok(RandomCover {
            elements,
            label: None,
            shape: rds.fiber_lens(),
        })
    }

    pub(crate) fn from_parts(shape: Vec<usize>, elements: Vec<RandomSet>) -> Self {
        RandomCover {
            elements,
            label: None,
            shape,
        }
    }

    /// Per-element, per-ω point id lists.
    pub fn from_names<S: AsRef<str>>(rds: &BundleRds, elements: &[Vec<Vec<S>>]) -> Result<Self> {
        let sets = elements
            .iter()
            .map(|e| RandomSet::from_names(rds, e))
            .collect::<Result<Vec<_>>>()?;
        Self::new(rds, sets)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn elements(&self) -> &[RandomSet] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn n_fibers(&self) -> usize {
        self.shape.len()
    }

    /// `{E}`.
    pub fn trivial(rds: &BundleRds) -> Self {
        RandomCover::from_parts(rds.fiber_lens(), vec![RandomSet::full(rds)]).with_label("trivial")
    }

    /// One element `{(ω, x)}` per point of `E`.
    pub fn singletons(rds: &BundleRds) -> Self {
        let mut elements = Vec::with_capacity(rds.total_points());
        for w in 0..rds.n_fibers() {
            for j in 0..rds.fiber_len(w) {
                let mut s = RandomSet::empty(rds);
                s.sets[w].insert(j);
                elements.push(s);
            }
        }
        RandomCover::from_parts(rds.fiber_lens(), elements).with_label("singletons")
    }

    /// `F_E`: the partition of `E` by `ω`.
    pub fn fibers(rds: &BundleRds) -> Self {
        let elements = (0..rds.n_fibers())
            .map(|w| RandomSet::fiber_only(rds, w))
            .collect();
        RandomCover::from_parts(rds.fiber_lens(), elements).with_label("fibers")
    }

    /// Nonempty, pairwise distinct traces `{Q(ω) : Q ∈ 𝒬}` on fiber `w`.
    pub fn traces(&self, w: usize) -> Vec<PointSet> {
        let mut seen = HashSet::new();
        self.elements
            .iter()
            .map(|e| e.at(w))
            .filter(|s| !s.is_empty() && seen.insert((*s).clone()))
            .cloned()
            .collect()
    }

    pub fn is_partition(&self) -> bool {
        (0..self.n_fibers()).all(|w| {
            let mut seen = PointSet::empty(self.shape[w]);
            for e in &self.elements {
                if e.at(w).intersects(&seen) {
                    return false;
                }
                seen.union_with(e.at(w));
            }
            true
        })
    }

    pub fn check_system(&self, rds: &BundleRds) -> Result<()> {
        rds.check_shape(&self.shape)
    }

    pub fn to_names(&self, rds: &BundleRds) -> Vec<Vec<Vec<String>>> {
        self.elements.iter().map(|e| e.to_names(rds)).collect()
    }

    fn same_shape(&self, other: &RandomCover) -> Result<()> {
        if self.shape == other.shape {
            Ok(())
        } else {
            Err(Error::Incompatible("covers live on different systems".into()))
        }
    }
}

/// A random cover with fiberwise disjoint elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomPartition(RandomCover);

impl RandomPartition {
    pub fn new(cover: RandomCover) -> Result<Self> {
        if cover.is_partition() {
            Ok(RandomPartition(cover))
        } else {
            Err(Error::Invalid(format!(
                "cover `{}` is not a partition",
                cover.label().unwrap_or("?")
            )))
        }
    }

    pub fn singletons(rds: &BundleRds) -> Self {
        RandomPartition(RandomCover::singletons(rds))
    }

    pub fn trivial(rds: &BundleRds) -> Self {
        RandomPartition(RandomCover::trivial(rds))
    }

    pub fn fibers(rds: &BundleRds) -> Self {
        RandomPartition(RandomCover::fibers(rds))
    }

    pub fn cover(&self) -> &RandomCover {
        &self.0
    }

    pub fn into_cover(self) -> RandomCover {
        self.0
    }

    pub fn join(&self, other: &RandomPartition) -> Result<RandomPartition> {
        join(&self.0, &other.0).map(RandomPartition)
    }

    pub fn iterate(&self, rds: &BundleRds, n: usize, budget: &Budget) -> Result<RandomPartition> {
        iterate_cover(&self.0, rds, n, budget).map(RandomPartition)
    }
}

impl Deref for RandomPartition {
    type Target = RandomCover;
    fn deref(&self) -> &RandomCover {
        &self.0
    }
}

/// A finite sub-σ-algebra, stored as its atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaAlgebra(RandomPartition);

impl SigmaAlgebra {
    pub fn generated_by(p: RandomPartition) -> Self {
        SigmaAlgebra(p)
    }

    /// `{∅, E}`.
    pub fn trivial(rds: &BundleRds) -> Self {
        SigmaAlgebra(RandomPartition::trivial(rds))
    }

    /// `F_E`, the σ-algebra of sets depending only on `ω`.
    pub fn fibers(rds: &BundleRds) -> Self {
        SigmaAlgebra(RandomPartition::fibers(rds))
    }

    /// All subsets of `E`.
    pub fn full(rds: &BundleRds) -> Self {
        SigmaAlgebra(RandomPartition::singletons(rds))
    }

    /// `π^{-1}` of the full σ-algebra on the target: the σ-algebra of the
    /// factor (e.g. `A_G`, `D_H`, `A_H`, `A_{E^(2)}`).
    pub fn of_factor(pi: &FactorMap) -> Self {
        SigmaAlgebra(RandomPartition(pullback_along(
            pi,
            &RandomCover::singletons(pi.target()),
        )))
    }

    pub fn atoms(&self) -> &RandomPartition {
        &self.0
    }

    pub fn join(&self, other: &SigmaAlgebra) -> Result<SigmaAlgebra> {
        self.0.join(&other.0).map(SigmaAlgebra)
    }

    /// `𝒮 ⪯ 𝒯`: every atom of `self` is a union of atoms of `other`.
    pub fn is_coarser_than(&self, other: &SigmaAlgebra) -> bool {
        refines(other.0.cover(), self.0.cover())
    }
}

impl Deref for SigmaAlgebra {
    type Target = RandomPartition;
    fn deref(&self) -> &RandomPartition {
        &self.0
    }
}

/// `a ∨ b`: all intersections `A ∩ B`; elements empty on every fiber and
/// repeated elements are dropped.
pub fn join(a: &RandomCover, b: &RandomCover) -> Result<RandomCover> {
    a.same_shape(b)?;
    let mut seen = HashSet::new();
    let mut elements = Vec::new();
    for x in &a.elements {
        for y in &b.elements {
            let z = x.intersection(y);
            if !z.is_all_empty() && seen.insert(z.clone()) {
                elements.push(z);
            }
        }
    }
    Ok(RandomCover::from_parts(a.shape.clone(), elements))
}

/// `(Θ^i)^{-1} 𝒬`: element-wise preimages `(T_ω^i)^{-1} Q(ϑ^i ω)`.
pub fn pullback(q: &RandomCover, rds: &BundleRds, i: usize) -> RandomCover {
    let base = rds.base();
    let elements = q
        .elements
        .iter()
        .map(|e| {
            RandomSet::new(
                (0..rds.n_fibers())
                    .map(|w| rds.preimage_iter(w, i, e.at(base.theta_pow(w, i))))
                    .collect(),
            )
        })
        .collect();
    RandomCover::from_parts(q.shape.clone(), elements)
}

/// `π^{-1} 𝒬`: element-wise preimages along a factor map, on the source.
pub fn pullback_along(pi: &FactorMap, q: &RandomCover) -> RandomCover {
    let src = pi.source();
    let elements = q
        .elements
        .iter()
        .map(|e| {
            RandomSet::new(
                (0..src.n_fibers())
                    .map(|w| pi.fiber_preimage(w, e.at(w)))
                    .collect(),
            )
        })
        .collect();
    let mut out = RandomCover::from_parts(src.fiber_lens(), elements);
    if let Some(l) = q.label() {
        out = out.with_label(format!("pi^-1 {l}"));
    }
    out
}

/// `𝒬^(n) = ⋁_{i<n} (Θ^i)^{-1} 𝒬`.
pub fn iterate_cover(q: &RandomCover, rds: &BundleRds, n: usize, budget: &Budget) -> Result<RandomCover> {
    if n == 0 {
        return Err(Error::Domain("iterate depth must be at least 1".into()));
    }
    q.check_system(rds)?;
    let mut acc = join(q, &RandomCover::trivial(rds))?;
    for i in 1..n {
        acc = join(&acc, &pullback(q, rds, i))?;
        if acc.len() > budget.max_cover_elements {
            return Err(Error::budget(
                format!("cover elements at depth {}", i + 1),
                budget.max_cover_elements,
                acc.len(),
            ));
        }
    }
    if let Some(l) = q.label() {
        acc = acc.with_label(format!("{l}^({n})"));
    }
    Ok(acc)
}

/// `r ≻ q` with one witness element of `q` per element of `r`, valid on
/// every fiber at once.
pub fn refines(r: &RandomCover, q: &RandomCover) -> bool {
    r.shape == q.shape
        && r
            .elements
            .iter()
            .all(|a| q.elements.iter().any(|b| a.is_subset(b)))
}

/// Fiberwise variant: each trace of `r` lies in some trace of `q` on the
/// same fiber, with witnesses allowed to vary with `ω`.
pub fn refines_fiberwise(r: &RandomCover, q: &RandomCover) -> bool {
    r.shape == q.shape
        && (0..r.n_fibers()).all(|w| {
            r.elements
                .iter()
                .all(|a| q.elements.iter().any(|b| a.at(w).is_subset(b.at(w))))
        })
}

/// Result of [`small_diameter_partition`].
#[derive(Debug, Clone)]
pub struct SmallDiameterPartition {
    pub partition: RandomPartition,
    /// Largest cell diameter per fiber.
    pub diameters: Vec<Rational>,
    /// `μ(∂R) = 0` for each supplied measure; always true in the discrete
    /// topology, where every cell has empty boundary.
    pub boundary_null: Vec<bool>,
}

/// A partition whose cells have diameter at most `delta[ω]` on fiber `ω`,
/// built greedily in local point order.
pub fn small_diameter_partition(
    rds: &BundleRds,
    delta: &[Rational],
    measures: &[FiberedMeasure],
) -> Result<SmallDiameterPartition> {
    if !rds.has_metric() {
        return Err(Error::Precondition("small-diameter partitions need a metric".into()));
    }
    if delta.len() != rds.n_fibers() {
        return Err(Error::Incompatible("delta needs one value per base point".into()));
    }
    let mut cells: Vec<Vec<PointSet>> = Vec::new();
    let mut diameters = Vec::with_capacity(rds.n_fibers());
    for w in 0..rds.n_fibers() {
        let mut fiber_cells: Vec<Vec<usize>> = Vec::new();
        for j in 0..rds.fiber_len(w) {
            let slot = fiber_cells.iter().position(|cell| {
                cell.iter()
                    .all(|&i| rds.dist(w, i, w, j).is_some_and(|d| d <= &delta[w]))
            });
            match slot {
                Some(k) => fiber_cells[k].push(j),
                None => fiber_cells.push(vec![j]),
            }
        }
        let mut diam = Rational::zero();
        for cell in &fiber_cells {
            for &i in cell {
                for &j in cell {
                    if let Some(d) = rds.dist(w, i, w, j) {
                        if d > &diam {
                            diam = d.clone();
                        }
                    }
                }
            }
        }
        diameters.push(diam);
        cells.push(
            fiber_cells
                .into_iter()
                .map(|c| PointSet::from_indices(rds.fiber_len(w), c))
                .collect(),
        );
    }
    let k = cells.iter().map(Vec::len).max().unwrap_or(0);
    let elements = (0..k)
        .map(|i| {
            RandomSet::new(
                (0..rds.n_fibers())
                    .map(|w| cells[w].get(i).cloned().unwrap_or_else(|| rds.empty_set(w)))
                    .collect(),
            )
        })
        .collect();
    let partition = RandomPartition(
        RandomCover::from_parts(rds.fiber_lens(), elements).with_label("small-diameter"),
    );
    Ok(SmallDiameterPartition {
        partition,
        diameters,
        boundary_null: vec![true; measures.len()],
    })
}

/// Witness of `δ`-containment: `blocks[i]` lists the cells of `p` merged
/// into `R_i`, matched with `Q_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaWitness {
    pub blocks: Vec<Vec<usize>>,
    pub sum: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaContainment {
    pub holds: bool,
    /// `min Σ_i μ(R_i Δ Q_i)` over coarsenings `R ⪯ p` and orderings.
    pub best_sum: Rational,
    pub witness: Option<DeltaWitness>,
}

/// Decides whether `p` `δ`-contains `q`: some coarsening `R` of `p` and
/// matching of `R` with `q` (padded with empty sets) has
/// `Σ_i μ(R_i Δ Q_i) < δ`.
///
/// The objective splits over the cells of `p`: with `R_i` the union of
/// the cells sent to `Q_i`, `Σ_i μ(R_i Δ Q_i) = Σ_i μ(Q_i) +
/// Σ_c (μ(c) − 2μ(c ∩ Q_{i(c)}))`, and a cell matched to an empty pad costs
/// `μ(c)`, never less. Each cell therefore picks its best `Q_i`
/// independently and the optimum is exact without enumeration.
pub fn delta_contains(
    p: &RandomPartition,
    q: &RandomPartition,
    mu: &FiberedMeasure,
    delta: &Rational,
) -> Result<DeltaContainment> {
    p.same_shape(q)?;
    mu.check_shape(p.shape())?;
    let k = q.len();
    let mut blocks = vec![Vec::new(); k];
    let mut sum: Rational = q.elements().iter().map(|e| mu.mass(e)).sum();
    for (c, cell) in p.elements().iter().enumerate() {
        let mc = mu.mass(cell);
        let (best, gain) = q
            .elements()
            .iter()
            .enumerate()
            .map(|(i, qi)| (i, mu.mass(&cell.intersection(qi))))
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
            .expect("partition is nonempty");
        sum += &mc - gain * Rational::from_integer(2.into());
        blocks[best].push(c);
    }
    let holds = &sum < delta;
    let witness = holds.then(|| DeltaWitness {
        blocks,
        sum: format_rational(&sum),
    });
    Ok(DeltaContainment {
        holds,
        best_sum: sum,
        witness,
    })
}

/// [`delta_contains`] by brute force: every coarsening of `p` (set
/// partitions of its cells) and every injective matching of blocks to `q`
/// (blocks left over meet empty pads). Used as an oracle for the separable
/// solution.
pub fn delta_contains_exhaustive(
    p: &RandomPartition,
    q: &RandomPartition,
    mu: &FiberedMeasure,
    delta: &Rational,
    budget: &Budget,
) -> Result<DeltaContainment> {
    p.same_shape(q)?;
    mu.check_shape(p.shape())?;
    let cells = p.len();
    let k = q.len();
    if cells > budget.delta_max_cells {
        return Err(Error::budget("delta-containment cells of p", budget.delta_max_cells, cells));
    }
    if k > budget.delta_max_k {
        return Err(Error::budget("delta-containment cells of q", budget.delta_max_k, k));
    }
    let q_mass: Vec<Rational> = q.elements().iter().map(|e| mu.mass(e)).collect();
    // cells of p are disjoint, so block masses are sums of cell masses
    let cell_mass: Vec<Rational> = p.elements().iter().map(|e| mu.mass(e)).collect();
    let cell_inter: Vec<Vec<Rational>> = p
        .elements()
        .iter()
        .map(|e| q.elements().iter().map(|qi| mu.mass(&e.intersection(qi))).collect())
        .collect();
    let two = Rational::from_integer(2.into());
    let mut best: Option<(Rational, Vec<Vec<usize>>)> = None;
    // restricted growth string: label[c] ≤ 1 + max(label[..c])
    let mut label = vec![0usize; cells];
    loop {
        let n_blocks = label.iter().max().map_or(0, |m| m + 1);
        let mut block_mass = vec![Rational::zero(); n_blocks];
        let mut block_inter = vec![vec![Rational::zero(); k]; n_blocks];
        for (c, &b) in label.iter().enumerate() {
            block_mass[b] += &cell_mass[c];
            for i in 0..k {
                block_inter[b][i] += &cell_inter[c][i];
            }
        }
        // symmetric difference cost of block b against Q_i, or against a pad
        let costs: Vec<Vec<Rational>> = (0..n_blocks)
            .map(|b| {
                std::iter::once(block_mass[b].clone())
                    .chain((0..k).map(|i| &block_mass[b] + &q_mass[i] - &block_inter[b][i] * &two))
                    .collect()
            })
            .collect();
        let cost = |b: usize, i: Option<usize>| -> &Rational { &costs[b][i.map_or(0, |i| i + 1)] };
        // dp over blocks with the set of used Q indices
        let full = 1usize << k;
        let mut dp: Vec<Option<(Rational, Vec<Option<usize>>)>> = vec![None; full];
        dp[0] = Some((Rational::zero(), Vec::new()));
        for b in 0..n_blocks {
            let mut next: Vec<Option<(Rational, Vec<Option<usize>>)>> = vec![None; full];
            for mask in 0..full {
                let Some((v, choice)) = &dp[mask] else { continue };
                let mut relax = |m: usize, i: Option<usize>| {
                    let c = v + cost(b, i);
                    if next[m].as_ref().is_none_or(|(old, _)| &c < old) {
                        let mut ch = choice.clone();
                        ch.push(i);
                        next[m] = Some((c, ch));
                    }
                };
                relax(mask, None);
                for i in 0..k {
                    if mask & (1 << i) == 0 {
                        relax(mask | (1 << i), Some(i));
                    }
                }
            }
            dp = next;
        }
        for (mask, entry) in dp.iter().enumerate() {
            let Some((v, choice)) = entry else { continue };
            // unmatched Q_i meet an empty block
            let unmatched: Rational = (0..k)
                .filter(|i| mask & (1 << i) == 0)
                .map(|i| q_mass[i].clone())
                .sum();
            let total = v + unmatched;
            if best.as_ref().is_none_or(|(b, _)| &total < b) {
                let mut w = vec![Vec::new(); k];
                for (b, i) in choice.iter().enumerate() {
                    if let Some(i) = i {
                        w[*i] = (0..cells).filter(|&c| label[c] == b).collect();
                    }
                }
                best = Some((total, w));
            }
        }
        if !next_growth_string(&mut label) {
            break;
        }
    }
    let (best_sum, blocks) = best.expect("at least one coarsening");
    let holds = &best_sum < delta;
    let witness = holds.then(|| DeltaWitness {
        blocks,
        sum: format_rational(&best_sum),
    });
    Ok(DeltaContainment {
        holds,
        best_sum,
        witness,
    })
}

fn next_growth_string(label: &mut [usize]) -> bool {
    for i in (1..label.len()).rev() {
        let cap = label[..i].iter().max().map_or(0, |m| m + 1);
        if label[i] < cap {
            label[i] += 1;
            for l in &mut label[i + 1..] {
                *l = 0;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::sys_a;
    use crate::rational::ratio;

    fn names(v: &[&[&str]]) -> Vec<Vec<String>> {
        v.iter().map(|f| f.iter().map(|s| s.to_string()).collect()).collect()
    }

    fn fiber_family(c: &RandomCover, rds: &BundleRds, w: usize) -> Vec<Vec<String>> {
        let mut out: Vec<Vec<String>> = c
            .traces(w)
            .iter()
            .map(|s| s.iter().map(|j| rds.point_name(w, j).to_string()).collect())
            .collect();
        out.sort();
        out
    }

    /// Q_1 = {a} ∪ E_1, Q_2 = {b} ∪ E_1.
    fn q_split(rds: &BundleRds) -> RandomCover {
        RandomCover::from_names(
            rds,
            &[names(&[&["a"], &["c", "d"]]), names(&[&["b"], &["c", "d"]])],
        )
        .unwrap()
    }

    #[test]
    fn join_examples() {
        let a = sys_a();
        let q = q_split(&a);
        let j = join(&q, &RandomCover::trivial(&a)).unwrap();
        assert_eq!(j.elements(), q.elements());
        assert_eq!(fiber_family(&j, &a, 0), vec![vec!["a"], vec!["b"]]);
        let s = RandomCover::singletons(&a);
        assert!(join(&s, &s).unwrap().is_partition());
    }

    #[test]
    fn pullback_examples() {
        let a = sys_a();
        let q = RandomCover::from_names(
            &a,
            &[names(&[&["a", "b"], &["c"]]), names(&[&["a", "b"], &["d"]])],
        )
        .unwrap();
        assert_eq!(pullback(&q, &a, 0), q);
        let p = pullback(&q, &a, 1);
        assert_eq!(fiber_family(&p, &a, 0), vec![vec!["a", "b"]]);
        let t = RandomCover::trivial(&a);
        assert_eq!(pullback(&t, &a, 3).elements(), t.elements());
    }

    #[test]
    fn iterate_examples() {
        let a = sys_a();
        let b = Budget::default();
        let s = RandomCover::singletons(&a);
        let s2 = iterate_cover(&s, &a, 2, &b).unwrap();
        assert_eq!(s2.traces(0).len(), 2);
        assert!(s2.is_partition());
        assert!(refines(&s2, &iterate_cover(&s, &a, 1, &b).unwrap()));
        assert!(matches!(iterate_cover(&s, &a, 0, &b), Err(Error::Domain(_))));
    }

    #[test]
    fn refinement_examples() {
        let a = sys_a();
        let q = q_split(&a);
        let s = RandomCover::singletons(&a);
        assert!(refines(&q, &q));
        assert!(refines(&join(&s, &q).unwrap(), &q));
        assert!(refines(&s, &q));
        assert!(!refines(&q, &s));
        // uniform witness is stricter than fiberwise
        let r = RandomCover::from_names(
            &a,
            &[names(&[&["a"], &["c"]]), names(&[&["b"], &["d"]])],
        )
        .unwrap();
        let v = RandomCover::from_names(
            &a,
            &[names(&[&["a"], &["d"]]), names(&[&["b"], &["c"]])],
        )
        .unwrap();
        assert!(!refines(&r, &v));
        assert!(refines_fiberwise(&r, &v));
    }

    #[test]
    fn small_diameter_examples() {
        let a = sys_a();
        let big = small_diameter_partition(&a, &[ratio(10, 1), ratio(10, 1)], &[]).unwrap();
        assert_eq!(big.partition.len(), 1);
        let small = small_diameter_partition(&a, &[ratio(1, 2), ratio(1, 2)], &[]).unwrap();
        assert_eq!(small.partition.traces(0).len(), 2);
        let one = small_diameter_partition(&a, &[ratio(1, 1), ratio(1, 2)], &[]).unwrap();
        assert_eq!(one.partition.traces(0).len(), 1);
        assert_eq!(one.diameters[0], ratio(1, 1));
        assert!(one.partition.is_partition());
    }

    #[test]
    fn delta_contains_examples() {
        let a = sys_a();
        let mu = FiberedMeasure::uniform(&a);
        let p = RandomPartition::singletons(&a);
        let d = delta_contains(&p, &p, &mu, &ratio(1, 100)).unwrap();
        assert!(d.holds);
        assert!(d.best_sum.is_zero());
        let t = RandomPartition::trivial(&a);
        assert!(delta_contains(&p, &t, &mu, &ratio(1, 100)).unwrap().holds);
        let q = RandomPartition::new(q_split(&a)).unwrap_err();
        assert!(matches!(q, Error::Invalid(_)));
        let q = RandomPartition::new(
            RandomCover::from_names(&a, &[names(&[&["a"], &["c", "d"]]), names(&[&["b"], &[]])])
                .unwrap(),
        )
        .unwrap();
        let d = delta_contains(&p, &q, &mu, &ratio(1, 8)).unwrap();
        assert!(d.holds);
        assert!(d.best_sum.is_zero());
        // trivial p cannot resolve a nontrivial q
        let d = delta_contains(&t, &q, &mu, &ratio(1, 8)).unwrap();
        assert!(!d.holds);
        assert_eq!(d.best_sum, ratio(1, 2));
        let e = delta_contains_exhaustive(&t, &q, &mu, &ratio(1, 8), &Budget::default()).unwrap();
        assert_eq!(e.best_sum, d.best_sum);
        let e = delta_contains_exhaustive(&p, &q, &mu, &ratio(1, 8), &Budget::default()).unwrap();
        assert!(e.holds && e.best_sum.is_zero());
    }

    #[test]
    fn growth_strings_count_set_partitions() {
        // Bell numbers
        for (n, bell) in [(1, 1), (2, 2), (3, 5), (4, 15), (5, 52)] {
            let mut label = vec![0; n];
            let mut count = 1;
            while next_growth_string(&mut label) {
                count += 1;
            }
            assert_eq!(count, bell);
        }
    }
}
