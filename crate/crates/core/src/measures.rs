//! Exact measures on `E` with marginal `P`, conditional and relative
//! entropies against finite σ-algebras, and the entropy inequalities as
//! executable checks.
//!
//! Masses are exact rationals; each entropy term `−m log(m / m_j)` is
//! evaluated in double precision with `0 log 0 = 0`.

use std::collections::BTreeMap;

use num::{Signed, Zero};
use serde::Serialize;

use crate::budget::Budget;
use crate::counting;
use crate::covers::{
    delta_contains, join, pullback, refines, DeltaContainment, RandomCover, RandomPartition,
    RandomSet, SigmaAlgebra,
};
use crate::error::{Error, Result};
use crate::invariant::invariance_defect;
use crate::model::{BundleRds, FactorMap};
use crate::rational::{format_rational, ln, one, to_f64, Rational};
use crate::tail_entropy::{EntropyEstimate, TOLERANCE};

/// `μ(ω, x)` for every point of `E`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiberedMeasure {
    weights: Vec<Vec<Rational>>,
}

impl FiberedMeasure {
    /// Checks shape, nonnegativity and the marginal `Σ_x μ(ω,x) = P(ω)`.
    pub fn new(rds: &BundleRds, weights: Vec<Vec<Rational>>) -> Result<Self> {
        let mu = FiberedMeasure { weights };
        mu.check_shape(&rds.fiber_lens())?;
        if let Some((w, j)) = mu.points().find(|&(w, j)| mu.weights[w][j].is_negative()) {
            return Err(Error::Invalid(format!(
                "negative weight at ({w}, {})",
                rds.point_name(w, j)
            )));
        }
        for w in 0..rds.n_fibers() {
            let m = mu.fiber_mass(w);
            if &m != rds.base().prob(w) {
                return Err(Error::Invalid(format!(
                    "marginal at {w} is {}, P is {}",
                    format_rational(&m),
                    format_rational(rds.base().prob(w))
                )));
            }
        }
        Ok(mu)
    }

    pub(crate) fn from_weights(weights: Vec<Vec<Rational>>) -> Self {
        FiberedMeasure { weights }
    }

    /// `μ_ω` uniform on every fiber.
    pub fn uniform(rds: &BundleRds) -> Self {
        let weights = (0..rds.n_fibers())
            .map(|w| {
                let n = rds.fiber_len(w) as i64;
                let each = rds.base().prob(w) / Rational::from_integer(n.into());
                vec![each; rds.fiber_len(w)]
            })
            .collect();
        FiberedMeasure { weights }
    }

    /// `μ_ω = δ_{x_ω}` with `x_ω = points[ω]` (local index).
    pub fn point_masses(rds: &BundleRds, points: &[usize]) -> Result<Self> {
        if points.len() != rds.n_fibers() {
            return Err(Error::Incompatible("one point per fiber is needed".into()));
        }
        let mut weights: Vec<Vec<Rational>> = (0..rds.n_fibers())
            .map(|w| vec![Rational::zero(); rds.fiber_len(w)])
            .collect();
        for (w, &j) in points.iter().enumerate() {
            if j >= rds.fiber_len(w) {
                return Err(Error::Domain(format!("point {j} is outside fiber {w}")));
            }
            weights[w][j] = rds.base().prob(w).clone();
        }
        Ok(FiberedMeasure { weights })
    }

    /// From per-ω `(point id, weight)` lists; missing points get 0.
    pub fn from_names<S: AsRef<str>>(
        rds: &BundleRds,
        entries: &[Vec<(S, Rational)>],
    ) -> Result<Self> {
        if entries.len() != rds.n_fibers() {
            return Err(Error::Incompatible(format!(
                "measure lists {} fibers, system has {}",
                entries.len(),
                rds.n_fibers()
            )));
        }
        let mut weights: Vec<Vec<Rational>> = (0..rds.n_fibers())
            .map(|w| vec![Rational::zero(); rds.fiber_len(w)])
            .collect();
        for (w, list) in entries.iter().enumerate() {
            for (name, v) in list {
                let j = rds.local_index(w, name.as_ref()).ok_or_else(|| {
                    Error::Domain(format!("`{}` is not a point of fiber {w}", name.as_ref()))
                })?;
                weights[w][j] += v;
            }
        }
        Self::new(rds, weights)
    }

    pub fn weight(&self, w: usize, j: usize) -> &Rational {
        &self.weights[w][j]
    }

    pub fn weights(&self) -> &[Vec<Rational>] {
        &self.weights
    }

    pub fn shape(&self) -> Vec<usize> {
        self.weights.iter().map(Vec::len).collect()
    }

    pub fn check_shape(&self, shape: &[usize]) -> Result<()> {
        if self.shape() == shape {
            Ok(())
        } else {
            Err(Error::Incompatible("measure lives on a different system".into()))
        }
    }

    fn points(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.weights
            .iter()
            .enumerate()
            .flat_map(|(w, f)| (0..f.len()).map(move |j| (w, j)))
    }

    pub fn fiber_mass(&self, w: usize) -> Rational {
        self.weights[w].iter().sum()
    }

    /// `μ(S) = Σ_ω Σ_{x ∈ S(ω)} μ(ω, x)`.
    pub fn mass(&self, s: &RandomSet) -> Rational {
        let mut m = Rational::zero();
        for (w, f) in self.weights.iter().enumerate() {
            for j in s.at(w).iter() {
                m += &f[j];
            }
        }
        m
    }

    /// Points with positive mass, as `(ω, local index)`.
    pub fn support(&self) -> Vec<(usize, usize)> {
        self.points()
            .filter(|&(w, j)| self.weights[w][j].is_positive())
            .collect()
    }

    /// `(1 − t) self + t other`.
    pub fn mix(&self, other: &FiberedMeasure, t: &Rational) -> Result<FiberedMeasure> {
        other.check_shape(&self.shape())?;
        let s = one() - t;
        let weights = self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| &s * x + t * y).collect())
            .collect();
        Ok(FiberedMeasure { weights })
    }

    /// `Σ λ_i μ_i` for measures on the same system.
    pub fn combination(parts: &[(Rational, &FiberedMeasure)]) -> Result<FiberedMeasure> {
        let (_, first) = parts
            .first()
            .ok_or_else(|| Error::Domain("empty combination".into()))?;
        let shape = first.shape();
        let mut weights: Vec<Vec<Rational>> =
            shape.iter().map(|&n| vec![Rational::zero(); n]).collect();
        for (lambda, mu) in parts {
            mu.check_shape(&shape)?;
            for (w, f) in mu.weights.iter().enumerate() {
                for (j, v) in f.iter().enumerate() {
                    weights[w][j] += lambda * v;
                }
            }
        }
        Ok(FiberedMeasure { weights })
    }

    /// `Σ |μ(ω,x) − ν(ω,x)|`.
    pub fn l1_distance(&self, other: &FiberedMeasure) -> Result<Rational> {
        other.check_shape(&self.shape())?;
        let mut d = Rational::zero();
        for (a, b) in self.weights.iter().zip(&other.weights) {
            for (x, y) in a.iter().zip(b) {
                d += (x - y).abs();
            }
        }
        Ok(d)
    }

    /// `μ ∘ Θ^{-1}`.
    pub fn image(&self, rds: &BundleRds) -> FiberedMeasure {
        let mut weights: Vec<Vec<Rational>> = (0..rds.n_fibers())
            .map(|w| vec![Rational::zero(); rds.fiber_len(w)])
            .collect();
        for (w, j) in self.points() {
            let (w2, j2) = rds.skew(w, j);
            weights[w2][j2] += &self.weights[w][j];
        }
        FiberedMeasure { weights }
    }

    /// Weight tables keyed by point id, zero entries omitted.
    pub fn to_names(&self, rds: &BundleRds) -> Vec<Vec<(String, String)>> {
        self.weights
            .iter()
            .enumerate()
            .map(|(w, f)| {
                f.iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(j, v)| (rds.point_name(w, j).to_string(), format_rational(v)))
                    .collect()
            })
            .collect()
    }
}

/// `μ_ω(x) = μ(ω, x) / P(ω)`; `None` on fibers of zero mass.
pub fn disintegrate(mu: &FiberedMeasure) -> Vec<Option<Vec<Rational>>> {
    (0..mu.weights.len())
        .map(|w| {
            let m = mu.fiber_mass(w);
            (!m.is_zero()).then(|| mu.weights[w].iter().map(|v| v / &m).collect())
        })
        .collect()
}

/// `η(t) = −t log t` with `η(0) = 0`.
pub fn eta(t: &Rational) -> f64 {
    if t.is_zero() {
        0.0
    } else {
        -to_f64(t) * ln(t)
    }
}

fn cell_of(p: &RandomCover) -> Vec<Vec<usize>> {
    (0..p.n_fibers())
        .map(|w| {
            let mut idx = vec![usize::MAX; p.shape()[w]];
            for (i, e) in p.elements().iter().enumerate() {
                for j in e.at(w).iter() {
                    if idx[j] == usize::MAX {
                        idx[j] = i;
                    }
                }
            }
            idx
        })
        .collect()
}

/// `H_μ(R | S) = −Σ_j Σ_i μ(R_i ∩ S_j) log(μ(R_i ∩ S_j) / μ(S_j))`.
pub fn conditional_entropy(
    mu: &FiberedMeasure,
    r: &RandomPartition,
    s: &SigmaAlgebra,
) -> Result<f64> {
    if r.shape() != s.shape() {
        return Err(Error::Incompatible("partition and σ-algebra differ in system".into()));
    }
    mu.check_shape(r.shape())?;
    let rc = cell_of(r.cover());
    let sc = cell_of(s.cover());
    let mut joint: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    let mut atoms: BTreeMap<usize, Rational> = BTreeMap::new();
    for (w, f) in mu.weights.iter().enumerate() {
        for (j, v) in f.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            *joint.entry((rc[w][j], sc[w][j])).or_insert_with(Rational::zero) += v;
            *atoms.entry(sc[w][j]).or_insert_with(Rational::zero) += v;
        }
    }
    let mut h = 0.0;
    for ((_, a), m) in &joint {
        h -= to_f64(m) * ln(&(m / &atoms[a]));
    }
    Ok(h.max(0.0))
}

/// `H_μ(R)`.
pub fn entropy(mu: &FiberedMeasure, r: &RandomPartition, rds: &BundleRds) -> Result<f64> {
    conditional_entropy(mu, r, &SigmaAlgebra::trivial(rds))
}

/// `Σ_ω P(ω) H_{μ_ω}(R(ω))`, the right side of the disintegration identity.
pub fn fiber_entropy_integral(mu: &FiberedMeasure, r: &RandomPartition) -> Result<f64> {
    mu.check_shape(r.shape())?;
    let mut h = 0.0;
    for (w, mw) in disintegrate(mu).into_iter().enumerate() {
        let Some(mw) = mw else { continue };
        let pw = to_f64(&mu.fiber_mass(w));
        let mut hw = 0.0;
        for e in r.elements() {
            let m: Rational = e.at(w).iter().map(|j| &mw[j]).sum();
            hw += eta(&m);
        }
        h += pw * hw;
    }
    Ok(h)
}

fn require_invariant(mu: &FiberedMeasure, rds: &BundleRds) -> Result<()> {
    let d = invariance_defect(mu, rds)?;
    if d.is_zero() {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "measure is not invariant (defect {})",
            format_rational(&d)
        )))
    }
}

fn require_backward_invariant(s: &SigmaAlgebra, rds: &BundleRds) -> Result<()> {
    if refines(s.cover(), &pullback(s.cover(), rds, 1)) {
        Ok(())
    } else {
        Err(Error::Precondition(
            "σ-algebra is not backward invariant: Θ^-1 S is not contained in S".into(),
        ))
    }
}

/// `b_n = H_μ(R^(n) | S)` for `n = 1..=n_max`, with the Fekete bracket.
pub fn relative_entropy_sequence(
    mu: &FiberedMeasure,
    r: &RandomPartition,
    s: &SigmaAlgebra,
    rds: &BundleRds,
    n_max: usize,
    budget: &Budget,
) -> Result<EntropyEstimate> {
    if n_max == 0 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    r.check_system(rds)?;
    s.check_system(rds)?;
    require_invariant(mu, rds)?;
    require_backward_invariant(s, rds)?;
    let mut b = Vec::with_capacity(n_max);
    let mut stop = None;
    let mut acc = RandomPartition::new(join(r.cover(), &RandomCover::trivial(rds))?)?;
    for n in 1..=n_max {
        if n > 1 {
            if n > budget.max_depth {
                stop = Some(Error::budget("depth", budget.max_depth, n).to_string());
                break;
            }
            match join(acc.cover(), &pullback(r.cover(), rds, n - 1)) {
                Ok(c) if c.len() <= budget.max_cover_elements => {
                    acc = RandomPartition::new(c)?;
                }
                Ok(c) => {
                    stop = Some(
                        Error::budget(
                            format!("cover elements at depth {n}"),
                            budget.max_cover_elements,
                            c.len(),
                        )
                        .to_string(),
                    );
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        b.push(conditional_entropy(mu, &acc, s)?);
    }
    Ok(EntropyEstimate::from_sequence(b).with_requested(n_max, stop))
}

/// `h_μ(Θ | S)` evaluated at the singleton partition, which refines every
/// partition of a finite `E`.
pub fn transformation_relative_entropy(
    mu: &FiberedMeasure,
    s: &SigmaAlgebra,
    rds: &BundleRds,
    n_max: usize,
    budget: &Budget,
) -> Result<EntropyEstimate> {
    relative_entropy_sequence(mu, &RandomPartition::singletons(rds), s, rds, n_max, budget)
}

/// Output of [`defect`].
#[derive(Debug, Clone, Serialize)]
pub struct DefectReport {
    /// `max(0, raw)`.
    pub value: f64,
    /// `sup_{μ ∈ U_ε} h_μ − h_m` over the family members within `ε`.
    pub raw: f64,
    /// `sup_{μ ∈ U_ε} b_n(μ)/n − b_n(m)/n` at the deepest common `n`.
    pub truncated: f64,
    pub neighborhood: usize,
    pub empty_neighborhood: bool,
}

/// Surrogate for `h*_m(Θ | S)`: the `ε`-neighborhood of `m` in total
/// variation (`L1` distance) is replaced by the members of `family` within
/// `ε`.
pub fn defect(
    m: &FiberedMeasure,
    s: &SigmaAlgebra,
    rds: &BundleRds,
    family: &[FiberedMeasure],
    epsilon: &Rational,
    n_max: usize,
    budget: &Budget,
) -> Result<DefectReport> {
    let base = transformation_relative_entropy(m, s, rds, n_max, budget)?;
    let n = base.a.len();
    let mut raw = f64::NEG_INFINITY;
    let mut truncated = f64::NEG_INFINITY;
    let mut count = 0;
    for mu in family {
        if &mu.l1_distance(m)? > epsilon {
            continue;
        }
        count += 1;
        let est = transformation_relative_entropy(mu, s, rds, n_max, budget)?;
        raw = raw.max(est.value() - base.value());
        let k = n.min(est.a.len());
        if k > 0 {
            truncated = truncated.max(est.a[k - 1] / k as f64 - base.a[k - 1] / k as f64);
        }
    }
    if count == 0 {
        return Ok(DefectReport {
            value: 0.0,
            raw: 0.0,
            truncated: 0.0,
            neighborhood: 0,
            empty_neighborhood: true,
        });
    }
    Ok(DefectReport {
        value: raw.max(0.0),
        raw,
        truncated,
        neighborhood: count,
        empty_neighborhood: false,
    })
}

/// Two sides of an entropy inequality `left ≤ right`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub left: f64,
    pub right: f64,
    /// `right − left`.
    pub slack: f64,
    pub holds: bool,
}

impl InequalityCheck {
    pub fn new(left: f64, right: f64) -> Self {
        let slack = right - left;
        InequalityCheck {
            left,
            right,
            slack,
            holds: slack >= -TOLERANCE,
        }
    }
}

/// `H_μ(R | 𝔔 ∨ F_E) ≤ ∫ log N(R|Q)(ω) dP`.
pub fn lemlog_check(
    mu: &FiberedMeasure,
    r: &RandomPartition,
    q: &RandomPartition,
    rds: &BundleRds,
    budget: &Budget,
) -> Result<InequalityCheck> {
    let s = SigmaAlgebra::generated_by(q.join(&RandomPartition::fibers(rds))?);
    let left = conditional_entropy(mu, r, &s)?;
    let right = counting::integrated_log_count(r.cover(), q.cover(), rds, 1, budget)?;
    Ok(InequalityCheck::new(left, right))
}

/// `H_μ(R | D) ≤ H_μ(Q | D) + ∫ log N(R|Q)(ω) dP`; `D` is `D_H` on a
/// product system.
pub fn lem3_check(
    mu: &FiberedMeasure,
    r: &RandomPartition,
    q: &RandomPartition,
    d: &SigmaAlgebra,
    rds: &BundleRds,
    budget: &Budget,
) -> Result<InequalityCheck> {
    let left = conditional_entropy(mu, r, d)?;
    let right = conditional_entropy(mu, q, d)?
        + counting::integrated_log_count(r.cover(), q.cover(), rds, 1, budget)?;
    Ok(InequalityCheck::new(left, right))
}

/// Output of [`lem415_bound_check`].
#[derive(Debug, Clone, Serialize)]
pub struct Lem415Check {
    pub conditional_entropy: f64,
    /// `−δ log δ − (1−δ) log(1−δ) + δ log k`.
    pub corrected_bound: f64,
    /// `−δ log δ + (1−δ) log(1−δ) + δ log k`, as printed.
    pub printed_bound: f64,
    pub holds_corrected: bool,
    pub holds_printed: bool,
    pub containment_sum: String,
}

/// `H_μ(Q | P)` against the `δ`-containment bound, `k = |q|`. Requires that
/// `p` `δ`-contains `q` and `0 < δ ≤ 1/2`.
pub fn lem415_bound_check(
    mu: &FiberedMeasure,
    p: &RandomPartition,
    q: &RandomPartition,
    delta: &Rational,
) -> Result<Lem415Check> {
    if !delta.is_positive() || delta > &crate::rational::ratio(1, 2) {
        return Err(Error::Precondition("delta must lie in (0, 1/2]".into()));
    }
    let DeltaContainment {
        holds, best_sum, ..
    } = delta_contains(p, q, mu, delta)?;
    if !holds {
        return Err(Error::Precondition(format!(
            "p does not delta-contain q (best sum {})",
            format_rational(&best_sum)
        )));
    }
    let h = conditional_entropy(mu, q, &SigmaAlgebra::generated_by(p.clone()))?;
    let d = to_f64(delta);
    let k = q.len() as f64;
    let corrected = -d * d.ln() - (1.0 - d) * (1.0 - d).ln() + d * k.ln();
    let printed = -d * d.ln() + (1.0 - d) * (1.0 - d).ln() + d * k.ln();
    Ok(Lem415Check {
        conditional_entropy: h,
        corrected_bound: corrected,
        printed_bound: printed,
        holds_corrected: h <= corrected + TOLERANCE,
        holds_printed: h <= printed + TOLERANCE,
        containment_sum: format_rational(&best_sum),
    })
}

/// An increasing chain `A_1 ⪯ A_2 ⪯ …` of finite σ-algebras.
#[derive(Debug, Clone)]
pub struct Filtration {
    chain: Vec<SigmaAlgebra>,
}

impl Filtration {
    pub fn new(chain: Vec<SigmaAlgebra>) -> Result<Self> {
        if chain.is_empty() {
            return Err(Error::Domain("empty filtration".into()));
        }
        for (i, pair) in chain.windows(2).enumerate() {
            if !pair[0].is_coarser_than(&pair[1]) {
                return Err(Error::Precondition(format!(
                    "filtration does not refine at step {}",
                    i + 1
                )));
            }
        }
        Ok(Filtration { chain })
    }

    pub fn chain(&self) -> &[SigmaAlgebra] {
        &self.chain
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FiltrationCheck {
    pub values: Vec<f64>,
    pub monotone: bool,
    pub target_value: f64,
    pub holds: bool,
}

/// `H_μ(R | A_n)` is nonincreasing and ends at `H_μ(R | target)`.
pub fn filtration_limit_check(
    mu: &FiberedMeasure,
    r: &RandomPartition,
    filt: &Filtration,
    target: &SigmaAlgebra,
) -> Result<FiltrationCheck> {
    let last = filt.chain.last().expect("nonempty");
    if !(last.is_coarser_than(target) && target.is_coarser_than(last)) {
        return Err(Error::Precondition(
            "last σ-algebra of the filtration does not generate the target".into(),
        ));
    }
    let values = filt
        .chain
        .iter()
        .map(|a| conditional_entropy(mu, r, a))
        .collect::<Result<Vec<_>>>()?;
    let monotone = values.windows(2).all(|v| v[1] <= v[0] + TOLERANCE);
    let target_value = conditional_entropy(mu, r, target)?;
    let holds = monotone && (values.last().unwrap() - target_value).abs() <= TOLERANCE;
    Ok(FiltrationCheck {
        values,
        monotone,
        target_value,
        holds,
    })
}

/// `(πμ)(ω, x) = Σ_{π_ω y = x} μ(ω, y)`.
pub fn pushforward_measure(pi: &FactorMap, mu: &FiberedMeasure) -> Result<FiberedMeasure> {
    mu.check_shape(&pi.source().fiber_lens())?;
    let t = pi.target();
    let mut weights: Vec<Vec<Rational>> = (0..t.n_fibers())
        .map(|w| vec![Rational::zero(); t.fiber_len(w)])
        .collect();
    for (w, f) in mu.weights.iter().enumerate() {
        for (j, v) in f.iter().enumerate() {
            weights[w][pi.apply(w, j)] += v;
        }
    }
    Ok(FiberedMeasure { weights })
}

/// One step of a continuity witness along `μ_k = (1 − 1/k) m + (1/k) ν`.
#[derive(Debug, Clone, Serialize)]
pub struct ContinuityPoint {
    pub k: u64,
    pub distance: String,
    /// `|H_{μ_k}(R|D) − H_m(R|D)|`.
    pub gap: f64,
    /// `Σ_{i,j} η(|Δ μ(R_i ∩ D_j)|) + Σ_j η(|Δ μ(D_j)|)`.
    pub rate_bound: f64,
    pub holds: bool,
}

/// Continuity of `μ ↦ H_μ(R | D)` along `μ_k → m` with an explicit modulus,
/// valid for `k ≥ 2` (every mass difference is then at most `1/2`).
pub fn continuity_witness(
    m: &FiberedMeasure,
    nu: &FiberedMeasure,
    r: &RandomPartition,
    d: &SigmaAlgebra,
    ks: &[u64],
) -> Result<Vec<ContinuityPoint>> {
    let h_m = conditional_entropy(m, r, d)?;
    let rc = cell_of(r.cover());
    let dc = cell_of(d.cover());
    let masses = |mu: &FiberedMeasure| {
        let mut joint: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        let mut atoms: BTreeMap<usize, Rational> = BTreeMap::new();
        for (w, f) in mu.weights.iter().enumerate() {
            for (j, v) in f.iter().enumerate() {
                *joint.entry((rc[w][j], dc[w][j])).or_insert_with(Rational::zero) += v;
                *atoms.entry(dc[w][j]).or_insert_with(Rational::zero) += v;
            }
        }
        (joint, atoms)
    };
    let (jm, am) = masses(m);
    let mut out = Vec::with_capacity(ks.len());
    for &k in ks {
        if k < 2 {
            return Err(Error::Domain("continuity steps need k ≥ 2".into()));
        }
        let t = Rational::new(1.into(), k.into());
        let mu_k = m.mix(nu, &t)?;
        let (jk, ak) = masses(&mu_k);
        let gap = (conditional_entropy(&mu_k, r, d)? - h_m).abs();
        let mut bound = 0.0;
        for (key, v) in &jk {
            bound += eta(&(v - &jm[key]).abs());
        }
        for (key, v) in &ak {
            bound += eta(&(v - &am[key]).abs());
        }
        out.push(ContinuityPoint {
            k,
            distance: format_rational(&mu_k.l1_distance(m)?),
            gap,
            rate_bound: bound,
            holds: gap <= bound + TOLERANCE,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{sys_a, sys_b};
    use crate::model::pair_system;
    use crate::rational::ratio;

    const LN2: f64 = std::f64::consts::LN_2;

    fn cycle_measure(a: &BundleRds) -> FiberedMeasure {
        // uniform on the 2-cycle {(0,a),(1,c)}
        FiberedMeasure::point_masses(a, &[0, 0]).unwrap()
    }

    #[test]
    fn disintegration_examples() {
        let a = sys_a();
        let u = FiberedMeasure::uniform(&a);
        assert_eq!(disintegrate(&u)[0], Some(vec![ratio(1, 2), ratio(1, 2)]));
        let pm = cycle_measure(&a);
        assert_eq!(disintegrate(&pm)[0], Some(vec![ratio(1, 1), ratio(0, 1)]));
        let total: Rational = (0..2).map(|w| u.fiber_mass(w)).sum();
        assert_eq!(total, one());
        assert!(FiberedMeasure::new(&a, vec![vec![ratio(1, 2), ratio(1, 2)], vec![ratio(0, 1); 2]])
            .is_err());
    }

    #[test]
    fn conditional_entropy_examples() {
        let a = sys_a();
        let u = FiberedMeasure::uniform(&a);
        let s = RandomPartition::singletons(&a);
        let h = conditional_entropy(&u, &s, &SigmaAlgebra::generated_by(s.clone())).unwrap();
        assert_eq!(h, 0.0);
        // four equal cells
        assert!((entropy(&u, &s, &a).unwrap() - 4f64.ln()).abs() < 1e-12);
        let h = conditional_entropy(&u, &s, &SigmaAlgebra::fibers(&a)).unwrap();
        assert!((h - LN2).abs() < 1e-12);
        assert!((fiber_entropy_integral(&u, &s).unwrap() - LN2).abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_sequence_examples() {
        let a = sys_a();
        let b = Budget::default();
        let m = cycle_measure(&a);
        let s = RandomPartition::singletons(&a);
        let est =
            relative_entropy_sequence(&m, &s, &SigmaAlgebra::fibers(&a), &a, 6, &b).unwrap();
        assert!(est.a.iter().all(|&v| v <= LN2 + 1e-12));
        assert!(est.subadditive);
        // r measurable with respect to s
        let full = SigmaAlgebra::full(&a);
        let est = relative_entropy_sequence(&m, &s, &full, &a, 4, &b).unwrap();
        assert!(est.a.iter().all(|&v| v == 0.0));
        // non-invariant measure is rejected by name
        let u = FiberedMeasure::uniform(&a);
        let err = relative_entropy_sequence(&u, &s, &full, &a, 2, &b).unwrap_err();
        assert!(matches!(err, Error::Precondition(ref m) if m.contains("not invariant")));
    }

    #[test]
    fn diagonal_measure_has_zero_relative_entropy() {
        let b = sys_b();
        let p = pair_system(&b);
        let rds = p.system();
        let weights = (0..1)
            .map(|w| {
                (0..rds.fiber_len(w))
                    .map(|j| {
                        let (x, y) = p.decode(w, j);
                        if x == y { ratio(1, 4) } else { ratio(0, 1) }
                    })
                    .collect()
            })
            .collect();
        let m = FiberedMeasure::new(rds, weights).unwrap();
        let s = SigmaAlgebra::of_factor(&p.project_first());
        let est = transformation_relative_entropy(&m, &s, rds, 5, &Budget::default()).unwrap();
        assert!(est.a.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn defect_of_singleton_family_is_zero() {
        let a = sys_a();
        let m = cycle_measure(&a);
        let s = SigmaAlgebra::fibers(&a);
        let r = defect(&m, &s, &a, &[m.clone()], &ratio(1, 10), 4, &Budget::default()).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.neighborhood, 1);
        let r = defect(&m, &s, &a, &[], &ratio(1, 10), 4, &Budget::default()).unwrap();
        assert!(r.empty_neighborhood);
    }

    #[test]
    fn lemlog_examples() {
        let a = sys_a();
        let b = Budget::default();
        let u = FiberedMeasure::uniform(&a);
        let s = RandomPartition::singletons(&a);
        let c = lemlog_check(&u, &s, &s, &a, &b).unwrap();
        assert_eq!((c.left, c.right), (0.0, 0.0));
        let t = RandomPartition::trivial(&a);
        let c = lemlog_check(&u, &s, &t, &a, &b).unwrap();
        assert!(c.holds && c.slack.abs() < 1e-12);
        assert!((c.left - LN2).abs() < 1e-12);
    }

    #[test]
    fn containment_bound_examples() {
        let a = sys_a();
        let u = FiberedMeasure::uniform(&a);
        let p = RandomPartition::singletons(&a);
        let c = lem415_bound_check(&u, &p, &p, &ratio(1, 8)).unwrap();
        assert_eq!(c.conditional_entropy, 0.0);
        assert!(c.holds_corrected);
        let q = RandomPartition::new(
            RandomCover::from_names(
                &a,
                &[
                    vec![vec!["a"], vec!["c", "d"]],
                    vec![vec!["b"], vec![]],
                ],
            )
            .unwrap(),
        )
        .unwrap();
        let c = lem415_bound_check(&u, &p, &q, &ratio(1, 8)).unwrap();
        assert!(c.holds_corrected);
        let t = RandomPartition::trivial(&a);
        assert!(matches!(
            lem415_bound_check(&u, &t, &q, &ratio(1, 8)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn filtration_examples() {
        let a = sys_a();
        let u = FiberedMeasure::uniform(&a);
        let s = RandomPartition::singletons(&a);
        let chain = vec![
            SigmaAlgebra::trivial(&a),
            SigmaAlgebra::fibers(&a),
            SigmaAlgebra::full(&a),
        ];
        let f = Filtration::new(chain).unwrap();
        let c = filtration_limit_check(&u, &s, &f, &SigmaAlgebra::full(&a)).unwrap();
        assert!(c.holds);
        assert!((c.values[0] - 4f64.ln()).abs() < 1e-12);
        assert_eq!(*c.values.last().unwrap(), 0.0);
        assert!(Filtration::new(vec![SigmaAlgebra::full(&a), SigmaAlgebra::trivial(&a)]).is_err());
    }

    #[test]
    fn pushforward_examples() {
        let a = sys_a();
        let id = FactorMap::identity(&a);
        let u = FiberedMeasure::uniform(&a);
        assert_eq!(pushforward_measure(&id, &u).unwrap(), u);
        let m = cycle_measure(&a);
        let half = u.mix(&m, &ratio(1, 2)).unwrap();
        let lhs = pushforward_measure(&id, &half).unwrap();
        let rhs = pushforward_measure(&id, &u)
            .unwrap()
            .mix(&pushforward_measure(&id, &m).unwrap(), &ratio(1, 2))
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn continuity_along_mixtures() {
        let a = sys_a();
        let m = cycle_measure(&a);
        let nu = FiberedMeasure::uniform(&a);
        let s = RandomPartition::singletons(&a);
        let pts =
            continuity_witness(&m, &nu, &s, &SigmaAlgebra::fibers(&a), &[2, 4, 16, 256]).unwrap();
        assert!(pts.iter().all(|p| p.holds));
        assert!(pts.last().unwrap().rate_bound < pts[0].rate_bound);
    }
}
