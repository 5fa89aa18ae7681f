//! Random subshifts of finite type with cylinder covers. Counts reduce to
//! admissible-word counting, which reaches positive entropies that finite
//! fibers cannot.
//!
//! A fiber `E_ω` is the set of one-sided sequences, one per component, with
//! `M_c(ϑ^i ω)[x_i, x_{i+1}] = 1` for every `i`; the fiber map is the shift.
//! Components are independent, so counts factor over them.

use std::collections::HashMap;

use num::bigint::{BigInt, BigUint};
use num::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::counting::min_cover_size;
use crate::error::{Error, Result};
use crate::model::DrivingSystem;
use crate::pointset::PointSet;
use crate::rational::{big_ln, to_f64};
use crate::tail_entropy::EntropyEstimate;

/// One factor of a random SFT: an alphabet and a 0/1 matrix per `ω`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SftComponent {
    pub alphabet: usize,
    /// `matrices[ω][s][t]`.
    pub matrices: Vec<Vec<Vec<u8>>>,
}

impl SftComponent {
    /// The same matrix at every base point.
    pub fn constant(matrix: Vec<Vec<u8>>, base_size: usize) -> Self {
        SftComponent {
            alphabet: matrix.len(),
            matrices: vec![matrix; base_size],
        }
    }

    pub fn full_shift(alphabet: usize, base_size: usize) -> Self {
        Self::constant(vec![vec![1; alphabet]; alphabet], base_size)
    }

    /// Two symbols, the word `11` forbidden.
    pub fn golden_mean(base_size: usize) -> Self {
        Self::constant(vec![vec![1, 1], vec![1, 0]], base_size)
    }
}

/// A product of random SFT components over one driving system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomSft {
    base: DrivingSystem,
    components: Vec<SftComponent>,
}

impl RandomSft {
    /// Checks shapes and that every row and column of every matrix has a 1.
    pub fn new(base: DrivingSystem, components: Vec<SftComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Invalid("an SFT needs at least one component".into()));
        }
        for (c, comp) in components.iter().enumerate() {
            if comp.alphabet == 0 {
                return Err(Error::Invalid(format!("component {c} has an empty alphabet")));
            }
            if comp.matrices.len() != base.size() {
                return Err(Error::Invalid(format!(
                    "component {c} has {} matrices for {} base points",
                    comp.matrices.len(),
                    base.size()
                )));
            }
            for (w, m) in comp.matrices.iter().enumerate() {
                let a = comp.alphabet;
                if m.len() != a || m.iter().any(|r| r.len() != a) {
                    return Err(Error::Invalid(format!("matrix ({c}, {w}) is not {a}x{a}")));
                }
                if m.iter().flatten().any(|&v| v > 1) {
                    return Err(Error::Invalid(format!("matrix ({c}, {w}) is not 0/1")));
                }
                if let Some(s) = (0..a).find(|&s| m[s].iter().all(|&v| v == 0)) {
                    return Err(Error::Invalid(format!(
                        "symbol {s} has no successor in matrix ({c}, {w})"
                    )));
                }
                if let Some(t) = (0..a).find(|&t| m.iter().all(|r| r[t] == 0)) {
                    return Err(Error::Invalid(format!(
                        "symbol {t} has no predecessor in matrix ({c}, {w})"
                    )));
                }
            }
        }
        Ok(RandomSft { base, components })
    }

    pub fn base(&self) -> &DrivingSystem {
        &self.base
    }

    pub fn components(&self) -> &[SftComponent] {
        &self.components
    }

    fn matrix(&self, c: usize, w: usize) -> &Vec<Vec<u8>> {
        &self.components[c].matrices[w]
    }

    /// Row vector `v` times `M_c(ω)`.
    fn step(&self, c: usize, w: usize, v: &[BigUint]) -> Vec<BigUint> {
        let m = self.matrix(c, w);
        let a = self.components[c].alphabet;
        let mut out = vec![BigUint::zero(); a];
        for (s, vs) in v.iter().enumerate() {
            if vs.is_zero() {
                continue;
            }
            for t in 0..a {
                if m[s][t] == 1 {
                    out[t] += vs;
                }
            }
        }
        out
    }

    /// Number of admissible words of length `len` starting at base point
    /// `w`: the entry sum of `M_c(ω) M_c(ϑω) ⋯ M_c(ϑ^{len−2} ω)`.
    pub fn admissible_word_count(&self, c: usize, w: usize, len: usize) -> Result<BigUint> {
        self.check_component(c, w)?;
        if len == 0 {
            return Err(Error::Domain("word length must be at least 1".into()));
        }
        let mut v = vec![BigUint::one(); self.components[c].alphabet];
        let mut wk = w;
        for _ in 1..len {
            v = self.step(c, wk, &v);
            wk = self.base.theta(wk);
        }
        Ok(v.into_iter().sum())
    }

    /// `max_s #{admissible continuations of length `extra` from symbol `s`
    /// at position `start`}`: the largest row sum of
    /// `M_c(ϑ^start ω) ⋯ M_c(ϑ^{start+extra−1} ω)`.
    fn max_continuations(&self, c: usize, w: usize, start: usize, extra: usize) -> BigUint {
        let a = self.components[c].alphabet;
        // column vector: continuations counted backwards from the end
        let mut v = vec![BigUint::one(); a];
        let first = self.base.theta_pow(w, start);
        let positions: Vec<usize> = (0..extra).map(|k| self.base.theta_pow(first, k)).collect();
        for &wk in positions.iter().rev() {
            let m = self.matrix(c, wk);
            v = (0..a)
                .map(|s| (0..a).filter(|&t| m[s][t] == 1).map(|t| v[t].clone()).sum())
                .collect();
        }
        v.into_iter().max().expect("nonempty alphabet")
    }

    fn check_component(&self, c: usize, w: usize) -> Result<()> {
        if c >= self.components.len() {
            return Err(Error::Domain(format!("component {c} does not exist")));
        }
        if w >= self.base.size() {
            return Err(Error::Domain(format!("base point {w} does not exist")));
        }
        Ok(())
    }
}

/// Cylinders on coordinates `0..depth` of the listed components; an empty
/// component list is the trivial cover.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CylinderCoverSpec {
    pub components: Vec<usize>,
    pub depth: usize,
}

impl CylinderCoverSpec {
    pub fn new(mut components: Vec<usize>, depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::Domain("cylinder depth must be at least 1".into()));
        }
        components.sort_unstable();
        components.dedup();
        Ok(CylinderCoverSpec { components, depth })
    }

    pub fn trivial() -> Self {
        CylinderCoverSpec {
            components: Vec::new(),
            depth: 1,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.components.is_empty()
    }

    /// Coordinates spanned by the `n`-th iterate: `n + depth − 1`.
    pub fn span(&self, n: usize) -> usize {
        n + self.depth - 1
    }
}

fn check_specs(sft: &RandomSft, r: &CylinderCoverSpec, q: &CylinderCoverSpec) -> Result<()> {
    for &c in r.components.iter().chain(&q.components) {
        if c >= sft.components.len() {
            return Err(Error::Domain(format!("component {c} does not exist")));
        }
    }
    if let Some(c) = q.components.iter().find(|c| !r.components.contains(c)) {
        return Err(Error::Precondition(format!(
            "Q resolves component {c}, which R does not"
        )));
    }
    Ok(())
}

/// `N(R^(n)|Q^(n))(ω)` for every `ω`, by word counting.
pub fn sft_counts(
    sft: &RandomSft,
    r: &CylinderCoverSpec,
    q: &CylinderCoverSpec,
    n: usize,
) -> Result<Vec<BigUint>> {
    check_specs(sft, r, q)?;
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let lr = r.span(n);
    let lq = q.span(n);
    (0..sft.base.size())
        .into_par_iter()
        .map(|w| {
            let mut total = BigUint::one();
            for &c in &r.components {
                let factor = if !q.components.contains(&c) {
                    sft.admissible_word_count(c, w, lr)?
                } else if lr <= lq {
                    BigUint::one()
                } else {
                    sft.max_continuations(c, w, lq - 1, lr - lq)
                };
                total *= factor;
            }
            Ok(total)
        })
        .collect()
}

/// `a_n = Σ_ω P(ω) log N(R^(n)|Q^(n))(ω)` for cylinder covers.
pub fn sft_tail_sequence(
    sft: &RandomSft,
    r: &CylinderCoverSpec,
    q: &CylinderCoverSpec,
    n_max: usize,
    budget: &Budget,
) -> Result<EntropyEstimate> {
    check_specs(sft, r, q)?;
    if n_max == 0 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    let reached = n_max.min(budget.max_depth);
    let a = (1..=reached)
        .into_par_iter()
        .map(|n| {
            let counts = sft_counts(sft, r, q, n)?;
            Ok(counts
                .iter()
                .enumerate()
                .map(|(w, c)| to_f64(sft.base.prob(w)) * big_ln(&BigInt::from(c.clone())))
                .sum::<f64>())
        })
        .collect::<Result<Vec<f64>>>()?;
    let stop = (reached < n_max)
        .then(|| Error::budget("depth", budget.max_depth, n_max).to_string());
    Ok(EntropyEstimate::from_sequence(a).with_requested(n_max, stop))
}

/// Joint admissible words of the listed components with length `len`,
/// starting at `w`.
fn joint_words(
    sft: &RandomSft,
    comps: &[usize],
    w: usize,
    len: usize,
    limit: usize,
) -> Result<Vec<Vec<Vec<usize>>>> {
    let mut per: Vec<Vec<Vec<usize>>> = Vec::with_capacity(comps.len());
    for &c in comps {
        let a = sft.components[c].alphabet;
        let mut words: Vec<Vec<usize>> = (0..a).map(|s| vec![s]).collect();
        let mut wk = w;
        for _ in 1..len {
            let m = sft.matrix(c, wk);
            words = words
                .into_iter()
                .flat_map(|word| {
                    let last = *word.last().expect("nonempty");
                    (0..a).filter(move |&t| m[last][t] == 1).map(move |t| {
                        let mut nw = word.clone();
                        nw.push(t);
                        nw
                    })
                })
                .collect();
            if words.len() > limit {
                return Err(Error::budget("admissible words", limit, words.len()));
            }
            wk = sft.base.theta(wk);
        }
        per.push(words);
    }
    let mut joint: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for words in per {
        let mut next = Vec::with_capacity(joint.len() * words.len());
        for j in &joint {
            for word in &words {
                let mut nj = j.clone();
                nj.push(word.clone());
                next.push(nj);
            }
        }
        if next.len() > limit {
            return Err(Error::budget("joint admissible words", limit, next.len()));
        }
        joint = next;
    }
    Ok(joint)
}

/// Brute-force counts: materializes joint words over the span of both
/// iterated covers, groups them into `R^(n)` and `Q^(n)` cylinders and runs
/// the exact set-cover count on that incidence.
pub fn sft_brute_force_counts(
    sft: &RandomSft,
    r: &CylinderCoverSpec,
    q: &CylinderCoverSpec,
    n: usize,
    budget: &Budget,
) -> Result<Vec<usize>> {
    check_specs(sft, r, q)?;
    let lr = r.span(n);
    let lq = q.span(n);
    let len = lr.max(lq);
    let mut out = Vec::with_capacity(sft.base.size());
    for w in 0..sft.base.size() {
        let points = joint_words(sft, &r.components, w, len, budget.sft_max_words)?;
        let np = points.len();
        let group = |spec: &CylinderCoverSpec, l: usize| -> Vec<PointSet> {
            let mut cells: HashMap<Vec<Vec<usize>>, PointSet> = HashMap::new();
            let mut order: Vec<Vec<Vec<usize>>> = Vec::new();
            for (i, p) in points.iter().enumerate() {
                let key: Vec<Vec<usize>> = r
                    .components
                    .iter()
                    .zip(p)
                    .filter(|(c, _)| spec.components.contains(c))
                    .map(|(_, word)| word[..l].to_vec())
                    .collect();
                cells
                    .entry(key.clone())
                    .or_insert_with(|| {
                        order.push(key);
                        PointSet::empty(np)
                    })
                    .insert(i);
            }
            order.into_iter().map(|k| cells.remove(&k).expect("key")).collect()
        };
        let r_cells = group(r, lr);
        let q_cells = group(q, lq);
        let mut best = 1;
        for t in &q_cells {
            let c = min_cover_size(t, &r_cells).expect("R cylinders partition the words");
            best = best.max(c);
        }
        out.push(best);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::ToPrimitive;

    fn one_point(components: Vec<SftComponent>) -> RandomSft {
        RandomSft::new(DrivingSystem::one_point(), components).unwrap()
    }

    #[test]
    fn word_counts() {
        let full = one_point(vec![SftComponent::full_shift(2, 1)]);
        assert_eq!(full.admissible_word_count(0, 0, 5).unwrap(), BigUint::from(32u32));
        let gm = one_point(vec![SftComponent::golden_mean(1)]);
        assert_eq!(gm.admissible_word_count(0, 0, 5).unwrap(), BigUint::from(13u32));
        assert_eq!(gm.admissible_word_count(0, 0, 1).unwrap(), BigUint::from(2u32));
        // Fibonacci oracle
        let (mut x, mut y) = (2u64, 3u64);
        for n in 3..=30 {
            let z = x + y;
            x = y;
            y = z;
            assert_eq!(gm.admissible_word_count(0, 0, n).unwrap().to_u64(), Some(y));
        }
    }

    #[test]
    fn dead_symbols_rejected() {
        let bad = SftComponent::constant(vec![vec![1, 0], vec![0, 0]], 1);
        assert!(RandomSft::new(DrivingSystem::one_point(), vec![bad]).is_err());
    }

    #[test]
    fn two_full_shifts() {
        let s = one_point(vec![SftComponent::full_shift(2, 1), SftComponent::full_shift(2, 1)]);
        let r = CylinderCoverSpec::new(vec![0, 1], 1).unwrap();
        let q = CylinderCoverSpec::new(vec![0], 1).unwrap();
        let e = sft_tail_sequence(&s, &r, &q, 12, &Budget::default()).unwrap();
        for v in &e.ratios {
            assert!((v - std::f64::consts::LN_2).abs() < 1e-12);
        }
        for n in 1..=6 {
            let fast: Vec<usize> = sft_counts(&s, &r, &q, n)
                .unwrap()
                .iter()
                .map(|c| c.to_usize().unwrap())
                .collect();
            assert_eq!(fast, sft_brute_force_counts(&s, &r, &q, n, &Budget::default()).unwrap());
            assert_eq!(fast, vec![1 << n]);
        }
        assert!(sft_tail_sequence(&s, &q, &r, 3, &Budget::default()).is_err());
    }

    #[test]
    fn golden_mean_entropy() {
        let gm = one_point(vec![SftComponent::golden_mean(1)]);
        let r = CylinderCoverSpec::new(vec![0], 1).unwrap();
        let e = sft_tail_sequence(&gm, &r, &CylinderCoverSpec::trivial(), 20, &Budget::default())
            .unwrap();
        assert!((e.a[19] - 17711f64.ln()).abs() < 1e-9);
        let e = sft_tail_sequence(&gm, &r, &r, 10, &Budget::default()).unwrap();
        assert!(e.a.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn deeper_q_and_random_matrices_match_brute_force() {
        let base = DrivingSystem::new(
            vec![crate::rational::ratio(1, 2), crate::rational::ratio(1, 2)],
            vec![1, 0],
        )
        .unwrap();
        let c0 = SftComponent {
            alphabet: 3,
            matrices: vec![
                vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]],
                vec![vec![1, 1, 1], vec![1, 0, 0], vec![0, 1, 0]],
            ],
        };
        let c1 = SftComponent::golden_mean(2);
        let s = RandomSft::new(base, vec![c0, c1]).unwrap();
        let b = Budget::default();
        for (r, q) in [
            (CylinderCoverSpec::new(vec![0, 1], 2).unwrap(), CylinderCoverSpec::new(vec![0], 1).unwrap()),
            (CylinderCoverSpec::new(vec![0, 1], 1).unwrap(), CylinderCoverSpec::new(vec![0, 1], 3).unwrap()),
            (CylinderCoverSpec::new(vec![0], 3).unwrap(), CylinderCoverSpec::trivial()),
        ] {
            for n in 1..=4 {
                let fast: Vec<usize> = sft_counts(&s, &r, &q, n)
                    .unwrap()
                    .iter()
                    .map(|c| c.to_usize().unwrap())
                    .collect();
                assert_eq!(fast, sft_brute_force_counts(&s, &r, &q, n, &b).unwrap(), "n={n}");
            }
        }
    }
}
