//! Separated-set empirical measures on the pair system and the diagonal
//! measures obtained from them along refining cover chains.

use num::{Signed, Zero};
use serde::Serialize;

use super::{cesaro_limit, invariance_defect};
use crate::budget::Budget;
use crate::counting::{min_cover_size, TraceIterates};
use crate::covers::{refines, RandomCover, SigmaAlgebra};
use crate::error::{Error, Result};
use crate::measures::{transformation_relative_entropy, FiberedMeasure};
use crate::model::{pair_system, BundleRds, PairSystem};
use crate::pointset::PointSet;
use crate::rational::Rational;
use crate::tail_entropy::EntropyEstimate;

/// Largest `r` such that every open `r`-ball of `E_ω` lies in one element
/// of `p(ω)`; `None` when every radius works.
pub fn lebesgue_number(rds: &BundleRds, p: &RandomCover, w: usize) -> Result<Option<Rational>> {
    if !rds.has_metric() {
        return Err(Error::Precondition("Lebesgue numbers need a metric".into()));
    }
    let traces = p.traces(w);
    let n = rds.fiber_len(w);
    let mut best: Option<Rational> = None;
    for x in 0..n {
        let mut radii: Vec<Rational> = (0..n)
            .map(|y| rds.dist(w, x, w, y).expect("metric").clone())
            .collect();
        radii.sort();
        radii.dedup();
        // ball {d ≤ radii[k]} is the open ball for radius in (radii[k], radii[k+1]]
        let mut r_x = None;
        for k in 0..radii.len() {
            let ball = PointSet::from_indices(
                n,
                (0..n).filter(|&y| rds.dist(w, x, w, y).expect("metric") <= &radii[k]),
            );
            if !traces.iter().any(|t| ball.is_subset(t)) {
                r_x = Some(radii[k].clone());
                break;
            }
        }
        if let Some(r) = r_x {
            best = Some(match best {
                Some(b) if b <= r => b,
                _ => r,
            });
        }
    }
    Ok(best)
}

/// `B_y(ω, n, δ) = {x ∈ E_ω : d(T^k x, T^k y) < δ(ϑ^k ω) for all k < n}`.
pub fn bowen_ball(
    rds: &BundleRds,
    w: usize,
    y: usize,
    n: usize,
    delta: &[Rational],
) -> Result<PointSet> {
    if !rds.has_metric() {
        return Err(Error::Precondition("Bowen balls need a metric".into()));
    }
    if delta.len() != rds.n_fibers() {
        return Err(Error::Incompatible("delta needs one value per base point".into()));
    }
    if y >= rds.fiber_len(w) {
        return Err(Error::Domain(format!("point {y} is outside fiber {w}")));
    }
    let len = rds.fiber_len(w);
    Ok(PointSet::from_indices(
        len,
        (0..len).filter(|&x| separation_close(rds, w, x, y, n, delta)),
    ))
}

/// `d_n^ω(x, y) < 1`.
fn separation_close(
    rds: &BundleRds,
    w: usize,
    x: usize,
    y: usize,
    n: usize,
    delta: &[Rational],
) -> bool {
    let (mut wk, mut xk, mut yk) = (w, x, y);
    for _ in 0..n {
        if rds.dist(wk, xk, wk, yk).expect("metric") >= &delta[wk] {
            return false;
        }
        xk = rds.step(wk, xk);
        yk = rds.step(wk, yk);
        wk = rds.base().theta(wk);
    }
    true
}

/// Per-fiber data of [`separated_empirical`].
#[derive(Debug, Clone, Serialize)]
pub struct FiberConstruction {
    pub omega: usize,
    /// The chosen element of `Q^(n)(ω)`.
    pub chosen: Vec<String>,
    /// `N(Q, P^(n))(ω)` for the chosen element.
    pub cover_count: usize,
    pub anchor: String,
    pub separated: Vec<String>,
    /// Every orbit point `ϑ^k ω`, `k < n`, has `δ ≤ η_P`.
    pub lebesgue_gate: bool,
    /// `card E_n(ω) ≥ N(Q, P^(n))(ω)`; `None` when the gate is closed.
    pub card_claim: Option<bool>,
    /// Every point of `Q(ω)` is `d_n^ω`-closer than 1 to the separated set.
    pub maximal: bool,
}

/// The empirical measures built from maximal separated sets.
#[derive(Debug, Clone)]
pub struct SeparatedEmpirical {
    pub n: usize,
    pub pair: PairSystem,
    pub fibers: Vec<FiberConstruction>,
    /// `σ^(n)`.
    pub sigma: FiberedMeasure,
    /// `μ^(n) = (1/n) Σ_{i<n} (Θ^(2))^i σ^(n)`.
    pub mu_n: FiberedMeasure,
    pub mu_n_defect: Rational,
    /// `μ_Q`: the Cesàro limit of `μ^(n)`.
    pub mu_q: FiberedMeasure,
    /// `μ^(n)` lives on `∪_j Q_j × Q_j`.
    pub mu_n_supported: bool,
    /// `μ_Q` lives on `∪_j Q_j × Q_j` (reported, not required).
    pub mu_q_supported: bool,
}

impl SeparatedEmpirical {
    /// All Lebesgue-gated cardinality claims hold.
    pub fn card_claims_hold(&self) -> bool {
        self.fibers.iter().all(|f| f.card_claim != Some(false))
    }
}

fn names(rds: &BundleRds, w: usize, s: &PointSet) -> Vec<String> {
    s.iter().map(|j| rds.point_name(w, j).to_string()).collect()
}

/// Points of `S` ordered by point id.
fn by_id(rds: &BundleRds, w: usize, s: &PointSet) -> Vec<usize> {
    let mut v: Vec<usize> = s.iter().collect();
    v.sort_by(|&a, &b| rds.point_name(w, a).cmp(rds.point_name(w, b)));
    v
}

/// Builds `σ^(n)`, `μ^(n)` and `μ_Q` from maximal `(n, δ)`-separated sets in
/// the element of `Q^(n)(ω)` needing the most elements of `P^(n)(ω)`.
pub fn separated_empirical(
    rds: &BundleRds,
    p: &RandomCover,
    q: &RandomCover,
    n: usize,
    delta: &[Rational],
    budget: &Budget,
) -> Result<SeparatedEmpirical> {
    if !rds.has_metric() {
        return Err(Error::Precondition("separated sets need a metric".into()));
    }
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    if delta.len() != rds.n_fibers() || delta.iter().any(|d| !d.is_positive()) {
        return Err(Error::Domain("delta needs one positive value per base point".into()));
    }
    let mut pi = TraceIterates::new(p, rds)?;
    let mut qi = TraceIterates::new(q, rds)?;
    for _ in 1..n {
        pi.advance(budget)?;
        qi.advance(budget)?;
    }
    let eta = (0..rds.n_fibers())
        .map(|w| lebesgue_number(rds, p, w))
        .collect::<Result<Vec<_>>>()?;
    let pair = pair_system(rds);
    let pr = pair.system();
    let mut sigma_w: Vec<Vec<Rational>> = (0..pr.n_fibers())
        .map(|w| vec![Rational::zero(); pr.fiber_len(w)])
        .collect();
    let mut fibers = Vec::with_capacity(rds.n_fibers());
    for w in 0..rds.n_fibers() {
        let mut chosen: Option<(&PointSet, usize)> = None;
        for t in qi.family(w) {
            let c = min_cover_size(t, pi.family(w))
                .ok_or_else(|| Error::Domain(format!("P does not cover fiber {w}")))?;
            if chosen.is_none_or(|(_, best)| c > best) {
                chosen = Some((t, c));
            }
        }
        let (qset, count) = chosen.expect("a cover has a nonempty trace on every fiber");
        let order = by_id(rds, w, qset);
        let anchor = order[0];
        let mut sep: Vec<usize> = Vec::new();
        for &y in &order {
            if sep.iter().all(|&s| !separation_close(rds, w, y, s, n, delta)) {
                sep.push(y);
            }
        }
        let maximal = order
            .iter()
            .all(|&x| sep.iter().any(|&s| separation_close(rds, w, x, s, n, delta)));
        let lebesgue_gate = (0..n).all(|k| {
            let wk = rds.base().theta_pow(w, k);
            eta[wk].as_ref().is_none_or(|e| delta[wk] <= *e)
        });
        let card_claim = lebesgue_gate.then_some(sep.len() >= count);
        let each = rds.base().prob(w) / Rational::from_integer(sep.len().into());
        for &y in &sep {
            sigma_w[w][pair.encode(w, anchor, y)] += &each;
        }
        let sep_set = PointSet::from_indices(rds.fiber_len(w), sep.iter().copied());
        fibers.push(FiberConstruction {
            omega: w,
            chosen: names(rds, w, qset),
            cover_count: count,
            anchor: rds.point_name(w, anchor).to_string(),
            separated: names(rds, w, &sep_set),
            lebesgue_gate,
            card_claim,
            maximal,
        });
    }
    let sigma = FiberedMeasure::from_weights(sigma_w);
    let mut push = sigma.clone();
    let mut parts = vec![push.clone()];
    for _ in 1..n {
        push = push.image(pr);
        parts.push(push.clone());
    }
    let share = Rational::new(1.into(), n.into());
    let mu_n = FiberedMeasure::combination(
        &parts.iter().map(|m| (share.clone(), m)).collect::<Vec<_>>(),
    )?;
    let mu_n_defect = invariance_defect(&mu_n, pr)?;
    let mu_q = cesaro_limit(&mu_n, pr)?;
    let square_support = |m: &FiberedMeasure| {
        m.support().into_iter().all(|(w, j)| {
            let (x, y) = pair.decode(w, j);
            q.elements().iter().any(|e| e.at(w).contains(x) && e.at(w).contains(y))
        })
    };
    Ok(SeparatedEmpirical {
        n,
        fibers,
        mu_n_supported: square_support(&mu_n),
        mu_q_supported: square_support(&mu_q),
        sigma,
        mu_n,
        mu_n_defect,
        mu_q,
        pair,
    })
}

/// Result of [`diagonal_measure`].
#[derive(Debug, Clone)]
pub struct DiagonalMeasure {
    pub measure: FiberedMeasure,
    pub steps: Vec<SeparatedEmpirical>,
    pub defect: Rational,
    /// `supp m ⊆ {(ω, x, x)}`.
    pub on_diagonal: bool,
    /// The chain ends in singleton cells, so diagonal support is required.
    pub diagonal_required: bool,
    /// `b_n = H_m(ξ^(n) | A_{E^(2)})` for the singleton partition `ξ`.
    pub relative_entropy: EntropyEstimate,
}

impl DiagonalMeasure {
    pub fn certified(&self) -> bool {
        self.defect.is_zero()
            && (!self.diagonal_required || self.on_diagonal)
            && self.relative_entropy.a.iter().all(|&b| b == 0.0)
    }
}

/// Runs [`separated_empirical`] along a refining chain and keeps the
/// invariant measure produced by the last element.
pub fn diagonal_measure(
    rds: &BundleRds,
    cover_chain: &[RandomCover],
    p_chain: &[RandomCover],
    n: usize,
    delta: &[Rational],
    n_max: usize,
    budget: &Budget,
) -> Result<DiagonalMeasure> {
    if cover_chain.is_empty() || cover_chain.len() != p_chain.len() {
        return Err(Error::Domain(
            "cover chain must be nonempty and match the P chain in length".into(),
        ));
    }
    for (i, pair) in cover_chain.windows(2).enumerate() {
        if !refines(&pair[1], &pair[0]) {
            return Err(Error::Precondition(format!(
                "cover chain does not refine at step {}",
                i + 1
            )));
        }
    }
    let steps = cover_chain
        .iter()
        .zip(p_chain)
        .map(|(q, p)| separated_empirical(rds, p, q, n, delta, budget))
        .collect::<Result<Vec<_>>>()?;
    let last = steps.last().expect("nonempty chain");
    let m = last.mu_q.clone();
    let pr = last.pair.system();
    let defect = invariance_defect(&m, pr)?;
    let on_diagonal = m.support().into_iter().all(|(w, j)| {
        let (x, y) = last.pair.decode(w, j);
        x == y
    });
    let final_cover = cover_chain.last().expect("nonempty chain");
    let diagonal_required =
        (0..rds.n_fibers()).all(|w| final_cover.traces(w).iter().all(|t| t.len() == 1));
    let s = SigmaAlgebra::of_factor(&last.pair.project_first());
    let relative_entropy = transformation_relative_entropy(&m, &s, pr, n_max, budget)?;
    Ok(DiagonalMeasure {
        measure: m,
        defect,
        on_diagonal,
        diagonal_required,
        relative_entropy,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{sys_a, sys_b};
    use crate::rational::ratio;

    #[test]
    fn bowen_ball_examples() {
        let a = sys_a();
        let big = [ratio(10, 1), ratio(10, 1)];
        assert_eq!(bowen_ball(&a, 0, 0, 1, &big).unwrap().len(), 2);
        let small = [ratio(1, 2), ratio(1, 2)];
        assert_eq!(bowen_ball(&a, 0, 0, 3, &small).unwrap(), PointSet::singleton(2, 0));
        let one = [ratio(1, 1), ratio(1, 1)];
        // d(a, b) = 1 is not < 1
        assert_eq!(bowen_ball(&a, 0, 0, 2, &one).unwrap(), PointSet::singleton(2, 0));
    }

    #[test]
    fn lebesgue_numbers() {
        let a = sys_a();
        let s = RandomCover::singletons(&a);
        assert_eq!(lebesgue_number(&a, &s, 0).unwrap(), Some(ratio(1, 1)));
        let t = RandomCover::trivial(&a);
        assert_eq!(lebesgue_number(&a, &t, 0).unwrap(), None);
    }

    #[test]
    fn separated_examples() {
        let a = sys_a();
        let b = Budget::default();
        let s = RandomCover::singletons(&a);
        let t = RandomCover::trivial(&a);
        let small = [ratio(1, 2), ratio(1, 2)];
        let e = separated_empirical(&a, &s, &t, 2, &small, &b).unwrap();
        assert_eq!(e.fibers[0].separated.len(), 2);
        assert_eq!(e.fibers[0].cover_count, 2);
        assert_eq!(e.fibers[0].card_claim, Some(true));
        assert!(e.fibers.iter().all(|f| f.maximal));
        let e = separated_empirical(&a, &s, &t, 1, &small, &b).unwrap();
        assert!(e.mu_n_supported);
    }

    #[test]
    fn diagonal_on_cycle() {
        let b4 = sys_b();
        let b = Budget::default();
        let s = RandomCover::singletons(&b4);
        let small = [ratio(1, 2)];
        let d = diagonal_measure(&b4, &[s.clone()], &[s.clone()], 3, &small, 4, &b).unwrap();
        assert!(d.certified());
        assert!(d.on_diagonal && d.diagonal_required);
        let pair = &d.steps[0].pair;
        for j in 0..pair.system().fiber_len(0) {
            let (x, y) = pair.decode(0, j);
            let expect = if x == y { ratio(1, 4) } else { ratio(0, 1) };
            assert_eq!(d.measure.weight(0, j), &expect);
        }
    }
}
