//! Integrated log-count sequences and their Fekete brackets: `h_Θ(R|Q)`,
//! `h(Θ|Q)`, `h*(Θ)` over finite cover families, and the power-rule count
//! identity.

use serde::Serialize;

use crate::budget::Budget;
use crate::counting::{count_profile, count_profiles};
use crate::covers::{iterate_cover, RandomCover};
use crate::error::{Error, Result};
use crate::model::BundleRds;

pub use crate::counting::integrated_log_count;

/// Absolute tolerance for inequalities between sums of logarithms.
pub const TOLERANCE: f64 = 1e-9;

/// A finite subadditive sequence `a_1..a_N` with its running Fekete bracket
/// `min_{k ≤ n} a_k / k`. No lower bracket is claimed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyEstimate {
    pub a: Vec<f64>,
    pub ratios: Vec<f64>,
    pub running_inf: Vec<f64>,
    /// Requested depth; `a.len()` is the depth reached.
    pub n_max: usize,
    /// `a_{n+m} ≤ a_n + a_m + 1e-9` for every computed pair.
    pub subadditive: bool,
    /// Largest `a_{n+m} − a_n − a_m` seen (`≤ 0` when subadditive).
    pub max_violation: f64,
    pub nonnegative: bool,
    /// Why the sequence stopped before `n_max`.
    pub budget_stop: Option<String>,
}

impl EntropyEstimate {
    /// Builds the estimate from `a_1..a_N`; also the hook for synthetic
    /// sequences.
    pub fn from_sequence(a: Vec<f64>) -> Self {
        let ratios: Vec<f64> = a
            .iter()
            .enumerate()
            .map(|(i, v)| v / (i + 1) as f64)
            .collect();
        let mut running_inf = Vec::with_capacity(a.len());
        let mut best = f64::INFINITY;
        for r in &ratios {
            best = best.min(*r);
            running_inf.push(best);
        }
        let mut max_violation = f64::NEG_INFINITY;
        for n in 1..=a.len() {
            for m in 1..=n {
                if n + m > a.len() {
                    break;
                }
                max_violation = max_violation.max(a[n + m - 1] - a[n - 1] - a[m - 1]);
            }
        }
        if a.len() < 2 {
            max_violation = 0.0;
        }
        EntropyEstimate {
            n_max: a.len(),
            subadditive: max_violation <= TOLERANCE,
            nonnegative: a.iter().all(|&v| v >= -TOLERANCE),
            max_violation,
            ratios,
            running_inf,
            a,
            budget_stop: None,
        }
    }

    pub(crate) fn with_requested(mut self, n_max: usize, stop: Option<String>) -> Self {
        self.n_max = n_max;
        self.budget_stop = stop;
        self
    }

    /// The certified upper bracket at the depth reached; `+∞` when nothing
    /// was computed.
    pub fn value(&self) -> f64 {
        self.running_inf.last().copied().unwrap_or(f64::INFINITY)
    }

    pub fn depth_reached(&self) -> usize {
        self.a.len()
    }

    pub fn is_complete(&self) -> bool {
        self.budget_stop.is_none()
    }
}

/// `a_n = ∫ log N(R^(n)|Q^(n))(ω) dP` for `n = 1..=n_max`. On a budget stop
/// the partial sequence is returned with the reason.
pub fn tail_entropy_estimate(
    r: &RandomCover,
    q: &RandomCover,
    rds: &BundleRds,
    n_max: usize,
    budget: &Budget,
) -> Result<EntropyEstimate> {
    let (profiles, stop) = count_profiles(r, q, rds, n_max, budget)?;
    let a = profiles.iter().map(|p| p.integrated_log(rds)).collect();
    Ok(EntropyEstimate::from_sequence(a).with_requested(n_max, stop.map(|e| e.to_string())))
}

/// `h(Θ|Q)` over `family`: the largest bracket among its members.
pub fn cover_conditional_entropy(
    q: &RandomCover,
    family: &[RandomCover],
    rds: &BundleRds,
    n_max: usize,
    budget: &Budget,
) -> Result<f64> {
    if family.is_empty() {
        return Err(Error::Domain("cover family is empty".into()));
    }
    family.iter().try_fold(f64::NEG_INFINITY, |acc, r| {
        Ok(acc.max(tail_entropy_estimate(r, q, rds, n_max, budget)?.value()))
    })
}

/// `h*(Θ)` over finite families: `min_{Q} max_{R} h_Θ(R|Q)`.
pub fn tail_entropy_total(
    q_family: &[RandomCover],
    r_family: &[RandomCover],
    rds: &BundleRds,
    n_max: usize,
    budget: &Budget,
) -> Result<f64> {
    if q_family.is_empty() {
        return Err(Error::Domain("cover family is empty".into()));
    }
    q_family.iter().try_fold(f64::INFINITY, |acc, q| {
        Ok(acc.min(cover_conditional_entropy(q, r_family, rds, n_max, budget)?))
    })
}

/// `h^(r)_Θ(R) = h_Θ(R | {E})`.
pub fn relative_topological(
    r: &RandomCover,
    rds: &BundleRds,
    n_max: usize,
    budget: &Budget,
) -> Result<EntropyEstimate> {
    tail_entropy_estimate(r, &RandomCover::trivial(rds), rds, n_max, budget)
}

/// Outcome of [`power_rule_check`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PowerRuleCheck {
    pub m: usize,
    pub n: usize,
    /// `N((R^(m))^(n)|(Q^(m))^(n))(ω)` computed on the `Θ^m` system.
    pub power_side: Vec<usize>,
    /// `N(R^(nm)|Q^(nm))(ω)` computed on `Θ`.
    pub direct_side: Vec<usize>,
    pub holds: bool,
    /// First `(ω, power_side, direct_side)` that differs.
    pub counterexample: Option<(usize, usize, usize)>,
}

/// Compares the two sides of the count identity behind
/// `h(Θ^m | Q^(m)) = m h(Θ | Q)`, computed independently: `Θ^m` is
/// materialized as its own system and `R^(m)`, `Q^(m)` as covers.
pub fn power_rule_check(
    r: &RandomCover,
    q: &RandomCover,
    rds: &BundleRds,
    m: usize,
    n: usize,
    budget: &Budget,
) -> Result<PowerRuleCheck> {
    if m == 0 || n == 0 {
        return Err(Error::Domain("m and n must be positive".into()));
    }
    let power = rds.power(m);
    let rm = iterate_cover(r, rds, m, budget)?;
    let qm = iterate_cover(q, rds, m, budget)?;
    let power_side = count_profile(&rm, &qm, &power, n, budget)?.counts;
    let direct_side = count_profile(r, q, rds, n * m, budget)?.counts;
    let counterexample = power_side
        .iter()
        .zip(&direct_side)
        .enumerate()
        .find(|(_, (a, b))| a != b)
        .map(|(w, (a, b))| (w, *a, *b));
    Ok(PowerRuleCheck {
        m,
        n,
        holds: counterexample.is_none(),
        power_side,
        direct_side,
        counterexample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::sys_a;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn synthetic_linear_sequence() {
        let a: Vec<f64> = (1..=10).map(|n| n as f64 * LN2).collect();
        let e = EntropyEstimate::from_sequence(a);
        assert!(e.running_inf.iter().all(|v| (v - LN2).abs() < 1e-15));
        assert!(e.subadditive);
    }

    #[test]
    fn synthetic_sequence_infimum_is_exact() {
        let a = vec![3.0, 4.0, 5.0, 5.5, 6.0];
        let e = EntropyEstimate::from_sequence(a.clone());
        let min = a
            .iter()
            .enumerate()
            .map(|(i, v)| v / (i + 1) as f64)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(e.value(), min);
        assert!(e.subadditive);
        let bad = EntropyEstimate::from_sequence(vec![1.0, 3.0]);
        assert!(!bad.subadditive);
        assert_eq!(bad.max_violation, 1.0);
    }

    #[test]
    fn sys_a_singletons_against_trivial() {
        let a = sys_a();
        let b = Budget::default();
        let s = RandomCover::singletons(&a);
        let t = RandomCover::trivial(&a);
        let e = tail_entropy_estimate(&s, &t, &a, 16, &b).unwrap();
        assert!((e.a[0] - LN2).abs() < 1e-12);
        assert!((e.value() - LN2 / 16.0).abs() < 1e-12);
        assert!(e.a.iter().all(|&v| v <= LN2 + 1e-12));
        let e = tail_entropy_estimate(&s, &s, &a, 5, &b).unwrap();
        assert_eq!(e.value(), 0.0);
        let e = relative_topological(&s, &a, 8, &b).unwrap();
        assert!((e.value() - LN2 / 8.0).abs() < 1e-12);
        assert_eq!(relative_topological(&t, &a, 8, &b).unwrap().value(), 0.0);
    }

    #[test]
    fn family_values() {
        let a = sys_a();
        let b = Budget::default();
        let s = RandomCover::singletons(&a);
        let t = RandomCover::trivial(&a);
        assert_eq!(cover_conditional_entropy(&t, &[t.clone()], &a, 4, &b).unwrap(), 0.0);
        let v = cover_conditional_entropy(&t, &[s.clone()], &a, 8, &b).unwrap();
        assert!((v - LN2 / 8.0).abs() < 1e-12);
        let w = cover_conditional_entropy(&t, &[s.clone(), t.clone()], &a, 8, &b).unwrap();
        assert!(w >= v);
        assert_eq!(
            tail_entropy_total(&[t.clone(), s.clone()], &[s.clone()], &a, 8, &b).unwrap(),
            0.0
        );
        assert_eq!(tail_entropy_total(&[t.clone()], &[s.clone()], &a, 8, &b).unwrap(), v);
    }

    #[test]
    fn power_rule_examples() {
        let a = sys_a();
        let b = Budget::default();
        let s = RandomCover::singletons(&a);
        let t = RandomCover::trivial(&a);
        assert!(power_rule_check(&s, &t, &a, 1, 3, &b).unwrap().holds);
        let c = power_rule_check(&s, &t, &a, 2, 2, &b).unwrap();
        assert!(c.holds);
        assert_eq!(c.direct_side, vec![2, 2]);
        let c = power_rule_check(&s, &s, &a, 3, 2, &b).unwrap();
        assert_eq!(c.power_side, vec![1, 1]);
    }
}
