//! Integer inequalities of the cover calculus on random systems.

use rand::Rng;

use super::generate::{random_base, random_cover, random_system};
use super::{run_trials, trial_rng, Checks, ScenarioRun, SuiteReport};
use crate::budget::Budget;
use crate::counting::{count_profiles, min_cover_size, minimal_subcover, relative_count};
use crate::covers::{join, pullback, refines, RandomCover, RandomSet};
use crate::error::Result;
use crate::fixtures::{one_point_system, sys_a};
use crate::model::{BundleRds, DrivingSystem};
use crate::pointset::PointSet;
use crate::scenario::ScenarioFile;
use crate::tail_entropy::{power_rule_check, tail_entropy_estimate};

/// Depth up to which per-ω subadditivity and the entropy monotonicities are
/// checked.
const DEPTH: usize = 4;

/// `trials` random systems with covers `r, q, u, v, x, y`, plus a one-point
/// system and a cover with fiberwise-empty elements.
pub fn run_cover_suite(seed: u64, trials: usize, budget: &Budget) -> SuiteReport {
    let mut runs = run_trials(trials, |t| random_trial(seed, t, budget));
    runs.push(degenerate_run(budget));
    runs.push(empty_trace_run(budget));
    SuiteReport::assemble("cover", seed, trials, runs)
}

/// Smallest subfamily covering `target`, by enumerating all subfamilies.
pub fn brute_force_cover(target: &PointSet, family: &[PointSet]) -> Option<usize> {
    if target.is_empty() {
        return Some(1);
    }
    let mut best: Option<usize> = None;
    for mask in 1u64..(1u64 << family.len()) {
        let size = mask.count_ones() as usize;
        if best.is_some_and(|b| size >= b) {
            continue;
        }
        let mut u = target.cleared();
        for (i, f) in family.iter().enumerate() {
            if mask >> i & 1 == 1 {
                u.union_with(f);
            }
        }
        if target.is_subset(&u) {
            best = Some(size);
        }
    }
    best
}

fn random_trial(seed: u64, t: usize, budget: &Budget) -> ScenarioRun {
    let mut rng = trial_rng(seed, t);
    let base = random_base(&mut rng, 4);
    let rds = random_system(&mut rng, &base, 5, false, "x");
    let mut covers: Vec<RandomCover> = (0..6).map(|_| random_cover(&mut rng, &rds)).collect();
    let y = covers.pop().expect("six covers");
    let x = covers.pop().expect("six covers");
    let (r, q, u, v) = (&covers[0], &covers[1], &covers[2], &covers[3]);
    let mut file = ScenarioFile::new(Some(format!("cover-{seed}-{t}")));
    file.add_system("E", &rds);
    for (name, c) in [("r", r), ("q", q), ("u", u), ("v", v), ("x", &x), ("y", &y)] {
        file.add_cover(name, "E", &rds, c);
    }
    let mut checks = Checks::new();
    let m = rng.gen_range(2..=3);
    cover_checks(&mut checks, &rds, [r, q, u, v], (&x, &y), m, budget);
    ScenarioRun {
        label: format!("trial {t}"),
        scenario: file,
        checks,
    }
}

fn counts(r: &RandomCover, q: &RandomCover, rds: &BundleRds) -> Result<Vec<usize>> {
    (0..rds.n_fibers()).map(|w| relative_count(r, q, w)).collect()
}

fn show(v: &[usize]) -> String {
    format!("{v:?}")
}

/// All cover-calculus checks for one system. `x` and `y` build the refined
/// pairs used by the monotonicity checks.
fn cover_checks(
    checks: &mut Checks,
    rds: &BundleRds,
    [r, q, u, v]: [&RandomCover; 4],
    (x, y): (&RandomCover, &RandomCover),
    power_m: usize,
    budget: &Budget,
) {
    let k = rds.n_fibers();
    let theta = |w: usize| rds.base().theta(w);

    // monotonicity: r ⪯ r' = r ∨ x and q' = q ∨ y ⪰ q
    let Some((r_fine, q_fine)) = checks.attempt("count_monotone", || Ok((join(r, x)?, join(q, y)?)))
    else {
        return;
    };
    checks.exact("refinement_premise", refines(&r_fine, r) && refines(&q_fine, q), || {
        "joins do not refine their factors".into()
    });
    if let Some((lo, hi)) =
        checks.attempt("count_monotone", || Ok((counts(r, &q_fine, rds)?, counts(&r_fine, q, rds)?)))
    {
        checks.exact("count_monotone", lo.iter().zip(&hi).all(|(a, b)| a <= b), || {
            format!("N(r|q∨y) = {} exceeds N(r∨x|q) = {}", show(&lo), show(&hi))
        });
    }

    // pullback: N(Θ^{-1}r|Θ^{-1}q)(ω) ≤ N(r|q)(ϑω)
    let (pr, pq) = (pullback(r, rds, 1), pullback(q, rds, 1));
    if let Some((pulled, orig)) =
        checks.attempt("count_pullback", || Ok((counts(&pr, &pq, rds)?, counts(r, q, rds)?)))
    {
        checks.exact(
            "count_pullback",
            (0..k).all(|w| pulled[w] <= orig[theta(w)]),
            || format!("pulled {} vs original {}", show(&pulled), show(&orig)),
        );
        let printed: Vec<usize> = (0..k).filter(|&w| pulled[theta(w)] > orig[w]).collect();
        if !printed.is_empty() {
            checks.note(
                "count_pullback_printed_orientation",
                format!(
                    "N(Θ^-1 r|Θ^-1 q)(ϑω) > N(r|q)(ω) at ω in {printed:?}: pulled {}, original {}",
                    show(&pulled),
                    show(&orig)
                ),
            );
        }
    }

    // N(r∨q|u)(ω) ≤ N(r|u)(ω) · N(q|r∨u)(ω)
    if let Some((lhs, a, b)) = checks.attempt("join_count_chain", || {
        let rq = join(r, q)?;
        let ru = join(r, u)?;
        Ok((counts(&rq, u, rds)?, counts(r, u, rds)?, counts(q, &ru, rds)?))
    }) {
        checks.exact("join_count_chain", (0..k).all(|w| lhs[w] <= a[w] * b[w]), || {
            format!("{} vs {} · {}", show(&lhs), show(&a), show(&b))
        });
    }

    // N(r∨q|u∨v)(ω) ≤ N(r|u)(ω) · N(q|v)(ω)
    if let Some((lhs, a, b)) = checks.attempt("join_count_product", || {
        let rq = join(r, q)?;
        let uv = join(u, v)?;
        Ok((counts(&rq, &uv, rds)?, counts(r, u, rds)?, counts(q, v, rds)?))
    }) {
        checks.exact("join_count_product", (0..k).all(|w| lhs[w] <= a[w] * b[w]), || {
            format!("{} vs {} · {}", show(&lhs), show(&a), show(&b))
        });
    }

    // a_n(r|q∨y) ≤ a_n(r∨x|q) and a_n(r|q) ≤ a_n(r|{E}) at matched depth
    let trivial = RandomCover::trivial(rds);
    if let Some((lo, hi, cond, top)) = checks.attempt("tail_monotone_depth", || {
        Ok((
            tail_entropy_estimate(r, &q_fine, rds, DEPTH, budget)?,
            tail_entropy_estimate(&r_fine, q, rds, DEPTH, budget)?,
            tail_entropy_estimate(r, q, rds, DEPTH, budget)?,
            tail_entropy_estimate(r, &trivial, rds, DEPTH, budget)?,
        ))
    }) {
        let depth = lo.a.len().min(hi.a.len());
        let excess = (0..depth).map(|n| lo.a[n] - hi.a[n]).fold(f64::MIN, f64::max);
        checks.within("tail_monotone_depth", excess, || {
            format!("a_n {:?} vs {:?}", lo.a, hi.a)
        });
        let depth = cond.a.len().min(top.a.len());
        let excess = (0..depth).map(|n| cond.a[n] - top.a[n]).fold(f64::MIN, f64::max);
        checks.within("trivial_dominates", excess, || {
            format!("a_n(r|q) {:?} vs a_n(r|E) {:?}", cond.a, top.a)
        });
        checks.exact(
            "fekete_bracket",
            cond.subadditive && cond.nonnegative && lo.subadditive && hi.subadditive,
            || format!("subadditivity excess {}", cond.max_violation),
        );
    }

    // N_{n+m}(ω) ≤ N_n(ω) · N_m(ϑ^n ω)
    match count_profiles(r, q, rds, DEPTH, budget) {
        Ok((profiles, stop)) => {
            let mut bad = None;
            for n in 1..=profiles.len() {
                for m in 1..=profiles.len() - n {
                    let whole = &profiles[n + m - 1].counts;
                    for w in 0..k {
                        let later = rds.base().theta_pow(w, n);
                        let bound = profiles[n - 1].counts[w] * profiles[m - 1].counts[later];
                        if whole[w] > bound && bad.is_none() {
                            bad = Some((n, m, w, whole[w], bound));
                        }
                    }
                }
            }
            checks.exact("orbit_subadditivity", bad.is_none(), || {
                let (n, m, w, a, b) = bad.expect("set on failure");
                format!("n={n} m={m} ω={w}: {a} > {b}")
            });
            checks.exact("counts_positive", profiles.iter().all(|p| p.counts.iter().all(|&c| c >= 1)), || {
                "a count is zero".into()
            });
            if let Some(e) = stop {
                checks.skip("orbit_subadditivity_full_depth", e.to_string());
            }
        }
        Err(e) => checks.error("orbit_subadditivity", &e),
    }

    for m in [1, power_m] {
        for n in [1, 2] {
            match power_rule_check(r, q, rds, m, n, budget) {
                Ok(p) => checks.exact("power_rule", p.holds, || {
                    format!(
                        "m={m} n={n}: Θ^m side {} vs direct {}",
                        show(&p.power_side),
                        show(&p.direct_side)
                    )
                }),
                Err(e) => checks.error("power_rule", &e),
            }
        }
    }

    // exact set cover against subfamily enumeration on every q-trace
    let mut mismatch = None;
    for w in 0..k {
        let family = r.traces(w);
        for t in q.traces(w) {
            let fast = min_cover_size(&t, &family);
            let slow = brute_force_cover(&t, &family);
            if fast != slow && mismatch.is_none() {
                mismatch = Some((w, fast, slow));
            }
        }
    }
    checks.exact("set_cover_oracle", mismatch.is_none(), || {
        let (w, a, b) = mismatch.expect("set on failure");
        format!("ω={w}: branch and bound {a:?}, enumeration {b:?}")
    });
}

/// One base point, one fiber point: every count is 1.
fn degenerate_run(budget: &Budget) -> ScenarioRun {
    let rds = one_point_system(DrivingSystem::one_point());
    let mut file = ScenarioFile::new(Some("single-point".into()));
    file.add_system("E", &rds);
    let mut checks = Checks::new();
    let t = RandomCover::trivial(&rds);
    let s = RandomCover::singletons(&rds);
    cover_checks(&mut checks, &rds, [&t, &s, &t, &s], (&s, &t), 2, budget);
    let all_one = [(&t, &s), (&s, &t), (&t, &t)].iter().all(|(a, b)| {
        count_profiles(a, b, &rds, DEPTH, budget)
            .map(|(p, _)| p.iter().all(|c| c.counts == vec![1]))
            .unwrap_or(false)
    });
    checks.exact("single_point_counts_one", all_one, || "a count differs from 1".into());
    ScenarioRun {
        label: "single-point".into(),
        scenario: file,
        checks,
    }
}

/// SYS-A with covers whose elements vanish on whole fibers, so `N(∅, R) = 1`
/// is exercised on every path.
fn empty_trace_run(budget: &Budget) -> ScenarioRun {
    let rds = sys_a();
    let names = |v: &[&[&str]]| -> Vec<Vec<String>> {
        v.iter().map(|f| f.iter().map(|s| s.to_string()).collect()).collect()
    };
    let r = RandomCover::from_names(
        &rds,
        &[names(&[&["a"], &[]]), names(&[&["b"], &["c"]]), names(&[&[], &["d"]])],
    )
    .expect("covers SYS-A");
    let q = RandomCover::from_names(&rds, &[names(&[&["a", "b"], &[]]), names(&[&[], &["c", "d"]])])
        .expect("covers SYS-A");
    let mut file = ScenarioFile::new(Some("empty-traces".into()));
    file.add_system("E", &rds);
    file.add_cover("r", "E", &rds, &r);
    file.add_cover("q", "E", &rds, &q);
    let mut checks = Checks::new();
    let empty_on_1 = RandomSet::new(vec![rds.full_set(0), rds.empty_set(1)]);
    checks.exact(
        "empty_set_count_one",
        minimal_subcover(&empty_on_1, &r, 1).ok() == Some(1),
        || "N(∅, R) is not 1".into(),
    );
    let s = RandomCover::singletons(&rds);
    let t = RandomCover::trivial(&rds);
    cover_checks(&mut checks, &rds, [&r, &q, &s, &t], (&q, &r), 2, budget);
    cover_checks(&mut checks, &rds, [&q, &r, &t, &s], (&r, &q), 3, budget);
    ScenarioRun {
        label: "empty-traces".into(),
        scenario: file,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes_and_is_deterministic() {
        let b = Budget::default();
        let a = run_cover_suite(3, 12, &b);
        assert!(a.passed(), "{a}");
        assert_eq!(a.to_json(), run_cover_suite(3, 12, &b).to_json());
        assert!(a.summary("power_rule").unwrap().passed > 0);
    }

    #[test]
    fn brute_force_cover_examples() {
        let t = PointSet::full(3);
        let fam = vec![
            PointSet::from_indices(3, [0, 1]),
            PointSet::from_indices(3, [1, 2]),
            PointSet::from_indices(3, [0, 2]),
        ];
        assert_eq!(brute_force_cover(&t, &fam), Some(2));
        assert_eq!(brute_force_cover(&PointSet::empty(3), &fam), Some(1));
        assert_eq!(brute_force_cover(&t, &fam[..1]), None);
    }
}
