//! Principal extensions: zero relative entropy over the factor and equal
//! tail entropy upstairs and downstairs.

use super::generate::{random_base, random_cover, random_system};
use super::{run_trials, trial_rng, Checks, ScenarioRun, SuiteReport};
use crate::budget::Budget;
use crate::counting::count_profile;
use crate::covers::{pullback_along, RandomCover, RandomSet, SigmaAlgebra};
use crate::error::{Error, Result};
use crate::fixtures::{static_two_point, sys_a, sys_b};
use crate::invariant::vertex_enumeration;
use crate::measures::transformation_relative_entropy;
use crate::model::{product_system, BundleRds, FactorMap};
use crate::pointset::PointSet;
use crate::scenario::ScenarioFile;
use crate::tail_entropy::{tail_entropy_estimate, tail_entropy_total, TOLERANCE};

/// Depth for the matched count profiles of the documented examples.
pub const N_MAX: usize = 6;

/// Checks one factor map `π: G → E`: every vertex of `I_P(G)` has
/// `b_n = H_m(ξ^(n) | A_G) = 0` for `n ≤ max(n_max, |G|)`, pulled-back
/// covers have the same count profiles as their targets up to `n_max`, and
/// both total tail entropies vanish.
pub fn principal_extension_check(pi: &FactorMap, n_max: usize, budget: &Budget) -> Result<SuiteReport> {
    if n_max == 0 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    if !pi.violations().is_empty() {
        return Err(Error::Invalid("factor map does not intertwine the systems".into()));
    }
    let run = extension_run("extension", pi, &target_family(pi.target()), n_max, true, budget);
    Ok(SuiteReport::assemble("principal", 0, 0, vec![run]))
}

/// The three documented extensions of SYS-A and SYS-B, then `trials`
/// random products `F × E → E`.
pub fn run_principal_suite(seed: u64, trials: usize, budget: &Budget) -> SuiteReport {
    let mut runs: Vec<ScenarioRun> = documented_extensions()
        .into_iter()
        .map(|(label, pi)| extension_run(label, &pi, &target_family(pi.target()), N_MAX, true, budget))
        .collect();
    runs.extend(run_trials(trials, |t| trial(seed, t, budget)));
    SuiteReport::assemble("principal", seed, trials, runs)
}

/// Identity on SYS-A, SYS-A with a static two-point fiber added, and the
/// SYS-B cycle over itself.
pub fn documented_extensions() -> Vec<(&'static str, FactorMap)> {
    let a = sys_a();
    let b = sys_b();
    vec![
        ("identity on SYS-A", FactorMap::identity(&a)),
        (
            "static two-point fiber over SYS-A",
            product_system(&static_two_point(a.base().clone()), &a)
                .expect("same base")
                .project_right(),
        ),
        (
            "SYS-B cycle over SYS-B",
            product_system(&b, &b).expect("same base").project_right(),
        ),
    ]
}

/// Trivial, singletons, fibers and an overlapping split of every fiber
/// into a lower and an upper half.
fn target_family(rds: &BundleRds) -> Vec<RandomCover> {
    let half = |upper: bool| {
        RandomSet::new(
            (0..rds.n_fibers())
                .map(|w| {
                    let n = rds.fiber_len(w);
                    let mid = n / 2;
                    let range: Vec<usize> = if upper { (mid..n).collect() } else { (0..=mid.min(n - 1)).collect() };
                    PointSet::from_indices(n, range)
                })
                .collect(),
        )
    };
    let halves = RandomCover::new(rds, vec![half(false), half(true)])
        .expect("halves cover")
        .with_label("halves");
    vec![
        RandomCover::trivial(rds),
        RandomCover::singletons(rds),
        RandomCover::fibers(rds),
        halves,
    ]
}

fn extension_run(
    label: &str,
    pi: &FactorMap,
    family: &[RandomCover],
    n_max: usize,
    require_principal: bool,
    budget: &Budget,
) -> ScenarioRun {
    let mut checks = Checks::new();
    let g = pi.source();
    let e = pi.target();
    let mut file = ScenarioFile::new(Some(label.into()));
    file.add_system("G", g);
    file.add_system("E", e);
    for (i, c) in family.iter().enumerate() {
        file.add_cover(&format!("R{i}"), "E", e, c);
    }

    let a_g = SigmaAlgebra::of_factor(pi);
    let depth = n_max.max(g.total_points());
    if let Some(poly) = checks.attempt("principal_b_zero", || vertex_enumeration(g, budget)) {
        for (i, m) in poly.vertices().iter().enumerate() {
            file.add_measure(&format!("vertex{i}"), "G", g, m);
            let Some(b) = checks.attempt("principal_b_zero", || {
                transformation_relative_entropy(m, &a_g, g, depth, budget)
            }) else {
                continue;
            };
            let zero = b.a.iter().all(|&v| v == 0.0);
            if require_principal {
                checks.exact("principal_b_zero", zero, || format!("vertex{i}: b_n = {:?}", b.a));
            } else if !zero {
                checks.note(
                    "principal_b_nonzero",
                    format!("vertex{i}: b_1 = {}; b_n is bounded, so the limit is still 0", b.a[0]),
                );
            }
        }
    }

    let lifted: Vec<RandomCover> = family.iter().map(|c| pullback_along(pi, c)).collect();
    for (qi, q) in family.iter().enumerate() {
        for (ri, r) in family.iter().enumerate() {
            for n in 1..=n_max {
                let pair = checks.attempt("matched_counts", || {
                    Ok((
                        count_profile(r, q, e, n, budget)?,
                        count_profile(&lifted[ri], &lifted[qi], g, n, budget)?,
                    ))
                });
                let Some((down, up)) = pair else { continue };
                checks.exact("matched_counts", down.counts == up.counts, || {
                    format!(
                        "n={n} R{ri}|R{qi}: downstairs {:?}, pulled back {:?}",
                        down.counts, up.counts
                    )
                });
            }
        }
    }

    // both h* are 0: every a_n is at most the log of the largest fiber
    let mut zero = true;
    for (rds, fam) in [(e, family), (g, &lifted[..])] {
        let bound = (rds.fiber_lens().into_iter().max().unwrap_or(1) as f64).ln();
        for q in fam {
            for r in fam {
                match tail_entropy_estimate(r, q, rds, n_max, budget) {
                    Ok(est) => zero &= est.a.iter().all(|&v| v <= bound + TOLERANCE),
                    Err(err) => {
                        checks.error("tail_degenerate", &err);
                        zero = false;
                    }
                }
            }
        }
    }
    checks.exact("tail_degenerate", zero, || "an a_n exceeds its fiber bound".into());
    if let Some((down, up)) = checks.attempt("tail_truncated_equal", || {
        Ok((
            tail_entropy_total(family, family, e, n_max, budget)?,
            tail_entropy_total(&lifted, &lifted, g, n_max, budget)?,
        ))
    }) {
        checks.within("tail_truncated_equal", (down - up).abs(), || {
            format!("downstairs {down}, upstairs {up}")
        });
    }
    ScenarioRun {
        label: label.into(),
        scenario: file,
        checks,
    }
}

fn trial(seed: u64, t: usize, budget: &Budget) -> ScenarioRun {
    let mut rng = trial_rng(seed, t);
    let base = random_base(&mut rng, 4);
    let e = random_system(&mut rng, &base, 3, false, "x");
    let f = random_system(&mut rng, &base, 2, false, "y");
    let pi = product_system(&f, &e).expect("same base").project_right();
    let mut family = target_family(&e);
    family.push(random_cover(&mut rng, &e));
    family.push(random_cover(&mut rng, &e));
    // a random F may carry relative entropy; vanishing b_n is only reported
    extension_run(&format!("trial {t}"), &pi, &family, 3, false, budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_extensions_are_principal() {
        let b = Budget::default();
        for (label, pi) in documented_extensions() {
            let r = principal_extension_check(&pi, 4, &b).unwrap();
            assert!(r.passed(), "{label}\n{r}");
            assert!(r.summary("principal_b_zero").unwrap().passed > 0);
            assert!(r.summary("matched_counts").unwrap().passed > 0);
        }
    }

    #[test]
    fn small_random_run_passes() {
        let b = Budget::default();
        let r = run_principal_suite(4, 8, &b);
        assert!(r.passed(), "{r}");
    }
}
