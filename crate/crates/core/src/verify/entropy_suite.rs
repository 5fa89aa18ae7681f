//! Conditional-entropy inequalities on random measures over product systems.

use rand::Rng;

use super::generate::{partition_from_labels, random_base, random_measure, random_partition, random_system};
use super::{run_trials, trial_rng, Checks, ScenarioRun, SuiteReport};
use crate::budget::Budget;
use crate::covers::{delta_contains, delta_contains_exhaustive, RandomPartition, SigmaAlgebra};
use crate::measures::{
    conditional_entropy, fiber_entropy_integral, filtration_limit_check, lem3_check,
    lem415_bound_check, lemlog_check, FiberedMeasure, Filtration,
};
use crate::model::{product_system, BundleRds};
use crate::rational::{format_rational, ratio};
use crate::scenario::ScenarioFile;

/// `trials` random product systems `H = G × E` with a random measure and
/// random partitions.
pub fn run_entropy_suite(seed: u64, trials: usize, budget: &Budget) -> SuiteReport {
    let runs = run_trials(trials, |t| trial(seed, t, budget));
    SuiteReport::assemble("entropy", seed, trials, runs)
}

fn trial(seed: u64, t: usize, budget: &Budget) -> ScenarioRun {
    let mut rng = trial_rng(seed, t);
    let base = random_base(&mut rng, 4);
    let g = random_system(&mut rng, &base, 3, false, "y");
    let e = random_system(&mut rng, &base, 3, false, "x");
    let prod = product_system(&g, &e).expect("same base");
    let h = &prod.system;
    let mu = random_measure(&mut rng, h);
    let r = random_partition(&mut rng, h, 4);
    let q = random_partition(&mut rng, h, 4);
    let chain: Vec<RandomPartition> = (0..3).map(|_| random_partition(&mut rng, h, 3)).collect();
    let p = random_partition(&mut rng, h, 7);
    let near = perturbed_coarsening(&mut rng, h, &p);

    let mut file = ScenarioFile::new(Some(format!("entropy-{seed}-{t}")));
    file.add_system("H", h);
    file.add_measure("mu", "H", h, &mu);
    for (name, c) in [("r", &r), ("q", &q), ("p", &p), ("p_near", &near)] {
        file.add_cover(name, "H", h, c.cover());
    }
    for (i, c) in chain.iter().enumerate() {
        file.add_cover(&format!("chain{i}"), "H", h, c.cover());
    }

    let mut checks = Checks::new();
    let d = SigmaAlgebra::of_factor(&prod.project_left());
    entropy_checks(&mut checks, h, &mu, &r, &q, &d, budget);
    filtration_checks(&mut checks, &mu, &r, &chain);
    containment_checks(&mut checks, &mu, &p, &near, budget);
    ScenarioRun {
        label: format!("trial {t}"),
        scenario: file,
        checks,
    }
}

/// Merges the cells of `p` into at most four groups, then moves one point
/// to a random group half of the time.
fn perturbed_coarsening<R: Rng>(rng: &mut R, rds: &BundleRds, p: &RandomPartition) -> RandomPartition {
    let k = rng.gen_range(1..=4usize);
    let group: Vec<usize> = (0..p.len()).map(|_| rng.gen_range(0..k)).collect();
    let mut labels: Vec<Vec<usize>> = (0..rds.n_fibers())
        .map(|w| {
            (0..rds.fiber_len(w))
                .map(|j| {
                    let c = p
                        .elements()
                        .iter()
                        .position(|e| e.at(w).contains(j))
                        .expect("p covers every point");
                    group[c]
                })
                .collect()
        })
        .collect();
    if rng.gen_bool(0.5) {
        let w = rng.gen_range(0..rds.n_fibers());
        let j = rng.gen_range(0..rds.fiber_len(w));
        labels[w][j] = rng.gen_range(0..k);
    }
    partition_from_labels(rds, &labels, k)
}

fn entropy_checks(
    checks: &mut Checks,
    h: &BundleRds,
    mu: &FiberedMeasure,
    r: &RandomPartition,
    q: &RandomPartition,
    d: &SigmaAlgebra,
    budget: &Budget,
) {
    if let Some(c) = checks.attempt("entropy_below_log_count", || lemlog_check(mu, r, q, h, budget)) {
        checks.inequality("entropy_below_log_count", &c);
    }
    if let Some(c) = checks.attempt("entropy_transfer", || lem3_check(mu, r, q, d, h, budget)) {
        checks.inequality("entropy_transfer", &c);
    }
    if let Some(c) = checks.attempt("entropy_transfer_equal", || lem3_check(mu, q, q, d, h, budget)) {
        checks.exact("entropy_transfer_equal", c.slack == 0.0, || {
            format!("slack {} for R = Q", c.slack)
        });
    }
    // H(R ∨ Q | D) = H(Q | D) + H(R | Q ∨ D)
    if let Some((whole, first, second)) = checks.attempt("chain_rule", || {
        let rq = r.join(q)?;
        let qd = SigmaAlgebra::generated_by(q.clone()).join(d)?;
        Ok((
            conditional_entropy(mu, &rq, d)?,
            conditional_entropy(mu, q, d)?,
            conditional_entropy(mu, r, &qd)?,
        ))
    }) {
        checks.within("chain_rule", (whole - first - second).abs(), || {
            format!("H(R∨Q|D) = {whole}, H(Q|D) + H(R|Q∨D) = {}", first + second)
        });
    }
    // H(R | F_E) = ∫ H_{μ_ω}(R(ω)) dP
    if let Some((cond, integral)) = checks.attempt("disintegration", || {
        Ok((
            conditional_entropy(mu, r, &SigmaAlgebra::fibers(h))?,
            fiber_entropy_integral(mu, r)?,
        ))
    }) {
        checks.within("disintegration", (cond - integral).abs(), || {
            format!("H(R|F) = {cond}, fiber integral = {integral}")
        });
    }
}

fn filtration_checks(
    checks: &mut Checks,
    mu: &FiberedMeasure,
    r: &RandomPartition,
    parts: &[RandomPartition],
) {
    let built = checks.attempt("filtration_limit", || {
        let mut acc = parts[0].clone();
        let mut chain = vec![SigmaAlgebra::generated_by(acc.clone())];
        for p in &parts[1..] {
            acc = acc.join(p)?;
            chain.push(SigmaAlgebra::generated_by(acc.clone()));
        }
        let target = chain.last().expect("nonempty").clone();
        Ok((Filtration::new(chain)?, target))
    });
    let Some((filt, target)) = built else { return };
    if let Some(c) = checks.attempt("filtration_limit", || filtration_limit_check(mu, r, &filt, &target)) {
        let excess = c
            .values
            .windows(2)
            .map(|v| v[1] - v[0])
            .chain(std::iter::once((c.values.last().expect("nonempty") - c.target_value).abs()))
            .fold(f64::MIN, f64::max);
        checks.within("filtration_limit", excess, || format!("values {:?}", c.values));
        checks.exact("filtration_limit_flag", c.holds, || "checker reports failure".into());
    }
}

fn containment_checks(
    checks: &mut Checks,
    mu: &FiberedMeasure,
    p: &RandomPartition,
    q: &RandomPartition,
    budget: &Budget,
) {
    // the optimum does not depend on δ, so the oracle runs once
    let slow = delta_contains_exhaustive(p, q, mu, &ratio(1, 2), budget);
    for delta in [ratio(1, 8), ratio(1, 4), ratio(1, 3)] {
        let dstr = format_rational(&delta);
        let Some(fast) = checks.attempt("delta_contains", || delta_contains(p, q, mu, &delta)) else {
            continue;
        };
        match &slow {
            Ok(slow) => checks.exact(
                "delta_contains_oracle",
                slow.best_sum == fast.best_sum && (slow.best_sum < delta) == fast.holds,
                || {
                    format!(
                        "δ={dstr}: separable optimum {}, enumeration {}",
                        format_rational(&fast.best_sum),
                        format_rational(&slow.best_sum)
                    )
                },
            ),
            Err(e) => checks.error("delta_contains_oracle", e),
        }
        if !fast.holds {
            checks.skip(
                "containment_bound",
                format!(
                    "δ={dstr}: p does not δ-contain q (best sum {})",
                    format_rational(&fast.best_sum)
                ),
            );
            continue;
        }
        if let Some(c) = checks.attempt("containment_bound", || lem415_bound_check(mu, p, q, &delta)) {
            checks.within("containment_bound", c.conditional_entropy - c.corrected_bound, || {
                format!(
                    "δ={dstr}: H(Q|P) = {} exceeds {}",
                    c.conditional_entropy, c.corrected_bound
                )
            });
            if !c.holds_printed {
                checks.note(
                    "containment_printed_sign",
                    format!(
                        "δ={dstr}: H(Q|P) = {} exceeds the printed bound {}",
                        c.conditional_entropy, c.printed_bound
                    ),
                );
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes() {
        let b = Budget::default();
        let r = run_entropy_suite(5, 10, &b);
        assert!(r.passed(), "{r}");
        assert!(r.max_violation() <= 1e-9);
        assert_eq!(r.to_json(), run_entropy_suite(5, 10, &b).to_json());
    }
}
