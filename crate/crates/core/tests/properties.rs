//! Randomized invariants over generated systems; proptest drives the seeds
//! and shrinks failures to the smallest one.

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use reltail::counting::{count_profile, count_profiles, relative_count};
use reltail::covers::{join, refines, RandomCover, RandomPartition, SigmaAlgebra};
use reltail::invariant::{cesaro_limit, invariance_defect};
use reltail::measures::{conditional_entropy, lemlog_check};
use reltail::rational::{format_rational, parse_rational, ratio};
use reltail::scenario::{Scenario, ScenarioFile};
use reltail::tail_entropy::tail_entropy_estimate;
use reltail::verify::generate::{random_base, random_cover, random_measure, random_partition, random_system};
use reltail::{BundleRds, Budget, PointSet};

fn system(seed: u64) -> (ChaCha8Rng, BundleRds) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = random_base(&mut rng, 4);
    let rds = random_system(&mut rng, &base, 4, false, "x");
    (rng, rds)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pointset_matches_btreeset(n in 1usize..40, a in prop::collection::vec(0usize..40, 0..20), b in prop::collection::vec(0usize..40, 0..20)) {
        let a: Vec<usize> = a.into_iter().filter(|&x| x < n).collect();
        let b: Vec<usize> = b.into_iter().filter(|&x| x < n).collect();
        let (sa, sb) = (PointSet::from_indices(n, a.clone()), PointSet::from_indices(n, b.clone()));
        let (ma, mb): (BTreeSet<usize>, BTreeSet<usize>) = (a.into_iter().collect(), b.into_iter().collect());
        prop_assert_eq!(sa.union(&sb).iter().collect::<BTreeSet<_>>(), &ma | &mb);
        prop_assert_eq!(sa.intersection(&sb).iter().collect::<BTreeSet<_>>(), &ma & &mb);
        prop_assert_eq!(sa.difference(&sb).iter().collect::<BTreeSet<_>>(), &ma - &mb);
        prop_assert_eq!(sa.is_subset(&sb), ma.is_subset(&mb));
        prop_assert_eq!(sa.len(), ma.len());
    }

    #[test]
    fn rationals_roundtrip(p in -10_000i64..10_000, q in 1i64..10_000) {
        let r = ratio(p, q);
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }

    #[test]
    fn singletons_need_the_most_elements(seed in any::<u64>()) {
        let (mut rng, rds) = system(seed);
        let r = random_cover(&mut rng, &rds);
        let q = random_cover(&mut rng, &rds);
        let s = RandomCover::singletons(&rds);
        prop_assert!(refines(&s, &r));
        for w in 0..rds.n_fibers() {
            prop_assert!(relative_count(&r, &q, w).unwrap() <= relative_count(&s, &q, w).unwrap());
            prop_assert!(relative_count(&r, &q, w).unwrap() <= relative_count(&r, &RandomCover::trivial(&rds), w).unwrap());
        }
    }

    #[test]
    fn join_counts_are_submultiplicative(seed in any::<u64>()) {
        let (mut rng, rds) = system(seed);
        let r = random_cover(&mut rng, &rds);
        let q = random_cover(&mut rng, &rds);
        let u = random_cover(&mut rng, &rds);
        let rq = join(&r, &q).unwrap();
        let ru = join(&r, &u).unwrap();
        for w in 0..rds.n_fibers() {
            let whole = relative_count(&rq, &u, w).unwrap();
            let parts = relative_count(&r, &u, w).unwrap() * relative_count(&q, &ru, w).unwrap();
            prop_assert!(whole <= parts, "ω={} {} > {}", w, whole, parts);
        }
    }

    #[test]
    fn count_profiles_are_orbit_subadditive(seed in any::<u64>()) {
        let (mut rng, rds) = system(seed);
        let r = random_cover(&mut rng, &rds);
        let q = random_cover(&mut rng, &rds);
        let (profiles, stop) = count_profiles(&r, &q, &rds, 4, &Budget::default()).unwrap();
        prop_assert!(stop.is_none());
        let base = rds.base();
        for n in 1..=2 {
            for m in 1..=2 {
                for w in 0..rds.n_fibers() {
                    let left = profiles[n + m - 1].counts[w];
                    let right = profiles[n - 1].counts[w] * profiles[m - 1].counts[base.theta_pow(w, n)];
                    prop_assert!(left <= right);
                }
            }
        }
    }

    #[test]
    fn tail_brackets_are_bounded_and_monotone(seed in any::<u64>()) {
        let (mut rng, rds) = system(seed);
        let r = random_cover(&mut rng, &rds);
        let q = random_cover(&mut rng, &rds);
        let est = tail_entropy_estimate(&r, &q, &rds, 5, &Budget::default()).unwrap();
        let bound = (rds.max_fiber_len() as f64).ln() + 1e-12;
        prop_assert!(est.subadditive && est.nonnegative);
        prop_assert!(est.a.iter().all(|&a| a <= bound));
        prop_assert!(est.running_inf.windows(2).all(|v| v[1] <= v[0]));
    }

    #[test]
    fn cesaro_limits_are_invariant_fixed_points(seed in any::<u64>()) {
        let (mut rng, rds) = system(seed);
        let nu = random_measure(&mut rng, &rds);
        let c = cesaro_limit(&nu, &rds).unwrap();
        prop_assert_eq!(invariance_defect(&c, &rds).unwrap(), ratio(0, 1));
        prop_assert_eq!(cesaro_limit(&c, &rds).unwrap(), c.clone());
        prop_assert_eq!(c.image(&rds), c);
    }

    #[test]
    fn conditioning_never_raises_entropy(seed in any::<u64>()) {
        let (mut rng, rds) = system(seed);
        let mu = random_measure(&mut rng, &rds);
        let r = random_partition(&mut rng, &rds, 4);
        let q = random_partition(&mut rng, &rds, 4);
        let coarse = conditional_entropy(&mu, &r, &SigmaAlgebra::fibers(&rds)).unwrap();
        let finer = SigmaAlgebra::generated_by(q.join(&RandomPartition::fibers(&rds)).unwrap());
        let fine = conditional_entropy(&mu, &r, &finer).unwrap();
        prop_assert!(fine >= -1e-12 && fine <= coarse + 1e-9);
        let c = lemlog_check(&mu, &r, &q, &rds, &Budget::default()).unwrap();
        prop_assert!(c.holds, "{:?}", c);
    }

    #[test]
    fn scenario_files_roundtrip(seed in any::<u64>()) {
        let (mut rng, rds) = system(seed);
        let r = random_cover(&mut rng, &rds);
        let q = random_cover(&mut rng, &rds);
        let mu = random_measure(&mut rng, &rds);
        let mut file = ScenarioFile::new(Some("rt".into()));
        file.add_system("S", &rds);
        file.add_cover("r", "S", &rds, &r);
        file.add_cover("q", "S", &rds, &q);
        file.add_measure("mu", "S", &rds, &mu);
        let text = file.to_json();
        prop_assert_eq!(ScenarioFile::parse(&text).unwrap().digest(), file.digest());
        let sc = Scenario::from_json(&text).unwrap();
        let b = Budget::default();
        let loaded = sc.system("S").unwrap();
        prop_assert_eq!(
            count_profile(&sc.cover("r").unwrap().cover, &sc.cover("q").unwrap().cover, loaded, 2, &b).unwrap().counts,
            count_profile(&r, &q, &rds, 2, &b).unwrap().counts
        );
        prop_assert_eq!(&sc.measure("mu").unwrap().measure, &mu);
    }
}
