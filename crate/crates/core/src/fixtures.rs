//! Small named systems used by the examples, the test suites and the CLI
//! documentation.

use crate::model::{BundleRds, DrivingSystem, MetricSpace};
use crate::rational::{int, ratio, Rational};

fn swap_base(prob: Option<Vec<Rational>>) -> DrivingSystem {
    let prob = prob.unwrap_or_else(|| vec![ratio(1, 2), ratio(1, 2)]);
    DrivingSystem::new(prob, vec![1, 0]).expect("two base points")
}

fn sys_a_space(extra: bool) -> MetricSpace {
    let mut names = vec!["a", "b", "c", "d"];
    if extra {
        names.push("e");
    }
    let n = names.len();
    // within a fiber distance 1, across fibers 2
    let fiber_of = |i: usize| if i < 2 { 0 } else { 1 + (i >= 4) as usize };
    let dist = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        int(0)
                    } else if fiber_of(i) == fiber_of(j) {
                        int(1)
                    } else {
                        int(2)
                    }
                })
                .collect()
        })
        .collect();
    MetricSpace::with_metric(names, dist).expect("square matrix")
}

/// `Ω = {0,1}`, `P = (1/2,1/2)`, `ϑ` swaps; `E_0 = {a,b}`, `E_1 = {c,d}`;
/// `T_0: a,b ↦ c`; `T_1: c ↦ a, d ↦ b`; `d(a,b) = d(c,d) = 1`.
pub fn sys_a() -> BundleRds {
    BundleRds::from_names(
        swap_base(None),
        sys_a_space(false),
        &[&["a", "b"], &["c", "d"]],
        &[&[("a", "c"), ("b", "c")], &[("c", "a"), ("d", "b")]],
    )
    .expect("SYS-A is valid")
}

/// SYS-A with `T_0` replaced by `t0` and optionally other probabilities;
/// the point `e` exists in `X` but in no fiber.
pub fn sys_a_unchecked(t0: &[(&str, &str)], prob: Option<Vec<Rational>>) -> BundleRds {
    BundleRds::from_names_unchecked(
        swap_base(prob),
        sys_a_space(true),
        &[&["a", "b"], &["c", "d"]],
        &[t0, &[("c", "a"), ("d", "b")]],
    )
    .expect("well formed")
}

/// One base point and the 4-cycle `p0 → p1 → p2 → p3 → p0` with the
/// circular distance.
pub fn sys_b() -> BundleRds {
    cycle_system(4)
}

/// One base point and an `n`-cycle with the circular distance.
pub fn cycle_system(n: usize) -> BundleRds {
    let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let dist = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let k = i.abs_diff(j);
                    int(k.min(n - k) as i64)
                })
                .collect()
        })
        .collect();
    let space = MetricSpace::with_metric(names, dist).expect("square matrix");
    BundleRds::new(
        DrivingSystem::one_point(),
        space,
        vec![(0..n).collect()],
        vec![(0..n).map(|i| (i + 1) % n).collect()],
    )
    .expect("cycle is valid")
}

/// One point per fiber over `base`, mapped to the next fiber's point.
pub fn one_point_system(base: DrivingSystem) -> BundleRds {
    let k = base.size();
    let names: Vec<String> = (0..k).map(|w| format!("*{w}")).collect();
    let dist = (0..k)
        .map(|i| (0..k).map(|j| int((i != j) as i64)).collect())
        .collect();
    let space = MetricSpace::with_metric(names, dist).expect("square matrix");
    let images = (0..k).map(|w| vec![base.theta(w)]).collect();
    BundleRds::new(base, space, (0..k).map(|w| vec![w]).collect(), images)
        .expect("one-point system is valid")
}

/// Two points `u`, `v` in every fiber, each mapped to itself.
pub fn static_two_point(base: DrivingSystem) -> BundleRds {
    let space = MetricSpace::with_metric(
        ["u", "v"],
        vec![vec![int(0), int(1)], vec![int(1), int(0)]],
    )
    .expect("square matrix");
    let k = base.size();
    BundleRds::new(base, space, vec![vec![0, 1]; k], vec![vec![0, 1]; k])
        .expect("static system is valid")
}

/// One base point, identity map on the points `x0..x{n-1}`.
pub fn identity_system(n: usize) -> BundleRds {
    let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let dist = (0..n)
        .map(|i| (0..n).map(|j| int((i != j) as i64)).collect())
        .collect();
    let space = MetricSpace::with_metric(names, dist).expect("square matrix");
    BundleRds::new(
        DrivingSystem::one_point(),
        space,
        vec![(0..n).collect()],
        vec![(0..n).collect()],
    )
    .expect("identity is valid")
}
