//! Minimal subcover counts: the exact set-cover solver and the per-fiber
//! relative counts N(R^(n)|Q^(n))(ω).

use reltail::counting::{count_profile, min_cover_size, relative_count};
use reltail::covers::RandomCover;
use reltail::fixtures::{sys_a, sys_b};
use reltail::{Budget, PointSet};

fn main() -> reltail::Result<()> {
    let family = [
        PointSet::from_indices(6, [0, 1, 2]),
        PointSet::from_indices(6, [2, 3]),
        PointSet::from_indices(6, [3, 4, 5]),
        PointSet::from_indices(6, [0, 5]),
    ];
    println!("cover of all six points needs {:?} sets", min_cover_size(&PointSet::full(6), &family));

    let budget = Budget::default();
    let a = sys_a();
    let single = RandomCover::singletons(&a);
    let trivial = RandomCover::trivial(&a);
    println!("N(singletons | trivial)(0) = {}", relative_count(&single, &trivial, 0)?);
    for n in 1..=4 {
        let p = count_profile(&single, &trivial, &a, n, &budget)?;
        println!("SYS-A n={n}: {:?}, ∫ log N = {:.6}", p.counts, p.integrated_log(&a));
    }

    // a permutation of the fiber keeps the count at the fiber size
    let b = sys_b();
    let p = count_profile(&RandomCover::singletons(&b), &RandomCover::trivial(&b), &b, 5, &budget)?;
    println!("SYS-B n=5: {:?}", p.counts);
    Ok(())
}
