//! Joins, pullbacks and iterated covers on SYS-A.

use reltail::covers::{iterate_cover, join, pullback, refines, RandomCover};
use reltail::fixtures::sys_a;
use reltail::Budget;

fn main() -> reltail::Result<()> {
    let rds = sys_a();
    let budget = Budget::default();
    let split = RandomCover::from_names(
        &rds,
        &[
            vec![vec!["a", "b"], vec!["c"]],
            vec![vec![], vec!["d"]],
        ],
    )?;
    let singles = RandomCover::singletons(&rds);

    println!("split: {:?}", split.to_names(&rds));
    println!("singletons refine split: {}", refines(&singles, &split));

    let j = join(&split, &RandomCover::fibers(&rds))?;
    println!("split ∨ fibers: {:?}", j.to_names(&rds));

    // Θ^{-1} pulls elements back from the next fiber
    let back = pullback(&singles, &rds, 1);
    println!("Θ^-1 singletons: {:?}", back.to_names(&rds));

    for n in 1..=3 {
        let it = iterate_cover(&singles, &rds, n, &budget)?;
        println!("singletons^({n}) has {} elements", it.len());
    }
    Ok(())
}
