//! Conditional entropies, δ-containment and the relative sequence b_n on a
//! product system.

use reltail::covers::{delta_contains, RandomPartition, SigmaAlgebra};
use reltail::fixtures::sys_a;
use reltail::measures::{
    conditional_entropy, fiber_entropy_integral, lem3_check, lem415_bound_check, lemlog_check,
    transformation_relative_entropy, FiberedMeasure,
};
use reltail::rational::ratio;
use reltail::{product_system, Budget};

fn main() -> reltail::Result<()> {
    let budget = Budget::default();
    let a = sys_a();
    let mu = FiberedMeasure::from_names(
        &a,
        &[
            vec![("a", ratio(1, 6)), ("b", ratio(1, 3))],
            vec![("c", ratio(1, 8)), ("d", ratio(3, 8))],
        ],
    )?;
    let single = RandomPartition::singletons(&a);
    let fibers = SigmaAlgebra::fibers(&a);
    println!("H(singletons | fibers) = {:.6}", conditional_entropy(&mu, &single, &fibers)?);
    println!("fiberwise integral     = {:.6}", fiber_entropy_integral(&mu, &single)?);

    let trivial = RandomPartition::trivial(&a);
    let c = lemlog_check(&mu, &single, &trivial, &a, &budget)?;
    println!("entropy below integrated log count: {:.6} ≤ {:.6}", c.left, c.right);

    let prod = product_system(&a, &a)?;
    let h = &prod.system;
    let m = FiberedMeasure::uniform(h);
    let d = SigmaAlgebra::of_factor(&prod.project_left());
    let c = lem3_check(&m, &RandomPartition::singletons(h), &RandomPartition::fibers(h), &d, h, &budget)?;
    println!("transfer through D: {:.6} ≤ {:.6}", c.left, c.right);

    // the singletons δ-contain themselves at any δ > 0
    let delta = ratio(1, 4);
    let dc = delta_contains(&single, &single, &mu, &delta)?;
    println!("δ-contains: {} (best sum {})", dc.holds, dc.best_sum);
    let b = lem415_bound_check(&mu, &single, &single, &delta)?;
    println!("H(Q|P) = {:.6} within {:.6}", b.conditional_entropy, b.corrected_bound);

    // an invariant measure on A×A carried by the diagonal orbit
    let orbit = FiberedMeasure::from_names(
        h,
        &[vec![("(a,a)", ratio(1, 2))], vec![("(c,c)", ratio(1, 2))]],
    )?;
    let b = transformation_relative_entropy(&orbit, &SigmaAlgebra::of_factor(&prod.project_right()), h, 4, &budget)?;
    println!("b_n over the right factor: {:?}", b.a);
    Ok(())
}
