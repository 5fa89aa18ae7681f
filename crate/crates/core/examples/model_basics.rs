//! Builds a two-fiber system by hand, iterates the skew product and checks
//! a factor map.

use reltail::fixtures::sys_a;
use reltail::rational::ratio;
use reltail::{product_system, validate_system, BundleRds, DrivingSystem, MetricSpace};

fn main() -> reltail::Result<()> {
    // ϑ swaps two equally likely base points
    let base = DrivingSystem::new(vec![ratio(1, 2), ratio(1, 2)], vec![1, 0])?;
    let space = MetricSpace::unmetrized(["a", "b", "c", "d"])?;
    let rds = BundleRds::from_names(
        base,
        space,
        &[&["a", "b"], &["c", "d"]],
        &[&[("a", "c"), ("b", "c")], &[("c", "a"), ("d", "b")]],
    )?;
    println!("fibers {:?}, {} points", rds.fiber_lens(), rds.total_points());

    for n in 0..4 {
        let (w, x) = rds.skew_iterate_named(0, "b", n)?;
        println!("Θ^{n}(0, b) = ({w}, {x})");
    }

    // a map that is not defined on the declared fiber is reported, not fixed
    let report = validate_system(&rds);
    println!("valid: {}", report.is_valid());

    let a = sys_a();
    let prod = product_system(&a, &a)?;
    let pi = prod.project_right();
    println!(
        "A×A has {} points; the projection intertwines: {}",
        prod.system.total_points(),
        pi.violations().is_empty()
    );
    Ok(())
}
