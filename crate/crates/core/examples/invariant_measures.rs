//! Invariant measures: defects, exact Cesàro limits, polytope vertices with
//! hull certificates, and lifts along factor maps.

use reltail::fixtures::{static_two_point, sys_a};
use reltail::invariant::{cesaro_limit, invariance_defect, lift_invariant, vertex_enumeration};
use reltail::measures::{pushforward_measure, FiberedMeasure};
use reltail::rational::format_rational;
use reltail::{product_system, Budget};

fn main() -> reltail::Result<()> {
    let a = sys_a();
    let u = FiberedMeasure::uniform(&a);
    println!("uniform defect: {}", format_rational(&invariance_defect(&u, &a)?));
    let c = cesaro_limit(&u, &a)?;
    println!("Cesàro limit: {:?}, defect {}", c.to_names(&a), format_rational(&invariance_defect(&c, &a)?));

    let poly = vertex_enumeration(&a, &Budget::default())?;
    for v in poly.vertices() {
        println!("vertex {:?}", v.to_names(&a));
    }
    match poly.hull_certificate(&c)? {
        Some(cert) => println!("Cesàro limit in the hull with weights {:?}", cert.weights),
        None => println!("Cesàro limit outside the hull"),
    }

    let prod = product_system(&static_two_point(a.base().clone()), &a)?;
    let pi = prod.project_right();
    let lift = lift_invariant(&pi, &c)?;
    println!(
        "lift certified: {} (defect {}, projects exactly {})",
        lift.certified(),
        format_rational(&lift.defect),
        lift.projects_exactly
    );
    let back = pushforward_measure(&pi, &lift.measure)?;
    println!("pushed back down: {:?}", back.to_names(&a));
    Ok(())
}
