//! Writes a scenario from library objects, reads it back and recomputes a
//! count from the loaded copy.

use reltail::counting::count_profile;
use reltail::covers::RandomCover;
use reltail::fixtures::sys_a;
use reltail::measures::FiberedMeasure;
use reltail::scenario::{Scenario, ScenarioFile};
use reltail::Budget;

fn main() -> reltail::Result<()> {
    let a = sys_a();
    let mut file = ScenarioFile::new(Some("roundtrip".into()));
    file.add_system("A", &a);
    file.add_cover("S", "A", &a, &RandomCover::singletons(&a));
    file.add_cover("T", "A", &a, &RandomCover::trivial(&a));
    file.add_measure("u", "A", &a, &FiberedMeasure::uniform(&a));
    let text = file.to_json();
    println!("{text}");
    println!("sha256 {}", file.digest());

    let sc = Scenario::from_json(&text)?;
    let rds = sc.system("A")?;
    let prof = count_profile(&sc.cover("S")?.cover, &sc.cover("T")?.cover, rds, 3, &Budget::default())?;
    println!("N(S^(3)|T^(3)) = {:?}", prof.counts);
    Ok(())
}
