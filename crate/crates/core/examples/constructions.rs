//! Empirical measures on maximal separated sets and the diagonal measure on
//! the 4-cycle.

use reltail::covers::RandomCover;
use reltail::fixtures::sys_b;
use reltail::invariant::{diagonal_measure, lebesgue_number, separated_empirical};
use reltail::rational::{format_rational, ratio};
use reltail::Budget;

fn main() -> reltail::Result<()> {
    let budget = Budget::default();
    let b = sys_b();
    let single = RandomCover::singletons(&b);
    let trivial = RandomCover::trivial(&b);
    let delta = vec![ratio(1, 2)];
    if let Some(eta) = lebesgue_number(&b, &single, 0)? {
        println!("Lebesgue number of the singletons: {}", format_rational(&eta));
    }

    let se = separated_empirical(&b, &single, &trivial, 2, &delta, &budget)?;
    for f in &se.fibers {
        println!(
            "ω={}: separated {:?}, cover count {}, gate {}, claim {:?}",
            f.omega, f.separated, f.cover_count, f.lebesgue_gate, f.card_claim
        );
    }
    println!("μ^(n) defect {}, supported {}", format_rational(&se.mu_n_defect), se.mu_n_supported);

    let d = diagonal_measure(&b, std::slice::from_ref(&single), std::slice::from_ref(&single), 3, &delta, 4, &budget)?;
    println!(
        "diagonal measure {:?}: on diagonal {}, b_n {:?}, certified {}",
        d.measure.to_names(d.steps[0].pair.system()),
        d.on_diagonal,
        d.relative_entropy.a,
        d.certified()
    );
    Ok(())
}
