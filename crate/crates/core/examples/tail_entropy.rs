//! Subadditive brackets for h(R|Q), the min-max total and the power rule.

use reltail::covers::RandomCover;
use reltail::fixtures::sys_a;
use reltail::tail_entropy::{power_rule_check, tail_entropy_estimate, tail_entropy_total};
use reltail::Budget;

fn main() -> reltail::Result<()> {
    let rds = sys_a();
    let budget = Budget::default();
    let single = RandomCover::singletons(&rds);
    let trivial = RandomCover::trivial(&rds);

    let est = tail_entropy_estimate(&single, &trivial, &rds, 8, &budget)?;
    for (n, (a, inf)) in est.a.iter().zip(&est.running_inf).enumerate() {
        println!("n={:<2} a_n={a:.6} running inf={inf:.6}", n + 1);
    }
    println!("subadditive: {}, bracket: {:.6} (log 2 / 8 = {:.6})", est.subadditive, est.value(), 2f64.ln() / 8.0);

    let family = [trivial.clone(), single.clone(), RandomCover::fibers(&rds)];
    let total = tail_entropy_total(&family, &family, &rds, 6, &budget)?;
    println!("min over Q, max over R at depth 6: {total:.6}");

    for m in 1..=3 {
        let c = power_rule_check(&single, &trivial, &rds, m, 2, &budget)?;
        println!("power rule m={m}: {:?} vs {:?}, holds {}", c.power_side, c.direct_side, c.holds);
    }
    Ok(())
}
