//! Word counting on products of subshifts, where tail entropies are
//! positive and known in closed form.

use reltail::model::DrivingSystem;
use reltail::symbolic::{sft_counts, sft_tail_sequence, CylinderCoverSpec, RandomSft, SftComponent};
use reltail::Budget;

fn main() -> reltail::Result<()> {
    let budget = Budget::default();
    let base = DrivingSystem::one_point();
    let both = RandomSft::new(
        base.clone(),
        vec![SftComponent::full_shift(2, 1), SftComponent::full_shift(2, 1)],
    )?;
    let r = CylinderCoverSpec::new(vec![0, 1], 1)?;
    let q = CylinderCoverSpec::new(vec![0], 1)?;
    println!("counts at n=4: {:?}", sft_counts(&both, &r, &q, 4)?);
    let est = sft_tail_sequence(&both, &r, &q, 12, &budget)?;
    println!("second full shift over the first: {:.6} (log 2 = {:.6})", est.value(), 2f64.ln());

    let golden = RandomSft::new(base, vec![SftComponent::golden_mean(1)])?;
    let est = sft_tail_sequence(
        &golden,
        &CylinderCoverSpec::new(vec![0], 1)?,
        &CylinderCoverSpec::trivial(),
        20,
        &budget,
    )?;
    let golden_ratio = (1.0 + 5f64.sqrt()) / 2.0;
    println!(
        "golden mean a_20/20 = {:.6}, running inf {:.6}, log φ = {:.6}",
        est.ratios[19],
        est.value(),
        golden_ratio.ln()
    );

    let same = sft_tail_sequence(&both, &r, &r, 6, &budget)?;
    println!("Q = R gives {}", same.value());
    Ok(())
}
