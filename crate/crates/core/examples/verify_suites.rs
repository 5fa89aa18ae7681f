//! Runs every verification suite with a handful of trials and prints the
//! tables; pass a trial count as the first argument.

use reltail::verify::{run_suite, SUITES};
use reltail::Budget;

fn main() -> reltail::Result<()> {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let budget = Budget::from_env()?;
    for name in SUITES {
        let report = run_suite(name, 1, trials, &budget)?;
        println!("{report}");
    }
    Ok(())
}
