//! Exact spectral gap and mixing time against the closed-form bounds.

use hwgibbs::fg::Semantics;
use hwgibbs::models::{build_voting_model, VotingPriors};
use hwgibbs::spectral::{exact_mixing_time, relaxation_bound, spectral_report, BoundInputs};

fn main() -> hwgibbs::Result<()> {
    println!("{:<8} {:>2} {:>3} {:>9} {:>6} {:>12} {:>12}", "sem", "n", "hw", "gamma", "t_mix", "relaxation", "theorem2");
    for n in 1..=3 {
        for sem in Semantics::ALL {
            let g = build_voting_model(n, sem, 0.5, &VotingPriors::Zero);
            let report = spectral_report(&g)?;
            let inputs = BoundInputs::of(&g)?;
            let t = exact_mixing_time(&g)?;
            println!(
                "{:<8} {:>2} {:>3} {:>9.5} {:>6} {:>12.1} {:>12.3e}",
                sem,
                n,
                inputs.hw,
                report.gamma,
                t.t_mix,
                relaxation_bound(report.gamma, report.pi_min, 0.25)?,
                inputs.theorem2()
            );
        }
    }
    Ok(())
}
