//! Squared error of a query marginal on tree Ising models of different
//! hierarchy width under a fixed sampling budget.

use hwgibbs::experiment::{ising_hw, ExperimentConfig, ExperimentKind};
use hwgibbs::models::TreeFamily;

fn main() -> hwgibbs::Result<()> {
    let mut config = ExperimentConfig::new(ExperimentKind::IsingHw);
    config.nodes = 30;
    config.budget = 30_000;
    config.weights = vec![0.5, 0.9];
    config.families = vec![
        TreeFamily::Path,
        TreeFamily::Caterpillar { spine: 10 },
        TreeFamily::Caterpillar { spine: 4 },
        TreeFamily::Star,
    ];
    println!("{:>4} {:<14} {:>3} {:>10}", "w", "family", "hw", "mse");
    for r in ising_hw(&config)? {
        println!("{:>4} {:<14} {:>3} {:>10.3e}", r.w, r.family.label(), r.hierarchy_width, r.mse);
    }
    Ok(())
}
