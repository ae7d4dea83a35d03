//! Across-chain variance of the estimate of P(Q = 1) under each semantics.

use hwgibbs::fg::Semantics;
use hwgibbs::models::{build_voting_model, VotingPriors};
use hwgibbs::sampler::marginal_variance_experiment;

fn main() -> hwgibbs::Result<()> {
    let n = 30;
    let schedule = [1_000, 5_000, 20_000, 50_000];
    println!("{:<8} {:>10} {:>10} {:>12}", "semantics", "iters", "mean", "variance");
    for sem in Semantics::ALL {
        let g = build_voting_model(n, sem, 0.5, &VotingPriors::Uniform { seed: 7 });
        for p in marginal_variance_experiment(&g, 0, 1, 16, &schedule, 42)? {
            println!("{:<8} {:>10} {:>10.4} {:>12.3e}", sem, p.iterations, p.mean, p.variance);
        }
    }
    Ok(())
}
