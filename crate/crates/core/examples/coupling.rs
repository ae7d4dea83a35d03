//! Coupling-time upper bounds on the distance to stationarity, next to the
//! exact curve.

use hwgibbs::fg::{exact_joint, Semantics, World};
use hwgibbs::models::{build_voting_model, VotingPriors};
use hwgibbs::sampler::{tv_bound_from_coupling, Partner};
use hwgibbs::spectral::{transition_matrix, tv_curve};

fn main() -> hwgibbs::Result<()> {
    let g = build_voting_model(2, Semantics::Logical, 0.5, &VotingPriors::Zero);
    // Q = 1 with every voter true.
    let start = World::new(vec![1; g.num_variables()]);
    let p = transition_matrix(&g)?;
    let pi = exact_joint(&g)?.probabilities;
    let exact = tv_curve(&p, &pi, p.index_of(&start), 40)?;
    let bound = tv_bound_from_coupling(&g, &start, &Partner::Stationary, 40, 4000, 11)?;
    println!("{:>4} {:>10} {:>10} {:>10}", "k", "exact TV", "P(T > k)", "upper");
    for k in (0..=40).step_by(4) {
        let b = bound[k];
        println!("{:>4} {:>10.4} {:>10.4} {:>10.4}", k, exact[k], b.estimate, b.upper);
    }
    Ok(())
}
