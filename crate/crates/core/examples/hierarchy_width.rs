//! Hierarchy width of paths, stars and the voting model, with a certificate.

use hwgibbs::fg::Semantics;
use hwgibbs::models::{build_path, build_tree_ising, build_voting_model, TreeFamily, VotingPriors};
use hwgibbs::width::{hierarchy_width, hw_at_most_k, tree_depth_of_line_graph, validate_decomposition, width_report};

fn main() -> hwgibbs::Result<()> {
    println!("path graphs: hw grows like log2 of the node count");
    for n in [2, 4, 8, 16, 32] {
        let g = build_path(n, |_| [1.0, 0.0, 0.0, 1.0]);
        println!("  n = {n:>2}: hw = {}", hierarchy_width(&g)?);
    }

    println!("tree Ising families on 20 nodes");
    for family in [TreeFamily::Path, TreeFamily::Caterpillar { spine: 5 }, TreeFamily::Star] {
        let t = build_tree_ising(20, family, 0.5);
        println!("  {:<13} hw = {}", family.label(), t.hierarchy_width);
    }

    println!("voting model");
    for sem in Semantics::ALL {
        let g = build_voting_model(4, sem, 0.5, &VotingPriors::Zero);
        let hw = hierarchy_width(&g)?;
        println!(
            "  {sem:<7} n = 4: hw = {hw}, line-graph tree-depth = {}, hw <= 3: {}",
            tree_depth_of_line_graph(&g)?,
            hw_at_most_k(&g, 3)
        );
    }

    let g = build_voting_model(2, Semantics::Logical, 0.5, &VotingPriors::Zero);
    let report = width_report(&g)?;
    print!("\n{}", report.summary());
    print!("{}", report.certificate.to_certificate_text(&g));
    println!("certificate valid: {}", validate_decomposition(&g, &report.certificate).is_ok());
    Ok(())
}
