//! Ground the voting template with evidence and inspect the result.

use hwgibbs::fg::{exact_joint, Semantics};
use hwgibbs::templates::{ground, hw_template_bound, is_hierarchical, max_weight_bound, parse_dataset, parse_template, VOTING_TEMPLATE};
use hwgibbs::width::hierarchy_width;

const DATA: &str = "\
object Voter alice
object Voter bob
object Voter carol
weight prior_t (alice) = -0.5
evidence T(bob) = 1
";

fn main() -> hwgibbs::Result<()> {
    let schema = parse_template(VOTING_TEMPLATE)?;
    let data = parse_dataset(DATA)?;
    println!("hierarchical: {}, width bound: {}", is_hierarchical(&schema), hw_template_bound(&schema)?);
    for sem in Semantics::ALL {
        let g = ground(&schema, &data, sem)?;
        let q = g.graph.variable_id("Q").expect("Q is not evidence");
        let p = exact_joint(&g.graph)?.marginals()[q][1];
        println!(
            "{sem:<7}: {} vars, {} factors, hw = {}, weight bound = {:.3}, P(Q = 1 | T(bob) = 1) = {p:.4}",
            g.graph.num_variables(),
            g.graph.num_factors(),
            hierarchy_width(&g.graph)?,
            max_weight_bound(&schema, &data, sem)?
        );
    }
    let g = ground(&schema, &data, Semantics::Logical)?;
    for (f, origin) in g.factor_origins.iter().enumerate() {
        println!("  {:<16} <- {} head {:?} body {:?}", g.graph.factor(f).name(), schema.factors()[origin.factor].name, origin.head, origin.body);
    }
    Ok(())
}
