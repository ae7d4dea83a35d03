//! Parse a factor graph from text, then compare brute-force and join-tree
//! marginals.

use hwgibbs::fg::{energy, exact_joint, exact_marginals_acyclic, parse_factor_graph, write_factor_graph};

const GRAPH: &str = "\
fg 1
# a three-variable chain with one aggregate
var a 2 0 1
var b 2 0 1
var c 3 0 1 2
table ab a b : 0.5 0 0 0.5
agg bc ratio 1.5 {
  table t1 b c : 0 0.2 0.4 1 0 -1
}
";

fn main() -> hwgibbs::Result<()> {
    let graph = parse_factor_graph(GRAPH)?;
    println!("{}", write_factor_graph(&graph));
    let world = graph.world_from_labels(&[1, 0, 2])?;
    println!("energy(a=1, b=0, c=2) = {:.6}", energy(&graph, &world)?);

    let brute = exact_joint(&graph)?.marginals();
    let tree = exact_marginals_acyclic(&graph)?;
    for (v, var) in graph.variables().iter().enumerate() {
        println!("{:>2}: brute {:?}", var.name, brute[v]);
        println!("    tree  {:?}", tree[v]);
    }
    Ok(())
}
