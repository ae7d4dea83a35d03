//! Factor graphs, energies, conditionals and exact inference oracles.

mod format;
mod graph;
mod infer;
pub(crate) mod jointree;

pub use format::{parse_factor_graph, write_factor_graph};
pub use graph::{
    AggregateFactor, Factor, FactorGraph, Semantics, TableFactor, Variable, World, WorldIndexer,
};
pub use infer::{
    conditional_distribution, energy, exact_joint, exact_joint_with_cap, exact_marginals_acyclic,
    log_sum_exp, max_factor_weight, JointTable, DEFAULT_CLIQUE_CAP, DEFAULT_STATE_CAP,
};
pub(crate) use infer::softmax_in_place;
pub use jointree::JoinForest;
