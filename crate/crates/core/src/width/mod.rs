//! Hierarchy width and related structural quantities.
//!
//! `hw` of a factorless graph is 0, of a disconnected graph the maximum over
//! its components, and of a connected graph one more than the best width
//! reachable by deleting a single factor. It equals the tree-depth of the
//! line graph and upper-bounds the maximum variable degree.

mod decomposition;
mod factorset;
mod hw;
mod treedepth;

pub use decomposition::{validate_decomposition, HierarchyDecomposition, Violation};
pub use hw::{
    hierarchy_decomposition, hierarchy_decomposition_with_limits, hierarchy_width,
    hierarchy_width_by_search, hierarchy_width_with_limits, hw_at_most_k, WidthLimits,
};
pub use treedepth::{line_graph, tree_depth_of_line_graph, TREE_DEPTH_MAX_VERTICES};

use crate::error::Result;
use crate::fg::{FactorGraph, JoinForest};

/// Vertices and hyperedges (one per factor, in factor order). Variables with
/// no adjacent factor are dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypergraphView {
    pub vertices: Vec<usize>,
    pub hyperedges: Vec<Vec<usize>>,
}

impl HypergraphView {
    pub fn new(graph: &FactorGraph) -> Self {
        let hyperedges: Vec<Vec<usize>> = graph
            .factors()
            .iter()
            .map(|f| {
                let mut s = f.scope().to_vec();
                s.sort_unstable();
                s
            })
            .collect();
        let vertices = (0..graph.num_variables())
            .filter(|&v| !graph.adjacent_factors(v).is_empty())
            .collect();
        HypergraphView {
            vertices,
            hyperedges,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructuralBounds {
    /// Largest number of factors adjacent to one variable; `hw >= d`.
    pub degree_lower_bound: usize,
    /// GYO-reducible, i.e. hypertree width 1 (or 0 with no factors).
    pub acyclic: bool,
}

pub fn structural_bounds(graph: &FactorGraph) -> StructuralBounds {
    let degree_lower_bound = (0..graph.num_variables())
        .map(|v| graph.adjacent_factors(v).len())
        .max()
        .unwrap_or(0);
    StructuralBounds {
        degree_lower_bound,
        acyclic: JoinForest::build(graph).is_some(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WidthReport {
    pub hierarchy_width: usize,
    pub degree_lower_bound: usize,
    pub acyclic: bool,
    pub certificate: HierarchyDecomposition,
}

pub fn width_report(graph: &FactorGraph) -> Result<WidthReport> {
    let certificate = hierarchy_decomposition(graph)?;
    let bounds = structural_bounds(graph);
    Ok(WidthReport {
        hierarchy_width: certificate.width(),
        degree_lower_bound: bounds.degree_lower_bound,
        acyclic: bounds.acyclic,
        certificate,
    })
}

impl WidthReport {
    pub fn summary(&self) -> String {
        format!(
            "hierarchy_width {}\ndegree_lower_bound {}\nacyclic {}\nhypertree_width {}\n",
            self.hierarchy_width,
            self.degree_lower_bound,
            self.acyclic,
            if self.acyclic {
                if self.hierarchy_width == 0 { "0" } else { "1" }
            } else {
                "unknown (>1)"
            }
        )
    }
}

#[cfg(test)]
mod tests;
