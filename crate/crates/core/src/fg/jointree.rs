//! GYO ear removal over factor scopes.

use crate::fg::graph::FactorGraph;

/// A join forest over the factors of an acyclic graph.
#[derive(Debug, Clone)]
pub struct JoinForest {
    parent: Vec<Option<usize>>,
    order: Vec<usize>,
}

impl JoinForest {
    /// Runs GYO reduction; `None` if the hypergraph is cyclic.
    pub fn build(graph: &FactorGraph) -> Option<JoinForest> {
        let edges: Vec<Vec<usize>> = graph
            .factors()
            .iter()
            .map(|f| {
                let mut s = f.scope().to_vec();
                s.sort_unstable();
                s
            })
            .collect();
        Self::from_edges(graph.num_variables(), &edges)
    }

    /// `edges` must hold sorted vertex lists.
    pub fn from_edges(num_vertices: usize, edges: &[Vec<usize>]) -> Option<JoinForest> {
        let m = edges.len();
        let mut alive = vec![true; m];
        let mut degree = vec![0usize; num_vertices];
        for e in edges {
            for &v in e {
                degree[v] += 1;
            }
        }
        let mut parent = vec![None; m];
        let mut order = Vec::with_capacity(m);
        let mut remaining = m;
        while remaining > 0 {
            let mut progressed = false;
            for e in 0..m {
                if !alive[e] {
                    continue;
                }
                let shared: Vec<usize> = edges[e].iter().copied().filter(|&v| degree[v] > 1).collect();
                let host = if shared.is_empty() {
                    None
                } else {
                    let found = (0..m).find(|&f| {
                        f != e && alive[f] && shared.iter().all(|v| edges[f].binary_search(v).is_ok())
                    });
                    match found {
                        Some(f) => Some(f),
                        None => continue,
                    }
                };
                parent[e] = host;
                alive[e] = false;
                for &v in &edges[e] {
                    degree[v] -= 1;
                }
                order.push(e);
                remaining -= 1;
                progressed = true;
            }
            if !progressed {
                return None;
            }
        }
        Some(JoinForest { parent, order })
    }

    pub fn parent(&self, factor: usize) -> Option<usize> {
        self.parent[factor]
    }

    /// Factors in removal order (every factor precedes its parent).
    pub fn elimination_order(&self) -> &[usize] {
        &self.order
    }
}
