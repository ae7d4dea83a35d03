use std::fmt;
use std::fmt::Write as _;

use crate::fg::FactorGraph;

/// A rooted tree whose nodes are labelled with sets of factor indices.
///
/// Node 0 is the root. Labels are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierarchyDecomposition {
    parent: Vec<Option<usize>>,
    labels: Vec<Vec<usize>>,
}

impl HierarchyDecomposition {
    pub fn with_root(label: Vec<usize>) -> Self {
        let mut d = HierarchyDecomposition {
            parent: vec![None],
            labels: vec![Vec::new()],
        };
        d.set_label(0, label);
        d
    }

    /// Builds a tree from raw parts without checking it; see [`validate_decomposition`].
    pub fn from_parts(parent: Vec<Option<usize>>, labels: Vec<Vec<usize>>) -> Self {
        let labels = labels
            .into_iter()
            .map(|mut l| {
                l.sort_unstable();
                l.dedup();
                l
            })
            .collect();
        HierarchyDecomposition { parent, labels }
    }

    pub fn add_child(&mut self, parent: usize, label: Vec<usize>) -> usize {
        let id = self.parent.len();
        self.parent.push(Some(parent));
        self.labels.push(Vec::new());
        self.set_label(id, label);
        id
    }

    pub fn set_label(&mut self, node: usize, mut label: Vec<usize>) {
        label.sort_unstable();
        label.dedup();
        self.labels[node] = label;
    }

    /// Adds `factor` to `node` and every descendant.
    pub fn add_to_subtree(&mut self, node: usize, factor: usize) {
        let mut stack = vec![node];
        while let Some(u) = stack.pop() {
            if let Err(pos) = self.labels[u].binary_search(&factor) {
                self.labels[u].insert(pos, factor);
            }
            stack.extend(self.children(u));
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        self.parent[node]
    }

    pub fn label(&self, node: usize) -> &[usize] {
        &self.labels[node]
    }

    pub fn children(&self, node: usize) -> Vec<usize> {
        (0..self.parent.len())
            .filter(|&c| self.parent[c] == Some(node))
            .collect()
    }

    /// Size of the largest label.
    pub fn width(&self) -> usize {
        self.labels.iter().map(Vec::len).max().unwrap_or(0)
    }

    fn depth(&self, mut node: usize) -> usize {
        let mut d = 0;
        while let Some(p) = self.parent[node] {
            node = p;
            d += 1;
        }
        d
    }

    /// One node per line in depth-first order, indented by depth:
    /// `node <id> parent <id|none> : <factor names>`.
    pub fn to_certificate_text(&self, graph: &FactorGraph) -> String {
        let mut out = String::new();
        let mut stack = vec![0usize];
        while let Some(u) = stack.pop() {
            let indent = "  ".repeat(self.depth(u));
            let parent = self.parent[u].map_or("none".to_string(), |p| p.to_string());
            write!(out, "{indent}node {u} parent {parent} :").unwrap();
            for &f in &self.labels[u] {
                write!(out, " {}", graph.factor(f).name()).unwrap();
            }
            out.push('\n');
            let mut kids = self.children(u);
            kids.reverse();
            stack.extend(kids);
        }
        out
    }
}

/// The first condition a candidate decomposition fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Not a rooted tree with node 0 as root, or a label names a missing factor.
    Malformed(String),
    /// Condition (1): the factor appears in no label.
    EdgeNotCovered { factor: usize },
    /// Condition (2): the nodes containing the factor are not connected.
    EdgeNotConnected { factor: usize },
    /// Condition (3): two factors sharing a variable never appear together.
    IntersectingEdgesSeparated { first: usize, second: usize },
    /// Condition (4): a parent label holds a factor its child lacks.
    ParentNotSubset {
        parent: usize,
        child: usize,
        factor: usize,
    },
}

impl Violation {
    /// Which of the four defining conditions failed (0 for malformed trees).
    pub fn condition(&self) -> u8 {
        match self {
            Violation::Malformed(_) => 0,
            Violation::EdgeNotCovered { .. } => 1,
            Violation::EdgeNotConnected { .. } => 2,
            Violation::IntersectingEdgesSeparated { .. } => 3,
            Violation::ParentNotSubset { .. } => 4,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Malformed(m) => write!(f, "malformed tree: {m}"),
            Violation::EdgeNotCovered { factor } => {
                write!(f, "condition 1: factor {factor} is in no label")
            }
            Violation::EdgeNotConnected { factor } => {
                write!(f, "condition 2: nodes holding factor {factor} are not connected")
            }
            Violation::IntersectingEdgesSeparated { first, second } => write!(
                f,
                "condition 3: intersecting factors {first} and {second} share no label"
            ),
            Violation::ParentNotSubset {
                parent,
                child,
                factor,
            } => write!(
                f,
                "condition 4: factor {factor} is in parent {parent} but not child {child}"
            ),
        }
    }
}

/// Checks the four defining conditions exhaustively.
pub fn validate_decomposition(
    graph: &FactorGraph,
    decomp: &HierarchyDecomposition,
) -> Result<(), Violation> {
    let n = decomp.len();
    let m = graph.num_factors();
    if n == 0 {
        return Err(Violation::Malformed("no nodes".into()));
    }
    if decomp.parent.len() != decomp.labels.len() {
        return Err(Violation::Malformed("parent and label counts differ".into()));
    }
    if decomp.parent[0].is_some() {
        return Err(Violation::Malformed("node 0 must be the root".into()));
    }
    for u in 1..n {
        match decomp.parent[u] {
            None => return Err(Violation::Malformed(format!("node {u} is a second root"))),
            Some(p) if p >= n => {
                return Err(Violation::Malformed(format!("node {u} has missing parent {p}")))
            }
            Some(_) => {}
        }
        // Walk to the root; more than n steps means a cycle.
        let mut x = u;
        let mut steps = 0;
        while let Some(p) = decomp.parent[x] {
            x = p;
            steps += 1;
            if steps > n {
                return Err(Violation::Malformed(format!("node {u} lies on a cycle")));
            }
        }
    }
    for (u, label) in decomp.labels.iter().enumerate() {
        if let Some(&f) = label.iter().find(|&&f| f >= m) {
            return Err(Violation::Malformed(format!("node {u} names factor {f}, graph has {m}")));
        }
    }
    let holds = |u: usize, f: usize| decomp.labels[u].binary_search(&f).is_ok();

    for f in 0..m {
        if !(0..n).any(|u| holds(u, f)) {
            return Err(Violation::EdgeNotCovered { factor: f });
        }
    }
    for f in 0..m {
        // In a tree, the holders form a connected subtree iff exactly one of
        // them has a parent that is not a holder.
        let tops = (0..n)
            .filter(|&u| holds(u, f) && decomp.parent[u].is_none_or(|p| !holds(p, f)))
            .count();
        if tops != 1 {
            return Err(Violation::EdgeNotConnected { factor: f });
        }
    }
    for a in 0..m {
        for b in a + 1..m {
            let sa = graph.factor(a).scope();
            let sb = graph.factor(b).scope();
            if sa.iter().any(|v| sb.contains(v)) && !(0..n).any(|u| holds(u, a) && holds(u, b)) {
                return Err(Violation::IntersectingEdgesSeparated {
                    first: a,
                    second: b,
                });
            }
        }
    }
    for child in 0..n {
        if let Some(parent) = decomp.parent[child] {
            if let Some(&f) = decomp.labels[parent].iter().find(|&&f| !holds(child, f)) {
                return Err(Violation::ParentNotSubset { parent, child, factor: f });
            }
        }
    }
    Ok(())
}
