use std::fmt;
use std::ops::Index;

use crate::error::{Error, Result};

/// A discrete variable with an ordered list of integer value labels.
///
/// Internally every value is referred to by its position in `domain`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub domain: Vec<i64>,
}

impl Variable {
    pub fn new(name: impl Into<String>, domain: Vec<i64>) -> Self {
        Variable {
            name: name.into(),
            domain,
        }
    }

    pub fn binary(name: impl Into<String>) -> Self {
        Variable::new(name, vec![0, 1])
    }

    /// A `{-1, 1}` spin variable.
    pub fn spin(name: impl Into<String>) -> Self {
        Variable::new(name, vec![-1, 1])
    }

    pub fn domain_size(&self) -> usize {
        self.domain.len()
    }

    /// Position of `label` in the domain.
    pub fn index_of(&self, label: i64) -> Option<usize> {
        self.domain.iter().position(|&v| v == label)
    }
}

/// A complete assignment: one domain index per variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct World(Vec<usize>);

impl World {
    pub fn new(values: Vec<usize>) -> Self {
        World(values)
    }

    pub fn zeros(n: usize) -> Self {
        World(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn set(&mut self, var: usize, value: usize) {
        self.0[var] = value;
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }
}

impl Index<usize> for World {
    type Output = usize;

    fn index(&self, var: usize) -> &usize {
        &self.0[var]
    }
}

impl From<Vec<usize>> for World {
    fn from(values: Vec<usize>) -> Self {
        World(values)
    }
}

/// Semantic function applied to the summed inner values of an aggregate factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Semantics {
    /// `g(x) = x`
    Linear,
    /// `g(x) = sgn(x)`, with `sgn(0) = 0`
    Logical,
    /// `g(x) = sgn(x) log(1 + |x|)`
    Ratio,
}

impl Semantics {
    pub const ALL: [Semantics; 3] = [Semantics::Linear, Semantics::Logical, Semantics::Ratio];

    pub fn apply(self, x: f64) -> f64 {
        match self {
            Semantics::Linear => x,
            Semantics::Logical => sgn(x),
            Semantics::Ratio => sgn(x) * x.abs().ln_1p(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Semantics::Linear => "linear",
            Semantics::Logical => "logical",
            Semantics::Ratio => "ratio",
        }
    }
}

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl std::str::FromStr for Semantics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Semantics::Linear),
            "logical" => Ok(Semantics::Logical),
            "ratio" => Ok(Semantics::Ratio),
            other => Err(Error::invalid(format!("unknown semantics `{other}`"))),
        }
    }
}

/// A dense factor over an ordered scope, stored row-major (last scope
/// variable varies fastest). Weights are folded into the values.
#[derive(Debug, Clone, PartialEq)]
pub struct TableFactor {
    pub name: String,
    scope: Vec<usize>,
    dims: Vec<usize>,
    strides: Vec<usize>,
    table: Vec<f64>,
}

impl TableFactor {
    /// `dims[i]` is the domain size of `scope[i]`.
    pub fn new(
        name: impl Into<String>,
        scope: Vec<usize>,
        dims: Vec<usize>,
        table: Vec<f64>,
    ) -> Result<Self> {
        let name = name.into();
        if scope.is_empty() {
            return Err(Error::invalid(format!("factor `{name}` has an empty scope")));
        }
        if scope.len() != dims.len() {
            return Err(Error::invalid(format!(
                "factor `{name}`: scope has {} variables but {} dimensions were given",
                scope.len(),
                dims.len()
            )));
        }
        let mut seen = scope.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid(format!(
                "factor `{name}` repeats a variable in its scope"
            )));
        }
        let expected: usize = dims.iter().product();
        if table.len() != expected {
            return Err(Error::invalid(format!(
                "factor `{name}`: table has {} entries, scope requires {expected}",
                table.len()
            )));
        }
        if let Some(bad) = table.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "factor `{name}` has a non-finite entry {bad}"
            )));
        }
        let mut strides = vec![1; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        Ok(TableFactor {
            name,
            scope,
            dims,
            strides,
            table,
        })
    }

    /// Builds a table by evaluating `f` on every joint assignment of the scope.
    pub fn from_fn(
        name: impl Into<String>,
        scope: Vec<usize>,
        dims: Vec<usize>,
        mut f: impl FnMut(&[usize]) -> f64,
    ) -> Result<Self> {
        let total: usize = dims.iter().product();
        let mut table = Vec::with_capacity(total);
        let mut assignment = vec![0usize; dims.len()];
        for _ in 0..total {
            table.push(f(&assignment));
            for i in (0..dims.len()).rev() {
                assignment[i] += 1;
                if assignment[i] < dims[i] {
                    break;
                }
                assignment[i] = 0;
            }
        }
        TableFactor::new(name, scope, dims, table)
    }

    pub fn scope(&self) -> &[usize] {
        &self.scope
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub(crate) fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub(crate) fn offset(&self, world: &[usize]) -> usize {
        self.scope
            .iter()
            .zip(&self.strides)
            .map(|(&v, &s)| world[v] * s)
            .sum()
    }

    pub fn value(&self, world: &[usize]) -> f64 {
        self.table[self.offset(world)]
    }

    /// Position of `var` in the scope.
    pub fn position(&self, var: usize) -> Option<usize> {
        self.scope.iter().position(|&v| v == var)
    }

    pub fn max_value(&self) -> f64 {
        self.table.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.table.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn remap(&mut self, map: &[usize]) {
        for v in &mut self.scope {
            *v = map[*v];
        }
    }
}

/// A factor `w * g(sum_b inner_b(I))` over a list of inner tables.
///
/// Each inner table is one body assignment of a template factor.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateFactor {
    pub name: String,
    pub weight: f64,
    pub semantics: Semantics,
    terms: Vec<TableFactor>,
    scope: Vec<usize>,
    /// For each scope variable (sorted), the terms that touch it.
    var_terms: Vec<(usize, Vec<usize>)>,
}

impl AggregateFactor {
    pub fn new(
        name: impl Into<String>,
        weight: f64,
        semantics: Semantics,
        terms: Vec<TableFactor>,
    ) -> Result<Self> {
        let name = name.into();
        if !weight.is_finite() {
            return Err(Error::invalid(format!(
                "aggregate `{name}` has a non-finite weight"
            )));
        }
        let mut factor = AggregateFactor {
            name,
            weight,
            semantics,
            terms,
            scope: Vec::new(),
            var_terms: Vec::new(),
        };
        factor.reindex();
        Ok(factor)
    }

    fn reindex(&mut self) {
        let mut scope: Vec<usize> = self
            .terms
            .iter()
            .flat_map(|t| t.scope().iter().copied())
            .collect();
        scope.sort_unstable();
        scope.dedup();
        self.var_terms = scope
            .iter()
            .map(|&v| {
                let touching = self
                    .terms
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| t.scope().contains(&v))
                    .map(|(i, _)| i)
                    .collect();
                (v, touching)
            })
            .collect();
        self.scope = scope;
    }

    pub fn terms(&self) -> &[TableFactor] {
        &self.terms
    }

    /// Sorted union of the inner scopes.
    pub fn scope(&self) -> &[usize] {
        &self.scope
    }

    pub fn inner_sum(&self, world: &[usize]) -> f64 {
        self.terms.iter().map(|t| t.value(world)).sum()
    }

    pub fn value(&self, world: &[usize]) -> f64 {
        self.weight * self.semantics.apply(self.inner_sum(world))
    }

    /// Indices of the terms whose scope contains `var`.
    pub fn terms_touching(&self, var: usize) -> &[usize] {
        match self.var_terms.binary_search_by_key(&var, |(v, _)| *v) {
            Ok(i) => &self.var_terms[i].1,
            Err(_) => &[],
        }
    }

    pub(crate) fn remap(&mut self, map: &[usize]) {
        for t in &mut self.terms {
            t.remap(map);
        }
        self.reindex();
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Factor {
    Table(TableFactor),
    Aggregate(AggregateFactor),
}

impl Factor {
    pub fn name(&self) -> &str {
        match self {
            Factor::Table(t) => &t.name,
            Factor::Aggregate(a) => &a.name,
        }
    }

    pub fn scope(&self) -> &[usize] {
        match self {
            Factor::Table(t) => t.scope(),
            Factor::Aggregate(a) => a.scope(),
        }
    }

    pub fn value(&self, world: &[usize]) -> f64 {
        match self {
            Factor::Table(t) => t.value(world),
            Factor::Aggregate(a) => a.value(world),
        }
    }

    /// Range `max - min` of the factor's values, exact for tables and an
    /// upper bound for aggregates (the semantic functions are nondecreasing,
    /// so summing per-term extremes brackets every reachable inner sum).
    pub fn weight_range(&self) -> f64 {
        match self {
            Factor::Table(t) => t.max_value() - t.min_value(),
            Factor::Aggregate(a) => {
                let hi: f64 = a.terms.iter().map(TableFactor::max_value).sum();
                let lo: f64 = a.terms.iter().map(TableFactor::min_value).sum();
                a.weight.abs() * (a.semantics.apply(hi) - a.semantics.apply(lo))
            }
        }
    }

    fn remap(&mut self, map: &[usize]) {
        match self {
            Factor::Table(t) => t.remap(map),
            Factor::Aggregate(a) => a.remap(map),
        }
    }
}

impl From<TableFactor> for Factor {
    fn from(t: TableFactor) -> Self {
        Factor::Table(t)
    }
}

impl From<AggregateFactor> for Factor {
    fn from(a: AggregateFactor) -> Self {
        Factor::Aggregate(a)
    }
}

/// An immutable factor graph `<V, Phi>`; `pi(I) ∝ exp(sum_phi phi(I))`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorGraph {
    variables: Vec<Variable>,
    factors: Vec<Factor>,
    var_to_factors: Vec<Vec<usize>>,
}

impl FactorGraph {
    pub fn new(variables: Vec<Variable>, factors: Vec<Factor>) -> Result<Self> {
        for (i, v) in variables.iter().enumerate() {
            if v.domain_size() < 2 {
                return Err(Error::invalid(format!(
                    "variable {i} (`{}`) needs at least two values",
                    v.name
                )));
            }
            let mut labels = v.domain.clone();
            labels.sort_unstable();
            if labels.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid(format!(
                    "variable `{}` repeats a value label",
                    v.name
                )));
            }
        }
        let mut var_to_factors = vec![Vec::new(); variables.len()];
        for (fi, f) in factors.iter().enumerate() {
            let tables: Vec<&TableFactor> = match f {
                Factor::Table(t) => vec![t],
                Factor::Aggregate(a) => a.terms.iter().collect(),
            };
            for t in tables {
                for (&v, &d) in t.scope().iter().zip(t.dims()) {
                    let var = variables.get(v).ok_or_else(|| {
                        Error::invalid(format!(
                            "factor `{}` references variable {v}, graph has {}",
                            f.name(),
                            variables.len()
                        ))
                    })?;
                    if var.domain_size() != d {
                        return Err(Error::invalid(format!(
                            "factor `{}` gives `{}` {d} values, domain has {}",
                            f.name(),
                            var.name,
                            var.domain_size()
                        )));
                    }
                }
            }
            for &v in f.scope() {
                var_to_factors[v].push(fi);
            }
        }
        Ok(FactorGraph {
            variables,
            factors,
            var_to_factors,
        })
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, id: usize) -> &Variable {
        &self.variables[id]
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn factor(&self, id: usize) -> &Factor {
        &self.factors[id]
    }

    /// Factors whose scope contains `var`.
    pub fn adjacent_factors(&self, var: usize) -> &[usize] {
        &self.var_to_factors[var]
    }

    pub fn domain_sizes(&self) -> Vec<usize> {
        self.variables.iter().map(Variable::domain_size).collect()
    }

    pub fn max_domain_size(&self) -> usize {
        self.variables
            .iter()
            .map(Variable::domain_size)
            .max()
            .unwrap_or(1)
    }

    pub fn variable_id(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn factor_id(&self, name: &str) -> Option<usize> {
        self.factors.iter().position(|f| f.name() == name)
    }

    /// Number of worlds, or `None` if it overflows `usize`.
    pub fn state_space_size(&self) -> Option<usize> {
        self.variables
            .iter()
            .try_fold(1usize, |acc, v| acc.checked_mul(v.domain_size()))
    }

    pub fn check_world(&self, world: &World) -> Result<()> {
        if world.len() != self.num_variables() {
            return Err(Error::invalid(format!(
                "world has {} entries, graph has {} variables",
                world.len(),
                self.num_variables()
            )));
        }
        for (i, (&x, v)) in world.as_slice().iter().zip(&self.variables).enumerate() {
            if x >= v.domain_size() {
                return Err(Error::invalid(format!(
                    "world assigns index {x} to variable {i}, domain size is {}",
                    v.domain_size()
                )));
            }
        }
        Ok(())
    }

    pub fn check_variable(&self, var: usize) -> Result<()> {
        if var >= self.num_variables() {
            return Err(Error::invalid(format!(
                "variable {var} out of range (graph has {})",
                self.num_variables()
            )));
        }
        Ok(())
    }

    /// Builds a world from domain labels.
    pub fn world_from_labels(&self, labels: &[i64]) -> Result<World> {
        if labels.len() != self.num_variables() {
            return Err(Error::invalid(format!(
                "{} labels given for {} variables",
                labels.len(),
                self.num_variables()
            )));
        }
        labels
            .iter()
            .zip(&self.variables)
            .map(|(&l, v)| {
                v.index_of(l).ok_or_else(|| {
                    Error::invalid(format!("`{l}` is not in the domain of `{}`", v.name))
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(World::new)
    }

    /// Same variables, `factor` dropped.
    pub fn without_factor(&self, factor: usize) -> FactorGraph {
        let factors = self
            .factors
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != factor)
            .map(|(_, f)| f.clone())
            .collect();
        FactorGraph::new(self.variables.clone(), factors).expect("subgraph of a valid graph")
    }

    /// The subgraph on `vars` (in the given order) keeping every factor whose
    /// scope lies inside `vars`. Variables are renumbered `0..vars.len()`.
    pub fn induced(&self, vars: &[usize]) -> FactorGraph {
        let mut map = vec![usize::MAX; self.num_variables()];
        for (new, &old) in vars.iter().enumerate() {
            map[old] = new;
        }
        let variables = vars.iter().map(|&v| self.variables[v].clone()).collect();
        let factors = self
            .factors
            .iter()
            .filter(|f| f.scope().iter().all(|&v| map[v] != usize::MAX))
            .map(|f| {
                let mut f = f.clone();
                f.remap(&map);
                f
            })
            .collect();
        FactorGraph::new(variables, factors).expect("induced subgraph of a valid graph")
    }

    /// Connected components of the variable/factor incidence graph, as sorted
    /// variable lists ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.num_variables();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for f in &self.factors {
            let scope = f.scope();
            for w in scope.windows(2) {
                let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; n];
        for v in 0..n {
            let r = find(&mut parent, v);
            if slot[r] == usize::MAX {
                slot[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot[r]].push(v);
        }
        groups
    }
}

/// Row-major world indexing: the last variable varies fastest.
#[derive(Debug, Clone)]
pub struct WorldIndexer {
    dims: Vec<usize>,
    strides: Vec<usize>,
    size: usize,
}

impl WorldIndexer {
    pub fn new(graph: &FactorGraph, cap: usize) -> Result<Self> {
        let dims = graph.domain_sizes();
        let size = graph
            .state_space_size()
            .filter(|&s| s <= cap)
            .ok_or_else(|| {
                Error::limit(format!(
                    "state space of {} variables exceeds the cap of {cap} worlds",
                    dims.len()
                ))
            })?;
        let mut strides = vec![1; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        Ok(WorldIndexer {
            dims,
            strides,
            size,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn stride(&self, var: usize) -> usize {
        self.strides[var]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn index(&self, world: &[usize]) -> usize {
        world.iter().zip(&self.strides).map(|(&x, &s)| x * s).sum()
    }

    pub fn world(&self, mut index: usize) -> World {
        let values = self
            .strides
            .iter()
            .map(|&s| {
                let x = index / s;
                index %= s;
                x
            })
            .collect();
        World::new(values)
    }

    /// Calls `f(index, world)` for every world in index order.
    pub fn for_each(&self, mut f: impl FnMut(usize, &[usize])) {
        let mut world = vec![0usize; self.dims.len()];
        for idx in 0..self.size {
            f(idx, &world);
            for i in (0..self.dims.len()).rev() {
                world[i] += 1;
                if world[i] < self.dims[i] {
                    break;
                }
                world[i] = 0;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_rejects_wrong_length() {
        let err = TableFactor::new("f", vec![0, 1], vec![2, 2], vec![0.0; 3]).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn table_rejects_non_finite() {
        assert!(TableFactor::new("f", vec![0], vec![2], vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn graph_rejects_bad_scope() {
        let f = TableFactor::new("f", vec![3], vec![2], vec![0.0, 1.0]).unwrap();
        let err = FactorGraph::new(vec![Variable::binary("a")], vec![f.into()]).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn graph_rejects_dimension_mismatch() {
        let f = TableFactor::new("f", vec![0], vec![3], vec![0.0; 3]).unwrap();
        assert!(FactorGraph::new(vec![Variable::binary("a")], vec![f.into()]).is_err());
    }

    #[test]
    fn duplicate_labels_rejected() {
        let err = FactorGraph::new(vec![Variable::new("a", vec![1, 1])], vec![]).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn semantics_values() {
        assert_eq!(Semantics::Logical.apply(0.0), 0.0);
        assert_eq!(Semantics::Logical.apply(-3.0), -1.0);
        assert_eq!(Semantics::Ratio.apply(0.0), 0.0);
        assert!((Semantics::Ratio.apply(-2.0) + 3f64.ln()).abs() < 1e-15);
        assert_eq!(Semantics::Linear.apply(-2.5), -2.5);
    }

    #[test]
    fn indexer_round_trip() {
        let vars = vec![
            Variable::binary("a"),
            Variable::new("b", vec![0, 1, 2]),
            Variable::spin("c"),
        ];
        let g = FactorGraph::new(vars, vec![]).unwrap();
        let ix = WorldIndexer::new(&g, 1 << 20).unwrap();
        assert_eq!(ix.size(), 12);
        let mut count = 0;
        ix.for_each(|i, w| {
            assert_eq!(ix.index(w), i);
            assert_eq!(ix.world(i).as_slice(), w);
            count += 1;
        });
        assert_eq!(count, 12);
        // last variable fastest
        assert_eq!(ix.world(1).as_slice(), &[0, 0, 1]);
    }

    #[test]
    fn indexer_cap() {
        let vars = (0..5).map(|i| Variable::binary(format!("x{i}"))).collect();
        let g = FactorGraph::new(vars, vec![]).unwrap();
        assert!(matches!(
            WorldIndexer::new(&g, 16),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn aggregate_terms_touching() {
        let t1 = TableFactor::new("t1", vec![0, 1], vec![2, 2], vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        let t2 = TableFactor::new("t2", vec![0, 2], vec![2, 2], vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        let a = AggregateFactor::new("a", 1.0, Semantics::Logical, vec![t1, t2]).unwrap();
        assert_eq!(a.scope(), &[0, 1, 2]);
        assert_eq!(a.terms_touching(0), &[0, 1]);
        assert_eq!(a.terms_touching(2), &[1]);
        assert!(a.terms_touching(7).is_empty());
    }

    #[test]
    fn components_and_induced() {
        let vars = (0..4).map(|i| Variable::binary(format!("x{i}"))).collect();
        let f = TableFactor::new("f", vec![0, 2], vec![2, 2], vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let g = FactorGraph::new(vars, vec![f.into()]).unwrap();
        assert_eq!(g.connected_components(), vec![vec![0, 2], vec![1], vec![3]]);
        let sub = g.induced(&[0, 2]);
        assert_eq!(sub.num_factors(), 1);
        assert_eq!(sub.factor(0).scope(), &[0, 1]);
        assert_eq!(sub.factor(0).value(&[1, 0]), 2.0);
    }
}
