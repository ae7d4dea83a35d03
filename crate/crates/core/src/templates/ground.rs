use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::fg::{AggregateFactor, Factor, FactorGraph, Semantics, TableFactor, Variable};
use crate::templates::dataset::Dataset;
use crate::templates::schema::{Schema, TemplateFactor};

/// Which template variable and object tuple a ground variable comes from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VariableOrigin {
    pub variable: usize,
    pub objects: Vec<String>,
}

/// Which template factor and symbol assignment a ground factor comes from.
/// `body` is empty for head-aggregated factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactorOrigin {
    pub factor: usize,
    pub head: Vec<String>,
    pub body: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundingResult {
    pub graph: FactorGraph,
    /// One entry per ground factor.
    pub factor_origins: Vec<FactorOrigin>,
    /// One entry per ground variable.
    pub variable_origins: Vec<VariableOrigin>,
    /// Variables fixed by evidence, with their value labels. They are
    /// conditioned away and do not appear in `graph`.
    pub evidence: Vec<(VariableOrigin, i64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// Linear factors expand into one table per full assignment; the others
    /// aggregate per head assignment.
    Standard,
    /// Every factor aggregates per head assignment.
    Aggregated,
}

/// Grounds `schema` on `data`. Factors whose effective semantics is linear
/// become one weighted table per full symbol assignment; logical and ratio
/// factors become one aggregate per head assignment whose terms range over
/// the body assignments.
pub fn ground(schema: &Schema, data: &Dataset, semantics: Semantics) -> Result<GroundingResult> {
    Grounder::new(schema, data)?.run(semantics, Mode::Standard)
}

/// Grounds every factor as one aggregate per head assignment, including
/// linear ones (then `g` is the identity).
pub fn ground_with_aggregates(schema: &Schema, data: &Dataset, semantics: Semantics) -> Result<GroundingResult> {
    Grounder::new(schema, data)?.run(semantics, Mode::Aggregated)
}

struct Grounder<'a> {
    schema: &'a Schema,
    /// Objects of each schema class.
    objects: Vec<&'a [String]>,
    /// `(template variable, object indices)` to ground index.
    var_index: HashMap<(usize, Vec<usize>), usize>,
    all_vars: Vec<(usize, Vec<usize>)>,
    fixed: Vec<Option<usize>>,
    /// Ground index to graph index for unfixed variables.
    free_id: Vec<Option<usize>>,
    overrides: HashMap<(usize, Vec<usize>), f64>,
}

fn tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = sizes.iter().product();
    let mut out = Vec::with_capacity(total);
    if total == 0 {
        return out;
    }
    let mut cur = vec![0; sizes.len()];
    for _ in 0..total {
        out.push(cur.clone());
        for i in (0..sizes.len()).rev() {
            cur[i] += 1;
            if cur[i] < sizes[i] {
                break;
            }
            cur[i] = 0;
        }
    }
    out
}

enum Instance {
    Table(TableFactor),
    Constant(f64),
}

impl<'a> Grounder<'a> {
    fn new(schema: &'a Schema, data: &'a Dataset) -> Result<Self> {
        for (class, _) in data.classes() {
            if schema.class_id(class).is_none() {
                return Err(Error::invalid(format!("dataset uses unknown class `{class}`")));
            }
        }
        let objects: Vec<&[String]> = schema.classes().iter().map(|c| data.objects(c)).collect();
        let mut var_index = HashMap::new();
        let mut all_vars = Vec::new();
        for (vi, v) in schema.variables().iter().enumerate() {
            let sizes: Vec<usize> = v.classes.iter().map(|c| objects[schema.class_id(c).unwrap()].len()).collect();
            for t in tuples(&sizes) {
                var_index.insert((vi, t.clone()), all_vars.len());
                all_vars.push((vi, t));
            }
        }
        let mut g = Grounder {
            schema,
            objects,
            var_index,
            fixed: vec![None; all_vars.len()],
            free_id: Vec::new(),
            all_vars,
            overrides: HashMap::new(),
        };
        for e in &data.evidence {
            let vi = schema
                .variable_id(&e.variable)
                .ok_or_else(|| Error::invalid(format!("evidence on unknown template variable `{}`", e.variable)))?;
            let tuple = g.resolve(&schema.variables()[vi].classes, &e.objects, &e.variable)?;
            let id = g.var_index[&(vi, tuple)];
            let value = schema.variables()[vi].domain.iter().position(|&d| d == e.value).ok_or_else(|| {
                Error::invalid(format!("`{}` is not a value of `{}`", e.value, e.variable))
            })?;
            match g.fixed[id] {
                Some(prev) if prev != value => {
                    return Err(Error::invalid(format!("conflicting evidence for `{}`", e.variable)))
                }
                _ => g.fixed[id] = Some(value),
            }
        }
        let mut next = 0;
        g.free_id = g
            .fixed
            .iter()
            .map(|f| {
                f.is_none().then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect();
        for w in &data.weights {
            let fi = schema
                .factor_id(&w.factor)
                .ok_or_else(|| Error::invalid(format!("weight for unknown template factor `{}`", w.factor)))?;
            let heads: Vec<usize> = schema.factors()[fi].head_symbols().collect();
            let classes: Vec<String> = heads
                .iter()
                .map(|&s| schema.classes()[schema.symbol_class(fi, s)].clone())
                .collect();
            let tuple = g.resolve(&classes, &w.head, &w.factor)?;
            if g.overrides.insert((fi, tuple), w.weight).is_some() {
                return Err(Error::invalid(format!("duplicate weight for `{}`", w.factor)));
            }
            if !w.weight.is_finite() {
                return Err(Error::invalid(format!("non-finite weight for `{}`", w.factor)));
            }
        }
        Ok(g)
    }

    fn resolve(&self, classes: &[String], names: &[String], what: &str) -> Result<Vec<usize>> {
        if classes.len() != names.len() {
            return Err(Error::invalid(format!(
                "`{what}` takes {} objects, got {}",
                classes.len(),
                names.len()
            )));
        }
        classes
            .iter()
            .zip(names)
            .map(|(c, n)| {
                self.objects[self.schema.class_id(c).unwrap()]
                    .iter()
                    .position(|o| o == n)
                    .ok_or_else(|| Error::invalid(format!("`{n}` is not an object of class `{c}` in `{what}`")))
            })
            .collect()
    }

    fn object_names(&self, fi: usize, symbols: &[usize], assignment: &[usize]) -> Vec<String> {
        symbols
            .iter()
            .map(|&s| self.objects[self.schema.symbol_class(fi, s)][assignment[s]].clone())
            .collect()
    }

    /// The template table at one full symbol assignment, restricted to the
    /// unfixed ground variables it touches.
    fn instantiate(&self, tf: &TemplateFactor, assignment: &[usize], name: String) -> Result<Instance> {
        let vars = self.schema.variables();
        let mut scope: Vec<usize> = Vec::new();
        let mut dims: Vec<usize> = Vec::new();
        // Per term: fixed value or position in `scope`.
        let mut slots: Vec<std::result::Result<usize, usize>> = Vec::with_capacity(tf.terms.len());
        for t in &tf.terms {
            let tuple: Vec<usize> = t.args.iter().map(|&s| assignment[s]).collect();
            let id = self.var_index[&(t.variable, tuple)];
            match (self.fixed[id], self.free_id[id]) {
                (Some(v), _) => slots.push(Ok(v)),
                (None, Some(free)) => {
                    let pos = scope.iter().position(|&x| x == free).unwrap_or_else(|| {
                        scope.push(free);
                        dims.push(vars[t.variable].domain.len());
                        scope.len() - 1
                    });
                    slots.push(Err(pos));
                }
                (None, None) => unreachable!("every ground variable is fixed or free"),
            }
        }
        let sizes: Vec<usize> = tf.terms.iter().map(|t| vars[t.variable].domain.len()).collect();
        let entry = |a: &[usize]| {
            let mut idx = 0;
            for (slot, &size) in slots.iter().zip(&sizes) {
                let v = match *slot {
                    Ok(v) => v,
                    Err(p) => a[p],
                };
                idx = idx * size + v;
            }
            tf.table[idx]
        };
        if scope.is_empty() {
            return Ok(Instance::Constant(entry(&[])));
        }
        Ok(Instance::Table(TableFactor::from_fn(name, scope, dims, entry)?))
    }

    fn run(&self, semantics: Semantics, mode: Mode) -> Result<GroundingResult> {
        let schema = self.schema;
        let mut variables = Vec::new();
        let mut variable_origins = Vec::new();
        let mut evidence = Vec::new();
        for (id, (vi, tuple)) in self.all_vars.iter().enumerate() {
            let tv = &schema.variables()[*vi];
            let objects: Vec<String> = tv
                .classes
                .iter()
                .zip(tuple)
                .map(|(c, &o)| self.objects[schema.class_id(c).unwrap()][o].clone())
                .collect();
            let origin = VariableOrigin {
                variable: *vi,
                objects,
            };
            match self.fixed[id] {
                Some(v) => evidence.push((origin, tv.domain[v])),
                None => {
                    let name = if origin.objects.is_empty() {
                        tv.name.clone()
                    } else {
                        format!("{}({})", tv.name, origin.objects.join(","))
                    };
                    variables.push(Variable::new(name, tv.domain.clone()));
                    variable_origins.push(origin);
                }
            }
        }

        let mut factors: Vec<Factor> = Vec::new();
        let mut factor_origins = Vec::new();
        for (fi, tf) in schema.factors().iter().enumerate() {
            let sem = tf.effective_semantics(semantics);
            let heads: Vec<usize> = tf.head_symbols().collect();
            let bodies: Vec<usize> = tf.body_symbols().collect();
            let class_size = |s: usize| self.objects[schema.symbol_class(fi, s)].len();
            let head_sizes: Vec<usize> = heads.iter().map(|&s| class_size(s)).collect();
            let body_sizes: Vec<usize> = bodies.iter().map(|&s| class_size(s)).collect();
            let body_tuples = tuples(&body_sizes);
            let all_symbols: Vec<usize> = (0..tf.symbols.len()).collect();
            for h in tuples(&head_sizes) {
                let weight = self.overrides.get(&(fi, h.clone())).copied().unwrap_or(tf.weight);
                let head_names: Vec<String> = {
                    let mut a = vec![0; tf.symbols.len()];
                    for (&s, &o) in heads.iter().zip(&h) {
                        a[s] = o;
                    }
                    self.object_names(fi, &heads, &a)
                };
                let mut assignment = vec![0; tf.symbols.len()];
                for (&s, &o) in heads.iter().zip(&h) {
                    assignment[s] = o;
                }
                let expand = sem == Semantics::Linear && mode == Mode::Standard;
                let mut terms = Vec::new();
                let mut constant = 0.0;
                for b in &body_tuples {
                    for (&s, &o) in bodies.iter().zip(b) {
                        assignment[s] = o;
                    }
                    let label = format!("{}[{}]", tf.name, self.object_names(fi, &all_symbols, &assignment).join(","));
                    match self.instantiate(tf, &assignment, label)? {
                        Instance::Table(t) if expand => {
                            let scaled: Vec<f64> = t.table().iter().map(|v| weight * v).collect();
                            let t = TableFactor::new(t.name.clone(), t.scope().to_vec(), t.dims().to_vec(), scaled)?;
                            factors.push(t.into());
                            factor_origins.push(FactorOrigin {
                                factor: fi,
                                head: head_names.clone(),
                                body: self.object_names(fi, &bodies, &assignment),
                            });
                        }
                        Instance::Table(t) => terms.push(t),
                        Instance::Constant(c) => constant += c,
                    }
                }
                if expand || terms.is_empty() {
                    // Constant contributions shift every energy equally.
                    continue;
                }
                if constant != 0.0 {
                    let t = &terms[0];
                    let shifted: Vec<f64> = t.table().iter().map(|v| v + constant).collect();
                    terms[0] = TableFactor::new(t.name.clone(), t.scope().to_vec(), t.dims().to_vec(), shifted)?;
                }
                let name = format!("{}[{}]", tf.name, head_names.join(","));
                factors.push(AggregateFactor::new(name, weight, sem, terms)?.into());
                factor_origins.push(FactorOrigin {
                    factor: fi,
                    head: head_names,
                    body: Vec::new(),
                });
            }
        }
        Ok(GroundingResult {
            graph: FactorGraph::new(variables, factors)?,
            factor_origins,
            variable_origins,
            evidence,
        })
    }
}

/// A bound on the maximum factor weight of a grounding:
/// `2 · max|w| · max(1, log(1 + B · V))` over logical and ratio factors, where
/// `B` is the factor's body-assignment count and `V` its largest inner
/// magnitude, and `|w| · (max − min)` of the table for linear factors.
pub fn max_weight_bound(schema: &Schema, data: &Dataset, semantics: Semantics) -> Result<f64> {
    Grounder::new(schema, data)?;
    let mut bound: f64 = 0.0;
    for (fi, tf) in schema.factors().iter().enumerate() {
        let w = data
            .weights
            .iter()
            .filter(|o| o.factor == tf.name)
            .map(|o| o.weight.abs())
            .fold(tf.weight.abs(), f64::max);
        let (lo, hi) = tf.table.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
        let b: f64 = tf
            .body_symbols()
            .map(|s| data.objects(&schema.classes()[schema.symbol_class(fi, s)]).len() as f64)
            .product();
        let v = lo.abs().max(hi.abs());
        let f = match tf.effective_semantics(semantics) {
            Semantics::Linear => w * (hi - lo),
            Semantics::Logical | Semantics::Ratio => 2.0 * w * (1.0 + b * v).ln().max(1.0),
        };
        bound = bound.max(f);
    }
    Ok(bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fg::energy;
    use crate::templates::{parse_dataset, parse_template, voting_dataset, VOTING_TEMPLATE};

    #[test]
    fn voting_logical_shape() {
        let s = parse_template(VOTING_TEMPLATE).unwrap();
        let d = voting_dataset(3, 0.5, &[-0.1, -0.2, -0.3], &[-0.4, -0.5, -0.6]);
        let g = ground(&s, &d, Semantics::Logical).unwrap();
        assert_eq!(g.graph.num_variables(), 7);
        let aggs = g.graph.factors().iter().filter(|f| matches!(f, Factor::Aggregate(_))).count();
        let tables = g.graph.num_factors() - aggs;
        assert_eq!((aggs, tables), (2, 6));
        assert_eq!(crate::width::hierarchy_width(&g.graph).unwrap(), 3);
    }

    #[test]
    fn voting_linear_shape() {
        let s = parse_template(VOTING_TEMPLATE).unwrap();
        let d = voting_dataset(3, 0.5, &[-0.1; 3], &[-0.2; 3]);
        let g = ground(&s, &d, Semantics::Linear).unwrap();
        assert!(g.graph.factors().iter().all(|f| matches!(f, Factor::Table(_))));
        assert_eq!(g.graph.num_factors(), 12);
        assert_eq!(crate::width::hierarchy_width(&g.graph).unwrap(), 7);
    }

    #[test]
    fn empty_dataset_has_no_factors() {
        let s = parse_template(VOTING_TEMPLATE).unwrap();
        for sem in Semantics::ALL {
            let g = ground(&s, &Dataset::new(), sem).unwrap();
            assert_eq!(g.graph.num_factors(), 0);
            assert_eq!(crate::width::hierarchy_width(&g.graph).unwrap(), 0);
        }
    }

    #[test]
    fn provenance_is_total_and_injective() {
        let s = parse_template(VOTING_TEMPLATE).unwrap();
        let d = voting_dataset(3, 0.5, &[-0.1; 3], &[-0.2; 3]);
        for sem in Semantics::ALL {
            let g = ground(&s, &d, sem).unwrap();
            assert_eq!(g.factor_origins.len(), g.graph.num_factors());
            assert_eq!(g.variable_origins.len(), g.graph.num_variables());
            let unique: std::collections::HashSet<_> = g.factor_origins.iter().collect();
            assert_eq!(unique.len(), g.factor_origins.len());
        }
    }

    #[test]
    fn evidence_conditions_the_joint() {
        // Conditioning T(v1) = 1 by grounding must equal the full joint
        // restricted to T(v1) = 1 and renormalized.
        let s = parse_template(VOTING_TEMPLATE).unwrap();
        let mut d = voting_dataset(2, 0.7, &[-0.3, -0.6], &[-0.2, -0.9]);
        let full = ground(&s, &d, Semantics::Ratio).unwrap().graph;
        d.evidence.push(crate::templates::Evidence {
            variable: "T".into(),
            objects: vec!["v1".into()],
            value: 1,
        });
        let cond = ground(&s, &d, Semantics::Ratio).unwrap();
        assert_eq!(cond.graph.num_variables(), 4);
        assert_eq!(cond.evidence.len(), 1);
        let pj = crate::fg::exact_joint(&full).unwrap();
        let pc = crate::fg::exact_joint(&cond.graph).unwrap();
        let t1 = full.variable_id("T(v1)").unwrap();
        let mass: f64 = (0..pj.probabilities.len())
            .filter(|&i| pj.indexer().world(i)[t1] == 1)
            .map(|i| pj.probabilities[i])
            .sum();
        pc.indexer().for_each(|i, w| {
            let mut full_world = w.to_vec();
            full_world.insert(t1, 1);
            let expect = pj.probabilities[pj.indexer().index(&full_world)] / mass;
            assert!((pc.probabilities[i] - expect).abs() < 1e-12);
        });
    }

    #[test]
    fn repeated_ground_variable_in_one_assignment() {
        // E(x, y) E(y, x) with x = y touches a single ground variable twice.
        let s = parse_template(
            "class C\ntvar E(C,C) domain 2 0 1\ntfactor sym(x,y) weight 1 semantics-default : E(x,y) E(y,x) table 0 0.5 0.25 2\n",
        )
        .unwrap();
        let d = parse_dataset("object C a\nobject C b\n").unwrap();
        let g = ground(&s, &d, Semantics::Linear).unwrap();
        assert_eq!(g.graph.num_factors(), 4);
        // The diagonal assignment (a, a) sees E(a,a) in both slots: 0 or 2.
        let diag = g.graph.factors()[0].clone();
        match diag {
            Factor::Table(t) => assert_eq!(t.table(), &[0.0, 2.0]),
            _ => panic!("linear grounding gives tables"),
        }
        let w = g.graph.world_from_labels(&[1, 0, 1, 1]).unwrap();
        assert!((energy(&g.graph, &w).unwrap() - (2.0 + 0.25 + 0.5 + 2.0)).abs() < 1e-15);
    }

    #[test]
    fn bad_datasets_are_rejected() {
        let s = parse_template(VOTING_TEMPLATE).unwrap();
        let bad = [
            "object Nope a\n",
            "object Voter a\nevidence T(b) = 1\n",
            "object Voter a\nevidence T(a) = 7\n",
            "object Voter a\nevidence T(a) = 1\nevidence T(a) = 0\n",
            "object Voter a\nweight prior_t (a, a) = 1\n",
            "object Voter a\nweight nothing () = 1\n",
        ];
        for text in bad {
            let d = parse_dataset(text).unwrap();
            assert!(matches!(ground(&s, &d, Semantics::Logical), Err(Error::InvalidInput(_))), "{text}");
        }
    }
}
