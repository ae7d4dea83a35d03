//! Random hierarchical schemas and datasets shared by the integration tests.
#![allow(dead_code)]

use hwgibbs::fg::{energy, FactorGraph, Semantics, WorldIndexer};
use hwgibbs::rng::stream;
use hwgibbs::templates::{Dataset, Schema, Symbol, TemplateFactor, TemplateVariable, Term};
use rand::seq::IndexedRandom;
use rand::Rng;

const CLASSES: [&str; 2] = ["A", "B"];

/// A random schema whose factors are hierarchical by construction: each
/// factor fixes a shared prefix of symbols, every term starts with it, and
/// the heads are a leading run of that prefix.
pub fn random_hierarchical_schema(seed: u64, index: u64, semantics_free: bool) -> Schema {
    let mut r = stream(seed, index);
    let classes: Vec<String> = CLASSES.iter().map(|c| c.to_string()).collect();
    let nvars = r.random_range(2..=4);
    let variables: Vec<TemplateVariable> = (0..nvars)
        .map(|i| {
            let arity = r.random_range(0..=2);
            let k = r.random_range(2..=3);
            TemplateVariable {
                name: format!("V{i}"),
                classes: (0..arity).map(|_| CLASSES.choose(&mut r).unwrap().to_string()).collect(),
                domain: (0..k).collect(),
            }
        })
        .collect();
    let nfactors = r.random_range(1..=3);
    let factors = (0..nfactors)
        .map(|i| random_factor(&mut r, i, &variables, semantics_free))
        .collect();
    Schema::new(classes, variables, factors).expect("generated schema is valid")
}

fn random_factor(r: &mut impl Rng, index: usize, variables: &[TemplateVariable], semantics_free: bool) -> TemplateFactor {
    let first = r.random_range(0..variables.len());
    let fv = &variables[first];
    let depth = r.random_range(0..=fv.classes.len());
    let mut symbols: Vec<(String, String)> = Vec::new(); // (name, class)
    let mut args = Vec::new();
    for (j, c) in fv.classes.iter().enumerate() {
        let reuse = (j >= depth)
            .then(|| (depth..symbols.len()).filter(|&s| symbols[s].1 == *c).collect::<Vec<_>>())
            .filter(|c| !c.is_empty() && r.random_bool(0.3));
        match reuse {
            Some(cands) => args.push(*cands.choose(r).unwrap()),
            None => {
                symbols.push((format!("s{}", symbols.len()), c.clone()));
                args.push(symbols.len() - 1);
            }
        }
    }
    let prefix: Vec<usize> = args[..depth].to_vec();
    let mut terms = vec![Term { variable: first, args }];
    if r.random_bool(0.6) {
        let compatible: Vec<usize> = (0..variables.len())
            .filter(|&v| {
                let cl = &variables[v].classes;
                cl.len() >= depth && cl[..depth] == fv.classes[..depth]
            })
            .collect();
        let v = *compatible.choose(r).unwrap();
        let mut args = prefix.clone();
        for c in &variables[v].classes[depth..] {
            let cands: Vec<usize> = (0..symbols.len()).filter(|&s| symbols[s].1 == *c && !prefix.contains(&s)).collect();
            if !cands.is_empty() && r.random_bool(0.5) {
                args.push(*cands.choose(r).unwrap());
            } else {
                symbols.push((format!("s{}", symbols.len()), c.clone()));
                args.push(symbols.len() - 1);
            }
        }
        terms.push(Term { variable: v, args });
    }
    let heads: Vec<usize> = prefix[..r.random_range(0..=depth)].to_vec();
    let entries: usize = terms.iter().map(|t| variables[t.variable].domain.len()).product();
    let semantics = if semantics_free {
        None
    } else {
        [None, Some(Semantics::Linear), Some(Semantics::Logical), Some(Semantics::Ratio)]
            .choose(r)
            .copied()
            .unwrap()
    };
    TemplateFactor {
        name: format!("f{index}"),
        symbols: symbols
            .into_iter()
            .enumerate()
            .map(|(i, (name, _))| Symbol { name, head: heads.contains(&i) })
            .collect(),
        terms,
        weight: r.random_range(-1.0..1.0),
        semantics,
        table: (0..entries).map(|_| r.random_range(-1.0..1.0)).collect(),
    }
}

/// One to `max_objects` objects per class.
pub fn random_dataset(seed: u64, index: u64, max_objects: usize) -> Dataset {
    let mut r = stream(seed ^ 0x5eed, index);
    let mut d = Dataset::new();
    for c in CLASSES {
        for o in 0..r.random_range(1..=max_objects) {
            d.add_object(c, &format!("{}{o}", c.to_lowercase())).unwrap();
        }
    }
    d
}

/// Energy of every world, in row-major index order.
pub fn energies(graph: &FactorGraph, cap: usize) -> Option<Vec<f64>> {
    let ix = WorldIndexer::new(graph, cap).ok()?;
    Some((0..ix.size()).map(|i| energy(graph, &ix.world(i)).unwrap()).collect())
}
