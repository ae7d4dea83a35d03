//! Factor-graph templates: schemas over object classes, datasets, the
//! hierarchical checks, and grounding under the three semantics.

mod dataset;
mod ground;
mod schema;
mod text;

pub use dataset::{Dataset, Evidence, WeightOverride};
pub use ground::{ground, ground_with_aggregates, max_weight_bound, FactorOrigin, GroundingResult, VariableOrigin};
pub use schema::{
    has_leading_heads, hierarchy_depth, hw_template_bound, is_hierarchical, is_hierarchical_factor, Schema, Symbol, TemplateFactor,
    TemplateVariable, Term,
};
pub use text::{parse_dataset, parse_template, write_dataset, write_template};

/// The voting template: votes aggregate over voters, priors are per voter.
pub const VOTING_TEMPLATE: &str = include_str!("../../data/voting.tmpl");

/// Voters `v1..vn` with vote weight `w` and per-voter prior weights.
pub fn voting_dataset(n: usize, w: f64, prior_t: &[f64], prior_f: &[f64]) -> Dataset {
    assert_eq!((prior_t.len(), prior_f.len()), (n, n), "one prior per voter");
    let mut d = Dataset::new()
        .with_objects("Voter", (1..=n).map(|i| format!("v{i}")))
        .expect("distinct voter names");
    for name in ["vote_t", "vote_f"] {
        d.weights.push(WeightOverride {
            factor: name.into(),
            head: Vec::new(),
            weight: w,
        });
    }
    for (name, priors) in [("prior_t", prior_t), ("prior_f", prior_f)] {
        for (i, &p) in priors.iter().enumerate() {
            d.weights.push(WeightOverride {
                factor: name.into(),
                head: vec![format!("v{}", i + 1)],
                weight: p,
            });
        }
    }
    d
}
