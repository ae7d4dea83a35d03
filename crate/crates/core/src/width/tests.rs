use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::fg::{Factor, FactorGraph, Semantics, TableFactor, Variable};
use crate::models::{build_path, build_voting_model, VotingPriors};

/// Graph with binary variables and zero tables on the given scopes.
fn scopes_graph(n: usize, scopes: &[Vec<usize>]) -> FactorGraph {
    let vars = (0..n).map(|i| Variable::binary(format!("x{i}"))).collect();
    let factors = scopes
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let dims = vec![2; s.len()];
            let size = 1 << s.len();
            TableFactor::new(format!("f{i}"), s.clone(), dims, vec![0.0; size])
                .unwrap()
                .into()
        })
        .collect();
    FactorGraph::new(vars, factors).unwrap()
}

fn random_scopes(rng: &mut ChaCha8Rng, max_vars: usize, max_factors: usize) -> (usize, Vec<Vec<usize>>) {
    let n = rng.random_range(1..=max_vars);
    let m = rng.random_range(0..=max_factors);
    let scopes = (0..m)
        .map(|_| {
            let arity = rng.random_range(1..=3.min(n));
            let mut s: Vec<usize> = Vec::new();
            while s.len() < arity {
                let v = rng.random_range(0..n);
                if !s.contains(&v) {
                    s.push(v);
                }
            }
            s
        })
        .collect();
    (n, scopes)
}

/// Literal transcription of the recursive definition: no memo, no pruning.
fn naive_hw(scopes: &[Vec<usize>]) -> usize {
    if scopes.is_empty() {
        return 0;
    }
    let comps = naive_components(scopes);
    if comps.len() > 1 {
        return comps.iter().map(|c| naive_hw(c)).max().unwrap();
    }
    (0..scopes.len())
        .map(|i| {
            let rest: Vec<Vec<usize>> = scopes
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, s)| s.clone())
                .collect();
            1 + naive_hw(&rest)
        })
        .min()
        .unwrap()
}

fn naive_components(scopes: &[Vec<usize>]) -> Vec<Vec<Vec<usize>>> {
    let m = scopes.len();
    let mut label: Vec<usize> = (0..m).collect();
    loop {
        let mut changed = false;
        for a in 0..m {
            for b in 0..m {
                if scopes[a].iter().any(|v| scopes[b].contains(v)) && label[b] > label[a] {
                    label[b] = label[a];
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut roots: Vec<usize> = label.clone();
    roots.sort_unstable();
    roots.dedup();
    roots
        .iter()
        .map(|r| (0..m).filter(|&i| label[i] == *r).map(|i| scopes[i].clone()).collect())
        .collect()
}

fn path(n: usize) -> FactorGraph {
    build_path(n, |_| [0.0; 4])
}

fn ceil_log2(n: usize) -> usize {
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

#[test]
fn factorless_graph_has_width_zero() {
    let g = scopes_graph(3, &[]);
    assert_eq!(hierarchy_width(&g).unwrap(), 0);
    assert!(hw_at_most_k(&g, 0));
    let d = hierarchy_decomposition(&g).unwrap();
    assert_eq!(d.len(), 1);
    assert_eq!(d.width(), 0);
}

#[test]
fn path_widths() {
    assert_eq!(hierarchy_width(&path(4)).unwrap(), 2);
    assert!(!hw_at_most_k(&path(4), 1));
    assert!(hw_at_most_k(&path(4), 2));
    for n in 2..=12 {
        assert_eq!(hierarchy_width(&path(n)).unwrap(), ceil_log2(n), "path {n}");
    }
}

#[test]
fn voting_widths() {
    for n in 1..=3 {
        for sem in [Semantics::Logical, Semantics::Ratio] {
            let g = build_voting_model(n, sem, 0.5, &VotingPriors::Zero);
            assert_eq!(hierarchy_width(&g).unwrap(), 3, "{sem} n={n}");
        }
        let g = build_voting_model(n, Semantics::Linear, 0.5, &VotingPriors::Zero);
        assert_eq!(hierarchy_width(&g).unwrap(), 2 * n + 1, "linear n={n}");
    }
}

#[test]
fn k_zero_iff_no_factors() {
    assert!(hw_at_most_k(&scopes_graph(2, &[]), 0));
    assert!(!hw_at_most_k(&scopes_graph(2, &[vec![0]]), 0));
}

#[test]
fn disjoint_edges_have_width_one() {
    // Applying the removal step to the whole graph instead of per component
    // would wrongly reject k = 1 here.
    let g = scopes_graph(4, &[vec![0, 1], vec![2, 3]]);
    assert!(hw_at_most_k(&g, 1));
    assert_eq!(hierarchy_width(&g).unwrap(), 1);
}

#[test]
fn single_factor_certificate() {
    let g = scopes_graph(2, &[vec![0, 1]]);
    let d = hierarchy_decomposition(&g).unwrap();
    assert_eq!(d.len(), 1);
    assert_eq!(d.label(0), &[0]);
    assert_eq!(validate_decomposition(&g, &d), Ok(()));
}

#[test]
fn disconnected_unary_certificate() {
    let g = scopes_graph(2, &[vec![0], vec![1]]);
    let d = hierarchy_decomposition(&g).unwrap();
    assert_eq!(d.label(0), &[] as &[usize]);
    assert_eq!(d.children(0).len(), 2);
    assert_eq!(d.width(), 1);
    assert_eq!(validate_decomposition(&g, &d), Ok(()));
}

#[test]
fn path8_certificate() {
    let g = path(8);
    let d = hierarchy_decomposition(&g).unwrap();
    assert_eq!(d.width(), 3);
    assert_eq!(validate_decomposition(&g, &d), Ok(()));
}

#[test]
fn emptied_label_violates_condition_one() {
    let g = path(4);
    let d = hierarchy_decomposition(&g).unwrap();
    // Root holds the middle edge; each child adds one end edge.
    assert_eq!(d.label(0), &[1]);
    let leaf = d.children(0)[0];
    let missing: Vec<usize> = d.label(leaf).iter().copied().filter(|&f| f != 1).collect();
    let mut labels: Vec<Vec<usize>> = (0..d.len()).map(|u| d.label(u).to_vec()).collect();
    let parents: Vec<Option<usize>> = (0..d.len()).map(|u| d.parent(u)).collect();
    labels[leaf].clear();
    let broken = HierarchyDecomposition::from_parts(parents, labels);
    assert_eq!(
        validate_decomposition(&g, &broken),
        Err(Violation::EdgeNotCovered { factor: missing[0] })
    );
}

#[test]
fn strict_subset_child_violates_condition_four() {
    let g = scopes_graph(3, &[vec![0, 1], vec![1, 2]]);
    let d = HierarchyDecomposition::from_parts(vec![None, Some(0)], vec![vec![0, 1], vec![0]]);
    let err = validate_decomposition(&g, &d).unwrap_err();
    assert_eq!(err.condition(), 4);
    assert_eq!(err, Violation::ParentNotSubset { parent: 0, child: 1, factor: 1 });
}

#[test]
fn separated_holders_violate_condition_two() {
    let g = scopes_graph(2, &[vec![0], vec![1]]);
    let d = HierarchyDecomposition::from_parts(
        vec![None, Some(0), Some(0)],
        vec![vec![], vec![0, 1], vec![1]],
    );
    assert_eq!(validate_decomposition(&g, &d), Err(Violation::EdgeNotConnected { factor: 1 }));
}

#[test]
fn malformed_trees_are_reported() {
    let g = scopes_graph(1, &[vec![0]]);
    let two_roots = HierarchyDecomposition::from_parts(vec![None, None], vec![vec![0], vec![0]]);
    assert_eq!(validate_decomposition(&g, &two_roots).unwrap_err().condition(), 0);
    let bad_factor = HierarchyDecomposition::from_parts(vec![None], vec![vec![3]]);
    assert_eq!(validate_decomposition(&g, &bad_factor).unwrap_err().condition(), 0);
}

#[test]
fn certificate_text_format() {
    let g = path(4);
    let d = hierarchy_decomposition(&g).unwrap();
    let text = d.to_certificate_text(&g);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "node 0 parent none : e1");
    assert!(lines[1].starts_with("  node 1 parent 0 : "));
    assert_eq!(lines.len(), 3);
}

#[test]
fn line_graph_tree_depth_examples() {
    assert_eq!(tree_depth_of_line_graph(&scopes_graph(2, &[vec![0, 1]])).unwrap(), 1);
    assert_eq!(tree_depth_of_line_graph(&path(4)).unwrap(), 2);
    let voting = build_voting_model(3, Semantics::Logical, 0.5, &VotingPriors::Zero);
    assert_eq!(tree_depth_of_line_graph(&voting).unwrap(), 3);
}

#[test]
fn tree_depth_guard() {
    let g = path(TREE_DEPTH_MAX_VERTICES + 2);
    assert!(matches!(tree_depth_of_line_graph(&g), Err(crate::Error::ResourceLimit(_))));
}

#[test]
fn exact_width_guard() {
    let g = path(40);
    assert!(matches!(hierarchy_width(&g), Err(crate::Error::ResourceLimit(_))));
    assert_eq!(hierarchy_width_by_search(&g), ceil_log2(40));
}

#[test]
fn structural_bounds_examples() {
    let voting = build_voting_model(3, Semantics::Linear, 0.5, &VotingPriors::Zero);
    assert_eq!(
        structural_bounds(&voting),
        StructuralBounds { degree_lower_bound: 6, acyclic: true }
    );
    let triangle = scopes_graph(3, &[vec![0, 1], vec![1, 2], vec![2, 0]]);
    assert!(!structural_bounds(&triangle).acyclic);
    let empty = scopes_graph(2, &[]);
    assert_eq!(
        structural_bounds(&empty),
        StructuralBounds { degree_lower_bound: 0, acyclic: true }
    );
}

#[test]
fn report_is_consistent() {
    let g = build_voting_model(2, Semantics::Linear, 0.5, &VotingPriors::Zero);
    let r = width_report(&g).unwrap();
    assert_eq!(r.hierarchy_width, 5);
    assert_eq!(r.certificate.width(), 5);
    assert!(r.hierarchy_width >= r.degree_lower_bound);
    assert!(r.summary().contains("hierarchy_width 5"));
}

#[test]
fn hypergraph_view_drops_isolated_vertices() {
    let g = scopes_graph(4, &[vec![2, 0], vec![3]]);
    let view = HypergraphView::new(&g);
    assert_eq!(view.vertices, vec![0, 2, 3]);
    assert_eq!(view.hyperedges, vec![vec![0, 2], vec![3]]);
}

#[test]
fn random_graphs_match_naive_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let (n, scopes) = random_scopes(&mut rng, 7, 6);
        let g = scopes_graph(n, &scopes);
        let expected = naive_hw(&scopes);
        assert_eq!(hierarchy_width(&g).unwrap(), expected, "{scopes:?}");
        assert_eq!(tree_depth_of_line_graph(&g).unwrap(), expected);
        assert_eq!(hierarchy_width_by_search(&g), expected);
        for k in 0..=scopes.len() {
            assert_eq!(hw_at_most_k(&g, k), expected <= k);
        }
        let d = hierarchy_decomposition(&g).unwrap();
        assert_eq!(validate_decomposition(&g, &d), Ok(()));
        assert_eq!(d.width(), expected);
    }
}

fn scopes_strategy() -> impl Strategy<Value = (usize, Vec<Vec<usize>>)> {
    (2usize..=7).prop_flat_map(|n| {
        let scope = proptest::collection::btree_set(0..n, 1..=3usize.min(n))
            .prop_map(|s| s.into_iter().collect::<Vec<_>>());
        (Just(n), proptest::collection::vec(scope, 0..=7))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn width_at_least_degree((n, scopes) in scopes_strategy()) {
        let g = scopes_graph(n, &scopes);
        let hw = hierarchy_width(&g).unwrap();
        prop_assert!(hw >= structural_bounds(&g).degree_lower_bound);
    }

    #[test]
    fn width_invariant_under_reordering((n, scopes) in scopes_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let mut shuffled: Vec<Vec<usize>> = scopes
            .iter()
            .map(|s| s.iter().map(|&v| perm[v]).collect())
            .collect();
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, rng.random_range(0..=i));
        }
        prop_assert_eq!(
            hierarchy_width(&scopes_graph(n, &scopes)).unwrap(),
            hierarchy_width(&scopes_graph(n, &shuffled)).unwrap()
        );
    }

    #[test]
    fn adding_a_factor_to_connected_graph_adds_at_most_one(
        (n, scopes) in scopes_strategy(),
        extra in proptest::collection::btree_set(0usize..7, 1..=3),
    ) {
        let g = scopes_graph(n, &scopes);
        prop_assume!(g.connected_components().len() == 1);
        let extra: Vec<usize> = extra.into_iter().filter(|&v| v < n).collect();
        prop_assume!(!extra.is_empty());
        let mut more = scopes.clone();
        more.push(extra);
        let before = hierarchy_width(&g).unwrap();
        let after = hierarchy_width(&scopes_graph(n, &more)).unwrap();
        prop_assert!(after <= before + 1);
        prop_assert!(after >= before);
    }
}

#[test]
fn aggregate_scope_counts_as_one_hyperedge() {
    let g = build_voting_model(4, Semantics::Ratio, 0.5, &VotingPriors::Zero);
    assert_eq!(HypergraphView::new(&g).hyperedges[0].len(), 5);
    assert!(matches!(g.factor(0), Factor::Aggregate(_)));
}
