use std::collections::HashMap;

use crate::fg::FactorGraph;

/// A subset of factor indices, stored as a fixed-width bitset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct FactorSet {
    words: Box<[u64]>,
}

impl FactorSet {
    pub fn empty(capacity: usize) -> Self {
        FactorSet {
            words: vec![0; capacity.div_ceil(64).max(1)].into_boxed_slice(),
        }
    }

    pub fn full(capacity: usize) -> Self {
        let mut s = Self::empty(capacity);
        for i in 0..capacity {
            s.insert(i);
        }
        s
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    #[cfg(test)]
    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn without(&self, i: usize) -> Self {
        let mut s = self.clone();
        s.remove(i);
        s
    }

    pub fn intersection(&self, other: &FactorSet) -> FactorSet {
        FactorSet {
            words: self
                .words
                .iter()
                .zip(other.words.iter())
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn intersection_len(&self, other: &FactorSet) -> usize {
        self.words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let t = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * 64 + t)
                }
            })
        })
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }
}

/// Factor incidence structure used by the width algorithms: which factors
/// share a variable (the line graph) and which factors touch each variable.
pub(crate) struct Incidence {
    pub num_factors: usize,
    pub neighbors: Vec<FactorSet>,
    pub var_factors: Vec<FactorSet>,
}

impl Incidence {
    pub fn new(graph: &FactorGraph) -> Self {
        let m = graph.num_factors();
        let mut var_factors = vec![FactorSet::empty(m); graph.num_variables()];
        for (fi, f) in graph.factors().iter().enumerate() {
            for &v in f.scope() {
                var_factors[v].insert(fi);
            }
        }
        let mut neighbors = vec![FactorSet::empty(m); m];
        for vf in &var_factors {
            let members: Vec<usize> = vf.iter().collect();
            for &a in &members {
                for &b in &members {
                    if a != b {
                        neighbors[a].insert(b);
                    }
                }
            }
        }
        // Variables touched by no factor never matter.
        var_factors.retain(|s| !s.is_empty());
        Incidence {
            num_factors: m,
            neighbors,
            var_factors,
        }
    }

    /// Connected components of the factors in `set`.
    pub fn components(&self, set: &FactorSet) -> Vec<FactorSet> {
        let mut remaining = set.clone();
        let mut out = Vec::new();
        while let Some(start) = remaining.first() {
            let mut comp = FactorSet::empty(self.num_factors);
            let mut stack = vec![start];
            remaining.remove(start);
            comp.insert(start);
            while let Some(f) = stack.pop() {
                let next: Vec<usize> = self.neighbors[f].intersection(&remaining).iter().collect();
                for g in next {
                    remaining.remove(g);
                    comp.insert(g);
                    stack.push(g);
                }
            }
            out.push(comp);
        }
        out
    }

    /// Largest number of factors in `set` sharing one variable.
    pub fn max_degree(&self, set: &FactorSet) -> usize {
        self.var_factors
            .iter()
            .map(|vf| vf.intersection_len(set))
            .max()
            .unwrap_or(0)
    }

    /// Members of `set` with closed-twin duplicates removed: when two factors
    /// have the same closed neighbourhood inside `set`, swapping them is an
    /// automorphism of the restricted line graph, so only the first needs to
    /// be tried as a removal candidate.
    pub fn removal_candidates(&self, set: &FactorSet) -> Vec<usize> {
        let mut seen: HashMap<FactorSet, ()> = HashMap::new();
        let mut out = Vec::new();
        for f in set.iter() {
            let mut closed = self.neighbors[f].intersection(set);
            closed.insert(f);
            if seen.insert(closed, ()).is_none() {
                out.push(f);
            }
        }
        out
    }
}
