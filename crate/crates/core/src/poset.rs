//! Finite, intersection-closed posets of contexts with inclusion order,
//! plus closure from generators, the full context poset of ℂⁿ (one context
//! per set partition), and order-automorphism enumeration by backtracking.

use std::collections::BTreeSet;
use std::fmt;

use crate::algebra::StarAlgebra;
use crate::context::Context;
use crate::error::{Error, Result};
use crate::matrix::BlockMatrix;
use crate::scalar::GaussianRational;

/// Size bounds guarding the combinatorial searches. The environment variable
/// `SPECPRESHEAF_MAX_CONTEXTS` overrides `max_contexts`.
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    /// Largest context family a closure may produce.
    pub max_contexts: usize,
    /// Largest poset accepted by automorphism search.
    pub max_aut_contexts: usize,
    /// Largest n for `full_abelian_poset`.
    pub max_abelian_dim: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_contexts: 5000,
            max_aut_contexts: 200,
            max_abelian_dim: 6,
        }
    }
}

impl Limits {
    /// Defaults with the `SPECPRESHEAF_MAX_CONTEXTS` override applied.
    pub fn from_env() -> Self {
        let mut limits = Self::default();
        if let Ok(v) = std::env::var("SPECPRESHEAF_MAX_CONTEXTS") {
            if let Ok(n) = v.trim().parse::<usize>() {
                limits.max_contexts = n;
            }
        }
        limits
    }
}

/// A finite family of contexts over one algebra, containing the trivial
/// context, closed under pairwise intersection, ordered by inclusion.
/// Contexts are stored sorted, so equal posets compare equal.
#[derive(Clone, PartialEq, Eq)]
pub struct ContextPoset {
    algebra: StarAlgebra,
    contexts: Vec<Context>,
    /// leq[i][j] = contexts[i] ⊆ contexts[j].
    leq: Vec<Vec<bool>>,
}

impl ContextPoset {
    /// Builds the poset from an explicit, already intersection-closed family.
    /// Adds the trivial context if missing, verifies closure, computes order.
    pub fn new(algebra: StarAlgebra, contexts: Vec<Context>) -> Result<Self> {
        let mut set: BTreeSet<Context> = contexts.into_iter().collect();
        set.insert(Context::trivial(algebra.clone()));
        for c in &set {
            if c.algebra() != &algebra {
                return Err(Error::AlgebraMismatch {
                    left: algebra.to_string(),
                    right: c.algebra().to_string(),
                });
            }
        }
        let contexts: Vec<Context> = set.into_iter().collect();
        for a in &contexts {
            for b in &contexts {
                let meet = a.intersect(b)?;
                if !contexts.contains(&meet) {
                    return Err(Error::Invariant {
                        detail: "context family is not intersection-closed".into(),
                    });
                }
            }
        }
        let leq = Self::compute_order(&contexts)?;
        Ok(Self { algebra, contexts, leq })
    }

    /// Smallest intersection-closed family containing the generators and the
    /// trivial context.
    pub fn closure(
        algebra: StarAlgebra,
        generators: &[Context],
        limits: &Limits,
    ) -> Result<Self> {
        let mut set: BTreeSet<Context> = BTreeSet::new();
        set.insert(Context::trivial(algebra.clone()));
        for c in generators {
            if c.algebra() != &algebra {
                return Err(Error::AlgebraMismatch {
                    left: algebra.to_string(),
                    right: c.algebra().to_string(),
                });
            }
            set.insert(c.clone());
        }
        loop {
            let snapshot: Vec<Context> = set.iter().cloned().collect();
            let mut grew = false;
            for i in 0..snapshot.len() {
                for j in (i + 1)..snapshot.len() {
                    let meet = snapshot[i].intersect(&snapshot[j])?;
                    if set.insert(meet) {
                        grew = true;
                    }
                }
            }
            if set.len() > limits.max_contexts {
                return Err(Error::SizeBound {
                    what: "contexts in closure",
                    got: set.len(),
                    bound: limits.max_contexts,
                });
            }
            if !grew {
                break;
            }
        }
        let contexts: Vec<Context> = set.into_iter().collect();
        let leq = Self::compute_order(&contexts)?;
        Ok(Self { algebra, contexts, leq })
    }

    /// The complete context poset of ℂⁿ: one context per set partition of
    /// {0,…,n−1}, with block indicator projections as atoms; Bell(n) contexts
    /// ordered by refinement.
    pub fn full_abelian(n: usize, limits: &Limits) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invariant {
                detail: "dimension must be at least 1".into(),
            });
        }
        if n > limits.max_abelian_dim {
            return Err(Error::SizeBound {
                what: "full_abelian dimension",
                got: n,
                bound: limits.max_abelian_dim,
            });
        }
        let algebra = StarAlgebra::abelian(n);
        let mut contexts = Vec::new();
        for partition in set_partitions(n) {
            let atoms = partition
                .iter()
                .map(|block| {
                    let entries: Vec<GaussianRational> = (0..n)
                        .map(|i| {
                            if block.contains(&i) {
                                GaussianRational::one()
                            } else {
                                GaussianRational::zero()
                            }
                        })
                        .collect();
                    BlockMatrix::diagonal(algebra.shape(), &entries)
                })
                .collect::<Result<Vec<_>>>()?;
            contexts.push(Context::new(algebra.clone(), atoms)?);
        }
        contexts.sort();
        let leq = Self::compute_order(&contexts)?;
        Ok(Self { algebra, contexts, leq })
    }

    fn compute_order(contexts: &[Context]) -> Result<Vec<Vec<bool>>> {
        let n = contexts.len();
        let mut leq = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                leq[i][j] = contexts[i].leq(&contexts[j])?;
            }
        }
        Ok(leq)
    }

    pub fn algebra(&self) -> &StarAlgebra {
        &self.algebra
    }

    pub fn contexts(&self) -> &[Context] {
        &self.contexts
    }

    pub fn len(&self) -> usize {
        self.contexts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contexts.is_empty()
    }

    pub fn context(&self, i: usize) -> &Context {
        &self.contexts[i]
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    pub fn index_of(&self, c: &Context) -> Option<usize> {
        self.contexts.binary_search(c).ok()
    }

    pub fn trivial_index(&self) -> usize {
        self.contexts
            .iter()
            .position(|c| c.is_trivial())
            .expect("poset always contains the trivial context")
    }

    /// Indices of maximal contexts (no strict superior).
    pub fn maximal_indices(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| (0..self.len()).all(|j| j == i || !self.leq[i][j]))
            .collect()
    }

    /// Covering pairs (i, j) with i < j in the covering sense: i ⊂ j with
    /// nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && self.leq[i][j] {
                    let between = (0..n).any(|k| {
                        k != i && k != j && self.leq[i][k] && self.leq[k][j]
                    });
                    if !between {
                        out.push((i, j));
                    }
                }
            }
        }
        out
    }

    /// All order-automorphisms, as permutation tables sorted lexicographically.
    pub fn order_automorphisms(&self, limits: &Limits) -> Result<Vec<Vec<usize>>> {
        if self.len() > limits.max_aut_contexts {
            return Err(Error::SizeBound {
                what: "contexts in automorphism search",
                got: self.len(),
                bound: limits.max_aut_contexts,
            });
        }
        let n = self.len();
        // Candidate images must match on order-invariant statistics.
        let signature = |i: usize| {
            let down = (0..n).filter(|&k| self.leq[k][i]).count();
            let up = (0..n).filter(|&k| self.leq[i][k]).count();
            (self.contexts[i].atom_count(), down, up)
        };
        let sigs: Vec<_> = (0..n).map(signature).collect();
        let candidates: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..n).filter(|&j| sigs[j] == sigs[i]).collect())
            .collect();

        let mut result = Vec::new();
        let mut perm = vec![usize::MAX; n];
        let mut used = vec![false; n];
        fn backtrack(
            poset: &ContextPoset,
            candidates: &[Vec<usize>],
            perm: &mut Vec<usize>,
            used: &mut Vec<bool>,
            depth: usize,
            result: &mut Vec<Vec<usize>>,
        ) {
            let n = perm.len();
            if depth == n {
                result.push(perm.clone());
                return;
            }
            'next: for &img in &candidates[depth] {
                if used[img] {
                    continue;
                }
                for prev in 0..depth {
                    if poset.leq(prev, depth) != poset.leq(perm[prev], img)
                        || poset.leq(depth, prev) != poset.leq(img, perm[prev])
                    {
                        continue 'next;
                    }
                }
                perm[depth] = img;
                used[img] = true;
                backtrack(poset, candidates, perm, used, depth + 1, result);
                used[img] = false;
                perm[depth] = usize::MAX;
            }
        }
        backtrack(self, &candidates, &mut perm, &mut used, 0, &mut result);
        result.sort();
        Ok(result)
    }
}

impl fmt::Debug for ContextPoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ContextPoset({} contexts over {})", self.contexts.len(), self.algebra)
    }
}

/// All set partitions of {0,…,n−1} via restricted-growth strings, each
/// partition as a sorted list of sorted blocks.
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    loop {
        let blocks = rgs.iter().copied().max().unwrap() + 1;
        let mut partition = vec![Vec::new(); blocks];
        for (i, &b) in rgs.iter().enumerate() {
            partition[b].push(i);
        }
        out.push(partition);

        // Next restricted-growth string.
        let mut i = n;
        loop {
            if i == 1 {
                return out;
            }
            i -= 1;
            let cap = rgs[..i].iter().copied().max().unwrap() + 1;
            if rgs[i] < cap {
                rgs[i] += 1;
                for r in rgs[i + 1..].iter_mut() {
                    *r = 0;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_ctx(a: &StarAlgebra, rows: &[&[i64]]) -> Context {
        let atoms = rows
            .iter()
            .map(|entries| {
                let e: Vec<GaussianRational> = entries
                    .iter()
                    .map(|&n| GaussianRational::from_int(n))
                    .collect();
                BlockMatrix::diagonal(a.shape(), &e).unwrap()
            })
            .collect();
        Context::new(a.clone(), atoms).unwrap()
    }

    #[test]
    fn partition_counts_are_bell_numbers() {
        let bell = [1usize, 1, 2, 5, 15, 52, 203];
        for (n, &b) in bell.iter().enumerate() {
            assert_eq!(set_partitions(n).len(), b, "Bell({n})");
        }
    }

    #[test]
    fn full_abelian_counts() {
        let limits = Limits::default();
        assert_eq!(ContextPoset::full_abelian(1, &limits).unwrap().len(), 1);
        assert_eq!(ContextPoset::full_abelian(3, &limits).unwrap().len(), 5);
        assert_eq!(ContextPoset::full_abelian(4, &limits).unwrap().len(), 15);
    }

    #[test]
    fn full_abelian_over_bound_fails() {
        let limits = Limits::default();
        assert!(matches!(
            ContextPoset::full_abelian(7, &limits),
            Err(Error::SizeBound { .. })
        ));
    }

    #[test]
    fn closure_of_nothing_is_trivial_poset() {
        let a = StarAlgebra::abelian(2);
        let p = ContextPoset::closure(a, &[], &Limits::default()).unwrap();
        assert_eq!(p.len(), 1);
        assert!(p.context(0).is_trivial());
    }

    #[test]
    fn closure_of_two_incomparable_contexts() {
        let a = StarAlgebra::abelian(3);
        let c1 = diag_ctx(&a, &[&[1, 1, 0], &[0, 0, 1]]);
        let c2 = diag_ctx(&a, &[&[1, 0, 0], &[0, 1, 1]]);
        let p = ContextPoset::closure(a, &[c1.clone(), c2.clone()], &Limits::default()).unwrap();
        // Their meet is trivial, so: trivial + both.
        assert_eq!(p.len(), 3);
        assert!(p.index_of(&c1).is_some());
        assert!(p.index_of(&c2).is_some());
    }

    #[test]
    fn closure_is_a_fixed_point() {
        let limits = Limits::default();
        let p = ContextPoset::full_abelian(4, &limits).unwrap();
        let again =
            ContextPoset::closure(p.algebra().clone(), p.contexts(), &limits).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn order_is_refinement() {
        let p = ContextPoset::full_abelian(3, &Limits::default()).unwrap();
        let trivial = p.trivial_index();
        let top = p
            .contexts()
            .iter()
            .position(|c| c.atom_count() == 3)
            .unwrap();
        for i in 0..p.len() {
            assert!(p.leq(trivial, i));
            assert!(p.leq(i, top));
        }
        assert_eq!(p.maximal_indices(), vec![top]);
    }

    #[test]
    fn chain_poset_has_one_automorphism() {
        let p = ContextPoset::full_abelian(2, &Limits::default()).unwrap();
        assert_eq!(p.len(), 2);
        let autos = p.order_automorphisms(&Limits::default()).unwrap();
        assert_eq!(autos, vec![vec![0, 1]]);
    }

    #[test]
    fn c3_poset_has_six_automorphisms() {
        let p = ContextPoset::full_abelian(3, &Limits::default()).unwrap();
        let autos = p.order_automorphisms(&Limits::default()).unwrap();
        assert_eq!(autos.len(), 6);
        // Identity present; closed under composition and inverse.
        let id: Vec<usize> = (0..p.len()).collect();
        assert!(autos.contains(&id));
        for a in &autos {
            let inv = {
                let mut v = vec![0; a.len()];
                for (i, &ai) in a.iter().enumerate() {
                    v[ai] = i;
                }
                v
            };
            assert!(autos.contains(&inv));
            for b in &autos {
                let ab: Vec<usize> = (0..a.len()).map(|i| a[b[i]]).collect();
                assert!(autos.contains(&ab));
            }
        }
    }

    #[test]
    fn covers_of_c3() {
        let p = ContextPoset::full_abelian(3, &Limits::default()).unwrap();
        // bottom under the three middles, three middles under the top.
        assert_eq!(p.covers().len(), 6);
    }
}
