//! Contexts: unital abelian *-subalgebras encoded by their atomic projection
//! resolutions.
//!
//! A context is determined by its atoms — pairwise orthogonal nonzero
//! projections summing to the unit. Every projection of the context is an
//! exact subset-sum of atoms, which makes inclusion, intersection and the
//! Gelfand spectrum all decidable by finite arithmetic.

use std::fmt;

use crate::algebra::StarAlgebra;
use crate::error::{Error, Result};
use crate::matrix::BlockMatrix;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Context {
    algebra: StarAlgebra,
    atoms: Vec<BlockMatrix>,
}

impl Context {
    /// Validates the atomic resolution and sorts atoms into canonical order,
    /// so equal contexts compare equal as values.
    pub fn new(algebra: StarAlgebra, mut atoms: Vec<BlockMatrix>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Invariant {
                detail: "context needs at least one atom".into(),
            });
        }
        let mut sum = algebra.zero();
        for (k, p) in atoms.iter().enumerate() {
            if !algebra.is_projection(p)? {
                return Err(Error::NotAProjection {
                    detail: format!("atom {k} fails p² = p = p*"),
                });
            }
            if p.is_zero() {
                return Err(Error::Invariant {
                    detail: format!("atom {k} is zero"),
                });
            }
            sum = sum.add(p)?;
        }
        if sum != algebra.unit() {
            let residual = algebra.unit().sub(&sum)?;
            return Err(Error::Invariant {
                detail: format!("atoms do not resolve the identity; residual {residual:?}"),
            });
        }
        for i in 0..atoms.len() {
            for j in (i + 1)..atoms.len() {
                if !atoms[i].mul(&atoms[j])?.is_zero() {
                    return Err(Error::Invariant {
                        detail: format!("atoms {i} and {j} are not orthogonal"),
                    });
                }
            }
        }
        atoms.sort();
        Ok(Self { algebra, atoms })
    }

    /// The trivial context ℂ·1.
    pub fn trivial(algebra: StarAlgebra) -> Self {
        let unit = algebra.unit();
        Self { algebra, atoms: vec![unit] }
    }

    pub fn algebra(&self) -> &StarAlgebra {
        &self.algebra
    }

    pub fn atoms(&self) -> &[BlockMatrix] {
        &self.atoms
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.atoms.len() == 1
    }

    /// Sum of the atoms selected by `subset` (a bitmask over atom indices).
    pub fn subset_sum(&self, subset: usize) -> Result<BlockMatrix> {
        let mut acc = self.algebra.zero();
        for (i, atom) in self.atoms.iter().enumerate() {
            if subset & (1 << i) != 0 {
                acc = acc.add(atom)?;
            }
        }
        Ok(acc)
    }

    /// If `p` equals a subset-sum of atoms, returns the bitmask; `None`
    /// otherwise. For a projection `p` and an orthogonal resolution this
    /// decides membership of `p` in the context.
    pub fn as_subset_sum(&self, p: &BlockMatrix) -> Result<Option<usize>> {
        let mut mask = 0usize;
        let mut acc = self.algebra.zero();
        for (i, atom) in self.atoms.iter().enumerate() {
            if atom.mul(p)? == *atom {
                mask |= 1 << i;
                acc = acc.add(atom)?;
            }
        }
        Ok(if acc == *p { Some(mask) } else { None })
    }

    /// Membership test for projections.
    pub fn contains_projection(&self, p: &BlockMatrix) -> Result<bool> {
        Ok(self.as_subset_sum(p)?.is_some())
    }

    /// Subalgebra inclusion: every atom of `self` is a subset-sum of atoms
    /// of `other` (so `self` ⊆ `other` as algebras).
    pub fn leq(&self, other: &Context) -> Result<bool> {
        if self.algebra != other.algebra {
            return Err(Error::AlgebraMismatch {
                left: self.algebra.to_string(),
                right: other.algebra.to_string(),
            });
        }
        for atom in &self.atoms {
            if other.as_subset_sum(atom)?.is_none() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The context generated by a family of pairwise commuting projections:
    /// atoms are the minimal nonzero products Π qⱼ with qⱼ ∈ {pⱼ, 1−pⱼ}.
    pub fn from_projections(algebra: StarAlgebra, ps: &[BlockMatrix]) -> Result<Self> {
        for (k, p) in ps.iter().enumerate() {
            if !algebra.is_projection(p)? {
                return Err(Error::NotAProjection {
                    detail: format!("generator {k} fails p² = p = p*"),
                });
            }
        }
        for i in 0..ps.len() {
            for j in (i + 1)..ps.len() {
                if !algebra.commutes(&ps[i], &ps[j])? {
                    return Err(Error::NonCommuting {
                        detail: format!("generators {i} and {j}"),
                    });
                }
            }
        }
        let unit = algebra.unit();
        let mut products = vec![unit.clone()];
        for p in ps {
            let complement = unit.sub(p)?;
            let mut next = Vec::with_capacity(products.len() * 2);
            for q in &products {
                let with_p = q.mul(p)?;
                if !with_p.is_zero() {
                    next.push(with_p);
                }
                let without_p = q.mul(&complement)?;
                if !without_p.is_zero() {
                    next.push(without_p);
                }
            }
            products = next;
        }
        Self::new(algebra, products)
    }

    /// The context generated by commuting self-adjoint involutions via the
    /// spectral projections (1 ± a)/2.
    pub fn from_involutions(algebra: StarAlgebra, obs: &[BlockMatrix]) -> Result<Self> {
        let unit = algebra.unit();
        let half = crate::scalar::GaussianRational::from_ratio(1, 2);
        let mut ps = Vec::with_capacity(obs.len());
        for (k, a) in obs.iter().enumerate() {
            if a.adjoint() != *a || a.mul(a)? != unit {
                return Err(Error::Invariant {
                    detail: format!("generator {k} is not a self-adjoint involution"),
                });
            }
            ps.push(unit.add(a)?.scale(&half));
        }
        Self::from_projections(algebra, &ps)
    }

    /// Meet of two contexts: the subalgebra of projections lying in both,
    /// presented by its minimal nonzero elements.
    pub fn intersect(&self, other: &Context) -> Result<Context> {
        if self.algebra != other.algebra {
            return Err(Error::AlgebraMismatch {
                left: self.algebra.to_string(),
                right: other.algebra.to_string(),
            });
        }
        // Enumerate subset-sums of the side with fewer atoms.
        let (small, big) = if self.atom_count() <= other.atom_count() {
            (self, other)
        } else {
            (other, self)
        };
        let k = small.atom_count();
        if k >= usize::BITS as usize {
            return Err(Error::SizeBound {
                what: "atoms per context in intersect",
                got: k,
                bound: usize::BITS as usize - 1,
            });
        }
        let mut common: Vec<BlockMatrix> = Vec::new();
        for mask in 1..(1usize << k) {
            let p = small.subset_sum(mask)?;
            if big.contains_projection(&p)? {
                common.push(p);
            }
        }
        // Minimal nonzero common projections; common projections all lie in
        // the abelian algebra `small`, so comparability is decided by p·q = p.
        let mut atoms = Vec::new();
        'outer: for p in &common {
            for q in &common {
                if q != p && q.mul(p)? == *q {
                    continue 'outer;
                }
            }
            atoms.push(p.clone());
        }
        Context::new(self.algebra.clone(), atoms)
    }
}

impl fmt::Debug for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Context({} atoms over {})", self.atoms.len(), self.algebra)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussianRational;

    fn g(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    fn diag(shape: &[usize], entries: &[i64]) -> BlockMatrix {
        let e: Vec<GaussianRational> = entries.iter().map(|&n| g(n)).collect();
        BlockMatrix::diagonal(shape, &e).unwrap()
    }

    #[test]
    fn empty_generators_give_trivial_context() {
        let a = StarAlgebra::abelian(3);
        let c = Context::from_projections(a.clone(), &[]).unwrap();
        assert_eq!(c, Context::trivial(a));
        assert_eq!(c.atom_count(), 1);
    }

    #[test]
    fn single_projection_splits_into_two_atoms() {
        let a = StarAlgebra::abelian(3);
        let p = diag(a.shape(), &[1, 0, 0]);
        let c = Context::from_projections(a.clone(), &[p.clone()]).unwrap();
        assert_eq!(c.atom_count(), 2);
        assert!(c.atoms().contains(&p));
        assert!(c.atoms().contains(&diag(a.shape(), &[0, 1, 1])));
    }

    #[test]
    fn commuting_involution_pair_gives_four_atoms() {
        // (1+X⊗I)/2 and (1+I⊗X)/2 generate the joint eigencontext in M_4.
        let m4 = StarAlgebra::full_matrix(4);
        let xi = BlockMatrix::new(
            vec![4],
            vec![vec![
                g(0), g(0), g(1), g(0),
                g(0), g(0), g(0), g(1),
                g(1), g(0), g(0), g(0),
                g(0), g(1), g(0), g(0),
            ]],
        )
        .unwrap();
        let ix = BlockMatrix::new(
            vec![4],
            vec![vec![
                g(0), g(1), g(0), g(0),
                g(1), g(0), g(0), g(0),
                g(0), g(0), g(0), g(1),
                g(0), g(0), g(1), g(0),
            ]],
        )
        .unwrap();
        let c = Context::from_involutions(m4.clone(), &[xi.clone(), ix.clone()]).unwrap();
        assert_eq!(c.atom_count(), 4);
        // Each atom is a rank-1 joint eigenprojection commuting with both.
        for atom in c.atoms() {
            assert!(m4.commutes(atom, &xi).unwrap());
            assert!(m4.commutes(atom, &ix).unwrap());
        }
    }

    #[test]
    fn non_projection_generator_is_rejected() {
        let a = StarAlgebra::abelian(2);
        let m = diag(a.shape(), &[2, 0]);
        assert!(matches!(
            Context::from_projections(a, &[m]),
            Err(Error::NotAProjection { .. })
        ));
    }

    #[test]
    fn non_commuting_generators_are_rejected() {
        let m2 = StarAlgebra::full_matrix(2);
        let p = diag(&[2], &[1, 0]);
        let half = GaussianRational::from_ratio(1, 2);
        // (1+X)/2
        let q = BlockMatrix::new(vec![2], vec![vec![g(1), g(1), g(1), g(1)]])
            .unwrap()
            .scale(&half);
        assert!(matches!(
            Context::from_projections(m2, &[p, q]),
            Err(Error::NonCommuting { .. })
        ));
    }

    #[test]
    fn atoms_must_resolve_identity() {
        let a = StarAlgebra::abelian(3);
        let bad = vec![diag(a.shape(), &[1, 0, 0]), diag(a.shape(), &[0, 1, 0])];
        assert!(matches!(Context::new(a, bad), Err(Error::Invariant { .. })));
    }

    #[test]
    fn intersect_with_trivial_is_trivial() {
        let a = StarAlgebra::abelian(3);
        let c = Context::from_projections(a.clone(), &[diag(a.shape(), &[1, 0, 0])]).unwrap();
        let t = Context::trivial(a);
        assert_eq!(c.intersect(&t).unwrap(), t);
        assert_eq!(t.intersect(&c).unwrap(), t);
    }

    #[test]
    fn intersect_is_idempotent() {
        let a = StarAlgebra::abelian(3);
        let c = Context::from_projections(a.clone(), &[diag(a.shape(), &[1, 0, 0])]).unwrap();
        assert_eq!(c.intersect(&c).unwrap(), c);
    }

    #[test]
    fn intersect_of_nested_contexts_is_the_smaller() {
        let a = StarAlgebra::abelian(3);
        let top = Context::new(
            a.clone(),
            vec![
                diag(a.shape(), &[1, 0, 0]),
                diag(a.shape(), &[0, 1, 0]),
                diag(a.shape(), &[0, 0, 1]),
            ],
        )
        .unwrap();
        let mid = Context::new(
            a.clone(),
            vec![diag(a.shape(), &[1, 1, 0]), diag(a.shape(), &[0, 0, 1])],
        )
        .unwrap();
        assert_eq!(top.intersect(&mid).unwrap(), mid);
        assert!(mid.leq(&top).unwrap());
        assert!(!top.leq(&mid).unwrap());
    }

    #[test]
    fn intersect_of_incomparable_contexts() {
        let a = StarAlgebra::abelian(3);
        let c1 = Context::from_projections(a.clone(), &[diag(a.shape(), &[1, 1, 0])]).unwrap();
        let c2 = Context::from_projections(a.clone(), &[diag(a.shape(), &[1, 0, 0])]).unwrap();
        // c2 has atoms {e1, e2+e3}; c1 has {e1+e2, e3}; only 0 and 1 in common.
        assert_eq!(c1.intersect(&c2).unwrap(), Context::trivial(a));
    }

    #[test]
    fn subset_sum_membership() {
        let a = StarAlgebra::abelian(4);
        let c = Context::new(
            a.clone(),
            vec![diag(a.shape(), &[1, 1, 0, 0]), diag(a.shape(), &[0, 0, 1, 1])],
        )
        .unwrap();
        assert!(c.contains_projection(&diag(a.shape(), &[1, 1, 0, 0])).unwrap());
        assert!(c.contains_projection(&a.unit()).unwrap());
        assert!(!c.contains_projection(&diag(a.shape(), &[1, 0, 0, 0])).unwrap());
    }
}
