//! Finite orthomodular lattices of projections harvested from a context
//! poset, and ortholattice isomorphisms with their verification.
//!
//! Elements are all subset-sums of atoms across the stored contexts plus 0.
//! The order is the summand relation p ≤ q ⟺ pq = p. Meets and joins are
//! partial within the stored family: a pair has a meet only when the set of
//! stored lower bounds has a unique maximal element. Comparable pairs always
//! commute, so the orthomodular law is verified by exact arithmetic.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::algebra::StarAlgebra;
use crate::error::{Error, Result};
use crate::matrix::BlockMatrix;
use crate::poset::ContextPoset;

#[derive(Clone)]
pub struct OrthoLattice {
    algebra: StarAlgebra,
    elements: Vec<BlockMatrix>,
    /// leq[i][j] = elements[i] ≤ elements[j].
    leq: Vec<Vec<bool>>,
    /// complement[i] = index of 1 − elements[i].
    complement: Vec<usize>,
}

impl PartialEq for OrthoLattice {
    fn eq(&self, other: &Self) -> bool {
        self.algebra == other.algebra && self.elements == other.elements
    }
}
impl Eq for OrthoLattice {}

impl OrthoLattice {
    /// All projections expressible as subset-sums of atoms of stored
    /// contexts, plus 0, with order and complement computed exactly.
    pub fn from_poset(poset: &ContextPoset) -> Result<Self> {
        let algebra = poset.algebra().clone();
        let mut set: BTreeSet<BlockMatrix> = BTreeSet::new();
        set.insert(algebra.zero());
        for c in poset.contexts() {
            let k = c.atom_count();
            if k >= usize::BITS as usize {
                return Err(Error::SizeBound {
                    what: "atoms per context in lattice enumeration",
                    got: k,
                    bound: usize::BITS as usize - 1,
                });
            }
            for mask in 0..(1usize << k) {
                set.insert(c.subset_sum(mask)?);
            }
        }
        let elements: Vec<BlockMatrix> = set.into_iter().collect();
        let n = elements.len();
        let mut leq = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                leq[i][j] = elements[i].mul(&elements[j])? == elements[i];
            }
        }
        let unit = algebra.unit();
        let mut complement = vec![0usize; n];
        for i in 0..n {
            let comp = unit.sub(&elements[i])?;
            complement[i] = elements
                .binary_search(&comp)
                .map_err(|_| Error::LatticeViolation {
                    detail: format!("complement of element {i} is not stored"),
                })?;
        }
        let lattice = Self { algebra, elements, leq, complement };
        lattice.check_laws()?;
        Ok(lattice)
    }

    /// Verifies 0 and 1 present, complement an involution exchanging them,
    /// and the orthomodular law on every comparable pair: for p ≤ q the
    /// relative complement q − p is a projection orthogonal to p with
    /// p + (q − p) = q, and when q − p is stored it realizes q ∧ p⊥ and
    /// p ∨ (q − p) = q within the stored order.
    pub fn check_laws(&self) -> Result<()> {
        let zero = self.algebra.zero();
        let unit = self.algebra.unit();
        let zero_idx = self.index_of(&zero).ok_or_else(|| Error::LatticeViolation {
            detail: "0 missing".into(),
        })?;
        let unit_idx = self.index_of(&unit).ok_or_else(|| Error::LatticeViolation {
            detail: "1 missing".into(),
        })?;
        if self.complement[zero_idx] != unit_idx || self.complement[unit_idx] != zero_idx {
            return Err(Error::LatticeViolation {
                detail: "complement does not exchange 0 and 1".into(),
            });
        }
        for i in 0..self.len() {
            if self.complement[self.complement[i]] != i {
                return Err(Error::LatticeViolation {
                    detail: format!("complement is not involutive at {i}"),
                });
            }
        }
        for p in 0..self.len() {
            for q in 0..self.len() {
                if !self.leq[p][q] {
                    continue;
                }
                let diff = self.elements[q].sub(&self.elements[p])?;
                if diff.mul(&diff)? != diff || diff.adjoint() != diff {
                    return Err(Error::LatticeViolation {
                        detail: format!("relative complement of {p} in {q} is not a projection"),
                    });
                }
                if !self.elements[p].mul(&diff)?.is_zero() {
                    return Err(Error::LatticeViolation {
                        detail: format!("relative complement of {p} in {q} is not orthogonal"),
                    });
                }
                if let Some(d) = self.index_of(&diff) {
                    if self.meet(q, self.complement[p]) != Some(d)
                        || self.join(p, d) != Some(q)
                    {
                        return Err(Error::LatticeViolation {
                            detail: format!("orthomodular law fails on stored pair {p} ≤ {q}"),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn algebra(&self) -> &StarAlgebra {
        &self.algebra
    }

    pub fn elements(&self) -> &[BlockMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, i: usize) -> &BlockMatrix {
        &self.elements[i]
    }

    pub fn index_of(&self, p: &BlockMatrix) -> Option<usize> {
        self.elements.binary_search(p).ok()
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    pub fn complement(&self, i: usize) -> usize {
        self.complement[i]
    }

    /// Greatest lower bound within the stored family, when it exists.
    pub fn meet(&self, i: usize, j: usize) -> Option<usize> {
        let lower: Vec<usize> = (0..self.len())
            .filter(|&k| self.leq[k][i] && self.leq[k][j])
            .collect();
        let maximal: Vec<usize> = lower
            .iter()
            .copied()
            .filter(|&k| lower.iter().all(|&l| l == k || !self.leq[k][l]))
            .collect();
        match maximal.as_slice() {
            [m] => Some(*m),
            _ => None,
        }
    }

    /// Least upper bound within the stored family, when it exists.
    pub fn join(&self, i: usize, j: usize) -> Option<usize> {
        let upper: Vec<usize> = (0..self.len())
            .filter(|&k| self.leq[i][k] && self.leq[j][k])
            .collect();
        let minimal: Vec<usize> = upper
            .iter()
            .copied()
            .filter(|&k| upper.iter().all(|&l| l == k || !self.leq[l][k]))
            .collect();
        match minimal.as_slice() {
            [m] => Some(*m),
            _ => None,
        }
    }
}

impl fmt::Debug for OrthoLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OrthoLattice({} elements over {})", self.len(), self.algebra)
    }
}

/// A bijection of ortholattices preserving order, complement, and every
/// meet/join that exists within the stored families.
#[derive(Clone)]
pub struct LatticeIso {
    source: Arc<OrthoLattice>,
    target: Arc<OrthoLattice>,
    table: Vec<usize>,
}

impl PartialEq for LatticeIso {
    fn eq(&self, other: &Self) -> bool {
        self.table == other.table
            && *self.source == *other.source
            && *self.target == *other.target
    }
}
impl Eq for LatticeIso {}

impl LatticeIso {
    /// Builds and fully verifies the isomorphism; violations are reported
    /// with the witness pair.
    pub fn new(
        source: Arc<OrthoLattice>,
        target: Arc<OrthoLattice>,
        table: Vec<usize>,
    ) -> Result<Self> {
        if source.len() != target.len()
            || table.len() != source.len()
            || table.iter().any(|&t| t >= target.len())
        {
            return Err(Error::LatticeViolation {
                detail: "lattice map table does not match the lattices".into(),
            });
        }
        let mut seen = vec![false; target.len()];
        for &t in &table {
            if seen[t] {
                return Err(Error::LatticeViolation {
                    detail: "lattice map is not a bijection".into(),
                });
            }
            seen[t] = true;
        }
        let iso = Self { source, target, table };
        iso.check()?;
        Ok(iso)
    }

    fn check(&self) -> Result<()> {
        let n = self.source.len();
        for i in 0..n {
            for j in 0..n {
                if self.source.leq(i, j) != self.target.leq(self.table[i], self.table[j]) {
                    return Err(Error::LatticeViolation {
                        detail: format!("order not preserved/reflected on pair ({i}, {j})"),
                    });
                }
            }
        }
        for i in 0..n {
            if self.table[self.source.complement(i)] != self.target.complement(self.table[i]) {
                return Err(Error::LatticeViolation {
                    detail: format!("complement not preserved at element {i}"),
                });
            }
        }
        for i in 0..n {
            for j in 0..n {
                if let Some(m) = self.source.meet(i, j) {
                    if self.target.meet(self.table[i], self.table[j]) != Some(self.table[m]) {
                        return Err(Error::LatticeViolation {
                            detail: format!("meet not preserved on pair ({i}, {j})"),
                        });
                    }
                }
                if let Some(m) = self.source.join(i, j) {
                    if self.target.join(self.table[i], self.table[j]) != Some(self.table[m]) {
                        return Err(Error::LatticeViolation {
                            detail: format!("join not preserved on pair ({i}, {j})"),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn identity(lattice: Arc<OrthoLattice>) -> Self {
        let table = (0..lattice.len()).collect();
        Self { source: lattice.clone(), target: lattice, table }
    }

    pub fn source(&self) -> &Arc<OrthoLattice> {
        &self.source
    }

    pub fn target(&self) -> &Arc<OrthoLattice> {
        &self.target
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, i: usize) -> usize {
        self.table[i]
    }
}

impl fmt::Debug for LatticeIso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LatticeIso{:?}", self.table)
    }
}

/// The projection ortholattice of the stored family.
pub fn lattice_from_algebra(poset: &ContextPoset) -> Result<OrthoLattice> {
    OrthoLattice::from_poset(poset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::Limits;

    #[test]
    fn cn_lattice_is_boolean() {
        for n in 1..=4usize {
            let poset = ContextPoset::full_abelian(n, &Limits::default()).unwrap();
            let lat = OrthoLattice::from_poset(&poset).unwrap();
            assert_eq!(lat.len(), 1 << n, "Boolean lattice 2^{n}");
            // Every pair has a meet and a join (it really is a lattice).
            for i in 0..lat.len() {
                for j in 0..lat.len() {
                    assert!(lat.meet(i, j).is_some());
                    assert!(lat.join(i, j).is_some());
                }
            }
        }
    }

    #[test]
    fn trivial_poset_gives_two_element_lattice() {
        let poset =
            ContextPoset::closure(StarAlgebra::abelian(3), &[], &Limits::default()).unwrap();
        let lat = OrthoLattice::from_poset(&poset).unwrap();
        assert_eq!(lat.len(), 2);
    }

    #[test]
    fn identity_iso_verifies() {
        let poset = ContextPoset::full_abelian(3, &Limits::default()).unwrap();
        let lat = Arc::new(OrthoLattice::from_poset(&poset).unwrap());
        let id = LatticeIso::identity(lat.clone());
        assert_eq!(id.table(), (0..lat.len()).collect::<Vec<_>>());
    }

    #[test]
    fn complement_violating_bijection_is_rejected() {
        // Swap a single atom pair of the Boolean lattice 2³ without touching
        // complements: breaks complement preservation with a witness.
        let poset = ContextPoset::full_abelian(3, &Limits::default()).unwrap();
        let lat = Arc::new(OrthoLattice::from_poset(&poset).unwrap());
        // Find two atoms (rank-1 elements directly above 0).
        let zero = lat.index_of(&lat.algebra().zero()).unwrap();
        let atoms: Vec<usize> = (0..lat.len())
            .filter(|&i| {
                i != zero
                    && (0..lat.len())
                        .all(|k| k == i || k == zero || !lat.leq(k, i))
            })
            .collect();
        assert!(atoms.len() >= 2);
        let mut table: Vec<usize> = (0..lat.len()).collect();
        table.swap(atoms[0], atoms[1]);
        let err = LatticeIso::new(lat.clone(), lat.clone(), table);
        assert!(matches!(err, Err(Error::LatticeViolation { .. })));
    }
}
