//! Finite-dimensional unital *-algebras and verified unital *-homomorphisms.
//!
//! An algebra is identified with its block shape: `[n₁,…,n_k]` stands for
//! M_{n₁}(ℂ) ⊕ … ⊕ M_{n_k}(ℂ) with scalars restricted to ℚ(i). Homomorphisms
//! are stored as exact linear maps on coordinate vectors and are verified on
//! the matrix-unit basis at construction time, which decides unitality,
//! multiplicativity and *-preservation once and for all.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::BlockMatrix;
use crate::scalar::GaussianRational;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StarAlgebra {
    label: String,
    shape: Vec<usize>,
}

impl StarAlgebra {
    pub fn new(label: impl Into<String>, shape: Vec<usize>) -> Result<Self> {
        if shape.is_empty() || shape.iter().any(|&n| n == 0) {
            return Err(Error::Invariant {
                detail: format!("algebra shape must be nonempty with positive dims, got {shape:?}"),
            });
        }
        Ok(Self { label: label.into(), shape })
    }

    /// The abelian algebra ℂⁿ as n one-dimensional blocks.
    pub fn abelian(n: usize) -> Self {
        Self::new(format!("c{n}"), vec![1; n]).expect("n >= 1")
    }

    /// The full matrix algebra M_n(ℂ) as a single block.
    pub fn full_matrix(n: usize) -> Self {
        Self::new(format!("m{n}"), vec![n]).expect("n >= 1")
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn unit(&self) -> BlockMatrix {
        BlockMatrix::identity(&self.shape)
    }

    pub fn zero(&self) -> BlockMatrix {
        BlockMatrix::zeros(&self.shape)
    }

    /// Coordinate dimension Σ nᵢ².
    pub fn coord_dim(&self) -> usize {
        BlockMatrix::coord_dim(&self.shape)
    }

    pub fn contains(&self, m: &BlockMatrix) -> bool {
        m.shape() == self.shape.as_slice()
    }

    fn check_element(&self, m: &BlockMatrix) -> Result<()> {
        if !self.contains(m) {
            return Err(Error::ShapeMismatch {
                left: self.shape.clone(),
                right: m.shape().to_vec(),
            });
        }
        Ok(())
    }

    /// The matrix units e⁽ᵇ⁾ᵢⱼ, a multiplicative spanning basis.
    pub fn matrix_units(&self) -> Vec<BlockMatrix> {
        let mut units = Vec::with_capacity(self.coord_dim());
        for (b, &n) in self.shape.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    units.push(BlockMatrix::unit(&self.shape, b, i, j));
                }
            }
        }
        units
    }

    /// a*a = aa*.
    pub fn is_normal(&self, a: &BlockMatrix) -> Result<bool> {
        self.check_element(a)?;
        let adj = a.adjoint();
        Ok(adj.mul(a)? == a.mul(&adj)?)
    }

    /// a² = a = a*.
    pub fn is_projection(&self, a: &BlockMatrix) -> Result<bool> {
        self.check_element(a)?;
        Ok(a.mul(a)? == *a && a.adjoint() == *a)
    }

    /// ab = ba.
    pub fn commutes(&self, a: &BlockMatrix, b: &BlockMatrix) -> Result<bool> {
        self.check_element(a)?;
        self.check_element(b)?;
        Ok(a.mul(b)? == b.mul(a)?)
    }

    /// a = a*.
    pub fn is_self_adjoint(&self, a: &BlockMatrix) -> Result<bool> {
        self.check_element(a)?;
        Ok(a.adjoint() == *a)
    }
}

impl fmt::Debug for StarAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StarAlgebra({} {:?})", self.label, self.shape)
    }
}

impl fmt::Display for StarAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.label, self.shape)
    }
}

/// A unital *-homomorphism stored as an exact `dim(target) × dim(source)`
/// matrix acting on coordinate vectors. [`UnitalStarHom::new`] verifies the
/// algebraic laws; loading raw data goes through the same gate.
#[derive(Clone, PartialEq, Eq)]
pub struct UnitalStarHom {
    source: StarAlgebra,
    target: StarAlgebra,
    matrix: Vec<Vec<GaussianRational>>,
}

impl UnitalStarHom {
    /// Builds and verifies the homomorphism. Fails with a witness if any of
    /// h(1)=1, h(xy)=h(x)h(y) or h(x*)=h(x)* is violated on the matrix-unit
    /// basis.
    pub fn new(
        source: StarAlgebra,
        target: StarAlgebra,
        matrix: Vec<Vec<GaussianRational>>,
    ) -> Result<Self> {
        let h = Self::unverified(source, target, matrix)?;
        h.check()?;
        Ok(h)
    }

    /// Builds the carrier without running the homomorphism laws. Dimension
    /// consistency is still enforced. Used to hold candidates that
    /// [`verify_hom`] then accepts or rejects.
    pub fn unverified(
        source: StarAlgebra,
        target: StarAlgebra,
        matrix: Vec<Vec<GaussianRational>>,
    ) -> Result<Self> {
        let rows = target.coord_dim();
        let cols = source.coord_dim();
        if matrix.len() != rows || matrix.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidHom {
                detail: format!(
                    "matrix must be {rows}×{cols} for {} -> {}",
                    source.label(),
                    target.label()
                ),
            });
        }
        Ok(Self { source, target, matrix })
    }

    /// Builds a hom from the images of the source's matrix units (in the
    /// order produced by [`StarAlgebra::matrix_units`]).
    pub fn from_basis_images(
        source: StarAlgebra,
        target: StarAlgebra,
        images: &[BlockMatrix],
    ) -> Result<Self> {
        if images.len() != source.coord_dim() {
            return Err(Error::InvalidHom {
                detail: format!(
                    "{} images for source dimension {}",
                    images.len(),
                    source.coord_dim()
                ),
            });
        }
        let rows = target.coord_dim();
        let cols: Vec<Vec<GaussianRational>> = images.iter().map(|m| m.to_coords()).collect();
        let matrix = (0..rows)
            .map(|r| cols.iter().map(|c| c[r].clone()).collect())
            .collect();
        Self::new(source, target, matrix)
    }

    /// The identity homomorphism.
    pub fn identity(algebra: StarAlgebra) -> Self {
        let d = algebra.coord_dim();
        let matrix = (0..d)
            .map(|r| {
                (0..d)
                    .map(|c| if r == c { GaussianRational::one() } else { GaussianRational::zero() })
                    .collect()
            })
            .collect();
        Self::new(algebra.clone(), algebra, matrix).expect("identity verifies")
    }

    /// Hom ℂᵐ → ℂⁿ determined by a map of coordinates: target coordinate `j`
    /// reads source coordinate `coord_of[j]`. Covers diagonal embeddings,
    /// permutations and collapses alike.
    pub fn abelian_from_coordinate_map(source_dim: usize, coord_of: &[usize]) -> Result<Self> {
        let source = StarAlgebra::abelian(source_dim);
        let target = StarAlgebra::abelian(coord_of.len());
        let mut matrix =
            vec![vec![GaussianRational::zero(); source_dim]; coord_of.len()];
        for (j, &i) in coord_of.iter().enumerate() {
            if i >= source_dim {
                return Err(Error::InvalidHom {
                    detail: format!("coordinate {i} out of range for source dimension {source_dim}"),
                });
            }
            matrix[j][i] = GaussianRational::one();
        }
        Self::new(source, target, matrix)
    }

    /// Conjugation x ↦ u·x·u* by a unitary of the algebra, as a verified
    /// automorphism.
    pub fn conjugation(algebra: StarAlgebra, u: &BlockMatrix) -> Result<Self> {
        let u_adj = u.adjoint();
        if u.mul(&u_adj)? != algebra.unit() || u_adj.mul(u)? != algebra.unit() {
            return Err(Error::InvalidHom {
                detail: "conjugating element is not unitary".into(),
            });
        }
        let images: Vec<BlockMatrix> = algebra
            .matrix_units()
            .iter()
            .map(|e| u.mul(e)?.mul(&u_adj))
            .collect::<Result<_>>()?;
        Self::from_basis_images(algebra.clone(), algebra, &images)
    }

    pub fn source(&self) -> &StarAlgebra {
        &self.source
    }

    pub fn target(&self) -> &StarAlgebra {
        &self.target
    }

    pub fn matrix(&self) -> &[Vec<GaussianRational>] {
        &self.matrix
    }

    /// Applies the map to an element of the source algebra.
    pub fn apply(&self, x: &BlockMatrix) -> Result<BlockMatrix> {
        if !self.source.contains(x) {
            return Err(Error::ShapeMismatch {
                left: self.source.shape().to_vec(),
                right: x.shape().to_vec(),
            });
        }
        let coords = linalg::mat_vec(&self.matrix, &x.to_coords());
        BlockMatrix::from_coords(self.target.shape(), &coords)
    }

    fn check(&self) -> Result<()> {
        let unit_img = self.apply(&self.source.unit())?;
        if unit_img != self.target.unit() {
            return Err(Error::InvalidHom {
                detail: "h(1) != 1".into(),
            });
        }
        let units = self.source.matrix_units();
        let images: Vec<BlockMatrix> =
            units.iter().map(|u| self.apply(u)).collect::<Result<_>>()?;
        for (i, u) in units.iter().enumerate() {
            if images[i].adjoint() != self.apply(&u.adjoint())? {
                return Err(Error::InvalidHom {
                    detail: format!("h(x*) != h(x)* on basis element {i}"),
                });
            }
            for (j, v) in units.iter().enumerate() {
                let lhs = self.apply(&u.mul(v)?)?;
                let rhs = images[i].mul(&images[j])?;
                if lhs != rhs {
                    return Err(Error::InvalidHom {
                        detail: format!("h(xy) != h(x)h(y) on basis pair ({i}, {j})"),
                    });
                }
            }
        }
        Ok(())
    }

    /// Re-runs the construction-time checks; `false` with no witness.
    pub fn verify(&self) -> bool {
        self.check().is_ok()
    }

    /// g ∘ f (f applied first).
    pub fn compose(g: &UnitalStarHom, f: &UnitalStarHom) -> Result<UnitalStarHom> {
        if f.target != g.source {
            return Err(Error::NotComposable {
                detail: format!(
                    "{} -> {} then {} -> {}",
                    f.source.label(),
                    f.target.label(),
                    g.source.label(),
                    g.target.label()
                ),
            });
        }
        let matrix = linalg::mat_mat(&g.matrix, &f.matrix);
        UnitalStarHom::new(f.source.clone(), g.target.clone(), matrix)
    }
}

impl fmt::Debug for UnitalStarHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UnitalStarHom({} -> {})", self.source, self.target)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    #[test]
    fn unit_is_projection_and_commutes() {
        let a = StarAlgebra::full_matrix(2);
        let one = a.unit();
        assert!(a.is_projection(&one).unwrap());
        let x = BlockMatrix::new(vec![2], vec![vec![g(0), g(1), g(1), g(0)]]).unwrap();
        assert!(a.commutes(&one, &x).unwrap());
    }

    #[test]
    fn diag_1_i_is_normal_not_projection() {
        let a = StarAlgebra::abelian(2);
        let m = BlockMatrix::diagonal(a.shape(), &[g(1), GaussianRational::i()]).unwrap();
        assert!(a.is_normal(&m).unwrap());
        assert!(!a.is_projection(&m).unwrap());
    }

    #[test]
    fn tensor_commutation() {
        // X⊗I and I⊗X commute; X⊗I and Z⊗Z anticommute.
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
        let zz = BlockMatrix::diagonal(&[4], &[g(1), g(-1), g(-1), g(1)]).unwrap();
        assert!(m4.commutes(&xi, &ix).unwrap());
        assert!(!m4.commutes(&xi, &zz).unwrap());
    }

    #[test]
    fn identity_hom_verifies() {
        let h = UnitalStarHom::identity(StarAlgebra::abelian(3));
        assert!(h.verify());
    }

    #[test]
    fn diagonal_embedding_verifies() {
        // (a,b) -> (a,a,b)
        let h = UnitalStarHom::abelian_from_coordinate_map(2, &[0, 0, 1]).unwrap();
        let x = BlockMatrix::diagonal(&[1, 1], &[g(5), g(7)]).unwrap();
        let y = h.apply(&x).unwrap();
        assert_eq!(y, BlockMatrix::diagonal(&[1, 1, 1], &[g(5), g(5), g(7)]).unwrap());
    }

    #[test]
    fn non_unital_map_is_rejected() {
        // (a,b) -> (a,b,0) fails h(1)=1.
        let source = StarAlgebra::abelian(2);
        let target = StarAlgebra::abelian(3);
        let matrix = vec![
            vec![g(1), g(0)],
            vec![g(0), g(1)],
            vec![g(0), g(0)],
        ];
        let candidate = UnitalStarHom::unverified(source, target, matrix).unwrap();
        assert!(!candidate.verify());
        assert!(matches!(
            UnitalStarHom::new(
                candidate.source().clone(),
                candidate.target().clone(),
                candidate.matrix().to_vec()
            ),
            Err(Error::InvalidHom { .. })
        ));
    }

    #[test]
    fn composition_of_embeddings() {
        // (a,b) -> (a,a,b) then (x,y,z) -> (x,y,z,z) equals (a,b) -> (a,a,b,b).
        let f = UnitalStarHom::abelian_from_coordinate_map(2, &[0, 0, 1]).unwrap();
        let gmap = UnitalStarHom::abelian_from_coordinate_map(3, &[0, 1, 2, 2]).unwrap();
        let gf = UnitalStarHom::compose(&gmap, &f).unwrap();
        let direct = UnitalStarHom::abelian_from_coordinate_map(2, &[0, 0, 1, 1]).unwrap();
        assert_eq!(gf, direct);
        assert!(gf.verify());
    }

    #[test]
    fn swap_composed_with_itself_is_identity() {
        let swap = UnitalStarHom::abelian_from_coordinate_map(2, &[1, 0]).unwrap();
        let id = UnitalStarHom::identity(StarAlgebra::abelian(2));
        assert_eq!(UnitalStarHom::compose(&swap, &swap).unwrap(), id);
        assert_eq!(UnitalStarHom::compose(&id, &swap).unwrap(), swap);
    }

    #[test]
    fn diagonal_embedding_into_matrix_algebra() {
        // C^2 -> M_2 as diagonal matrices.
        let source = StarAlgebra::abelian(2);
        let target = StarAlgebra::full_matrix(2);
        let images = vec![
            BlockMatrix::diagonal(&[2], &[g(1), g(0)]).unwrap(),
            BlockMatrix::diagonal(&[2], &[g(0), g(1)]).unwrap(),
        ];
        let h = UnitalStarHom::from_basis_images(source, target, &images).unwrap();
        assert!(h.verify());
    }
}
