//! Block-diagonal matrices over ℚ(i).
//!
//! Every algebra element in this crate is a `BlockMatrix`: a direct sum of
//! square blocks, one per summand of the ambient algebra's shape. By
//! Wedderburn this represents every finite-dimensional C*-algebra up to
//! isomorphism, and block-diagonal form keeps all products exact and cheap.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::GaussianRational;

/// A direct sum of square matrices. Block `b` is `shape[b] × shape[b]`,
/// stored row-major. Equality, ordering and hashing are entrywise and exact.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockMatrix {
    shape: Vec<usize>,
    blocks: Vec<Vec<GaussianRational>>,
}

impl BlockMatrix {
    /// Builds a matrix from per-block row-major entries.
    pub fn new(shape: Vec<usize>, blocks: Vec<Vec<GaussianRational>>) -> Result<Self> {
        if shape.is_empty() || shape.iter().any(|&n| n == 0) {
            return Err(Error::Invariant {
                detail: format!("invalid block shape {shape:?}"),
            });
        }
        if blocks.len() != shape.len() {
            return Err(Error::Invariant {
                detail: format!("{} blocks for shape of length {}", blocks.len(), shape.len()),
            });
        }
        for (b, (dim, entries)) in shape.iter().zip(&blocks).enumerate() {
            if entries.len() != dim * dim {
                return Err(Error::Invariant {
                    detail: format!(
                        "block {b} has {} entries, expected {}",
                        entries.len(),
                        dim * dim
                    ),
                });
            }
        }
        Ok(Self { shape, blocks })
    }

    pub fn zeros(shape: &[usize]) -> Self {
        let blocks = shape.iter().map(|&n| vec![GaussianRational::zero(); n * n]).collect();
        Self { shape: shape.to_vec(), blocks }
    }

    pub fn identity(shape: &[usize]) -> Self {
        let mut m = Self::zeros(shape);
        for (b, &n) in shape.iter().enumerate() {
            for i in 0..n {
                m.blocks[b][i * n + i] = GaussianRational::one();
            }
        }
        m
    }

    /// Diagonal matrix with the given entries spread across the blocks
    /// (total dimension must equal the sum of block dimensions).
    pub fn diagonal(shape: &[usize], entries: &[GaussianRational]) -> Result<Self> {
        let total: usize = shape.iter().sum();
        if entries.len() != total {
            return Err(Error::Invariant {
                detail: format!("{} diagonal entries for total dimension {total}", entries.len()),
            });
        }
        let mut m = Self::zeros(shape);
        let mut k = 0;
        for (b, &n) in shape.iter().enumerate() {
            for i in 0..n {
                m.blocks[b][i * n + i] = entries[k].clone();
                k += 1;
            }
        }
        Ok(m)
    }

    /// The matrix unit of `block` with a single 1 at `(row, col)`.
    pub fn unit(shape: &[usize], block: usize, row: usize, col: usize) -> Self {
        let n = shape[block];
        let mut m = Self::zeros(shape);
        m.blocks[block][row * n + col] = GaussianRational::one();
        m
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn entry(&self, block: usize, row: usize, col: usize) -> &GaussianRational {
        &self.blocks[block][row * self.shape[block] + col]
    }

    pub fn set_entry(&mut self, block: usize, row: usize, col: usize, value: GaussianRational) {
        let n = self.shape[block];
        self.blocks[block][row * n + col] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.iter().all(|e| e.is_zero()))
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch {
                left: self.shape.clone(),
                right: other.shape.clone(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        Ok(Self { shape: self.shape.clone(), blocks })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect();
        Ok(Self { shape: self.shape.clone(), blocks })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let mut out = Self::zeros(&self.shape);
        for (b, &n) in self.shape.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = GaussianRational::zero();
                    for k in 0..n {
                        acc = &acc + &(&self.blocks[b][i * n + k] * &other.blocks[b][k * n + j]);
                    }
                    out.blocks[b][i * n + j] = acc;
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose, blockwise.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(&self.shape);
        for (b, &n) in self.shape.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    out.blocks[b][j * n + i] = self.blocks[b][i * n + j].conj();
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|e| e * c).collect())
            .collect();
        Self { shape: self.shape.clone(), blocks }
    }

    /// Flattens to the coordinate vector (all blocks, row-major, in order).
    pub fn to_coords(&self) -> Vec<GaussianRational> {
        self.blocks.iter().flatten().cloned().collect()
    }

    /// Inverse of [`to_coords`](Self::to_coords).
    pub fn from_coords(shape: &[usize], coords: &[GaussianRational]) -> Result<Self> {
        let total: usize = shape.iter().map(|&n| n * n).sum();
        if coords.len() != total {
            return Err(Error::Invariant {
                detail: format!("{} coordinates for shape {shape:?}", coords.len()),
            });
        }
        let mut blocks = Vec::with_capacity(shape.len());
        let mut k = 0;
        for &n in shape {
            blocks.push(coords[k..k + n * n].to_vec());
            k += n * n;
        }
        Ok(Self { shape: shape.to_vec(), blocks })
    }

    /// Total coordinate dimension Σ nᵢ².
    pub fn coord_dim(shape: &[usize]) -> usize {
        shape.iter().map(|&n| n * n).sum()
    }
}

impl fmt::Debug for BlockMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BlockMatrix{:?}[", self.shape)?;
        for (b, &n) in self.shape.iter().enumerate() {
            if b > 0 {
                write!(f, " ⊕ ")?;
            }
            write!(f, "[")?;
            for i in 0..n {
                if i > 0 {
                    write!(f, "; ")?;
                }
                for j in 0..n {
                    if j > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}", self.entry(b, i, j))?;
                }
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Expresses `v` exactly as Σ cⱼ·basisⱼ, or reports that `v` is outside the
/// span. Solved by Gaussian elimination on coordinate vectors.
pub fn solve_membership(
    v: &BlockMatrix,
    basis: &[&BlockMatrix],
) -> Result<Option<Vec<GaussianRational>>> {
    for b in basis {
        if b.shape() != v.shape() {
            return Err(Error::ShapeMismatch {
                left: v.shape().to_vec(),
                right: b.shape().to_vec(),
            });
        }
    }
    let rhs = v.to_coords();
    let dim = rhs.len();
    let cols: Vec<Vec<GaussianRational>> = basis.iter().map(|b| b.to_coords()).collect();
    let a: Vec<Vec<GaussianRational>> = (0..dim)
        .map(|r| cols.iter().map(|c| c[r].clone()).collect())
        .collect();
    Ok(linalg::solve(&a, &rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    /// Pauli X padded into a single 2×2 block.
    fn pauli_x() -> BlockMatrix {
        BlockMatrix::new(vec![2], vec![vec![g(0), g(1), g(1), g(0)]]).unwrap()
    }

    /// Kronecker product of two 2×2 matrices as one 4×4 block.
    fn kron2(a: &BlockMatrix, b: &BlockMatrix) -> BlockMatrix {
        let mut m = BlockMatrix::zeros(&[4]);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        m.set_entry(0, 2 * i + k, 2 * j + l, a.entry(0, i, j) * b.entry(0, k, l));
                    }
                }
            }
        }
        m
    }

    #[test]
    fn identity_is_neutral() {
        let a = pauli_x();
        let id = BlockMatrix::identity(&[2]);
        assert_eq!(id.mul(&a).unwrap(), a);
        assert_eq!(a.mul(&id).unwrap(), a);
    }

    #[test]
    fn adjoint_conjugates() {
        let m = BlockMatrix::diagonal(&[1], &[GaussianRational::i()]).unwrap();
        assert_eq!(
            m.adjoint(),
            BlockMatrix::diagonal(&[1], &[-GaussianRational::i()]).unwrap()
        );
    }

    #[test]
    fn tensor_factors_multiply() {
        // (X⊗I)·(I⊗X) = X⊗X, checked entry by entry in shape [4].
        let x = pauli_x();
        let id2 = BlockMatrix::identity(&[2]);
        let xi = kron2(&x, &id2);
        let ix = kron2(&id2, &x);
        let xx = kron2(&x, &x);
        assert_eq!(xi.mul(&ix).unwrap(), xx);
        assert_eq!(ix.mul(&xi).unwrap(), xx);
    }

    #[test]
    fn shape_mismatch_errors() {
        let a = BlockMatrix::identity(&[2]);
        let b = BlockMatrix::identity(&[1, 1]);
        assert!(matches!(a.add(&b), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn membership_of_basis_vector() {
        let shape = [3usize];
        let e1 = BlockMatrix::diagonal(&shape, &[g(1), g(0), g(0)]).unwrap();
        let e23 = BlockMatrix::diagonal(&shape, &[g(0), g(1), g(1)]).unwrap();
        let v = e1.clone();
        let c = solve_membership(&v, &[&e1, &e23]).unwrap().unwrap();
        assert_eq!(c, vec![g(1), g(0)]);
    }

    #[test]
    fn membership_of_weighted_sum() {
        // diag(2,3,3) in atom basis {e1, e2+e3} -> [2, 3]
        let shape = [3usize];
        let e1 = BlockMatrix::diagonal(&shape, &[g(1), g(0), g(0)]).unwrap();
        let e23 = BlockMatrix::diagonal(&shape, &[g(0), g(1), g(1)]).unwrap();
        let v = BlockMatrix::diagonal(&shape, &[g(2), g(3), g(3)]).unwrap();
        let c = solve_membership(&v, &[&e1, &e23]).unwrap().unwrap();
        assert_eq!(c, vec![g(2), g(3)]);
    }

    #[test]
    fn membership_detects_outside_span() {
        let shape = [3usize];
        let e1 = BlockMatrix::diagonal(&shape, &[g(1), g(0), g(0)]).unwrap();
        let e23 = BlockMatrix::diagonal(&shape, &[g(0), g(1), g(1)]).unwrap();
        let v = BlockMatrix::diagonal(&shape, &[g(0), g(1), g(2)]).unwrap();
        assert_eq!(solve_membership(&v, &[&e1, &e23]).unwrap(), None);
    }

    #[test]
    fn membership_reconstructs() {
        let shape = [2usize];
        let x = pauli_x();
        let id = BlockMatrix::identity(&shape);
        let v = id.add(&x.scale(&g(3))).unwrap();
        let c = solve_membership(&v, &[&id, &x]).unwrap().unwrap();
        let mut acc = BlockMatrix::zeros(&shape);
        for (coeff, b) in c.iter().zip([&id, &x]) {
            acc = acc.add(&b.scale(coeff)).unwrap();
        }
        assert_eq!(acc, v);
    }
}
