//! JSON interchange. Scalars are decimal-free strings ("1/2-3/4 i"), never
//! floats. Every load revalidates the object's invariants through the
//! ordinary constructors, so corrupted files fail with a witness. Saving is
//! canonical: identical objects produce byte-identical documents.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{StarAlgebra, UnitalStarHom};
use crate::context::Context;
use crate::error::{Error, Result};
use crate::matrix::BlockMatrix;
use crate::morphism::{BaseMap, PresheafMorphism};
use crate::poset::ContextPoset;
use crate::presheaf::SpectralPresheaf;
use crate::scalar::GaussianRational;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub shape: Vec<usize>,
    /// Row-major entries per block, canonical scalar strings.
    pub blocks: Vec<Vec<String>>,
}

impl MatrixDoc {
    pub fn from_matrix(m: &BlockMatrix) -> Self {
        let blocks = m
            .shape()
            .iter()
            .enumerate()
            .map(|(b, &n)| {
                (0..n * n)
                    .map(|k| m.entry(b, k / n, k % n).to_string())
                    .collect()
            })
            .collect();
        Self { shape: m.shape().to_vec(), blocks }
    }

    pub fn to_matrix(&self) -> Result<BlockMatrix> {
        let blocks = self
            .blocks
            .iter()
            .map(|entries| {
                entries
                    .iter()
                    .map(|s| s.parse::<GaussianRational>())
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        BlockMatrix::new(self.shape.clone(), blocks)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgebraDoc {
    pub label: String,
    pub shape: Vec<usize>,
}

impl AlgebraDoc {
    pub fn from_algebra(a: &StarAlgebra) -> Self {
        Self { label: a.label().to_string(), shape: a.shape().to_vec() }
    }

    pub fn to_algebra(&self) -> Result<StarAlgebra> {
        StarAlgebra::new(self.label.clone(), self.shape.clone())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HomDoc {
    pub source: AlgebraDoc,
    pub target: AlgebraDoc,
    /// dim(target) × dim(source) coordinate matrix, scalar strings.
    pub matrix: Vec<Vec<String>>,
}

impl HomDoc {
    pub fn from_hom(h: &UnitalStarHom) -> Self {
        Self {
            source: AlgebraDoc::from_algebra(h.source()),
            target: AlgebraDoc::from_algebra(h.target()),
            matrix: h
                .matrix()
                .iter()
                .map(|row| row.iter().map(|e| e.to_string()).collect())
                .collect(),
        }
    }

    /// Revalidates the homomorphism laws.
    pub fn to_hom(&self) -> Result<UnitalStarHom> {
        let matrix = self
            .matrix
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| s.parse::<GaussianRational>())
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        UnitalStarHom::new(self.source.to_algebra()?, self.target.to_algebra()?, matrix)
    }

    /// Builds the carrier without the homomorphism laws, for candidates that
    /// are then explicitly verified.
    pub fn to_hom_unverified(&self) -> Result<UnitalStarHom> {
        let matrix = self
            .matrix
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| s.parse::<GaussianRational>())
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        UnitalStarHom::unverified(self.source.to_algebra()?, self.target.to_algebra()?, matrix)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContextDoc {
    pub atoms: Vec<MatrixDoc>,
    /// Labels of the observables that generated the context, when bundled.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub observables: Vec<String>,
}

impl ContextDoc {
    pub fn from_context(c: &Context) -> Self {
        Self {
            atoms: c.atoms().iter().map(MatrixDoc::from_matrix).collect(),
            observables: Vec::new(),
        }
    }

    pub fn to_context(&self, algebra: &StarAlgebra) -> Result<Context> {
        let atoms = self
            .atoms
            .iter()
            .map(|m| m.to_matrix())
            .collect::<Result<Vec<_>>>()?;
        Context::new(algebra.clone(), atoms)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PosetDoc {
    pub algebra: AlgebraDoc,
    pub contexts: Vec<ContextDoc>,
    /// Covering pairs (lower, upper) of the inclusion order.
    pub covers: Vec<(usize, usize)>,
}

impl PosetDoc {
    pub fn from_poset(p: &ContextPoset) -> Self {
        Self {
            algebra: AlgebraDoc::from_algebra(p.algebra()),
            contexts: p.contexts().iter().map(ContextDoc::from_context).collect(),
            covers: p.covers(),
        }
    }

    /// Rebuilds the poset, re-deriving the order from the atoms and checking
    /// the stored covers against it.
    pub fn to_poset(&self) -> Result<ContextPoset> {
        let algebra = self.algebra.to_algebra()?;
        let contexts = self
            .contexts
            .iter()
            .map(|c| c.to_context(&algebra))
            .collect::<Result<Vec<_>>>()?;
        let poset = ContextPoset::new(algebra, contexts)?;
        if poset.len() != self.contexts.len() {
            return Err(Error::Invariant {
                detail: "stored context family contains duplicates or misses the trivial context"
                    .into(),
            });
        }
        // The constructor sorts canonically; a permuted file would silently
        // renumber contexts, so insist on canonical order.
        for (i, doc) in self.contexts.iter().enumerate() {
            if doc.to_context(poset.algebra())? != *poset.context(i) {
                return Err(Error::Invariant {
                    detail: "contexts are not in canonical order".into(),
                });
            }
        }
        if poset.covers() != self.covers {
            return Err(Error::Invariant {
                detail: "stored covers disagree with the order computed from atoms".into(),
            });
        }
        Ok(poset)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RestrictionDoc {
    pub lower: usize,
    pub upper: usize,
    pub table: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PresheafDoc {
    pub poset: PosetDoc,
    pub components: Vec<usize>,
    pub restrictions: Vec<RestrictionDoc>,
}

impl PresheafDoc {
    pub fn from_presheaf(s: &SpectralPresheaf) -> Self {
        Self {
            poset: PosetDoc::from_poset(s.poset()),
            components: s.component_sizes().to_vec(),
            restrictions: s
                .restrictions()
                .iter()
                .map(|(&(lower, upper), table)| RestrictionDoc {
                    lower,
                    upper,
                    table: table.clone(),
                })
                .collect(),
        }
    }

    /// Rebuilds the presheaf from the poset and verifies the stored
    /// components and restriction tables match the recomputation bit for bit.
    pub fn to_presheaf(&self) -> Result<SpectralPresheaf> {
        let poset = Arc::new(self.poset.to_poset()?);
        let sigma = SpectralPresheaf::build(poset)?;
        if sigma.component_sizes() != self.components.as_slice() {
            return Err(Error::Invariant {
                detail: "stored component sizes disagree with the poset".into(),
            });
        }
        if sigma.restrictions().len() != self.restrictions.len() {
            return Err(Error::Invariant {
                detail: "stored restriction tables disagree with the poset".into(),
            });
        }
        for doc in &self.restrictions {
            match sigma.restriction(doc.lower, doc.upper) {
                Some(table) if table == doc.table.as_slice() => {}
                _ => {
                    return Err(Error::Invariant {
                        detail: format!(
                            "stored restriction {} -> {} disagrees with the poset",
                            doc.upper, doc.lower
                        ),
                    })
                }
            }
        }
        Ok(sigma)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MorphismDoc {
    /// Poset of the codomain presheaf's algebra (the base map's source).
    pub source_poset: PosetDoc,
    /// Poset of the domain presheaf's algebra (the base map's target).
    pub target_poset: PosetDoc,
    pub base: Vec<usize>,
    pub components: Vec<Vec<usize>>,
}

impl MorphismDoc {
    pub fn from_morphism(m: &PresheafMorphism) -> Self {
        Self {
            source_poset: PosetDoc::from_poset(m.base().source()),
            target_poset: PosetDoc::from_poset(m.base().target()),
            base: m.base().table().to_vec(),
            components: m.components().to_vec(),
        }
    }

    /// Rebuilds the morphism with full naturality verification.
    pub fn to_morphism(&self) -> Result<PresheafMorphism> {
        let source = Arc::new(self.source_poset.to_poset()?);
        let target = Arc::new(self.target_poset.to_poset()?);
        let sigma_source = Arc::new(SpectralPresheaf::build(source.clone())?);
        let sigma_target = Arc::new(SpectralPresheaf::build(target.clone())?);
        let base = BaseMap::new(source, target, self.base.clone())?;
        PresheafMorphism::new(sigma_target, sigma_source, base, self.components.clone())
    }
}

/// Bundle document: observables plus the contexts they generate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BundleDoc {
    pub algebra: AlgebraDoc,
    pub observables: Vec<ObservableDoc>,
    pub contexts: Vec<ContextDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ObservableDoc {
    pub label: String,
    pub matrix: MatrixDoc,
}

impl BundleDoc {
    /// Loads the generating contexts, revalidating each and checking every
    /// context against the one regenerated from its listed observables.
    pub fn to_contexts(&self) -> Result<Vec<Context>> {
        let algebra = self.algebra.to_algebra()?;
        let mut obs = std::collections::BTreeMap::new();
        for o in &self.observables {
            obs.insert(o.label.clone(), o.matrix.to_matrix()?);
        }
        let mut out = Vec::with_capacity(self.contexts.len());
        for doc in &self.contexts {
            let ctx = doc.to_context(&algebra)?;
            if !doc.observables.is_empty() {
                let involutions = doc
                    .observables
                    .iter()
                    .map(|label| {
                        obs.get(label).cloned().ok_or_else(|| Error::Invariant {
                            detail: format!("context references unknown observable {label}"),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                let regenerated = Context::from_involutions(algebra.clone(), &involutions)?;
                if regenerated != ctx {
                    return Err(Error::Invariant {
                        detail: "stored atoms disagree with the listed observables".into(),
                    });
                }
            }
            out.push(ctx);
        }
        Ok(out)
    }
}

/// Canonical serialization: pretty JSON with a trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_canonical_json(value)?)?;
    Ok(())
}

pub fn load_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// The bundled magic-square document (observables and generating contexts).
pub fn mermin_peres_bundle_doc() -> Result<BundleDoc> {
    let algebra = StarAlgebra::full_matrix(4);
    let observables = crate::bundles::mermin_peres_observables()
        .into_iter()
        .map(|(label, matrix)| ObservableDoc {
            label,
            matrix: MatrixDoc::from_matrix(&matrix),
        })
        .collect();
    let contexts = crate::bundles::mermin_peres_contexts()?
        .into_iter()
        .map(|(labels, ctx)| {
            let mut doc = ContextDoc::from_context(&ctx);
            doc.observables = labels;
            doc
        })
        .collect();
    Ok(BundleDoc {
        algebra: AlgebraDoc::from_algebra(&algebra),
        observables,
        contexts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::Limits;

    #[test]
    fn matrix_roundtrip_is_canonical() {
        let m = BlockMatrix::diagonal(
            &[2, 1],
            &[
                GaussianRational::from_ratio(1, 2),
                GaussianRational::i(),
                GaussianRational::from_int(-3),
            ],
        )
        .unwrap();
        let doc = MatrixDoc::from_matrix(&m);
        let json = to_canonical_json(&doc).unwrap();
        let doc2: MatrixDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(doc2.to_matrix().unwrap(), m);
        assert_eq!(to_canonical_json(&doc2).unwrap(), json);
    }

    #[test]
    fn poset_roundtrip() {
        let p = ContextPoset::full_abelian(3, &Limits::default()).unwrap();
        let doc = PosetDoc::from_poset(&p);
        let json = to_canonical_json(&doc).unwrap();
        let doc2: PosetDoc = serde_json::from_str(&json).unwrap();
        let p2 = doc2.to_poset().unwrap();
        assert_eq!(p, p2);
        assert_eq!(to_canonical_json(&PosetDoc::from_poset(&p2)).unwrap(), json);
    }

    #[test]
    fn bad_context_fails_with_residual_witness() {
        let json = r#"{
            "algebra": {"label": "c2", "shape": [1, 1]},
            "contexts": [
                {"atoms": [{"shape": [1,1], "blocks": [["1"],["0"]]}]},
                {"atoms": [{"shape": [1,1], "blocks": [["1"],["1"]]}]}
            ],
            "covers": []
        }"#;
        let doc: PosetDoc = serde_json::from_str(json).unwrap();
        let err = doc.to_poset().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("resolve the identity"), "{msg}");
    }

    #[test]
    fn tampered_covers_fail() {
        let p = ContextPoset::full_abelian(2, &Limits::default()).unwrap();
        let mut doc = PosetDoc::from_poset(&p);
        doc.covers.clear();
        assert!(doc.to_poset().is_err());
    }

    #[test]
    fn hom_doc_revalidates() {
        let h = UnitalStarHom::abelian_from_coordinate_map(2, &[0, 0, 1]).unwrap();
        let doc = HomDoc::from_hom(&h);
        assert_eq!(doc.to_hom().unwrap(), h);
        let mut bad = doc.clone();
        bad.matrix[0][0] = "0".into();
        assert!(bad.to_hom().is_err());
    }

    #[test]
    fn presheaf_doc_detects_tampered_table() {
        let p = ContextPoset::full_abelian(3, &Limits::default()).unwrap();
        let sigma = SpectralPresheaf::build(Arc::new(p)).unwrap();
        let mut doc = PresheafDoc::from_presheaf(&sigma);
        assert!(doc.to_presheaf().is_ok());
        for r in &mut doc.restrictions {
            if r.table.len() >= 2 {
                r.table.swap(0, 1);
                break;
            }
        }
        assert!(doc.to_presheaf().is_err());
    }

    #[test]
    fn mermin_bundle_doc_loads_to_six_contexts() {
        let doc = mermin_peres_bundle_doc().unwrap();
        let contexts = doc.to_contexts().unwrap();
        assert_eq!(contexts.len(), 6);
        for c in &contexts {
            assert_eq!(c.atom_count(), 4);
        }
    }
}
