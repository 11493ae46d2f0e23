//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("block shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch { left: Vec<usize>, right: Vec<usize> },

    #[error("matrix is not a projection: {detail}")]
    NotAProjection { detail: String },

    #[error("elements do not commute: {detail}")]
    NonCommuting { detail: String },

    #[error("objects belong to different algebras: {left} vs {right}")]
    AlgebraMismatch { left: String, right: String },

    #[error("not a unital *-homomorphism: {detail}")]
    InvalidHom { detail: String },

    #[error("homomorphisms are not composable: {detail}")]
    NotComposable { detail: String },

    #[error("size bound exceeded: {what} = {got} > {bound} (set SPECPRESHEAF_MAX_CONTEXTS to raise)")]
    SizeBound {
        what: &'static str,
        got: usize,
        bound: usize,
    },

    #[error(
        "image context not present in target poset ({detail}); \
         extend the target poset closure with the image contexts first"
    )]
    ImageContextMissing { detail: String },

    #[error("morphism is not an isomorphism: {detail}")]
    NotIsomorphism { detail: String },

    #[error("ortholattice law violated: {detail}")]
    LatticeViolation { detail: String },

    #[error("invariant violated: {detail}")]
    Invariant { detail: String },

    #[error("element lies in no stored context: {detail}")]
    NoContainingContext { detail: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
