pub mod error;
pub mod linalg;
pub mod matrix;
pub mod scalar;
pub mod algebra;
pub mod context;
pub mod poset;
pub mod presheaf;
pub mod morphism;
pub mod lattice;
pub mod correspond;
pub mod bundles;
pub mod io;
pub mod report;
