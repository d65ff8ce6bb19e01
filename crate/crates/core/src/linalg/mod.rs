//! Dense matrix arithmetic and the projection onto `{X : A X = Y}`.

pub mod decomp;
pub mod io;
mod matrix;
mod projector;

pub use matrix::{matmul, DenseMatrix};
pub use projector::{build_projector, project, Projector, MAX_GRAM_CONDITION};
