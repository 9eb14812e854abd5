//! Dense matrices, exact elimination and symmetric eigensolvers.

mod dense;
pub mod eigen;
pub mod exact;
pub mod symmetry;

pub use dense::DenseMatrix;
