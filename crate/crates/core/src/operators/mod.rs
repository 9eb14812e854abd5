//! Laplacian, measures, Dirichlet forms, coordinate projections, insertion
//! maps and the K operator.
//!
//! Every operator works on a materialized [`Multislice`](crate::multislice::Multislice)
//! and is generic over [`Scalar`](crate::scalar::Scalar), so the same code
//! certifies identities in exact arithmetic and feeds floating eigensolvers.

mod dirichlet;
mod function;
mod insertion;
mod kmatrix;
mod laplacian;
mod projection;

pub use dirichlet::{
    averaging_identity_residual, dirichlet_graph, dirichlet_graph_by_edges, dirichlet_restricted, dirichlet_scaled,
    induction_identity_residual, shift_identity_residual,
};
pub use function::{LevelFunction, Measures, VertexFunction};
pub use insertion::{insertion_map, measure_decomposition_check};
pub use kmatrix::{k_matrix, k_quadratic_form, KMatrix};
pub use laplacian::{apply_laplacian, laplacian, LaplacianInvariants, LaplacianMatrix};
pub use projection::{p_matrix, p_operator, project_onto_coordinate};
