pub mod certify;
pub mod coarsening;
pub mod composition;
pub mod error;
pub mod limits;
pub mod linalg;
pub mod multislice;
pub mod operators;
pub mod report;
pub mod scalar;
pub mod spectral;
pub mod vertex;
pub mod walk;
