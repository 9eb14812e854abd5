use serde::{Deserialize, Serialize};

/// Size guards and tolerances shared by every exhaustive or dense operation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Limits {
    /// Maximum number of vertices any operation may enumerate.
    pub enumeration_budget: u64,
    /// Maximum dimension handed to the dense floating eigensolver.
    pub dense_cap: usize,
    /// Maximum row count for exact nullspace certification.
    pub exact_cap: usize,
    /// Matrices up to this size are certified with fraction-free elimination
    /// over big integers; larger ones use modular elimination.
    pub bareiss_cap: usize,
    /// Number of primes from [`crate::linalg::exact::PRIMES`] tried by
    /// modular elimination. More primes only tighten an upper bound.
    pub modular_primes: usize,
    /// Slices at or above this many vertices are handled through the
    /// symmetry-reduced block form and matrix-free application.
    pub sparse_threshold: usize,
    /// Relative clustering tolerance for floating spectra.
    pub tolerance: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            enumeration_budget: 1_000_000,
            dense_cap: 3_000,
            exact_cap: 5_000,
            bareiss_cap: 48,
            modular_primes: 1,
            sparse_threshold: 2_000,
            tolerance: 1e-8,
        }
    }
}
