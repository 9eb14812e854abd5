//! Spectra, the spectral gap and its eigenspace, and the operator audits
//! built on them.

mod eigenbasis;
mod gap;
mod induction;
mod small_operators;

use serde::Serialize;

pub use eigenbasis::{
    BasisMember, gap_eigenbasis, kspace_basis, nulllm_check, verify_eigenpair, EigenbasisCertificate, EigenpairCertificate,
    GapEigenbasis,
};
pub use gap::{
    certify_gap, certify_gap_floating, laplacian_nullity, laplacian_spectrum, scaled_gap, spectral_gap, GapCertificate, GapValue,
};
pub use induction::{induction_audit, ChildGap, InductionAudit};
pub use small_operators::{
    k_audit, k_spectrum, m_spectrum, mk_tensor_audit, mk_tensor_spectrum, p_audit, p_spectrum, KAudit, PAudit,
    TensorAudit,
};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::linalg::eigen::{cluster, snap_rational, symmetric_eigenvalues};
use crate::linalg::exact::{exact_nullity, Nullity};
use crate::linalg::DenseMatrix;
use crate::scalar::{Rational, Scalar};

/// Operator a spectrum belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumSource {
    Laplacian,
    DirichletGenerator,
    P,
    K,
    M,
    MTensorK,
    Other,
}

/// How eigenvalues were obtained.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Arithmetic {
    /// Exact nullspace dimensions of `op − λI` for each candidate `λ`.
    Exact { candidates: Vec<Rational> },
    /// Symmetric eigensolve with relative clustering tolerance.
    Floating { tolerance: f64 },
}

/// One distinct eigenvalue with its multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Eigenvalue {
    pub value: f64,
    /// Exact value when known or recognized as a small rational.
    pub exact: Option<Rational>,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub source: SpectrumSource,
    pub arithmetic: Arithmetic,
    pub dimension: usize,
    /// Distinct eigenvalues in increasing order.
    pub eigenvalues: Vec<Eigenvalue>,
}

impl Spectrum {
    /// Groups raw floating eigenvalues.
    pub fn from_values(source: SpectrumSource, mut values: Vec<f64>, tolerance: f64) -> Self {
        values.sort_by(f64::total_cmp);
        let dimension = values.len();
        let eigenvalues = cluster(&values, tolerance)
            .into_iter()
            .map(|(value, multiplicity)| Eigenvalue { value, exact: snap_rational(value, tolerance), multiplicity })
            .collect();
        Spectrum { source, arithmetic: Arithmetic::Floating { tolerance }, dimension, eigenvalues }
    }

    pub fn total_multiplicity(&self) -> usize {
        self.eigenvalues.iter().map(|e| e.multiplicity).sum()
    }

    /// True when the listed multiplicities account for the whole dimension.
    pub fn is_complete(&self) -> bool {
        self.total_multiplicity() == self.dimension
    }

    /// Multiplicity of the eigenvalue within `tol` of `value`, zero if absent.
    pub fn multiplicity_near(&self, value: f64, tol: f64) -> usize {
        self.eigenvalues
            .iter()
            .filter(|e| (e.value - value).abs() <= tol * value.abs().max(1.0))
            .map(|e| e.multiplicity)
            .sum()
    }

    pub fn contains(&self, value: f64, tol: f64) -> bool {
        self.multiplicity_near(value, tol) > 0
    }

    /// Smallest eigenvalue above `tol`.
    pub fn least_nonzero(&self, tol: f64) -> Option<&Eigenvalue> {
        self.eigenvalues.iter().find(|e| e.value > tol)
    }

    /// Largest eigenvalue strictly below the top one.
    pub fn second_largest(&self) -> Option<&Eigenvalue> {
        let n = self.eigenvalues.len();
        (n >= 2).then(|| &self.eigenvalues[n - 2])
    }

    /// `{value: multiplicity}` pairs using exact values where recognized.
    pub fn summary(&self) -> Vec<(String, usize)> {
        self.eigenvalues
            .iter()
            .map(|e| (e.exact.as_ref().map_or_else(|| format!("{:.12}", e.value), Rational::to_string), e.multiplicity))
            .collect()
    }
}

/// Spectrum of a square rational matrix.
///
/// Floating mode requires a symmetric matrix within the dense cap; exact mode
/// reports, for each candidate, the exact nullity of `op − λI` and keeps the
/// candidates with nonzero nullity.
pub fn full_spectrum(
    op: &DenseMatrix<Rational>,
    source: SpectrumSource,
    arithmetic: &Arithmetic,
    limits: &Limits,
) -> Result<Spectrum> {
    if !op.is_square() {
        return Err(Error::DimensionMismatch { expected: op.rows(), found: op.cols() });
    }
    match arithmetic {
        Arithmetic::Floating { tolerance } => {
            if op.rows() > limits.dense_cap {
                return Err(Error::DenseCapExceeded { dimension: op.rows(), cap: limits.dense_cap });
            }
            if !op.is_symmetric(0.0) {
                return Err(Error::NotSymmetric);
            }
            let vals = symmetric_eigenvalues(&op.to_f64())?;
            Ok(Spectrum::from_values(source, vals, *tolerance))
        }
        Arithmetic::Exact { candidates } => {
            let mut eigenvalues = Vec::new();
            let mut sorted = candidates.clone();
            sorted.sort();
            sorted.dedup();
            for lambda in sorted {
                let Nullity { dimension, exact, .. } = exact_nullity(op, &lambda, limits)?;
                if !exact {
                    return Err(Error::DenseCapExceeded { dimension: op.rows(), cap: limits.bareiss_cap });
                }
                if dimension > 0 {
                    eigenvalues.push(Eigenvalue { value: lambda.to_f64(), exact: Some(lambda), multiplicity: dimension });
                }
            }
            Ok(Spectrum { source, arithmetic: arithmetic.clone(), dimension: op.rows(), eigenvalues })
        }
    }
}
