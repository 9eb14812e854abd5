use num_traits::ToPrimitive;
use serde::Serialize;

use super::{gap_eigenbasis, verify_eigenpair, EigenbasisCertificate, Spectrum, SpectrumSource};
use crate::composition::{big_to_string, Composition};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::linalg::eigen::{snap_rational, symmetric_eigenvalues};
use crate::linalg::exact::{integer_nullity, EliminationMethod, Nullity};
use crate::linalg::symmetry::BlockDecomposition;
use crate::multislice::Multislice;
use crate::scalar::{Rational, Scalar, ScalarKind};

/// A computed eigenvalue with its recognized exact value, if any.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapValue {
    pub value: f64,
    pub exact: Option<Rational>,
}

impl GapValue {
    pub fn from_f64(value: f64, tol: f64) -> Self {
        GapValue { value, exact: snap_rational(value, tol) }
    }

    pub fn exact(value: Rational) -> Self {
        GapValue { value: value.to_f64(), exact: Some(value) }
    }

    /// `c · self`, exact when both are.
    pub fn scaled(&self, c: &Rational) -> Self {
        GapValue {
            value: self.value * c.to_f64(),
            exact: self.exact.as_ref().map(|e| e * c),
        }
    }
}

/// Floating Laplacian spectrum assembled from the symmetry blocks; only the
/// largest block must fit under the dense cap.
pub fn laplacian_spectrum(g: &Multislice, limits: &Limits) -> Result<Spectrum> {
    let blocks = BlockDecomposition::new(g);
    let mut values = Vec::with_capacity(g.len());
    for c in blocks.characters() {
        let dim = blocks.block_orbits(c).len();
        if dim > limits.dense_cap {
            return Err(Error::DenseCapExceeded { dimension: dim, cap: limits.dense_cap });
        }
        values.extend(symmetric_eigenvalues(&blocks.symmetric_block(g, c))?);
    }
    Ok(Spectrum::from_values(SpectrumSource::Laplacian, values, limits.tolerance))
}

/// `dim ker(L − λI)` as the sum of block nullities.
///
/// Exact when every block is eliminated exactly; otherwise an upper bound.
pub fn laplacian_nullity(g: &Multislice, lambda: &Rational, limits: &Limits) -> Result<Nullity> {
    let blocks = BlockDecomposition::new(g);
    // λ = p/q: work with q·B − p·I, which has the same kernel.
    let too_large = || Error::Parse(format!("eigenvalue {lambda} too large"));
    let p = lambda.numer().to_i64().ok_or_else(too_large)?;
    let q = lambda.denom().to_i64().ok_or_else(too_large)?;
    let mut total = Nullity { dimension: 0, exact: true, method: EliminationMethod::Bareiss };
    for c in blocks.characters() {
        let (mut b, dim) = blocks.integer_block(g, c);
        if dim == 0 {
            continue;
        }
        for (i, v) in b.iter_mut().enumerate() {
            *v *= q;
            if i % (dim + 1) == 0 {
                *v -= p;
            }
        }
        let part = integer_nullity(&b, dim, limits)?;
        total.dimension += part.dimension;
        total.exact &= part.exact;
        if part.method == EliminationMethod::Modular {
            total.method = EliminationMethod::Modular;
        }
    }
    Ok(total)
}

fn nontrivial_graph(k: &Composition, limits: &Limits) -> Result<(Composition, Multislice)> {
    let reduced = k.reduce().composition;
    if reduced.is_trivial() {
        return Err(Error::TrivialComposition(k.to_string()));
    }
    let g = Multislice::new(&reduced, limits.enumeration_budget)?;
    Ok((reduced, g))
}

/// `Γ_{N,k}`, the least nonzero Laplacian eigenvalue, by floating eigensolve.
pub fn spectral_gap(k: &Composition, limits: &Limits) -> Result<GapValue> {
    let (_, g) = nontrivial_graph(k, limits)?;
    let spectrum = laplacian_spectrum(&g, limits)?;
    let gap = spectrum.least_nonzero(limits.tolerance).ok_or_else(|| Error::TrivialComposition(k.to_string()))?;
    Ok(GapValue { value: gap.value, exact: gap.exact.clone() })
}

/// `Δ_{N,k} = 2 Γ_{N,k} / (N − 1)`.
pub fn scaled_gap(k: &Composition, limits: &Limits) -> Result<GapValue> {
    let gamma = spectral_gap(k, limits)?;
    Ok(gamma.scaled(&Rational::new(2, k.n() as i64 - 1)))
}

/// Combined floating and exact evidence that `Γ_{N,k} = N` with eigenspace
/// dimension `(N − 1)(r_eff − 1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapCertificate {
    pub composition: Composition,
    pub reduced: Composition,
    pub n: usize,
    pub r_eff: usize,
    pub cardinality: String,
    pub degree: u64,
    pub blocks: usize,
    pub largest_block: usize,
    /// Least nonzero eigenvalue `Γ`.
    pub gamma: GapValue,
    /// `Δ = 2Γ/(N−1)`.
    pub delta: GapValue,
    /// Floating eigenvalues within tolerance of zero.
    pub zero_multiplicity: usize,
    /// No floating eigenvalue lies in `(tol, N − tol)`.
    pub window_clear: bool,
    /// Floating eigenvalues within tolerance of `N`.
    pub floating_multiplicity: usize,
    pub expected_multiplicity: usize,
    pub arithmetic: ScalarKind,
    /// `dim ker(L − N I)` from block elimination; exact mode only.
    pub nullity: Option<usize>,
    pub nullity_method: Option<EliminationMethod>,
    /// True when `nullity` is exact over the rationals, either from exact
    /// elimination or because the modular upper bound meets the eigenbasis
    /// lower bound.
    pub nullity_exact: Option<bool>,
    pub eigenbasis: Option<EigenbasisCertificate>,
    /// Floating mode: every eigenbasis member passes the floating eigenpair
    /// check.
    pub floating_eigenbasis: Option<bool>,
    pub pass: bool,
}

/// Full certificate: floating spectrum plus exact nullity and exact
/// eigenbasis checks.
pub fn certify_gap(k: &Composition, limits: &Limits) -> Result<GapCertificate> {
    certify_gap_with(k, limits, ScalarKind::Exact)
}

/// Floating-only certificate; the eigenbasis is checked to tolerance and no
/// nullity is computed.
pub fn certify_gap_floating(k: &Composition, limits: &Limits) -> Result<GapCertificate> {
    certify_gap_with(k, limits, ScalarKind::Floating)
}

fn certify_gap_with(k: &Composition, limits: &Limits, arithmetic: ScalarKind) -> Result<GapCertificate> {
    let (reduced, g) = nontrivial_graph(k, limits)?;
    let n = g.n();
    let tol = limits.tolerance;
    let n_rat = Rational::from(n as i64);
    let blocks = BlockDecomposition::new(&g);
    let largest_block = blocks.characters().map(|c| blocks.block_orbits(c).len()).max().unwrap_or(0);
    if arithmetic == ScalarKind::Exact && largest_block > limits.exact_cap {
        return Err(Error::DenseCapExceeded { dimension: largest_block, cap: limits.exact_cap });
    }

    let spectrum = laplacian_spectrum(&g, limits)?;
    let zero_multiplicity = spectrum.eigenvalues.iter().filter(|e| e.value.abs() <= tol).map(|e| e.multiplicity).sum();
    let window_clear = !spectrum.eigenvalues.iter().any(|e| e.value > tol && e.value < n as f64 - tol);
    let floating_multiplicity = spectrum
        .eigenvalues
        .iter()
        .filter(|e| (e.value - n as f64).abs() <= tol * n as f64)
        .map(|e| e.multiplicity)
        .sum();
    let least = spectrum.least_nonzero(tol).ok_or_else(|| Error::TrivialComposition(k.to_string()))?;
    let gamma = GapValue { value: least.value, exact: least.exact.clone() };
    let delta = gamma.scaled(&Rational::new(2, n as i64 - 1));
    let expected_multiplicity = (n - 1) * (reduced.r_eff() - 1);
    let floating_ok = zero_multiplicity == 1
        && window_clear
        && gamma.exact.as_ref() == Some(&n_rat)
        && floating_multiplicity == expected_multiplicity;

    let (mut nullity, mut nullity_method, mut nullity_exact, mut eigenbasis, mut floating_eigenbasis) =
        (None, None, None, None, None);
    let pass = match arithmetic {
        ScalarKind::Exact => {
            let upper = laplacian_nullity(&g, &n_rat, limits)?;
            let cert = gap_eigenbasis(&g)?.certify(&g, limits)?;
            // A verified, independent family of eigenfunctions bounds the nullity below.
            let lower = if cert.exact_eigenfunctions && cert.full_rank { cert.members } else { 0 };
            let exact = upper.exact || upper.dimension == lower;
            let pass = floating_ok && upper.dimension > 0 && exact && upper.dimension == expected_multiplicity && cert.pass;
            nullity = Some(upper.dimension);
            nullity_method = Some(upper.method);
            nullity_exact = Some(exact);
            eigenbasis = Some(cert);
            pass
        }
        ScalarKind::Floating => {
            let basis = gap_eigenbasis(&g)?;
            let mut ok = basis.len() == expected_multiplicity;
            for m in basis.members() {
                ok &= verify_eigenpair(&g, &m.function.to_f64(), &(n as f64), tol)?.pass;
            }
            floating_eigenbasis = Some(ok);
            floating_ok && ok
        }
    };

    Ok(GapCertificate {
        composition: k.clone(),
        reduced: reduced.clone(),
        n,
        r_eff: reduced.r_eff(),
        cardinality: big_to_string(&reduced.cardinality()),
        degree: reduced.degree(),
        blocks: 1 << blocks.pairs(),
        largest_block,
        gamma,
        delta,
        zero_multiplicity,
        window_clear,
        floating_multiplicity,
        expected_multiplicity,
        arithmetic,
        nullity,
        nullity_method,
        nullity_exact,
        eigenbasis,
        floating_eigenbasis,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(v: &[usize]) -> Composition {
        Composition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn gap_examples() {
        let limits = Limits::default();
        assert_eq!(spectral_gap(&k(&[1, 1]), &limits).unwrap().exact, Some(Rational::from(2)));
        assert_eq!(spectral_gap(&k(&[2, 1]), &limits).unwrap().exact, Some(Rational::from(3)));
        assert_eq!(spectral_gap(&k(&[1, 2]), &limits).unwrap().exact, Some(Rational::from(3)));
        assert_eq!(spectral_gap(&k(&[2, 2]), &limits).unwrap().exact, Some(Rational::from(4)));
        assert_eq!(scaled_gap(&k(&[1, 1]), &limits).unwrap().exact, Some(Rational::from(4)));
        assert_eq!(scaled_gap(&k(&[1, 1, 1]), &limits).unwrap().exact, Some(Rational::from(3)));
        assert_eq!(scaled_gap(&k(&[3, 1]), &limits).unwrap().exact, Some(Rational::new(8, 3)));
        assert!(matches!(spectral_gap(&k(&[3]), &limits), Err(Error::TrivialComposition(_))));
        assert!(matches!(spectral_gap(&k(&[0, 3, 0]), &limits), Err(Error::TrivialComposition(_))));
    }

    #[test]
    fn johnson_spectrum() {
        let g = Multislice::new(&k(&[2, 2]), 100).unwrap();
        let s = laplacian_spectrum(&g, &Limits::default()).unwrap();
        assert_eq!(
            s.summary(),
            vec![("0".to_string(), 1), ("4".to_string(), 3), ("6".to_string(), 2)]
        );
    }

    #[test]
    fn complete_graph_nullity() {
        let limits = Limits::default();
        for n in 2..=6 {
            let g = Multislice::new(&k(&[n - 1, 1]), 100).unwrap();
            let nul = laplacian_nullity(&g, &Rational::from(n as i64), &limits).unwrap();
            assert_eq!(nul.dimension, n - 1);
            assert!(nul.exact);
            assert_eq!(laplacian_nullity(&g, &Rational::from(0), &limits).unwrap().dimension, 1);
            assert_eq!(laplacian_nullity(&g, &Rational::new(1, 2), &limits).unwrap().dimension, 0);
        }
    }

    #[test]
    fn certificates_pass_small_and_modular() {
        for c in [k(&[1, 1]), k(&[1, 1, 1]), k(&[2, 0, 2]), k(&[2, 1, 1, 1])] {
            let cert = certify_gap(&c, &Limits::default()).unwrap();
            assert!(cert.pass, "{cert:?}");
        }
        // Force the modular route plus eigenbasis lower bound.
        let limits = Limits { bareiss_cap: 4, ..Limits::default() };
        let cert = certify_gap(&k(&[2, 2, 1, 1]), &limits).unwrap();
        assert_eq!(cert.nullity_method, Some(EliminationMethod::Modular));
        assert!(cert.pass && cert.nullity_exact == Some(true), "{cert:?}");
    }

    #[test]
    fn floating_certificate() {
        let cert = certify_gap_floating(&k(&[2, 1, 2]), &Limits::default()).unwrap();
        assert!(cert.pass && cert.nullity.is_none() && cert.floating_eigenbasis == Some(true), "{cert:?}");
        assert_eq!(cert.expected_multiplicity, 8);
    }
}
