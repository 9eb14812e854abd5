use serde::Serialize;

use super::{full_spectrum, Arithmetic, GapValue, Spectrum, SpectrumSource};
use crate::composition::Composition;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::linalg::eigen::symmetric_eigen;
use crate::linalg::DenseMatrix;
use crate::multislice::Multislice;
use crate::operators::{apply_laplacian, k_matrix, k_quadratic_form, p_matrix, LevelFunction, VertexFunction};
use crate::scalar::{Rational, Scalar};

fn require_n(n: usize, required: usize) -> Result<()> {
    if n < required {
        return Err(Error::TooFewParticles { required, found: n });
    }
    Ok(())
}

fn expectations_met(spectrum: &Spectrum, expected: &[(Rational, usize)]) -> bool {
    let got: Vec<(Rational, usize)> =
        spectrum.eigenvalues.iter().filter_map(|e| e.exact.clone().map(|v| (v, e.multiplicity))).collect();
    let mut want: Vec<(Rational, usize)> = expected.iter().filter(|(_, m)| *m > 0).cloned().collect();
    want.sort();
    let mut got_sorted = got;
    got_sorted.sort();
    spectrum.is_complete() && got_sorted == want
}

/// Floating spectrum of `P = N^{-1} Σ_ℓ P_ℓ`.
pub fn p_spectrum(g: &Multislice, limits: &Limits) -> Result<Spectrum> {
    require_n(g.n(), 3)?;
    let m = p_matrix::<Rational>(g, limits.dense_cap)?;
    full_spectrum(&m, SpectrumSource::P, &Arithmetic::Floating { tolerance: limits.tolerance }, limits)
}

/// Checks on the spectrum of `P`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PAudit {
    pub composition: Composition,
    pub spectrum: Spectrum,
    /// Every eigenvalue is within tolerance of `0`, `1/(N−1)` or `1`.
    pub allowed_values_only: bool,
    pub top_simple: bool,
    pub top_eigenvector_constant: bool,
    /// Second largest eigenvalue `λ_{N,k}`.
    pub lambda: Option<GapValue>,
    pub lambda_matches: bool,
    /// Multiplicity of `1/(N−1)`.
    pub middle_multiplicity: usize,
    pub expected_middle_multiplicity: usize,
    /// Every eigenvector of `P` for `1/(N−1)` satisfies `L f = N f`.
    pub middle_eigenvectors_have_laplacian_eigenvalue_n: bool,
    /// `Nλ − 1` lies in the spectrum of `M ⊗ K` for every eigenvalue `λ` of `P`.
    pub translation_into_tensor: bool,
    pub pass: bool,
}

pub fn p_audit(g: &Multislice, limits: &Limits) -> Result<PAudit> {
    let n = g.n();
    require_n(n, 3)?;
    let tol = limits.tolerance;
    let k = g.composition().clone();
    let pm = p_matrix::<f64>(g, limits.dense_cap)?;
    let (values, vectors) = symmetric_eigen(&pm)?;
    let spectrum = Spectrum::from_values(SpectrumSource::P, values.clone(), tol);
    let middle = 1.0 / (n as f64 - 1.0);
    let near = |v: f64, t: f64| (v - t).abs() <= tol * t.abs().max(1.0);

    let allowed_values_only = spectrum.eigenvalues.iter().all(|e| near(e.value, 0.0) || near(e.value, middle) || near(e.value, 1.0));
    let top_simple = spectrum.multiplicity_near(1.0, tol) == 1;
    let top_eigenvector_constant = values.last().is_some_and(|&v| near(v, 1.0))
        && vectors.last().is_some_and(|u| {
            let (lo, hi) = u.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
            hi - lo <= tol
        });
    let lambda = spectrum.second_largest().map(|e| GapValue { value: e.value, exact: e.exact.clone() });
    let lambda_matches = lambda.as_ref().is_some_and(|l| l.exact == Some(Rational::new(1, n as i64 - 1)));
    let middle_multiplicity = spectrum.multiplicity_near(middle, tol);
    let expected_middle_multiplicity = (n - 1) * (k.r_eff() - 1);

    let mut middle_ok = true;
    for (v, u) in values.iter().zip(&vectors) {
        if !near(*v, middle) {
            continue;
        }
        let f = VertexFunction::new(&k, u.clone())?;
        let lf = apply_laplacian(g, &f)?;
        let residual = lf.sub(&f.scale(&(n as f64)))?.max_abs();
        middle_ok &= residual <= tol * n as f64 * f.max_abs().max(1.0);
    }

    let tensor = mk_tensor_spectrum(&k, limits)?;
    let translation_into_tensor = spectrum
        .eigenvalues
        .iter()
        .all(|e| tensor.contains(n as f64 * e.value - 1.0, tol * n as f64));

    let pass = allowed_values_only
        && top_simple
        && top_eigenvector_constant
        && lambda_matches
        && middle_multiplicity == expected_middle_multiplicity
        && middle_ok
        && translation_into_tensor;
    Ok(PAudit {
        composition: k,
        spectrum,
        allowed_values_only,
        top_simple,
        top_eigenvector_constant,
        lambda,
        lambda_matches,
        middle_multiplicity,
        expected_middle_multiplicity,
        middle_eigenvectors_have_laplacian_eigenvalue_n: middle_ok,
        translation_into_tensor,
        pass,
    })
}

/// Exact spectrum of `K` for the reduced composition.
pub fn k_spectrum(k: &Composition, limits: &Limits) -> Result<Spectrum> {
    let reduced = k.reduce().composition;
    let n = reduced.n();
    require_n(n, 2)?;
    let km = k_matrix(&reduced)?;
    let candidates = vec![Rational::from(1), Rational::new(-1, n as i64 - 1)];
    full_spectrum(km.entries(), SpectrumSource::K, &Arithmetic::Exact { candidates }, limits)
}

/// Checks on `K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KAudit {
    pub composition: Composition,
    pub spectrum: Spectrum,
    pub spectrum_matches: bool,
    pub constants_eigenvalue_one: bool,
    pub kspace_eigenvalue: bool,
    pub self_adjoint_residual: Rational,
    /// Brute-force joint law of the first and last coordinates agrees with
    /// `ν_m K_{mn}`; `None` when the slice exceeds `form_budget`.
    pub brute_force_form: Option<bool>,
    pub pass: bool,
}

pub fn k_audit(k: &Composition, limits: &Limits, form_budget: u64) -> Result<KAudit> {
    let reduced = k.reduce().composition;
    let n = reduced.n() as i64;
    require_n(reduced.n(), 2)?;
    let km = k_matrix(&reduced)?;
    let spectrum = k_spectrum(&reduced, limits)?;
    let minus = Rational::new(-1, n - 1);
    let expected = [(Rational::from(1), 1), (minus.clone(), reduced.r() - 1)];
    let spectrum_matches = expectations_met(&spectrum, &expected);

    let ones = LevelFunction::new(vec![Rational::from(1); reduced.r()]);
    let constants_eigenvalue_one = km.apply(&ones)? == ones;
    let mut kspace_eigenvalue = true;
    for g in super::kspace_basis(&reduced).unwrap_or_default() {
        let want: Vec<Rational> = g.values().iter().map(|v| v * &minus).collect();
        kspace_eigenvalue &= km.apply(&g)?.values() == want.as_slice();
    }
    let self_adjoint_residual = km.self_adjoint_residual();
    let brute_force_form = match reduced.cardinality_u64() {
        Some(c) if c <= form_budget => {
            let g = Multislice::new(&reduced, form_budget)?;
            Some(km.matches_form(&k_quadratic_form(&g)?))
        }
        _ => None,
    };
    let pass = spectrum_matches
        && constants_eigenvalue_one
        && kspace_eigenvalue
        && self_adjoint_residual == Rational::from(0)
        && brute_force_form != Some(false);
    Ok(KAudit {
        composition: reduced,
        spectrum,
        spectrum_matches,
        constants_eigenvalue_one,
        kspace_eigenvalue,
        self_adjoint_residual,
        brute_force_form,
        pass,
    })
}

fn m_matrix(n: usize) -> DenseMatrix<Rational> {
    DenseMatrix::from_fn(n, n, |i, j| Rational::from((i != j) as i64))
}

/// Exact spectrum of `M`, the all-ones matrix minus the identity.
pub fn m_spectrum(n: usize, limits: &Limits) -> Result<Spectrum> {
    require_n(n, 2)?;
    let candidates = vec![Rational::from(-1), Rational::from(n as i64 - 1)];
    full_spectrum(&m_matrix(n), SpectrumSource::M, &Arithmetic::Exact { candidates }, limits)
}

/// Exact spectrum of `M ⊗ K` over the candidates `{−1, 1/(N−1), N−1}`.
pub fn mk_tensor_spectrum(k: &Composition, limits: &Limits) -> Result<Spectrum> {
    let reduced = k.reduce().composition;
    let n = reduced.n();
    require_n(n, 3)?;
    let t = m_matrix(n).kron(k_matrix(&reduced)?.entries());
    let candidates = vec![Rational::from(-1), Rational::new(1, n as i64 - 1), Rational::from(n as i64 - 1)];
    full_spectrum(&t, SpectrumSource::MTensorK, &Arithmetic::Exact { candidates }, limits)
}

/// Exact and floating spectra of `M ⊗ K` against the predicted multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TensorAudit {
    pub composition: Composition,
    pub exact: Spectrum,
    /// Spectrum of `M ⊗ ν^{1/2} K ν^{-1/2}`, which is symmetric and similar.
    pub floating: Spectrum,
    pub expected: Vec<(Rational, usize)>,
    pub pass: bool,
}

pub fn mk_tensor_audit(k: &Composition, limits: &Limits) -> Result<TensorAudit> {
    let reduced = k.reduce().composition;
    let n = reduced.n();
    let r = reduced.r();
    let exact = mk_tensor_spectrum(&reduced, limits)?;
    let km = k_matrix(&reduced)?;
    let nu: Vec<f64> = reduced.nu().iter().map(Scalar::to_f64).collect();
    let ksym = DenseMatrix::from_fn(r, r, |a, b| (nu[a] / nu[b]).sqrt() * km.entries().get(a, b).to_f64());
    let mf = DenseMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { 1.0 });
    let vals = crate::linalg::eigen::symmetric_eigenvalues(&mf.kron(&ksym))?;
    let floating = Spectrum::from_values(SpectrumSource::MTensorK, vals, limits.tolerance);
    let expected = vec![
        (Rational::from(-1), n + r - 2),
        (Rational::new(1, n as i64 - 1), (n - 1) * (r - 1)),
        (Rational::from(n as i64 - 1), 1),
    ];
    let pass = expectations_met(&exact, &expected) && expectations_met(&floating, &expected);
    Ok(TensorAudit { composition: reduced, exact, floating, expected, pass })
}
