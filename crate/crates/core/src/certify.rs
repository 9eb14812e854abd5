//! Per-composition certification suite.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::composition::{big_to_string, Composition};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::multislice::Multislice;
use crate::operators::{
    averaging_identity_residual, induction_identity_residual, shift_identity_residual, VertexFunction,
};
use crate::scalar::{Rational, Scalar, ScalarKind};
use crate::spectral::{
    certify_gap, certify_gap_floating, induction_audit, k_audit, mk_tensor_audit, p_audit, GapValue,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuiteOptions {
    pub arithmetic: ScalarKind,
    /// Random functions per slice for the Dirichlet-form identities.
    pub samples: usize,
    pub seed: u64,
    /// Slices up to this size get the brute-force check of the `K` form.
    pub form_budget: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { arithmetic: ScalarKind::Exact, samples: 10, seed: 0, form_budget: 10_000 }
    }
}

/// Largest residuals of the averaging, shift and induction identities over
/// random functions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub arithmetic: ScalarKind,
    pub samples: usize,
    pub averaging: f64,
    pub shift: f64,
    pub induction: f64,
    /// Samples with every residual exactly zero (exact) or within tolerance.
    pub clean_samples: usize,
    pub pass: bool,
}

fn identities_with<S: Scalar>(g: &Multislice, samples: usize, seed: u64, tol: f64) -> Result<IdentityCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut averaging, mut shift, mut induction) = (0.0f64, 0.0f64, 0.0f64);
    let mut clean_samples = 0;
    let occupied: Vec<usize> = (0..g.composition().r()).filter(|&m| g.composition().counts()[m] > 0).collect();
    for _ in 0..samples {
        let f = VertexFunction::<S>::random(g, &mut rng);
        let scale = f.norm_sq_mu().to_f64().max(1.0);
        let mut ok = true;
        let a = averaging_identity_residual(g, &f)?;
        ok &= a.is_negligible(tol * scale * g.len() as f64);
        averaging = averaging.max(a.to_f64().abs());
        for l in 0..g.n() {
            for &m in &occupied {
                let s = shift_identity_residual(g, &f, l, m)?;
                ok &= s.is_negligible(tol * scale);
                shift = shift.max(s.to_f64().abs());
            }
        }
        let i = induction_identity_residual(g, &f)?;
        ok &= i.is_negligible(tol * scale);
        induction = induction.max(i.to_f64().abs());
        clean_samples += ok as usize;
    }
    Ok(IdentityCheck {
        arithmetic: S::KIND,
        samples,
        averaging,
        shift,
        induction,
        clean_samples,
        pass: clean_samples == samples,
    })
}

/// Evaluates the identities on `samples` random functions (`N ≥ 3`).
pub fn identity_check(g: &Multislice, samples: usize, seed: u64, arithmetic: ScalarKind, tol: f64) -> Result<IdentityCheck> {
    match arithmetic {
        ScalarKind::Exact => identities_with::<Rational>(g, samples, seed, 0.0),
        ScalarKind::Floating => identities_with::<f64>(g, samples, seed, tol),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    SkippedTrivial,
    Error,
}

/// One named check with its full record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub name: String,
    pub pass: bool,
    pub detail: serde_json::Value,
}

impl Certificate {
    fn new<T: Serialize>(name: &str, pass: bool, detail: &T) -> Self {
        let detail = serde_json::to_value(detail).unwrap_or(serde_json::Value::Null);
        Certificate { name: name.to_string(), pass, detail }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorInfo {
    pub code: String,
    pub message: String,
}

impl From<&Error> for ErrorInfo {
    fn from(e: &Error) -> Self {
        ErrorInfo { code: e.code().to_string(), message: e.to_string() }
    }
}

/// Spectral report for one composition. Both normalizations of the gap are
/// reported together with the relation between them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompositionReport {
    pub composition: Composition,
    pub reduced: Composition,
    pub status: Status,
    pub n: usize,
    pub r_eff: usize,
    pub cardinality: String,
    pub degree: u64,
    /// `Γ`, least nonzero Laplacian eigenvalue.
    pub gap: Option<GapValue>,
    pub gap_multiplicity: Option<usize>,
    /// `Δ = 2Γ/(N−1)`.
    pub delta: Option<GapValue>,
    pub gap_relation: &'static str,
    pub certificates: Vec<Certificate>,
    pub error: Option<ErrorInfo>,
}

pub const GAP_RELATION: &str = "delta = 2 * gamma / (N - 1)";

fn run_suite(k: &Composition, limits: &Limits, opts: &SuiteOptions, report: &mut CompositionReport) -> Result<()> {
    let reduced = report.reduced.clone();
    let n = reduced.n();
    let gap = match opts.arithmetic {
        ScalarKind::Exact => certify_gap(k, limits)?,
        ScalarKind::Floating => certify_gap_floating(k, limits)?,
    };
    report.gap = Some(gap.gamma.clone());
    report.delta = Some(gap.delta.clone());
    report.gap_multiplicity = Some(gap.nullity.unwrap_or(gap.floating_multiplicity));
    report.certificates.push(Certificate::new("gap", gap.pass, &gap));

    let k_cert = k_audit(&reduced, limits, opts.form_budget)?;
    report.certificates.push(Certificate::new("k_operator", k_cert.pass, &k_cert));
    if n < 3 {
        return Ok(());
    }
    let tensor = mk_tensor_audit(&reduced, limits)?;
    report.certificates.push(Certificate::new("mk_tensor", tensor.pass, &tensor));
    let g = Multislice::new(&reduced, limits.enumeration_budget)?;
    if g.len() <= limits.dense_cap {
        let p = p_audit(&g, limits)?;
        report.certificates.push(Certificate::new("p_operator", p.pass, &p));
    }
    let ind = induction_audit(&reduced, limits)?;
    report.certificates.push(Certificate::new("induction", ind.pass, &ind));
    if opts.samples > 0 {
        let ids = identity_check(&g, opts.samples, opts.seed, opts.arithmetic, limits.tolerance)?;
        report.certificates.push(Certificate::new("identities", ids.pass, &ids));
    }
    Ok(())
}

/// Runs every applicable certificate. Trivial compositions are skipped and
/// errors are recorded in the report rather than returned.
pub fn verify(k: &Composition, limits: &Limits, opts: &SuiteOptions) -> CompositionReport {
    let reduced = k.reduce().composition;
    let mut report = CompositionReport {
        composition: k.clone(),
        reduced: reduced.clone(),
        status: Status::SkippedTrivial,
        n: k.n(),
        r_eff: reduced.r_eff(),
        cardinality: big_to_string(&k.cardinality()),
        degree: k.degree(),
        gap: None,
        gap_multiplicity: None,
        delta: None,
        gap_relation: GAP_RELATION,
        certificates: Vec::new(),
        error: None,
    };
    if reduced.is_trivial() {
        return report;
    }
    report.status = match run_suite(k, limits, opts, &mut report) {
        Ok(()) if report.certificates.iter().all(|c| c.pass) => Status::Pass,
        Ok(()) => Status::Fail,
        Err(e) => {
            report.error = Some(ErrorInfo::from(&e));
            Status::Error
        }
    };
    report
}

/// [`verify`] over many compositions in parallel; output follows the input
/// order.
pub fn verify_all(ks: &[Composition], limits: &Limits, opts: &SuiteOptions) -> Vec<CompositionReport> {
    ks.par_iter().map(|k| verify(k, limits, opts)).collect()
}
