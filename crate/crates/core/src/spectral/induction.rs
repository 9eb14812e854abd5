use serde::Serialize;

use super::{gap_eigenbasis, p_spectrum, scaled_gap, GapValue};
use crate::composition::Composition;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::multislice::Multislice;
use crate::operators::p_operator;
use crate::scalar::{Rational, Scalar};

/// Scaled gap of one child slice `k^{(m)}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChildGap {
    pub level: usize,
    pub composition: Composition,
    /// `None` for a single-vertex child, whose gap is `+∞`.
    pub delta: Option<GapValue>,
}

/// Both sides of the inductive gap bounds for one composition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InductionAudit {
    pub composition: Composition,
    pub n: usize,
    pub delta: GapValue,
    pub children: Vec<ChildGap>,
    pub min_child_delta: GapValue,
    /// `N(N−2)/(N−1)²`.
    pub factor: Rational,
    /// `N(N−2)/(N−1)² · min_m Δ_{N−1,k^{(m)}}`.
    pub bound: GapValue,
    pub bound_holds: bool,
    pub equality: bool,
    /// Second largest eigenvalue of `P`, when `P` fits the dense cap.
    pub lambda: Option<GapValue>,
    /// `min Δ_child · N/(N−1) · (1 − λ)`.
    pub lambda_bound: Option<GapValue>,
    pub lambda_bound_holds: Option<bool>,
    /// `⟨f, P f⟩ / ‖f‖²` for a gap eigenfunction `f`, exact.
    pub gap_function_p_quotient: Rational,
    /// `min Δ_child · N/(N−1) · (1 − ⟨f, P f⟩/‖f‖²)`.
    pub function_bound: GapValue,
    pub function_bound_holds: bool,
    pub pass: bool,
}

fn holds(lhs: &GapValue, rhs: &GapValue, tol: f64) -> bool {
    match (&lhs.exact, &rhs.exact) {
        (Some(a), Some(b)) => a >= b,
        _ => lhs.value >= rhs.value - tol * rhs.value.abs().max(1.0),
    }
}

fn equal(lhs: &GapValue, rhs: &GapValue, tol: f64) -> bool {
    match (&lhs.exact, &rhs.exact) {
        (Some(a), Some(b)) => a == b,
        _ => (lhs.value - rhs.value).abs() <= tol * rhs.value.abs().max(1.0),
    }
}

/// Evaluates the inductive lower bound for `Δ_{N,k}` from the gaps of the
/// children `k^{(m)}`, together with its `P`-based refinements.
pub fn induction_audit(k: &Composition, limits: &Limits) -> Result<InductionAudit> {
    if !k.is_reduced() {
        return Err(Error::InvalidComposition(format!("{k} has an empty level")));
    }
    let n = k.n();
    if n < 3 {
        return Err(Error::TooFewParticles { required: 3, found: n });
    }
    if k.is_trivial() {
        return Err(Error::TrivialComposition(k.to_string()));
    }
    let tol = limits.tolerance;
    let delta = scaled_gap(k, limits)?;

    let mut children = Vec::with_capacity(k.r());
    for m in 0..k.r() {
        let child = k.decrement(m)?;
        let d = if child.reduce().composition.is_trivial() { None } else { Some(scaled_gap(&child, limits)?) };
        children.push(ChildGap { level: m, composition: child, delta: d });
    }
    let min_child_delta = children
        .iter()
        .filter_map(|c| c.delta.clone())
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .ok_or_else(|| Error::TrivialComposition(k.to_string()))?;

    let n_i = n as i64;
    let factor = Rational::new(n_i * (n_i - 2), (n_i - 1) * (n_i - 1));
    let bound = min_child_delta.scaled(&factor);
    let bound_holds = holds(&delta, &bound, tol);
    let equality = equal(&delta, &bound, tol);

    let ratio = Rational::new(n_i, n_i - 1);
    let g = Multislice::new(k, limits.enumeration_budget)?;
    let lambda = if g.len() <= limits.dense_cap {
        let s = p_spectrum(&g, limits)?;
        s.second_largest().map(|e| GapValue { value: e.value, exact: e.exact.clone() })
    } else {
        None
    };
    let lambda_bound = lambda.as_ref().map(|l| match &l.exact {
        Some(e) => min_child_delta.scaled(&(&ratio * &(Rational::from(1) - e))),
        None => GapValue::from_f64(min_child_delta.value * ratio.to_f64() * (1.0 - l.value), tol),
    });
    let lambda_bound_holds = lambda_bound.as_ref().map(|b| holds(&delta, b, tol));

    let basis = gap_eigenbasis(&g)?;
    let f = &basis.members()[0].function;
    let pf = p_operator(&g, f)?;
    let gap_function_p_quotient = f.inner_mu(&pf)? / f.norm_sq_mu();
    let function_bound = min_child_delta.scaled(&(&ratio * &(Rational::from(1) - &gap_function_p_quotient)));
    let function_bound_holds = holds(&delta, &function_bound, tol);

    let pass = bound_holds && lambda_bound_holds != Some(false) && function_bound_holds;
    Ok(InductionAudit {
        composition: k.clone(),
        n,
        delta,
        children,
        min_child_delta,
        factor,
        bound,
        bound_holds,
        equality,
        lambda,
        lambda_bound,
        lambda_bound_holds,
        gap_function_p_quotient,
        function_bound,
        function_bound_holds,
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
    fn base_example() {
        let a = induction_audit(&k(&[1, 1, 1]), &Limits::default()).unwrap();
        assert_eq!(a.delta.exact, Some(Rational::from(3)));
        assert_eq!(a.min_child_delta.exact, Some(Rational::from(4)));
        assert_eq!(a.bound.exact, Some(Rational::from(3)));
        assert!(a.pass && a.equality);
        assert_eq!(a.gap_function_p_quotient, Rational::new(1, 2));
    }

    #[test]
    fn four_particle_examples() {
        let a = induction_audit(&k(&[2, 1, 1]), &Limits::default()).unwrap();
        assert_eq!(a.delta.exact, Some(Rational::new(8, 3)));
        assert_eq!(a.bound.exact, Some(Rational::new(8, 3)));
        assert!(a.pass && a.equality);
        let b = induction_audit(&k(&[2, 2]), &Limits::default()).unwrap();
        assert_eq!(b.min_child_delta.exact, Some(Rational::from(3)));
        assert!(b.pass && b.equality);
    }

    #[test]
    fn trivial_children_are_skipped() {
        // (1,2): removing the single particle leaves the one-vertex slice (0,2).
        let a = induction_audit(&k(&[1, 2]), &Limits::default()).unwrap();
        assert!(a.children[0].delta.is_none());
        assert!(a.pass);
    }

    #[test]
    fn preconditions() {
        let limits = Limits::default();
        assert!(induction_audit(&k(&[2, 0, 1]), &limits).is_err());
        assert!(induction_audit(&k(&[1, 1]), &limits).is_err());
        assert!(induction_audit(&k(&[3]), &limits).is_err());
    }
}
