use rand::Rng;
use serde::Serialize;

use crate::composition::Composition;
use crate::error::{Error, Result};
use crate::multislice::Multislice;
use crate::scalar::{Rational, Scalar, ScalarKind};

/// A function on the vertices of one multislice, indexed by vertex rank.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexFunction<S> {
    composition: Composition,
    values: Vec<S>,
}

impl<S: Scalar> VertexFunction<S> {
    pub fn new(composition: &Composition, values: Vec<S>) -> Result<Self> {
        let card = composition.cardinality_u64().unwrap_or(u64::MAX);
        if values.len() as u64 != card {
            return Err(Error::DimensionMismatch { expected: card as usize, found: values.len() });
        }
        Ok(VertexFunction { composition: composition.clone(), values })
    }

    pub(crate) fn from_parts(composition: Composition, values: Vec<S>) -> Self {
        VertexFunction { composition, values }
    }

    pub fn constant(g: &Multislice, c: S) -> Self {
        Self::from_parts(g.composition().clone(), vec![c; g.len()])
    }

    /// Evaluates `f` on every level sequence.
    pub fn from_fn(g: &Multislice, mut f: impl FnMut(&[u8]) -> S) -> Self {
        Self::from_parts(g.composition().clone(), (0..g.len()).map(|v| f(g.levels(v))).collect())
    }

    /// `x ↦ h(x_ℓ)`.
    pub fn of_coordinate(g: &Multislice, h: &LevelFunction<S>, position: usize) -> Result<Self> {
        if position >= g.n() {
            return Err(Error::PositionOutOfRange { position, n: g.n() });
        }
        h.check_levels(g.composition())?;
        Ok(Self::from_fn(g, |x| h.values[x[position] as usize].clone()))
    }

    /// Random rational-valued function with numerators in `[-20, 20]` and
    /// denominators in `[1, 6]`, converted to `S`.
    pub fn random<R: Rng>(g: &Multislice, rng: &mut R) -> Self {
        Self::from_fn(g, |_| S::ratio(rng.random_range(-20..=20), rng.random_range(1..=6)))
    }

    pub fn composition(&self) -> &Composition {
        &self.composition
    }

    pub fn kind(&self) -> ScalarKind {
        S::KIND
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn into_values(self) -> Vec<S> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub(crate) fn check(&self, g: &Multislice) -> Result<()> {
        if self.values.len() != g.len() || &self.composition != g.composition() {
            return Err(Error::DimensionMismatch { expected: g.len(), found: self.values.len() });
        }
        Ok(())
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.values.iter().all(|v| v.is_negligible(tol))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max)
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Result<Self> {
        if self.values.len() != other.values.len() {
            return Err(Error::DimensionMismatch { expected: self.values.len(), found: other.values.len() });
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect();
        Ok(Self::from_parts(self.composition.clone(), values))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn scale(&self, c: &S) -> Self {
        let values = self.values.iter().map(|v| v.clone() * c.clone()).collect();
        Self::from_parts(self.composition.clone(), values)
    }

    /// `Σ_x f(x) h(x) μ(x)` with the uniform weight `μ = 1/|V|`.
    pub fn inner_mu(&self, other: &Self) -> Result<S> {
        if self.values.len() != other.values.len() {
            return Err(Error::DimensionMismatch { expected: self.values.len(), found: other.values.len() });
        }
        let sum = self
            .values
            .iter()
            .zip(&other.values)
            .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
        Ok(sum / S::from_i64(self.values.len() as i64))
    }

    pub fn norm_sq_mu(&self) -> S {
        self.inner_mu(self).expect("same length")
    }

    pub fn to_f64(&self) -> VertexFunction<f64> {
        VertexFunction::from_parts(self.composition.clone(), self.values.iter().map(Scalar::to_f64).collect())
    }
}

impl VertexFunction<Rational> {
    pub fn from_integers(g: &Multislice, values: &[i64]) -> Result<Self> {
        Self::new(g.composition(), values.iter().map(|&v| Rational::from(v)).collect())
    }
}

/// A function of the level index, `g(e_m)` for `m < r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelFunction<S> {
    values: Vec<S>,
}

impl<S: Scalar> LevelFunction<S> {
    pub fn new(values: Vec<S>) -> Self {
        LevelFunction { values }
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub(crate) fn check_levels(&self, k: &Composition) -> Result<()> {
        if self.values.len() != k.r() {
            return Err(Error::DimensionMismatch { expected: k.r(), found: self.values.len() });
        }
        Ok(())
    }

    /// `Σ_m k_m g(e_m)`.
    pub fn weighted_sum(&self, k: &Composition) -> Result<S> {
        self.check_levels(k)?;
        Ok(k.counts()
            .iter()
            .zip(&self.values)
            .fold(S::zero(), |acc, (&c, v)| acc + S::from_i64(c as i64) * v.clone()))
    }

    /// Membership in the K-space: `Σ_m k_m g(e_m) = 0`.
    pub fn in_kspace(&self, k: &Composition, tol: f64) -> bool {
        self.weighted_sum(k).map(|s| s.is_negligible(tol)).unwrap_or(false)
    }
}

/// The uniform vertex measure and the level occupation measure of a slice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Measures {
    /// `μ_{N,k}(x) = 1/|V_{N,k}|`.
    pub mu: Rational,
    /// `ν_{N,k}(m) = k_m / N`.
    pub nu: Vec<Rational>,
}

impl Measures {
    pub fn of(k: &Composition) -> Self {
        Measures { mu: k.mu(), nu: k.nu() }
    }

    /// Both measures have total mass one.
    pub fn is_normalized(&self, k: &Composition) -> bool {
        let total_mu = Rational::from_bigint_ratio(k.cardinality().into(), 1.into()) * &self.mu;
        let total_nu: Rational = self.nu.iter().cloned().sum();
        total_mu == Rational::from(1) && total_nu == Rational::from(1)
    }
}
