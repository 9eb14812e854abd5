//! Level-merging surjections and the maps they induce on compositions,
//! vertices and functions.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::composition::Composition;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::multislice::Multislice;
use crate::operators::{apply_laplacian, VertexFunction};
use crate::scalar::{Rational, Scalar};
use crate::spectral::{gap_eigenbasis, laplacian_spectrum, verify_eigenpair, GapValue, Spectrum};
use crate::vertex::Vertex;

/// A surjection `φ` from `s` source levels onto `r` target levels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawMap")]
pub struct CoarseningMap {
    s: usize,
    r: usize,
    table: Vec<usize>,
}

#[derive(Deserialize)]
struct RawMap {
    s: usize,
    r: usize,
    table: Vec<usize>,
}

impl TryFrom<RawMap> for CoarseningMap {
    type Error = Error;

    fn try_from(raw: RawMap) -> Result<Self> {
        let map = CoarseningMap::with_target(raw.table, raw.r)?;
        if map.s != raw.s {
            return Err(Error::InvalidCoarsening(format!("s = {} but table has {} entries", raw.s, map.s)));
        }
        Ok(map)
    }
}

impl CoarseningMap {
    /// Builds `φ` from its table; `r` is one more than the largest entry.
    pub fn new(table: Vec<usize>) -> Result<Self> {
        let r = table.iter().max().map_or(0, |&m| m + 1);
        Self::with_target(table, r)
    }

    pub fn with_target(table: Vec<usize>, r: usize) -> Result<Self> {
        if table.is_empty() {
            return Err(Error::InvalidCoarsening("empty table".into()));
        }
        let mut hit = vec![false; r];
        for &m in &table {
            if m >= r {
                return Err(Error::InvalidCoarsening(format!("target {m} out of range for r = {r}")));
            }
            hit[m] = true;
        }
        if let Some(m) = hit.iter().position(|h| !h) {
            return Err(Error::InvalidCoarsening(format!("target level {m} is not hit")));
        }
        Ok(CoarseningMap { s: table.len(), r, table })
    }

    pub fn identity(s: usize) -> Result<Self> {
        Self::new((0..s).collect())
    }

    pub fn source_levels(&self) -> usize {
        self.s
    }

    pub fn target_levels(&self) -> usize {
        self.r
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, level: usize) -> Result<usize> {
        self.table.get(level).copied().ok_or(Error::LevelOutOfRange { level, r: self.s })
    }

    /// `s > r ≥ 2`.
    pub fn is_strict(&self) -> bool {
        self.s > self.r && self.r >= 2
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &CoarseningMap) -> Result<CoarseningMap> {
        if next.s != self.r {
            return Err(Error::InvalidCoarsening(format!("cannot follow r = {} with s = {}", self.r, next.s)));
        }
        Self::with_target(self.table.iter().map(|&m| next.table[m]).collect(), next.r)
    }
}

/// `φ(k)_m = Σ_{φ(n) = m} k_n`.
pub fn coarsen_composition(phi: &CoarseningMap, k: &Composition) -> Result<Composition> {
    if k.r() != phi.s {
        return Err(Error::DimensionMismatch { expected: phi.s, found: k.r() });
    }
    let mut counts = vec![0; phi.r];
    for (n, &c) in k.counts().iter().enumerate() {
        counts[phi.table[n]] += c;
    }
    Composition::new(counts)
}

/// Entrywise relabeling `(φ(x))_ℓ = φ(x_ℓ)`.
pub fn coarsen_vertex(phi: &CoarseningMap, x: &Vertex) -> Result<Vertex> {
    let levels = x.levels().iter().map(|&l| phi.apply(l as usize)).collect::<Result<Vec<_>>>()?;
    Vertex::new(levels)
}

/// Searches for `φ` with `φ(k) = k'`. Backtracking over the table with
/// partial sums bounded by `k'`, so the search is complete.
pub fn is_coarser(coarse: &Composition, fine: &Composition) -> Option<CoarseningMap> {
    if coarse.n() != fine.n() || coarse.r() > fine.r() {
        return None;
    }
    fn rec(i: usize, fine: &[usize], target: &[usize], sums: &mut [usize], table: &mut Vec<usize>) -> bool {
        if i == fine.len() {
            if sums != target {
                return false;
            }
            let mut hit = vec![false; target.len()];
            table.iter().for_each(|&m| hit[m] = true);
            return hit.iter().all(|&h| h);
        }
        for m in 0..target.len() {
            if sums[m] + fine[i] > target[m] {
                continue;
            }
            sums[m] += fine[i];
            table.push(m);
            if rec(i + 1, fine, target, sums, table) {
                return true;
            }
            table.pop();
            sums[m] -= fine[i];
        }
        false
    }
    let mut sums = vec![0; coarse.r()];
    let mut table = Vec::with_capacity(fine.r());
    rec(0, fine.counts(), coarse.counts(), &mut sums, &mut table).then(|| {
        CoarseningMap::with_target(table, coarse.r()).expect("search only returns surjections")
    })
}

/// A coarsening together with both enumerated multislices.
#[derive(Debug, Clone)]
pub struct CoarseningPair {
    map: CoarseningMap,
    fine: Multislice,
    coarse: Multislice,
    // Coarse rank of φ(x) for every fine vertex x.
    image: Vec<usize>,
}

impl CoarseningPair {
    pub fn new(map: CoarseningMap, fine: &Composition, limits: &Limits) -> Result<Self> {
        let coarse_k = coarsen_composition(&map, fine)?;
        let fine = Multislice::new(fine, limits.enumeration_budget)?;
        let coarse = Multislice::new(&coarse_k, limits.enumeration_budget)?;
        let image = (0..fine.len())
            .map(|v| coarse.rank_of(&coarsen_vertex(&map, &fine.vertex(v))?))
            .collect::<Result<Vec<_>>>()?;
        Ok(CoarseningPair { map, fine, coarse, image })
    }

    pub fn map(&self) -> &CoarseningMap {
        &self.map
    }

    pub fn fine(&self) -> &Multislice {
        &self.fine
    }

    pub fn coarse(&self) -> &Multislice {
        &self.coarse
    }

    /// True when every coarse vertex is the image of some fine vertex.
    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.coarse.len()];
        self.image.iter().for_each(|&w| hit[w] = true);
        hit.into_iter().all(|h| h)
    }

    /// `f ∘ φ` for `f` on the coarse slice.
    pub fn pull_back<S: Scalar>(&self, f: &VertexFunction<S>) -> Result<VertexFunction<S>> {
        if f.composition() != self.coarse.composition() {
            return Err(Error::DimensionMismatch { expected: self.coarse.len(), found: f.len() });
        }
        VertexFunction::new(self.fine.composition(), self.image.iter().map(|&w| f.values()[w].clone()).collect())
    }

    /// Checks `(L_{k'} f) ∘ φ = L_k (f ∘ φ)` exactly.
    pub fn intertwine_check(&self, f: &VertexFunction<Rational>) -> Result<bool> {
        let lhs = self.pull_back(&apply_laplacian(&self.coarse, f)?)?;
        let rhs = apply_laplacian(&self.fine, &self.pull_back(f)?)?;
        Ok(lhs == rhs)
    }

    /// Pulls every coarse gap eigenfunction back and checks `L_k (f∘φ) = N (f∘φ)`
    /// exactly. Vacuous when the coarse slice is trivial.
    pub fn eigenfunctions_lift(&self) -> Result<bool> {
        let reduced = self.coarse.composition().reduce().composition;
        if reduced.is_trivial() {
            return Ok(true);
        }
        let n = Rational::from(self.fine.n() as i64);
        let basis = gap_eigenbasis(&self.coarse)?;
        for member in basis.members() {
            let lifted = self.pull_back(&member.function)?;
            if !verify_eigenpair(&self.fine, &lifted, &n, 0.0)?.pass {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Outcome of comparing the two Laplacian spectra.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContainmentReport {
    pub fine: Composition,
    pub coarse: Composition,
    /// Coarse eigenvalues with no fine eigenvalue within tolerance.
    pub missing: Vec<f64>,
    pub contained: bool,
    /// `None` for a trivial slice, whose gap is `+∞`.
    pub fine_gamma: Option<GapValue>,
    pub coarse_gamma: Option<GapValue>,
    /// `Γ_{k'} ≥ Γ_k`.
    pub monotone: bool,
    pub pass: bool,
}

fn gamma_of(spectrum: &Spectrum, tol: f64) -> Option<GapValue> {
    spectrum.least_nonzero(tol).map(|e| GapValue { value: e.value, exact: e.exact.clone() })
}

fn compare(fine: &Composition, fine_s: &Spectrum, coarse: &Composition, coarse_s: &Spectrum, tol: f64) -> ContainmentReport {
    let missing: Vec<f64> =
        coarse_s.eigenvalues.iter().filter(|e| !fine_s.contains(e.value, tol)).map(|e| e.value).collect();
    let fine_gamma = gamma_of(fine_s, tol);
    let coarse_gamma = gamma_of(coarse_s, tol);
    let monotone = match (&fine_gamma, &coarse_gamma) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(f), Some(c)) => match (&f.exact, &c.exact) {
            (Some(a), Some(b)) => b >= a,
            _ => c.value >= f.value - tol * f.value.max(1.0),
        },
    };
    let contained = missing.is_empty();
    ContainmentReport {
        fine: fine.clone(),
        coarse: coarse.clone(),
        missing,
        contained,
        fine_gamma,
        coarse_gamma,
        monotone,
        pass: contained && monotone,
    }
}

/// Floating spectra of both slices; every coarse eigenvalue must appear in the
/// fine spectrum and `Γ_{k'} ≥ Γ_k`.
pub fn spectrum_containment(phi: &CoarseningMap, k: &Composition, limits: &Limits) -> Result<ContainmentReport> {
    let coarse = coarsen_composition(phi, k)?;
    let fine_s = laplacian_spectrum(&Multislice::new(k, limits.enumeration_budget)?, limits)?;
    let coarse_s = laplacian_spectrum(&Multislice::new(&coarse, limits.enumeration_budget)?, limits)?;
    Ok(compare(k, &fine_s, &coarse, &coarse_s, limits.tolerance))
}

/// Full audit of one coarsening.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoarseningAudit {
    pub map: CoarseningMap,
    pub fine: Composition,
    pub coarse: Composition,
    pub surjective: bool,
    pub samples: usize,
    /// Random rational functions for which intertwining held exactly.
    pub intertwined: usize,
    pub eigenfunctions_lift: bool,
    pub containment: ContainmentReport,
    pub pass: bool,
}

fn audit_with(
    pair: &CoarseningPair,
    containment: ContainmentReport,
    samples: usize,
    seed: u64,
) -> Result<CoarseningAudit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut intertwined = 0;
    for _ in 0..samples {
        let f = VertexFunction::<Rational>::random(pair.coarse(), &mut rng);
        intertwined += pair.intertwine_check(&f)? as usize;
    }
    let surjective = pair.is_surjective();
    let eigenfunctions_lift = pair.eigenfunctions_lift()?;
    let pass = surjective && intertwined == samples && eigenfunctions_lift && containment.pass;
    Ok(CoarseningAudit {
        map: pair.map().clone(),
        fine: pair.fine().composition().clone(),
        coarse: pair.coarse().composition().clone(),
        surjective,
        samples,
        intertwined,
        eigenfunctions_lift,
        containment,
        pass,
    })
}

/// Audits one map with `samples` random coarse functions drawn from `seed`.
pub fn coarsening_audit(
    phi: &CoarseningMap,
    k: &Composition,
    samples: usize,
    seed: u64,
    limits: &Limits,
) -> Result<CoarseningAudit> {
    let pair = CoarseningPair::new(phi.clone(), k, limits)?;
    let containment = spectrum_containment(phi, k, limits)?;
    audit_with(&pair, containment, samples, seed)
}

/// Every pair `(k, k')` of reduced compositions of `n` with `k'` strictly
/// coarser than `k` and `r(k') ≥ 2`, with one witness map each.
pub fn coarsening_pairs(n: usize) -> Vec<(Composition, CoarseningMap)> {
    let all = Composition::all_reduced(n);
    let mut out = Vec::new();
    for fine in &all {
        for coarse in all.iter().filter(|c| c.r() >= 2 && c.r() < fine.r()) {
            if let Some(phi) = is_coarser(coarse, fine) {
                out.push((fine.clone(), phi));
            }
        }
    }
    out
}

/// Audits every pair from [`coarsening_pairs`] for each `N` in `2..=n_max`.
pub fn audit_all_pairs(n_max: usize, samples: usize, seed: u64, limits: &Limits) -> Result<Vec<CoarseningAudit>> {
    audit_pairs((2..=n_max).flat_map(coarsening_pairs).collect(), samples, seed, limits)
}

/// Audits the given `(fine, φ)` pairs in parallel, in input order. Spectra
/// are computed once per composition and shared between pairs; pair `i` draws
/// its functions from `seed + i`.
pub fn audit_pairs(
    pairs: Vec<(Composition, CoarseningMap)>,
    samples: usize,
    seed: u64,
    limits: &Limits,
) -> Result<Vec<CoarseningAudit>> {
    let mut needed: Vec<Composition> = pairs
        .iter()
        .flat_map(|(k, phi)| [k.clone(), coarsen_composition(phi, k).expect("witness matches")])
        .collect();
    needed.sort();
    needed.dedup();
    let spectra: HashMap<Composition, Spectrum> = needed
        .into_par_iter()
        .map(|k| {
            let g = Multislice::new(&k, limits.enumeration_budget)?;
            Ok((k, laplacian_spectrum(&g, limits)?))
        })
        .collect::<Result<_>>()?;
    pairs
        .into_par_iter()
        .enumerate()
        .map(|(i, (k, phi))| {
            let coarse = coarsen_composition(&phi, &k)?;
            let containment = compare(&k, &spectra[&k], &coarse, &spectra[&coarse], limits.tolerance);
            let pair = CoarseningPair::new(phi, &k, limits)?;
            audit_with(&pair, containment, samples, seed.wrapping_add(i as u64))
        })
        .collect()
}
