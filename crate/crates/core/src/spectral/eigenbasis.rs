use serde::Serialize;

use crate::composition::Composition;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::linalg::exact::vector_family_rank;
use crate::multislice::Multislice;
use crate::operators::{apply_laplacian, LevelFunction, VertexFunction};
use crate::scalar::{Rational, Scalar, ScalarKind};

/// Basis `g_1, ..., g_{r_eff−1}` of the K-space, `g_j = 1[level a_j] − k_{a_j}/N`
/// where `a_0 < a_1 < ...` are the occupied levels.
pub fn kspace_basis(k: &Composition) -> Result<Vec<LevelFunction<Rational>>> {
    let active: Vec<usize> = (0..k.r()).filter(|&m| k.counts()[m] > 0).collect();
    if active.len() < 2 {
        return Err(Error::TrivialComposition(k.to_string()));
    }
    let n = k.n() as i64;
    Ok(active[1..]
        .iter()
        .map(|&a| {
            let share = Rational::new(k.counts()[a] as i64, n);
            LevelFunction::new((0..k.r()).map(|m| Rational::from((m == a) as i64) - &share).collect())
        })
        .collect())
}

/// One member `f_{j,ℓ}(x) = g_j(x_ℓ)` of the gap eigenbasis.
#[derive(Debug, Clone)]
pub struct BasisMember {
    pub generator: usize,
    pub position: usize,
    pub function: VertexFunction<Rational>,
}

/// The functions `g_j(x_ℓ)` for `j < r_eff − 1` and `ℓ < N − 1`.
#[derive(Debug, Clone)]
pub struct GapEigenbasis {
    composition: Composition,
    generators: Vec<LevelFunction<Rational>>,
    members: Vec<BasisMember>,
}

/// Exact checks on a [`GapEigenbasis`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenbasisCertificate {
    pub members: usize,
    pub expected: usize,
    pub generators_in_kspace: bool,
    /// Every member satisfies `L f = N f` with zero rational residual.
    pub exact_eigenfunctions: bool,
    pub rank: usize,
    /// False when the rank is a modular lower bound short of full rank.
    pub rank_exact: bool,
    pub full_rank: bool,
    /// `Σ_{ℓ ≤ N} g(x_ℓ)` vanishes for each generator, which is why the
    /// positions stop at `N − 1`.
    pub all_positions_sum_vanishes: bool,
    /// A single-position function `g(x_1)` never vanishes identically.
    pub unequal_family_nonvanishing: bool,
    pub pass: bool,
}

pub fn gap_eigenbasis(g: &Multislice) -> Result<GapEigenbasis> {
    let k = g.composition();
    if k.is_trivial() {
        return Err(Error::TrivialComposition(k.to_string()));
    }
    let generators = kspace_basis(k)?;
    let mut members = Vec::with_capacity(generators.len() * (g.n() - 1));
    for (j, h) in generators.iter().enumerate() {
        for l in 0..g.n() - 1 {
            members.push(BasisMember { generator: j, position: l, function: VertexFunction::of_coordinate(g, h, l)? });
        }
    }
    Ok(GapEigenbasis { composition: k.clone(), generators, members })
}

impl GapEigenbasis {
    pub fn composition(&self) -> &Composition {
        &self.composition
    }

    pub fn generators(&self) -> &[LevelFunction<Rational>] {
        &self.generators
    }

    pub fn members(&self) -> &[BasisMember] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn certify(&self, g: &Multislice, limits: &Limits) -> Result<EigenbasisCertificate> {
        let k = &self.composition;
        let n = Rational::from(g.n() as i64);
        let expected = (k.n() - 1) * (k.r_eff() - 1);
        let generators_in_kspace = self.generators.iter().all(|h| h.in_kspace(k, 0.0));
        let mut exact_eigenfunctions = true;
        for m in &self.members {
            let lf = apply_laplacian(g, &m.function)?;
            exact_eigenfunctions &= lf == m.function.scale(&n);
        }
        let vectors: Vec<Vec<Rational>> = self.members.iter().map(|m| m.function.values().to_vec()).collect();
        let (rank, rank_exact) = vector_family_rank(&vectors, limits)?;
        let full_rank = rank_exact && rank == self.members.len();
        let zero = LevelFunction::new(vec![Rational::from(0); k.r()]);
        let mut all_positions_sum_vanishes = true;
        let mut unequal_family_nonvanishing = true;
        for h in &self.generators {
            all_positions_sum_vanishes &= nulllm_check(g, &vec![h.clone(); g.n()])?;
            let mut single = vec![zero.clone(); g.n()];
            single[0] = h.clone();
            unequal_family_nonvanishing &= !nulllm_check(g, &single)?;
        }
        let pass = generators_in_kspace
            && exact_eigenfunctions
            && full_rank
            && self.members.len() == expected
            && all_positions_sum_vanishes
            && unequal_family_nonvanishing;
        Ok(EigenbasisCertificate {
            members: self.members.len(),
            expected,
            generators_in_kspace,
            exact_eigenfunctions,
            rank,
            rank_exact,
            full_rank,
            all_positions_sum_vanishes,
            unequal_family_nonvanishing,
            pass,
        })
    }
}

/// Residual record for a claimed eigenpair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenpairCertificate {
    pub lambda: String,
    pub arithmetic: ScalarKind,
    /// `‖L f − λ f‖_∞`.
    pub residual: f64,
    /// `‖f‖_∞`.
    pub scale: f64,
    pub pass: bool,
}

/// Exact functions must have zero residual; floating ones must satisfy
/// `‖Lf − λf‖_∞ ≤ tol ‖f‖_∞`.
pub fn verify_eigenpair<S: Scalar + std::fmt::Display>(
    g: &Multislice,
    f: &VertexFunction<S>,
    lambda: &S,
    tol: f64,
) -> Result<EigenpairCertificate> {
    if f.is_zero(0.0) {
        return Err(Error::ZeroFunction);
    }
    let lf = apply_laplacian(g, f)?;
    let diff = lf.sub(&f.scale(lambda))?;
    let scale = f.max_abs();
    let residual = diff.max_abs();
    let pass = match S::KIND {
        ScalarKind::Exact => diff.is_zero(0.0),
        ScalarKind::Floating => residual <= tol * scale,
    };
    Ok(EigenpairCertificate { lambda: lambda.to_string(), arithmetic: S::KIND, residual, scale, pass })
}

/// Whether `Σ_ℓ g_ℓ(x_ℓ)` vanishes on every vertex, for K-space functions
/// `g_1, ..., g_N`.
pub fn nulllm_check(g: &Multislice, functions: &[LevelFunction<Rational>]) -> Result<bool> {
    let k = g.composition();
    if functions.len() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), found: functions.len() });
    }
    for (index, h) in functions.iter().enumerate() {
        if !h.in_kspace(k, 0.0) {
            return Err(Error::NotInKspace { index });
        }
    }
    Ok((0..g.len()).all(|v| {
        let x = g.levels(v);
        let s: Rational = functions.iter().zip(x).map(|(h, &m)| h.values()[m as usize].clone()).sum();
        s == Rational::from(0)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn graph(v: &[usize]) -> Multislice {
        Multislice::new(&Composition::new(v.to_vec()).unwrap(), 100_000).unwrap()
    }

    #[test]
    fn kspace_examples() {
        let k = Composition::new(vec![1, 1]).unwrap();
        let b = kspace_basis(&k).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].values(), &[Rational::new(-1, 2), Rational::new(1, 2)]);
        let k = Composition::new(vec![2, 1, 1]).unwrap();
        assert_eq!(kspace_basis(&k).unwrap().len(), 2);
        let k = Composition::new(vec![2, 0, 1]).unwrap();
        let b = kspace_basis(&k).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].values(), &[Rational::new(-1, 3), Rational::new(-1, 3), Rational::new(2, 3)]);
        assert!(b[0].in_kspace(&k, 0.0));
        assert!(kspace_basis(&Composition::new(vec![0, 3]).unwrap()).is_err());
    }

    #[test]
    fn eigenbasis_certifies() {
        for v in [&[1, 1][..], &[2, 1], &[1, 1, 1], &[2, 1, 1], &[2, 2], &[3, 0, 2], &[2, 2, 1]] {
            let g = graph(v);
            let basis = gap_eigenbasis(&g).unwrap();
            let cert = basis.certify(&g, &Limits::default()).unwrap();
            assert!(cert.pass, "{v:?}: {cert:?}");
            assert_eq!(cert.members, cert.expected);
        }
        assert!(gap_eigenbasis(&graph(&[3])).is_err());
        let g = graph(&[1, 1, 1]);
        assert_eq!(gap_eigenbasis(&g).unwrap().len(), 4);
    }

    #[test]
    fn modular_rank_path_certifies() {
        let g = graph(&[2, 2, 1]);
        let limits = Limits { bareiss_cap: 0, ..Limits::default() };
        let cert = gap_eigenbasis(&g).unwrap().certify(&g, &limits).unwrap();
        assert!(cert.pass && cert.rank_exact);
    }

    #[test]
    fn eigenpair_checks() {
        let g = graph(&[2, 1, 1]);
        let c = VertexFunction::constant(&g, Rational::from(1));
        assert!(verify_eigenpair(&g, &c, &Rational::from(0), 0.0).unwrap().pass);
        let basis = gap_eigenbasis(&g).unwrap();
        for m in basis.members() {
            let cert = verify_eigenpair(&g, &m.function, &Rational::from(4), 0.0).unwrap();
            assert!(cert.pass && cert.residual == 0.0);
            let fl = verify_eigenpair(&g, &m.function.to_f64(), &4.0, 1e-12).unwrap();
            assert!(fl.pass);
        }
        let f = VertexFunction::<Rational>::from_integers(&g, &(0..12).collect::<Vec<_>>()).unwrap();
        assert!(!verify_eigenpair(&g, &f, &Rational::from(4), 0.0).unwrap().pass);
        let z = VertexFunction::constant(&g, Rational::from(0));
        assert!(matches!(verify_eigenpair(&g, &z, &Rational::from(4), 0.0), Err(Error::ZeroFunction)));
    }

    #[test]
    fn nulllm_edge_cases() {
        let g = graph(&[2, 1]);
        let zero = LevelFunction::new(vec![Rational::from(0); 2]);
        assert!(nulllm_check(&g, &vec![zero.clone(); 3]).unwrap());
        assert!(matches!(nulllm_check(&g, &vec![zero.clone(); 2]), Err(Error::DimensionMismatch { .. })));
        let bad = LevelFunction::new(vec![Rational::from(1), Rational::from(1)]);
        assert!(matches!(nulllm_check(&g, &[zero.clone(), bad, zero]), Err(Error::NotInKspace { index: 1 })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn nulllm_vanishes_iff_all_equal(
            counts in prop::sample::select(vec![vec![2usize, 1], vec![1, 1, 1], vec![2, 1, 1], vec![2, 2], vec![1, 2, 1, 1]]),
            coeffs in prop::collection::vec(-3i64..4, 5 * 3),
            equal in any::<bool>(),
        ) {
            let g = graph(&counts);
            let k = g.composition().clone();
            let basis = kspace_basis(&k).unwrap();
            let n = g.n();
            // g_ℓ = Σ_j c_{ℓ j} basis_j; forced equal when `equal` holds.
            let make = |l: usize| {
                let row = if equal { 0 } else { l };
                let mut vals = vec![Rational::from(0); k.r()];
                for (j, b) in basis.iter().enumerate() {
                    let c = Rational::from(coeffs[(row * 3 + j) % coeffs.len()]);
                    for (v, bv) in vals.iter_mut().zip(b.values()) {
                        *v = &*v + &(&c * bv);
                    }
                }
                LevelFunction::new(vals)
            };
            let fs: Vec<_> = (0..n).map(make).collect();
            let all_equal = fs.windows(2).all(|w| w[0] == w[1]);
            prop_assert_eq!(nulllm_check(&g, &fs).unwrap(), all_equal);
        }
    }
}
