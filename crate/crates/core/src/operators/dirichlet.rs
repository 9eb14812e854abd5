use super::{apply_laplacian, project_onto_coordinate, VertexFunction};
use crate::error::{Error, Result};
use crate::multislice::Multislice;
use crate::scalar::Scalar;

fn mu<S: Scalar>(g: &Multislice) -> S {
    S::ratio(1, g.len() as i64)
}

/// `Σ_{x} Σ_{i<j} (f(π_{ij} x) − f(x))²`, each edge seen from both ends.
fn swap_energy<S: Scalar>(g: &Multislice, f: &[S], skip: Option<usize>, only: Option<(usize, u8)>) -> S {
    let mut total = S::zero();
    for v in 0..g.len() {
        if let Some((pos, level)) = only {
            if g.levels(v)[pos] != level {
                continue;
            }
        }
        for (&w, &(i, j)) in g.neighbors(v).iter().zip(g.swaps(v)) {
            if skip.is_some_and(|l| i as usize == l || j as usize == l) {
                continue;
            }
            let d = f[w as usize].clone() - f[v].clone();
            total = total + d.clone() * d;
        }
    }
    total
}

/// `⟨f, L f⟩_μ`.
pub fn dirichlet_graph<S: Scalar>(g: &Multislice, f: &VertexFunction<S>) -> Result<S> {
    let lf = apply_laplacian(g, f)?;
    f.inner_mu(&lf)
}

/// `(1/2) Σ_x Σ_{i<j} (f(π_{ij} x) − f(x))² μ(x)`, the edge-sum form of
/// [`dirichlet_graph`].
pub fn dirichlet_graph_by_edges<S: Scalar>(g: &Multislice, f: &VertexFunction<S>) -> Result<S> {
    f.check(g)?;
    Ok(swap_energy(g, f.values(), None, None) * mu::<S>(g) / S::from_i64(2))
}

/// `(1/(N−1)) Σ_x Σ_{i<j} (f(π_{ij} x) − f(x))² μ(x)`, normalized so every
/// particle updates at unit rate. Equals `2/(N−1)` times [`dirichlet_graph`].
pub fn dirichlet_scaled<S: Scalar>(g: &Multislice, f: &VertexFunction<S>) -> Result<S> {
    f.check(g)?;
    if g.n() < 2 {
        return Err(Error::TooFewParticles { required: 2, found: g.n() });
    }
    Ok(swap_energy(g, f.values(), None, None) * mu::<S>(g) / S::from_i64(g.n() as i64 - 1))
}

/// `D^{ℓ,m}(f)`: swaps avoiding position `ℓ`, on the vertices with `x_ℓ = m`,
/// weighted by the uniform measure of the slice `k^{(m)}` and divided by `N − 2`.
pub fn dirichlet_restricted<S: Scalar>(g: &Multislice, f: &VertexFunction<S>, position: usize, level: usize) -> Result<S> {
    f.check(g)?;
    let k = g.composition();
    if g.n() < 3 {
        return Err(Error::TooFewParticles { required: 3, found: g.n() });
    }
    if position >= g.n() {
        return Err(Error::PositionOutOfRange { position, n: g.n() });
    }
    k.decrement(level)?;
    // |V_{N−1,k^{(m)}}| = |V_{N,k}| k_m / N.
    let child_len = g.len() as i64 * k.counts()[level] as i64 / g.n() as i64;
    let weight = S::ratio(1, child_len);
    let energy = swap_energy(g, f.values(), Some(position), Some((position, level as u8)));
    Ok(energy * weight / S::from_i64(g.n() as i64 - 2))
}

/// Per-vertex residual of the averaging identity
///
/// ```text
/// C(N,2)^{-1} Σ_{i<j} (Δ_{ij} f)² = (1/N) Σ_ℓ C(N−1,2)^{-1} Σ_{i<j; i,j≠ℓ} (Δ_{ij} f)²
/// ```
///
/// summed in absolute value over all vertices.
pub fn averaging_identity_residual<S: Scalar>(g: &Multislice, f: &VertexFunction<S>) -> Result<S> {
    f.check(g)?;
    let n = g.n();
    if n < 3 {
        return Err(Error::TooFewParticles { required: 3, found: n });
    }
    let vals = f.values();
    let c_n = S::from_i64((n * (n - 1) / 2) as i64);
    let c_n1 = S::from_i64(((n - 1) * (n - 2) / 2) as i64);
    let mut total = S::zero();
    let mut per_position = vec![S::zero(); n];
    for v in 0..g.len() {
        let mut full = S::zero();
        per_position.iter_mut().for_each(|p| *p = S::zero());
        for (&w, &(i, j)) in g.neighbors(v).iter().zip(g.swaps(v)) {
            let d = vals[w as usize].clone() - vals[v].clone();
            let d2 = d.clone() * d;
            full = full + d2.clone();
            for (l, p) in per_position.iter_mut().enumerate() {
                if l != i as usize && l != j as usize {
                    *p = p.clone() + d2.clone();
                }
            }
        }
        let lhs = full / c_n.clone();
        let rhs = per_position.iter().fold(S::zero(), |acc, p| acc + p.clone() / c_n1.clone())
            / S::from_i64(n as i64);
        total = total + (lhs - rhs).abs_value();
    }
    Ok(total)
}

/// `D^{ℓ,m}(f) − D^{ℓ,m}(f − P_ℓ f)`.
pub fn shift_identity_residual<S: Scalar>(g: &Multislice, f: &VertexFunction<S>, position: usize, level: usize) -> Result<S> {
    let centered = f.sub(&project_onto_coordinate(g, f, position)?)?;
    Ok(dirichlet_restricted(g, f, position, level)? - dirichlet_restricted(g, &centered, position, level)?)
}

/// `D(f) − (1/N) Σ_ℓ (N/(N−1)) Σ_m (k_m/N) D^{ℓ,m}(f − P_ℓ f)`, summing over
/// occupied levels only.
pub fn induction_identity_residual<S: Scalar>(g: &Multislice, f: &VertexFunction<S>) -> Result<S> {
    let n = g.n();
    if n < 3 {
        return Err(Error::TooFewParticles { required: 3, found: n });
    }
    let counts = g.composition().counts().to_vec();
    let mut rhs = S::zero();
    for l in 0..n {
        let centered = f.sub(&project_onto_coordinate(g, f, l)?)?;
        let mut inner = S::zero();
        for (m, &km) in counts.iter().enumerate() {
            if km == 0 {
                continue;
            }
            inner = inner + S::ratio(km as i64, n as i64) * dirichlet_restricted(g, &centered, l, m)?;
        }
        rhs = rhs + inner * S::ratio(n as i64, n as i64 - 1);
    }
    Ok(dirichlet_scaled(g, f)? - rhs / S::from_i64(n as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composition::Composition;
    use crate::operators::LevelFunction;
    use crate::scalar::Rational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn graph(v: &[usize]) -> Multislice {
        Multislice::new(&Composition::new(v.to_vec()).unwrap(), 100_000).unwrap()
    }

    #[test]
    fn two_vertex_values() {
        let g = graph(&[1, 1]);
        // Unit-norm antisymmetric function.
        let f = VertexFunction::from_integers(&g, &[1, -1]).unwrap();
        assert_eq!(f.norm_sq_mu(), Rational::from(1));
        assert_eq!(dirichlet_graph(&g, &f).unwrap(), Rational::from(2));
        assert_eq!(dirichlet_graph_by_edges(&g, &f).unwrap(), Rational::from(2));
        assert_eq!(dirichlet_scaled(&g, &f).unwrap(), Rational::from(4));
    }

    #[test]
    fn forms_agree_on_random_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for v in [&[2, 1][..], &[1, 1, 1], &[2, 1, 1], &[2, 2], &[3, 1, 1]] {
            let g = graph(v);
            let n = g.n() as i64;
            for _ in 0..5 {
                let f = VertexFunction::<Rational>::random(&g, &mut rng);
                let a = dirichlet_graph(&g, &f).unwrap();
                assert_eq!(a, dirichlet_graph_by_edges(&g, &f).unwrap());
                assert!(!a.is_negative());
                assert_eq!(dirichlet_scaled(&g, &f).unwrap(), a * Rational::new(2, n - 1));
            }
        }
    }

    #[test]
    fn constants_vanish() {
        let g = graph(&[2, 1, 1]);
        let c = VertexFunction::constant(&g, Rational::new(5, 2));
        assert_eq!(dirichlet_graph(&g, &c).unwrap(), Rational::from(0));
        assert_eq!(dirichlet_scaled(&g, &c).unwrap(), Rational::from(0));
        for l in 0..4 {
            for m in 0..3 {
                assert_eq!(dirichlet_restricted(&g, &c, l, m).unwrap(), Rational::from(0));
            }
        }
    }

    #[test]
    fn restricted_form_ignores_fixed_coordinate() {
        let g = graph(&[2, 1, 1]);
        let h = LevelFunction::new(vec![Rational::from(3), Rational::from(-1), Rational::new(1, 2)]);
        for l in 0..4 {
            let f = VertexFunction::of_coordinate(&g, &h, l).unwrap();
            for m in 0..3 {
                assert_eq!(dirichlet_restricted(&g, &f, l, m).unwrap(), Rational::from(0));
            }
        }
    }

    #[test]
    fn restricted_form_errors() {
        let g = graph(&[1, 1]);
        let f = VertexFunction::constant(&g, Rational::from(1));
        assert!(matches!(dirichlet_restricted(&g, &f, 0, 0), Err(Error::TooFewParticles { .. })));
        let g = graph(&[2, 0, 1]);
        let f = VertexFunction::constant(&g, Rational::from(1));
        assert!(matches!(dirichlet_restricted(&g, &f, 0, 1), Err(Error::EmptyLevel { .. })));
    }

    #[test]
    fn identities_hold_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for v in [&[1, 1, 1][..], &[2, 1, 1], &[2, 2], &[3, 0, 1], &[2, 2, 1]] {
            let g = graph(v);
            for _ in 0..3 {
                let f = VertexFunction::<Rational>::random(&g, &mut rng);
                assert_eq!(averaging_identity_residual(&g, &f).unwrap(), Rational::from(0), "{v:?}");
                assert_eq!(induction_identity_residual(&g, &f).unwrap(), Rational::from(0), "{v:?}");
                for l in 0..g.n() {
                    for (m, &km) in v.iter().enumerate() {
                        if km > 0 {
                            assert_eq!(shift_identity_residual(&g, &f, l, m).unwrap(), Rational::from(0));
                        }
                    }
                }
            }
        }
    }
}
