use super::VertexFunction;
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::multislice::Multislice;
use crate::scalar::Scalar;

/// `(P_ℓ f)(x)`: the average of `f` over `{y : y_ℓ = x_ℓ}`, the orthogonal
/// projection onto functions of `x_ℓ` alone.
pub fn project_onto_coordinate<S: Scalar>(g: &Multislice, f: &VertexFunction<S>, position: usize) -> Result<VertexFunction<S>> {
    f.check(g)?;
    if position >= g.n() {
        return Err(Error::PositionOutOfRange { position, n: g.n() });
    }
    let r = g.composition().r();
    let mut sums = vec![S::zero(); r];
    let mut counts = vec![0i64; r];
    for (v, val) in f.values().iter().enumerate() {
        let m = g.levels(v)[position] as usize;
        sums[m] = sums[m].clone() + val.clone();
        counts[m] += 1;
    }
    let means: Vec<S> = sums
        .into_iter()
        .zip(&counts)
        .map(|(s, &c)| if c == 0 { S::zero() } else { s / S::from_i64(c) })
        .collect();
    let out = (0..g.len()).map(|v| means[g.levels(v)[position] as usize].clone()).collect();
    Ok(VertexFunction::from_parts(g.composition().clone(), out))
}

/// `P f = (1/N) Σ_ℓ P_ℓ f`.
pub fn p_operator<S: Scalar>(g: &Multislice, f: &VertexFunction<S>) -> Result<VertexFunction<S>> {
    f.check(g)?;
    let mut acc = vec![S::zero(); g.len()];
    for l in 0..g.n() {
        let p = project_onto_coordinate(g, f, l)?;
        for (a, b) in acc.iter_mut().zip(p.values()) {
            *a = a.clone() + b.clone();
        }
    }
    let n = S::from_i64(g.n() as i64);
    Ok(VertexFunction::from_parts(g.composition().clone(), acc.into_iter().map(|a| a / n.clone()).collect()))
}

/// Dense matrix of `P`: `P[x][y] = |V|^{-1} Σ_ℓ [x_ℓ = y_ℓ] / k_{x_ℓ}`.
pub fn p_matrix<S: Scalar>(g: &Multislice, cap: usize) -> Result<DenseMatrix<S>> {
    if g.len() > cap {
        return Err(Error::DenseCapExceeded { dimension: g.len(), cap });
    }
    let counts = g.composition().counts();
    let len = g.len() as i64;
    // Entries are (Σ over agreeing positions of L/k_m) / (L·|V|) with L = lcm(k).
    let lcm = counts.iter().filter(|&&c| c > 0).fold(1i64, |a, &c| num_integer::lcm(a, c as i64));
    Ok(DenseMatrix::from_fn(g.len(), g.len(), |i, j| {
        let (x, y) = (g.levels(i), g.levels(j));
        let num: i64 = x
            .iter()
            .zip(y)
            .filter(|(a, b)| a == b)
            .map(|(&a, _)| lcm / counts[a as usize] as i64)
            .sum();
        S::ratio(num, lcm * len)
    }))
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
    fn projection_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = graph(&[2, 1, 1]);
        let h = LevelFunction::new(vec![Rational::from(1), Rational::new(-3, 2), Rational::from(4)]);
        for l in 0..4 {
            let f = VertexFunction::<Rational>::random(&g, &mut rng);
            let h2 = VertexFunction::<Rational>::random(&g, &mut rng);
            let p = project_onto_coordinate(&g, &f, l).unwrap();
            assert_eq!(project_onto_coordinate(&g, &p, l).unwrap(), p);
            // Self-adjoint in the μ-weighted inner product.
            let ph = project_onto_coordinate(&g, &h2, l).unwrap();
            assert_eq!(p.inner_mu(&h2).unwrap(), f.inner_mu(&ph).unwrap());
            let coord = VertexFunction::of_coordinate(&g, &h, l).unwrap();
            assert_eq!(project_onto_coordinate(&g, &coord, l).unwrap(), coord);
        }
        let c = VertexFunction::constant(&g, Rational::from(3));
        assert_eq!(p_operator(&g, &c).unwrap(), c);
    }

    #[test]
    fn p_on_coordinate_kspace_functions() {
        for v in [&[2, 1, 1][..], &[1, 1, 1], &[3, 2]] {
            let g = graph(v);
            let k = g.composition();
            let n = g.n() as i64;
            // g = indicator(level 1) − k_1/N lies in the K-space.
            let h = LevelFunction::new(
                (0..k.r()).map(|m| Rational::from((m == 1) as i64) - Rational::new(k.counts()[1] as i64, n)).collect(),
            );
            assert!(h.in_kspace(k, 0.0));
            for l in 0..g.n() {
                let f = VertexFunction::of_coordinate(&g, &h, l).unwrap();
                assert_eq!(p_operator(&g, &f).unwrap(), f.scale(&Rational::new(1, n - 1)));
            }
        }
    }

    #[test]
    fn matrix_matches_operator() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for v in [&[2, 1][..], &[2, 2], &[2, 0, 1, 1]] {
            let g = graph(v);
            let m = p_matrix::<Rational>(&g, 1000).unwrap();
            assert!(m.is_symmetric(0.0));
            let f = VertexFunction::<Rational>::random(&g, &mut rng);
            assert_eq!(m.mul_vec(f.values()).unwrap(), p_operator(&g, &f).unwrap().into_values());
            let pf = p_operator(&g, &f).unwrap();
            let q = f.inner_mu(&pf).unwrap();
            assert!(!q.is_negative() && q <= f.norm_sq_mu());
        }
        assert!(p_matrix::<f64>(&graph(&[2, 2]), 3).is_err());
    }
}
