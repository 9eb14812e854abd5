use num_bigint::BigInt;

use crate::composition::Composition;
use crate::error::{Error, Result};
use crate::scalar::Rational;
use crate::vertex::{self, Vertex};

/// `T_ℓ` restricted to `V_{N−1,k^{(m)}}`: inserts level `m` at position `ℓ`.
///
/// Returns, for each rank of `k^{(m)}`, the rank of its image in `V_{N,k}`.
pub fn insertion_map(k: &Composition, position: usize, level: usize, budget: u64) -> Result<Vec<usize>> {
    if position >= k.n() {
        return Err(Error::PositionOutOfRange { position, n: k.n() });
    }
    let child = k.decrement(level)?;
    vertex::check_budget(k, budget)?;
    vertex::enumerate(&child, budget)?
        .map(|x: Vertex| Ok(vertex::rank(&x.insert_at(position, level)?, k)?.0 as usize))
        .collect()
}

/// Checks `μ_{N,k}(x) = (k_m/N) μ_{N−1,k^{(m)}}(T_ℓ^{-1} x)` for every occupied
/// level `m`, i.e. `1/|V_{N,k}| = (k_m/N) / |V_{N−1,k^{(m)}}|`.
pub fn measure_decomposition_check(k: &Composition) -> Result<bool> {
    let n = k.n();
    if n < 2 {
        return Err(Error::TooFewParticles { required: 2, found: n });
    }
    let mu = k.mu();
    for (m, &km) in k.counts().iter().enumerate() {
        if km == 0 {
            continue;
        }
        let child: BigInt = k.decrement(m)?.cardinality().into();
        let rhs = Rational::new(km as i64, n as i64) * Rational::from_bigint_ratio(1.into(), child);
        if rhs != mu {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(v: &[usize]) -> Composition {
        Composition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn insertion_partitions_the_slice() {
        for c in [k(&[1, 1]), k(&[2, 1, 1]), k(&[3, 2]), k(&[2, 0, 2])] {
            let len = c.cardinality_u64().unwrap() as usize;
            for l in 0..c.n() {
                let mut hit = vec![0u8; len];
                let mut total = 0;
                for (m, &km) in c.counts().iter().enumerate() {
                    if km == 0 {
                        assert!(insertion_map(&c, l, m, 1000).is_err());
                        continue;
                    }
                    let img = insertion_map(&c, l, m, 1000).unwrap();
                    total += img.len();
                    for r in img {
                        hit[r] += 1;
                        assert_eq!(vertex::unrank(vertex::VertexIndex(r as u64), &c).unwrap().level(l), m);
                    }
                }
                assert_eq!(total, len);
                assert!(hit.iter().all(|&h| h == 1));
            }
        }
    }

    #[test]
    fn first_insertion_example() {
        // Inserting level 0 at the front of (1) gives (0,1), rank 0 of (1,1).
        assert_eq!(insertion_map(&k(&[1, 1]), 0, 0, 10).unwrap(), vec![0]);
    }

    #[test]
    fn decomposition_holds() {
        for c in [k(&[1, 1]), k(&[2, 1, 1]), k(&[3, 2]), k(&[2, 0, 3, 1])] {
            assert!(measure_decomposition_check(&c).unwrap(), "{c}");
        }
        assert!(measure_decomposition_check(&k(&[1])).is_err());
    }
}
