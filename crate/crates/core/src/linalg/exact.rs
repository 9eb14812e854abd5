//! Exact rank and nullity.
//!
//! Two independent routes:
//!
//! * fraction-free (Bareiss) elimination over big integers, exact over `Q`;
//! * Gaussian elimination over `F_p`. For an integer matrix `rank_p <= rank_Q`,
//!   so the modular nullity is an upper bound on the rational nullity and a
//!   full modular rank certifies full rational rank.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::DenseMatrix;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::scalar::Rational;

/// Primes below 2^31, so products of two residues fit in a `u64`.
pub const PRIMES: [u64; 3] = [2_147_483_647, 2_147_483_629, 2_147_483_587];

/// Which elimination produced a rank or nullity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EliminationMethod {
    Bareiss,
    Modular,
}

/// Nullspace dimension of an integer or rational matrix.
///
/// When `exact` is false the value is a nullity over `F_p`, which bounds the
/// rational nullity from above.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Nullity {
    pub dimension: usize,
    pub exact: bool,
    pub method: EliminationMethod,
}

/// Rank of an integer matrix by fraction-free elimination.
pub fn bareiss_rank(mut a: Vec<Vec<BigInt>>) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut prev = BigInt::from(1);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let (top, bottom) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let pivot = pivot_row[c].clone();
        for row in bottom.iter_mut() {
            let factor = std::mem::take(&mut row[c]);
            for j in c + 1..cols {
                let v = &pivot * &row[j] - &factor * &pivot_row[j];
                // Sylvester's identity makes this division exact.
                let (q, rem) = v.div_rem(&prev);
                debug_assert!(rem.is_zero(), "inexact Bareiss division");
                row[j] = q;
            }
        }
        prev = pivot;
        r += 1;
    }
    r
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Rank over `F_p` of a row-major matrix of residues in `[0, p)`.
pub fn modular_rank(mut a: Vec<u64>, rows: usize, cols: usize, p: u64) -> usize {
    debug_assert_eq!(a.len(), rows * cols);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| a[i * cols + c] != 0) else {
            continue;
        };
        if piv != r {
            for j in c..cols {
                a.swap(r * cols + j, piv * cols + j);
            }
        }
        let inv = pow_mod(a[r * cols + c], p - 2, p);
        for j in c..cols {
            a[r * cols + j] = a[r * cols + j] * inv % p;
        }
        let (top, bottom) = a.split_at_mut((r + 1) * cols);
        let pivot_row = &top[r * cols..];
        for row in bottom.chunks_exact_mut(cols) {
            let f = row[c];
            if f == 0 {
                continue;
            }
            let neg = p - f;
            for j in c..cols {
                row[j] = (row[j] + neg * pivot_row[j]) % p;
            }
        }
        r += 1;
    }
    r
}

pub(crate) fn residue_i64(v: i64, p: u64) -> u64 {
    v.rem_euclid(p as i64) as u64
}

fn residue_big(v: &BigInt, p: u64) -> u64 {
    v.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits")
}

/// Rank of an integer matrix. Small matrices use Bareiss; larger ones report
/// the largest modular rank over the first `limits.modular_primes` entries of
/// [`PRIMES`], a lower bound on the rational rank.
pub fn integer_rank(rows: Vec<Vec<BigInt>>, limits: &Limits) -> Result<(usize, bool)> {
    let n_rows = rows.len();
    let n_cols = rows.first().map_or(0, Vec::len);
    if n_rows.min(n_cols) > limits.exact_cap {
        return Err(Error::DenseCapExceeded { dimension: n_rows.min(n_cols), cap: limits.exact_cap });
    }
    if n_rows.max(n_cols) <= limits.bareiss_cap {
        return Ok((bareiss_rank(rows), true));
    }
    let full = n_rows.min(n_cols);
    let mut best = 0;
    for &p in PRIMES.iter().take(limits.modular_primes.max(1)) {
        let data: Vec<u64> = rows.iter().flat_map(|row| row.iter().map(|v| residue_big(v, p))).collect();
        best = best.max(modular_rank(data, n_rows, n_cols, p));
        if best == full {
            break;
        }
    }
    Ok((best, false))
}

/// Nullity of a square integer matrix given row-major as `i64`.
///
/// The modular route keeps the smallest nullity over the primes it tries,
/// which is still only an upper bound on the rational one.
pub fn integer_nullity(data: &[i64], dim: usize, limits: &Limits) -> Result<Nullity> {
    if dim > limits.exact_cap {
        return Err(Error::DenseCapExceeded { dimension: dim, cap: limits.exact_cap });
    }
    if dim <= limits.bareiss_cap {
        let rows = data.chunks(dim.max(1)).map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
        let rank = if dim == 0 { 0 } else { bareiss_rank(rows) };
        return Ok(Nullity { dimension: dim - rank, exact: true, method: EliminationMethod::Bareiss });
    }
    let mut best = dim;
    for &p in PRIMES.iter().take(limits.modular_primes.max(1)) {
        let residues = data.iter().map(|&v| residue_i64(v, p)).collect();
        best = best.min(dim - modular_rank(residues, dim, dim, p));
        if best == 0 {
            break;
        }
    }
    Ok(Nullity { dimension: best, exact: best == 0, method: EliminationMethod::Modular })
}

/// Dimension of the nullspace of `A - λI` for a rational square matrix.
pub fn exact_nullity(a: &DenseMatrix<Rational>, lambda: &Rational, limits: &Limits) -> Result<Nullity> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
    }
    let dim = a.rows();
    let rows = a.shifted(lambda).to_integer_rows();
    let (rank, exact) = integer_rank(rows, limits)?;
    let dimension = dim - rank;
    Ok(Nullity {
        dimension,
        exact: exact || dimension == 0,
        method: if exact { EliminationMethod::Bareiss } else { EliminationMethod::Modular },
    })
}

/// Rank of a family of rational vectors. The flag is true when the value is
/// exact; otherwise it is a lower bound (and exact whenever it equals the
/// family size).
pub fn vector_family_rank(vectors: &[Vec<Rational>], limits: &Limits) -> Result<(usize, bool)> {
    if vectors.is_empty() {
        return Ok((0, true));
    }
    let m = DenseMatrix::from_rows(vectors.to_vec())?;
    let (rank, exact) = integer_rank(m.to_integer_rows(), limits)?;
    Ok((rank, exact || rank == vectors.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn is_prime(p: u64) -> bool {
        p > 1 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
    }

    #[test]
    fn primes_are_prime() {
        for p in PRIMES {
            assert!(is_prime(p), "{p}");
            assert!(p < 1 << 31);
        }
    }

    // Plain Gaussian elimination over Q, kept independent of both routes.
    fn rational_rank(rows: &[Vec<i64>]) -> usize {
        let mut a: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|&v| Rational::from(v)).collect()).collect();
        let (n, m) = (a.len(), a.first().map_or(0, Vec::len));
        let mut r = 0;
        for c in 0..m {
            let Some(p) = (r..n).find(|&i| !a[i][c].is_zero()) else { continue };
            a.swap(r, p);
            for i in r + 1..n {
                let f = &a[i][c] / &a[r][c];
                for j in c..m {
                    let v = &a[i][j] - &(&f * &a[r][j]);
                    a[i][j] = v;
                }
            }
            r += 1;
            if r == n {
                break;
            }
        }
        r
    }

    #[test]
    fn small_examples() {
        let rows = vec![vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]];
        let big: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
        assert_eq!(bareiss_rank(big), 2);
        let flat: Vec<i64> = rows.concat();
        let n = integer_nullity(&flat, 3, &Limits::default()).unwrap();
        assert_eq!(n, Nullity { dimension: 1, exact: true, method: EliminationMethod::Bareiss });
        let forced = Limits { bareiss_cap: 0, ..Limits::default() };
        let m = integer_nullity(&flat, 3, &forced).unwrap();
        assert_eq!(m.dimension, 1);
        assert_eq!(m.method, EliminationMethod::Modular);
    }

    #[test]
    fn rational_shift_nullity() {
        // [[0,1],[1,0]] has eigenvalues ±1.
        let a = DenseMatrix::from_rows(vec![
            vec![Rational::from(0), Rational::from(1)],
            vec![Rational::from(1), Rational::from(0)],
        ])
        .unwrap();
        let limits = Limits::default();
        assert_eq!(exact_nullity(&a, &Rational::from(1), &limits).unwrap().dimension, 1);
        assert_eq!(exact_nullity(&a, &Rational::from(-1), &limits).unwrap().dimension, 1);
        assert_eq!(exact_nullity(&a, &Rational::new(1, 2), &limits).unwrap().dimension, 0);
    }

    #[test]
    fn cap_is_enforced() {
        let limits = Limits { exact_cap: 2, ..Limits::default() };
        assert!(matches!(integer_nullity(&[0; 9], 3, &limits), Err(Error::DenseCapExceeded { .. })));
    }

    proptest! {
        #[test]
        fn bareiss_modular_and_rational_agree(
            rows in 1usize..7, cols in 1usize..7, seed in prop::collection::vec(-3i64..4, 49), deficiency in 0usize..3
        ) {
            let mut m: Vec<Vec<i64>> = (0..rows).map(|i| (0..cols).map(|j| seed[i * 7 + j]).collect()).collect();
            // Force dependent rows now and then.
            for d in 0..deficiency.min(rows.saturating_sub(1)) {
                let src = m[0].clone();
                let other = m[1 % rows].clone();
                m[rows - 1 - d] = src.iter().zip(&other).map(|(a, b)| 2 * a - b).collect();
            }
            let expected = rational_rank(&m);
            let big: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
            prop_assert_eq!(bareiss_rank(big), expected);
            let flat: Vec<u64> = m.iter().flatten().map(|&v| residue_i64(v, PRIMES[0])).collect();
            prop_assert_eq!(modular_rank(flat, rows, cols, PRIMES[0]), expected);
        }
    }
}
