//! Compositions `k = (k_0, ..., k_{r-1})`, energy tables and level sets.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Rational;

/// Occupation numbers of the `r` levels; identifies one multislice.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Composition {
    counts: Vec<usize>,
}

impl Composition {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidComposition("no levels".into()));
        }
        if counts.len() > 256 {
            return Err(Error::InvalidComposition(format!(
                "{} levels, at most 256 supported",
                counts.len()
            )));
        }
        let n: usize = counts.iter().sum();
        if n == 0 {
            return Err(Error::InvalidComposition("total particle count is zero".into()));
        }
        if n > u16::MAX as usize {
            return Err(Error::InvalidComposition(format!("N = {n} too large")));
        }
        Ok(Composition { counts })
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Total particle count `N`.
    pub fn n(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Number of levels `r` (including empty ones).
    pub fn r(&self) -> usize {
        self.counts.len()
    }

    /// Number of occupied levels.
    pub fn r_eff(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// True when one level holds every particle; the slice is a single vertex.
    pub fn is_trivial(&self) -> bool {
        self.counts.iter().copied().max() == Some(self.n())
    }

    pub fn is_reduced(&self) -> bool {
        self.counts.iter().all(|&c| c > 0)
    }

    /// Drops empty levels. The old-to-new level map is increasing, so
    /// lexicographic vertex order (and therefore every rank) is preserved.
    pub fn reduce(&self) -> Reduction {
        let mut map = Vec::with_capacity(self.r());
        let mut counts = Vec::new();
        for &c in &self.counts {
            if c > 0 {
                map.push(Some(counts.len()));
                counts.push(c);
            } else {
                map.push(None);
            }
        }
        Reduction {
            composition: Composition { counts },
            level_map: map,
        }
    }

    /// `|V_{N,k}| = N! / (k_0! ... k_{r-1}!)`.
    pub fn cardinality(&self) -> BigUint {
        // Product of binomials avoids the full factorial.
        let mut total = BigUint::one();
        let mut placed = 0usize;
        for &c in &self.counts {
            for i in 1..=c {
                total *= placed + i;
                total /= i;
            }
            placed += c;
        }
        total
    }

    pub fn cardinality_u64(&self) -> Option<u64> {
        self.cardinality().to_u64()
    }

    /// `δ_{N,k} = Σ_{m<n} k_m k_n`, the common vertex degree.
    pub fn degree(&self) -> u64 {
        let n = self.n() as u64;
        let sq: u64 = self.counts.iter().map(|&c| (c as u64) * (c as u64)).sum();
        (n * n - sq) / 2
    }

    /// `k^{(m)}`: one fewer particle on level `m`.
    pub fn decrement(&self, level: usize) -> Result<Composition> {
        if level >= self.r() {
            return Err(Error::LevelOutOfRange { level, r: self.r() });
        }
        if self.counts[level] == 0 {
            return Err(Error::EmptyLevel { level });
        }
        if self.n() == 1 {
            return Err(Error::TooFewParticles { required: 2, found: 1 });
        }
        let mut counts = self.counts.clone();
        counts[level] -= 1;
        Ok(Composition { counts })
    }

    /// Uniform probability weight `μ_{N,k}` of each vertex.
    pub fn mu(&self) -> Rational {
        let card = self.cardinality();
        Rational::from_bigint_ratio(1.into(), card.into())
    }

    /// `ν_{N,k}(m) = k_m / N`.
    pub fn nu(&self) -> Vec<Rational> {
        let n = self.n() as i64;
        self.counts.iter().map(|&c| Rational::new(c as i64, n)).collect()
    }

    /// All compositions of `n` into positive parts, in lexicographic order.
    pub fn all_reduced(n: usize) -> Vec<Composition> {
        fn rec(rest: usize, cur: &mut Vec<usize>, out: &mut Vec<Composition>) {
            if rest == 0 {
                out.push(Composition { counts: cur.clone() });
                return;
            }
            for part in 1..=rest {
                cur.push(part);
                rec(rest - part, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if n > 0 {
            rec(n, &mut Vec::new(), &mut out);
        }
        out
    }

    /// All weak compositions of `n` into exactly `r` non-negative parts.
    pub fn all_weak(n: usize, r: usize) -> Vec<Composition> {
        fn rec(rest: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if slots == 1 {
                cur.push(rest);
                out.push(cur.clone());
                cur.pop();
                return;
            }
            for part in 0..=rest {
                cur.push(part);
                rec(rest - part, slots - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if n > 0 && r > 0 {
            rec(n, r, &mut Vec::new(), &mut out);
        }
        out.into_iter().map(|counts| Composition { counts }).collect()
    }
}

impl TryFrom<Vec<usize>> for Composition {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Composition::new(v)
    }
}

impl From<Composition> for Vec<usize> {
    fn from(c: Composition) -> Self {
        c.counts
    }
}

impl FromStr for Composition {
    type Err = Error;

    /// Comma-separated counts, e.g. `2,1,1`. Surrounding brackets are accepted.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
        let counts = trimmed
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidComposition(format!("malformed count {p:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Composition::new(counts)
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.counts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Result of [`Composition::reduce`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub composition: Composition,
    /// `level_map[old] = Some(new)` for occupied levels.
    pub level_map: Vec<Option<usize>>,
}

/// Optional energies `e_0, ..., e_{r-1}` of the levels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnergyTable {
    values: Vec<Rational>,
}

impl EnergyTable {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidComposition("energy table is empty".into()));
        }
        Ok(EnergyTable { values })
    }

    pub fn from_integers(values: &[i64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Rational::from(v)).collect())
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Checks `e_a + e_b = e_c + e_d ⇒ {a,b} = {c,d}` over all index pairs.
    pub fn non_degenerate(&self) -> bool {
        let r = self.values.len();
        for a in 0..r {
            for b in a..r {
                let s = &self.values[a] + &self.values[b];
                for c in 0..r {
                    for d in c..r {
                        if (a, b) != (c, d) && s == &self.values[c] + &self.values[d] {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// `Σ_m k_m e_m`, the energy shared by every vertex of the slice.
    pub fn composition_energy(&self, k: &Composition) -> Result<Rational> {
        if k.r() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: k.r(),
            });
        }
        Ok(k.counts()
            .iter()
            .zip(&self.values)
            .map(|(&c, e)| Rational::from(c as i64) * e)
            .sum())
    }
}

/// Every composition `k` of `n` over the table's levels with `Σ k_m e_m = energy`.
pub fn level_sets(n: usize, table: &EnergyTable, energy: &Rational) -> Vec<Composition> {
    Composition::all_weak(n, table.len())
        .into_iter()
        .filter(|k| table.composition_energy(k).map(|e| &e == energy).unwrap_or(false))
        .collect()
}

pub(crate) fn binomial2(n: usize) -> u64 {
    let n = n as u64;
    if n < 2 {
        0
    } else {
        n * (n - 1) / 2
    }
}

pub(crate) fn big_to_string(v: &BigUint) -> String {
    if v.is_zero() {
        "0".into()
    } else {
        v.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(v: &[usize]) -> Composition {
        Composition::new(v.to_vec()).unwrap()
    }

    fn brute_force_count(k: &Composition) -> usize {
        let n = k.n();
        let r = k.r();
        let mut count = 0;
        let total = r.pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let mut occ = vec![0; r];
            for _ in 0..n {
                occ[c % r] += 1;
                c /= r;
            }
            if occ == k.counts() {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn cardinality_examples() {
        assert_eq!(k(&[5]).cardinality(), BigUint::from(1u32));
        assert_eq!(k(&[1, 1]).cardinality(), BigUint::from(2u32));
        assert_eq!(k(&[2, 1, 1]).cardinality(), BigUint::from(brute_force_count(&k(&[2, 1, 1]))));
        assert_eq!(k(&[2, 1, 1]).cardinality_u64(), Some(12));
        for c in Composition::all_weak(5, 3) {
            assert_eq!(c.cardinality_u64().unwrap() as usize, brute_force_count(&c), "{c}");
        }
    }

    #[test]
    fn cardinality_is_arbitrary_precision() {
        let big = Composition::new(vec![1; 30]).unwrap();
        assert_eq!(big.cardinality().to_string(), "265252859812191058636308480000000");
        assert_eq!(big.cardinality_u64(), None);
    }

    #[test]
    fn degree_examples() {
        assert_eq!(k(&[4]).degree(), 0);
        assert_eq!(k(&[1, 1]).degree(), 1);
        assert_eq!(k(&[2, 1, 1]).degree(), 5);
    }

    #[test]
    fn triviality_and_reduction() {
        assert!(k(&[0, 3]).is_trivial());
        assert!(!k(&[2, 1]).is_trivial());
        let red = k(&[2, 0, 1]).reduce();
        assert_eq!(red.composition, k(&[2, 1]));
        assert_eq!(red.level_map, vec![Some(0), None, Some(1)]);
        let id = k(&[1, 1]).reduce();
        assert_eq!(id.composition, k(&[1, 1]));
        assert_eq!(id.level_map, vec![Some(0), Some(1)]);
    }

    #[test]
    fn decrement_errors() {
        assert_eq!(k(&[2, 0]).decrement(1), Err(Error::EmptyLevel { level: 1 }));
        assert!(matches!(k(&[1, 0]).decrement(0), Err(Error::TooFewParticles { .. })));
        assert_eq!(k(&[2, 1]).decrement(0).unwrap(), k(&[1, 1]));
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("2,1,1".parse::<Composition>().unwrap(), k(&[2, 1, 1]));
        assert_eq!("(2, 1)".parse::<Composition>().unwrap(), k(&[2, 1]));
        assert!("2,x".parse::<Composition>().is_err());
        assert!("0,0".parse::<Composition>().is_err());
        assert_eq!(k(&[3, 0, 2]).to_string(), "(3,0,2)");
        let json = serde_json::to_string(&k(&[2, 1, 1])).unwrap();
        assert_eq!(json, "[2,1,1]");
        assert!(serde_json::from_str::<Composition>("[]").is_err());
    }

    #[test]
    fn reduced_compositions_enumerated() {
        assert_eq!(Composition::all_reduced(4).len(), 8);
        assert!(Composition::all_reduced(5).iter().all(|c| c.is_reduced() && c.n() == 5));
        assert_eq!(Composition::all_weak(6, 3).len(), 28);
    }

    #[test]
    fn level_set_examples() {
        let binary = EnergyTable::from_integers(&[0, 1]).unwrap();
        assert_eq!(level_sets(4, &binary, &Rational::from(2)), vec![k(&[2, 2])]);
        assert!(level_sets(4, &binary, &Rational::from(9)).is_empty());

        let table = EnergyTable::from_integers(&[0, 1, 3]).unwrap();
        let mut found = level_sets(6, &table, &Rational::from(7));
        found.sort();
        assert_eq!(found, vec![k(&[1, 4, 1]), k(&[3, 1, 2])]);
        assert!(table.non_degenerate());
    }

    #[test]
    fn non_degeneracy_detects_collisions() {
        // 0 + 2 = 1 + 1
        assert!(!EnergyTable::from_integers(&[0, 1, 2]).unwrap().non_degenerate());
        assert!(EnergyTable::from_integers(&[0, 1]).unwrap().non_degenerate());
        let halves = EnergyTable::new(vec![Rational::new(1, 2), Rational::new(1, 3), Rational::from(5)]).unwrap();
        assert!(halves.non_degenerate());
    }
}
