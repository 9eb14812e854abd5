//! Vertices of a multislice, lexicographic ranking, and pair transpositions.
//!
//! Positions are 0-based everywhere: a transposition `(i, j)` with
//! `0 <= i < j < N` corresponds to the 1-based pair `(i + 1, j + 1)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::composition::{Composition, EnergyTable};
use crate::error::{Error, Result};
use crate::scalar::Rational;

/// An `N`-tuple of level indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vertex {
    levels: Vec<u8>,
}

/// Position of a vertex in the canonical (lexicographic) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexIndex(pub u64);

impl Vertex {
    pub fn new(levels: Vec<usize>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidComposition("empty vertex".into()));
        }
        let levels = levels
            .into_iter()
            .map(|l| u8::try_from(l).map_err(|_| Error::LevelOutOfRange { level: l, r: 256 }))
            .collect::<Result<Vec<_>>>()?;
        Ok(Vertex { levels })
    }

    pub(crate) fn from_raw(levels: Vec<u8>) -> Self {
        Vertex { levels }
    }

    pub fn levels(&self) -> &[u8] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn level(&self, position: usize) -> usize {
        self.levels[position] as usize
    }

    /// Occupation numbers over `r` levels.
    pub fn composition(&self, r: usize) -> Result<Composition> {
        let mut counts = vec![0; r];
        for &l in &self.levels {
            let l = l as usize;
            if l >= r {
                return Err(Error::LevelOutOfRange { level: l, r });
            }
            counts[l] += 1;
        }
        Composition::new(counts)
    }

    pub fn realizes(&self, k: &Composition) -> bool {
        self.composition(k.r()).map(|c| &c == k).unwrap_or(false)
    }

    /// `π_{i,j} x`: entries `i` and `j` swapped.
    pub fn transpose(&self, i: usize, j: usize) -> Result<Vertex> {
        let n = self.levels.len();
        for p in [i, j] {
            if p >= n {
                return Err(Error::PositionOutOfRange { position: p, n });
            }
        }
        if i == j {
            return Err(Error::SamePosition(i));
        }
        let mut levels = self.levels.clone();
        levels.swap(i, j);
        Ok(Vertex { levels })
    }

    /// All distinct `π_{i,j} x ≠ x`, in increasing `(i, j)` order.
    pub fn neighbors(&self) -> Vec<Vertex> {
        let n = self.levels.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.levels[i] != self.levels[j] {
                    let mut levels = self.levels.clone();
                    levels.swap(i, j);
                    out.push(Vertex { levels });
                }
            }
        }
        out
    }

    /// Total energy `Σ_ℓ e_{x_ℓ}`.
    pub fn energy(&self, table: &EnergyTable) -> Result<Rational> {
        self.levels
            .iter()
            .map(|&l| {
                table
                    .values()
                    .get(l as usize)
                    .cloned()
                    .ok_or(Error::LevelOutOfRange { level: l as usize, r: table.len() })
            })
            .sum::<Result<Rational>>()
    }

    /// Inserts `level` at `position`, shifting later entries right.
    pub fn insert_at(&self, position: usize, level: usize) -> Result<Vertex> {
        if position > self.levels.len() {
            return Err(Error::PositionOutOfRange { position, n: self.levels.len() + 1 });
        }
        let level = u8::try_from(level).map_err(|_| Error::LevelOutOfRange { level, r: 256 })?;
        let mut levels = self.levels.clone();
        levels.insert(position, level);
        Ok(Vertex { levels })
    }

    /// Removes the entry at `position`, returning it and the shorter vertex.
    pub fn delete_at(&self, position: usize) -> Result<(usize, Vertex)> {
        if position >= self.levels.len() || self.levels.len() < 2 {
            return Err(Error::PositionOutOfRange { position, n: self.levels.len() });
        }
        let mut levels = self.levels.clone();
        let l = levels.remove(position);
        Ok((l as usize, Vertex { levels }))
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.levels.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

fn cardinality_checked(k: &Composition) -> Result<u64> {
    k.cardinality_u64()
        .ok_or_else(|| Error::BudgetExceeded { cardinality: k.cardinality().to_string(), budget: u64::MAX })
}

/// Rank of a raw level sequence. The caller guarantees it realizes `counts`.
pub(crate) fn rank_levels(levels: &[u8], counts: &[usize], cardinality: u64) -> u64 {
    let mut remaining = counts.to_vec();
    let mut total = cardinality as u128;
    let mut left = levels.len() as u128;
    let mut rank: u128 = 0;
    for &v in levels {
        let v = v as usize;
        for &c in remaining.iter().take(v) {
            if c > 0 {
                rank += total * c as u128 / left;
            }
        }
        total = total * remaining[v] as u128 / left;
        remaining[v] -= 1;
        left -= 1;
    }
    rank as u64
}

/// Rank of `x` in the lexicographic order of `V_{N,k}`.
pub fn rank(x: &Vertex, k: &Composition) -> Result<VertexIndex> {
    if !x.realizes(k) {
        return Err(Error::VertexMismatch);
    }
    let card = cardinality_checked(k)?;
    Ok(VertexIndex(rank_levels(&x.levels, k.counts(), card)))
}

/// Inverse of [`rank`].
pub fn unrank(index: VertexIndex, k: &Composition) -> Result<Vertex> {
    let card = cardinality_checked(k)?;
    if index.0 >= card {
        return Err(Error::IndexOutOfRange { index: index.0, cardinality: card });
    }
    let mut remaining = k.counts().to_vec();
    let mut total = card as u128;
    let mut left = k.n() as u128;
    let mut idx = index.0 as u128;
    let mut levels = Vec::with_capacity(k.n());
    for _ in 0..k.n() {
        for u in 0..remaining.len() {
            let c = remaining[u];
            if c == 0 {
                continue;
            }
            let block = total * c as u128 / left;
            if idx < block {
                levels.push(u as u8);
                total = block;
                remaining[u] -= 1;
                left -= 1;
                break;
            }
            idx -= block;
        }
    }
    Ok(Vertex { levels })
}

/// Lexicographic stream over `V_{N,k}`.
#[derive(Debug, Clone)]
pub struct VertexIter {
    next: Option<Vec<u8>>,
}

impl Iterator for VertexIter {
    type Item = Vertex;

    fn next(&mut self) -> Option<Vertex> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_permutation(&mut succ) {
            self.next = Some(succ);
        }
        Some(Vertex { levels: current })
    }
}

/// Next multiset permutation in lexicographic order; false after the last one.
pub(crate) fn next_permutation(v: &mut [u8]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Enumerates `V_{N,k}` in canonical order, refusing slices above `budget`.
pub fn enumerate(k: &Composition, budget: u64) -> Result<VertexIter> {
    check_budget(k, budget)?;
    Ok(VertexIter { next: Some(first_levels(k)) })
}

pub(crate) fn first_levels(k: &Composition) -> Vec<u8> {
    k.counts()
        .iter()
        .enumerate()
        .flat_map(|(l, &c)| std::iter::repeat_n(l as u8, c))
        .collect()
}

pub(crate) fn check_budget(k: &Composition, budget: u64) -> Result<u64> {
    match k.cardinality_u64() {
        Some(c) if c <= budget => Ok(c),
        _ => Err(Error::BudgetExceeded { cardinality: k.cardinality().to_string(), budget }),
    }
}
