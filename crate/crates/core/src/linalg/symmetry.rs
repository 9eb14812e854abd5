//! Block reduction of the Laplacian by a group of coordinate swaps.
//!
//! The swaps `(2i, 2i+1)` for `i < ⌊N/2⌋` commute with each other and with
//! the Laplacian, generating `G = Z_2^h`. Its characters `χ_c(g) =
//! (-1)^{|c ∧ g|}` are rational, so the vertex space splits over `Q` into
//! isotypic pieces `V_c`, each spanned by
//!
//! ```text
//! e_O^c = Σ_{g ∈ G / Stab(x_O)} χ_c(g) δ_{g x_O}
//! ```
//!
//! over orbits `O` whose stabilizer lies in `ker χ_c`. In that basis the
//! Laplacian restricted to `V_c` has integer matrix
//! `B_c[O][O'] = δ·[O = O'] − Σ_{y ~ x_O, y ∈ O'} χ_c(g_y)`, and
//! `dim ker(L − λ) = Σ_c dim ker(B_c − λ)` exactly.

use super::DenseMatrix;
use crate::multislice::Multislice;

/// Orbit data for the swap group acting on one multislice.
#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    pairs: usize,
    orbit_of: Vec<u32>,
    flip: Vec<u32>,
    reps: Vec<u32>,
    stab: Vec<u32>,
}

fn parity(x: u32) -> i64 {
    if x.count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

impl BlockDecomposition {
    pub fn new(g: &Multislice) -> Self {
        let n = g.n();
        let pairs = n / 2;
        let mut orbit_of = vec![u32::MAX; g.len()];
        let mut flip = vec![0u32; g.len()];
        let mut reps = Vec::new();
        let mut stab = Vec::new();
        let mut rep_orbit = vec![u32::MAX; g.len()];
        let mut scratch = vec![0u8; n];
        for v in 0..g.len() {
            scratch.copy_from_slice(g.levels(v));
            let mut f = 0u32;
            let mut s = 0u32;
            for i in 0..pairs {
                let (a, b) = (scratch[2 * i], scratch[2 * i + 1]);
                if a > b {
                    scratch.swap(2 * i, 2 * i + 1);
                    f |= 1 << i;
                } else if a == b {
                    s |= 1 << i;
                }
            }
            let rep = g.rank_of_levels(&scratch);
            if rep_orbit[rep] == u32::MAX {
                rep_orbit[rep] = reps.len() as u32;
                reps.push(rep as u32);
                stab.push(s);
            }
            orbit_of[v] = rep_orbit[rep];
            flip[v] = f;
        }
        BlockDecomposition { pairs, orbit_of, flip, reps, stab }
    }

    /// Number of generating swaps `h`; there are `2^h` characters.
    pub fn pairs(&self) -> usize {
        self.pairs
    }

    pub fn characters(&self) -> impl Iterator<Item = u32> {
        0..(1u32 << self.pairs)
    }

    pub fn orbit_count(&self) -> usize {
        self.reps.len()
    }

    pub fn orbit_size(&self, orbit: usize) -> usize {
        1 << (self.pairs - self.stab[orbit].count_ones() as usize)
    }

    /// Orbits carrying a nonzero vector of character `c`.
    pub fn block_orbits(&self, c: u32) -> Vec<usize> {
        (0..self.reps.len()).filter(|&o| self.stab[o] & c == 0).collect()
    }

    /// Integer matrix `B_c` of the Laplacian on `V_c`, row-major.
    pub fn integer_block(&self, g: &Multislice, c: u32) -> (Vec<i64>, usize) {
        let orbits = self.block_orbits(c);
        let dim = orbits.len();
        let mut local = vec![usize::MAX; self.reps.len()];
        for (i, &o) in orbits.iter().enumerate() {
            local[o] = i;
        }
        let mut b = vec![0i64; dim * dim];
        for (i, &o) in orbits.iter().enumerate() {
            b[i * dim + i] += g.degree() as i64;
            for &y in g.neighbors(self.reps[o] as usize) {
                let j = local[self.orbit_of[y as usize] as usize];
                if j != usize::MAX {
                    b[i * dim + j] -= parity(self.flip[y as usize] & c);
                }
            }
        }
        (b, dim)
    }

    /// Symmetric form `D^{1/2} B_c D^{-1/2}` with `D = diag(|O|)`.
    pub fn symmetric_block(&self, g: &Multislice, c: u32) -> DenseMatrix<f64> {
        let orbits = self.block_orbits(c);
        let (b, dim) = self.integer_block(g, c);
        let sizes: Vec<f64> = orbits.iter().map(|&o| (self.orbit_size(o) as f64).sqrt()).collect();
        DenseMatrix::from_fn(dim, dim, |i, j| sizes[i] * b[i * dim + j] as f64 / sizes[j])
    }

    /// Lifts an eigenvector `u` of [`BlockDecomposition::symmetric_block`] to
    /// a function on all vertices.
    pub fn lift(&self, c: u32, u: &[f64]) -> Vec<f64> {
        let orbits = self.block_orbits(c);
        let mut coeff = vec![0.0; self.reps.len()];
        for (&o, &x) in orbits.iter().zip(u) {
            coeff[o] = x / (self.orbit_size(o) as f64).sqrt();
        }
        self.orbit_of
            .iter()
            .zip(&self.flip)
            .map(|(&o, &f)| coeff[o as usize] * parity(f & c) as f64)
            .collect()
    }
}
