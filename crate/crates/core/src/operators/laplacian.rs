use std::io::Write;

use serde::Serialize;

use super::VertexFunction;
use crate::composition::Composition;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::linalg::DenseMatrix;
use crate::multislice::Multislice;
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
enum Storage {
    /// Row-major `i32` entries.
    Dense(Vec<i32>),
    /// Sorted neighbor ranks per row; the diagonal is the common degree.
    Sparse { offsets: Vec<usize>, columns: Vec<u32> },
}

/// Integer Laplacian `L = δ I − A` of a multislice.
#[derive(Debug, Clone)]
pub struct LaplacianMatrix {
    composition: Composition,
    dimension: usize,
    degree: usize,
    storage: Storage,
}

/// Structural checks on an assembled Laplacian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LaplacianInvariants {
    pub diagonal_is_degree: bool,
    pub off_diagonal_in_range: bool,
    pub rows_sum_to_zero: bool,
    pub symmetric: bool,
    /// Symmetric, weakly diagonally dominant, nonnegative diagonal; implies
    /// positive semi-definite.
    pub positive_semidefinite: bool,
}

impl LaplacianInvariants {
    pub fn all(&self) -> bool {
        self.diagonal_is_degree
            && self.off_diagonal_in_range
            && self.rows_sum_to_zero
            && self.symmetric
            && self.positive_semidefinite
    }
}

/// Assembles the Laplacian, dense below `limits.sparse_threshold` vertices.
pub fn laplacian(g: &Multislice, limits: &Limits) -> LaplacianMatrix {
    let n = g.len();
    let degree = g.degree();
    let storage = if n < limits.sparse_threshold {
        let mut data = vec![0i32; n * n];
        for v in 0..n {
            data[v * n + v] = degree as i32;
            for &w in g.neighbors(v) {
                data[v * n + w as usize] = -1;
            }
        }
        Storage::Dense(data)
    } else {
        let mut offsets = Vec::with_capacity(n + 1);
        let mut columns = Vec::with_capacity(n * degree);
        offsets.push(0);
        for v in 0..n {
            let mut row = g.neighbors(v).to_vec();
            row.sort_unstable();
            columns.extend(row);
            offsets.push(columns.len());
        }
        Storage::Sparse { offsets, columns }
    };
    LaplacianMatrix { composition: g.composition().clone(), dimension: n, degree, storage }
}

impl LaplacianMatrix {
    pub fn composition(&self) -> &Composition {
        &self.composition
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.storage, Storage::Dense(_))
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        match &self.storage {
            Storage::Dense(d) => d[i * self.dimension + j] as i64,
            Storage::Sparse { offsets, columns } => {
                if i == j {
                    self.degree as i64
                } else if columns[offsets[i]..offsets[i + 1]].binary_search(&(j as u32)).is_ok() {
                    -1
                } else {
                    0
                }
            }
        }
    }

    /// Nonzero `(column, value)` pairs of row `i`, in column order.
    pub fn row_entries(&self, i: usize) -> Vec<(usize, i64)> {
        match &self.storage {
            Storage::Dense(d) => d[i * self.dimension..(i + 1) * self.dimension]
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0)
                .map(|(j, &v)| (j, v as i64))
                .collect(),
            Storage::Sparse { offsets, columns } => {
                let mut out: Vec<(usize, i64)> =
                    columns[offsets[i]..offsets[i + 1]].iter().map(|&j| (j as usize, -1)).collect();
                if self.degree > 0 {
                    let at = out.partition_point(|&(j, _)| j < i);
                    out.insert(at, (i, self.degree as i64));
                }
                out
            }
        }
    }

    pub fn mul_vec<S: Scalar>(&self, f: &[S]) -> Result<Vec<S>> {
        if f.len() != self.dimension {
            return Err(Error::DimensionMismatch { expected: self.dimension, found: f.len() });
        }
        Ok((0..self.dimension)
            .map(|i| {
                self.row_entries(i)
                    .into_iter()
                    .fold(S::zero(), |acc, (j, v)| acc + S::from_i64(v) * f[j].clone())
            })
            .collect())
    }

    /// Dense copy, refused above `cap` rows.
    pub fn to_dense<S: Scalar>(&self, cap: usize) -> Result<DenseMatrix<S>> {
        if self.dimension > cap {
            return Err(Error::DenseCapExceeded { dimension: self.dimension, cap });
        }
        Ok(DenseMatrix::from_fn(self.dimension, self.dimension, |i, j| S::from_i64(self.entry(i, j))))
    }

    pub fn check_invariants(&self) -> LaplacianInvariants {
        let n = self.dimension;
        let mut inv = LaplacianInvariants {
            diagonal_is_degree: true,
            off_diagonal_in_range: true,
            rows_sum_to_zero: true,
            symmetric: true,
            positive_semidefinite: true,
        };
        for i in 0..n {
            let row = self.row_entries(i);
            let mut sum = 0i64;
            let mut off = 0i64;
            let mut diag = 0i64;
            for &(j, v) in &row {
                sum += v;
                if i == j {
                    diag = v;
                } else {
                    off += v.abs();
                    inv.off_diagonal_in_range &= v == -1;
                    inv.symmetric &= self.entry(j, i) == v;
                }
            }
            inv.diagonal_is_degree &= diag == self.degree as i64;
            inv.rows_sum_to_zero &= sum == 0;
            inv.positive_semidefinite &= diag >= off;
        }
        inv.positive_semidefinite &= inv.symmetric;
        inv
    }

    /// Coordinate format: one `row col value` line per nonzero entry.
    pub fn write_coordinate<W: Write>(&self, mut out: W) -> Result<()> {
        for i in 0..self.dimension {
            for (j, v) in self.row_entries(i) {
                writeln!(out, "{i} {j} {v}")?;
            }
        }
        Ok(())
    }
}

/// Matrix-free `(Lf)(x) = Σ_{y ~ x} (f(x) − f(y))`.
pub fn apply_laplacian<S: Scalar>(g: &Multislice, f: &VertexFunction<S>) -> Result<VertexFunction<S>> {
    f.check(g)?;
    let vals = f.values();
    let out = (0..g.len())
        .map(|v| {
            g.neighbors(v)
                .iter()
                .fold(S::zero(), |acc, &w| acc + vals[v].clone() - vals[w as usize].clone())
        })
        .collect();
    Ok(VertexFunction::from_parts(g.composition().clone(), out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::LevelFunction;
    use crate::scalar::Rational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn graph(v: &[usize]) -> Multislice {
        Multislice::new(&Composition::new(v.to_vec()).unwrap(), 100_000).unwrap()
    }

    #[test]
    fn two_vertex_laplacian() {
        let l = laplacian(&graph(&[1, 1]), &Limits::default());
        let entries: Vec<i64> = (0..4).map(|t| l.entry(t / 2, t % 2)).collect();
        assert_eq!(entries, vec![1, -1, -1, 1]);
    }

    #[test]
    fn complete_graph_case() {
        for n in 2..=6 {
            let g = graph(&[n - 1, 1]);
            let l = laplacian(&g, &Limits::default());
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(l.entry(i, j), if i == j { n as i64 - 1 } else { -1 });
                }
            }
        }
    }

    #[test]
    fn invariants_dense_and_sparse() {
        let sparse = Limits { sparse_threshold: 0, ..Limits::default() };
        for v in [&[2, 1, 1][..], &[1, 1, 1], &[3], &[2, 2, 1]] {
            let g = graph(v);
            let a = laplacian(&g, &Limits::default());
            let b = laplacian(&g, &sparse);
            assert!(a.is_dense() && !b.is_dense());
            assert!(a.check_invariants().all());
            assert!(b.check_invariants().all());
            for i in 0..g.len() {
                assert_eq!(a.row_entries(i), b.row_entries(i));
            }
        }
    }

    #[test]
    fn matrix_free_agrees_with_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for v in [&[2, 1][..], &[2, 1, 1], &[2, 2]] {
            let g = graph(v);
            let l = laplacian(&g, &Limits::default());
            let f = VertexFunction::<Rational>::random(&g, &mut rng);
            let a = apply_laplacian(&g, &f).unwrap();
            assert_eq!(a.values(), l.mul_vec(f.values()).unwrap().as_slice());
        }
    }

    #[test]
    fn constants_and_coordinate_functions() {
        let g = graph(&[2, 1, 1]);
        let c = VertexFunction::constant(&g, Rational::new(7, 3));
        assert!(apply_laplacian(&g, &c).unwrap().is_zero(0.0));
        let h = LevelFunction::new(vec![Rational::from(1), Rational::from(-1), Rational::from(-1)]);
        let n = Rational::from(4);
        for pos in 0..4 {
            let f = VertexFunction::of_coordinate(&g, &h, pos).unwrap();
            assert_eq!(apply_laplacian(&g, &f).unwrap(), f.scale(&n));
        }
    }

    #[test]
    fn coordinate_export() {
        let l = laplacian(&graph(&[1, 1]), &Limits::default());
        let mut buf = Vec::new();
        l.write_coordinate(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "0 0 1\n0 1 -1\n1 0 -1\n1 1 1\n");
    }
}
