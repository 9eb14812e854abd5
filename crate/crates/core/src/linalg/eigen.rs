//! Floating-point symmetric eigensolvers backed by nalgebra, plus helpers
//! for grouping eigenvalues and recognizing small rationals.

use nalgebra::{DMatrix, SymmetricEigen};

use super::DenseMatrix;
use crate::error::{Error, Result};
use crate::scalar::Rational;

/// Largest denominator tried by [`snap_rational`].
pub const SNAP_MAX_DENOMINATOR: i64 = 64;

fn to_nalgebra(m: &DenseMatrix<f64>, tol: f64) -> Result<DMatrix<f64>> {
    if !m.is_symmetric(tol) {
        return Err(Error::NotSymmetric);
    }
    Ok(DMatrix::from_row_slice(m.rows(), m.cols(), m.data()))
}

/// Eigenvalues in ascending order.
pub fn symmetric_eigenvalues(m: &DenseMatrix<f64>) -> Result<Vec<f64>> {
    if m.rows() == 0 {
        return Ok(Vec::new());
    }
    let a = to_nalgebra(m, 1e-9)?;
    let mut vals: Vec<f64> = a.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Eigenvalues in ascending order with matching unit eigenvectors.
pub fn symmetric_eigen(m: &DenseMatrix<f64>) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    if m.rows() == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let eig = SymmetricEigen::new(to_nalgebra(m, 1e-9)?);
    let mut order: Vec<usize> = (0..m.rows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order.iter().map(|&i| eig.eigenvectors.column(i).iter().copied().collect()).collect();
    Ok((values, vectors))
}

/// Groups sorted values whose consecutive gaps are within `tol` relative to
/// `max(1, |value|)`. Returns `(mean, count)` per cluster.
pub fn cluster(sorted: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    let mut sum = 0.0;
    let mut last = f64::NAN;
    for &v in sorted {
        match out.last_mut() {
            Some((mean, count)) if (v - last).abs() <= tol * v.abs().max(1.0) => {
                sum += v;
                *count += 1;
                *mean = sum / *count as f64;
            }
            _ => {
                sum = v;
                out.push((v, 1));
            }
        }
        last = v;
    }
    out
}

/// The rational `p/q` with `q <= 64` closest to `x`, if it lies within `tol`
/// relative to `max(1, |x|)`. Smaller denominators win ties.
pub fn snap_rational(x: f64, tol: f64) -> Option<Rational> {
    let scale = x.abs().max(1.0);
    for q in 1..=SNAP_MAX_DENOMINATOR {
        let p = (x * q as f64).round();
        if ((p / q as f64) - x).abs() <= tol * scale && p.abs() < 1e15 {
            return Some(Rational::new(p as i64, q));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_graph_laplacian() {
        // Laplacian of the path on 3 vertices: spectrum {0, 1, 3}.
        let m = DenseMatrix::from_rows(vec![
            vec![1.0, -1.0, 0.0],
            vec![-1.0, 2.0, -1.0],
            vec![0.0, -1.0, 1.0],
        ])
        .unwrap();
        let vals = symmetric_eigenvalues(&m).unwrap();
        for (v, e) in vals.iter().zip([0.0, 1.0, 3.0]) {
            assert!((v - e).abs() < 1e-12);
        }
        let (vals2, vecs) = symmetric_eigen(&m).unwrap();
        for (lambda, v) in vals2.iter().zip(&vecs) {
            let mv = m.mul_vec(v).unwrap();
            for (a, b) in mv.iter().zip(v) {
                assert!((a - lambda * b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rejects_asymmetric() {
        let m = DenseMatrix::from_rows(vec![vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(symmetric_eigenvalues(&m), Err(Error::NotSymmetric)));
    }

    #[test]
    fn clustering_and_snapping() {
        let c = cluster(&[0.0, 1e-12, 1.5, 1.5 + 1e-11, 1.5 - 1e-11, 4.0], 1e-8);
        assert_eq!(c.len(), 3);
        assert_eq!(c[1].1, 3);
        assert_eq!(snap_rational(8.0 / 3.0 + 1e-12, 1e-8), Some(Rational::new(8, 3)));
        assert_eq!(snap_rational(-0.5, 1e-8), Some(Rational::new(-1, 2)));
        assert_eq!(snap_rational(std::f64::consts::PI, 1e-8), None);
    }
}
