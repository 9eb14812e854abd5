use serde::Serialize;

use super::LevelFunction;
use crate::composition::Composition;
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::multislice::Multislice;
use crate::scalar::Rational;

/// The `r × r` operator `K` with `(N−1) K_{mn} = k_n − δ_{mn}`.
#[derive(Debug, Clone, PartialEq)]
pub struct KMatrix {
    composition: Composition,
    entries: DenseMatrix<Rational>,
}

#[derive(Serialize)]
struct KMatrixJson<'a> {
    composition: &'a Composition,
    entries: Vec<Vec<Rational>>,
}

impl Serialize for KMatrix {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        let entries = (0..self.entries.rows()).map(|i| self.entries.row(i).to_vec()).collect();
        KMatrixJson { composition: &self.composition, entries }.serialize(s)
    }
}

pub fn k_matrix(k: &Composition) -> Result<KMatrix> {
    let n = k.n();
    if n < 2 {
        return Err(Error::TooFewParticles { required: 2, found: n });
    }
    let r = k.r();
    let c = k.counts();
    let entries = DenseMatrix::from_fn(r, r, |m, j| Rational::new(c[j] as i64 - (m == j) as i64, n as i64 - 1));
    Ok(KMatrix { composition: k.clone(), entries })
}

impl KMatrix {
    pub fn composition(&self) -> &Composition {
        &self.composition
    }

    pub fn entries(&self) -> &DenseMatrix<Rational> {
        &self.entries
    }

    pub fn apply(&self, g: &LevelFunction<Rational>) -> Result<LevelFunction<Rational>> {
        Ok(LevelFunction::new(self.entries.mul_vec(g.values())?))
    }

    /// `Σ_{m,n} |ν_m K_{mn} − ν_n K_{nm}|`; zero when `K` is `ν`-self-adjoint.
    pub fn self_adjoint_residual(&self) -> Rational {
        let nu = self.composition.nu();
        let r = self.entries.rows();
        let mut total = Rational::from(0);
        for m in 0..r {
            for j in 0..r {
                let d = &nu[m] * self.entries.get(m, j) - &nu[j] * self.entries.get(j, m);
                total = total + if d.is_negative() { -d } else { d };
            }
        }
        total
    }

    /// Compares `ν_m K_{mn}` with a brute-force joint law such as
    /// [`k_quadratic_form`].
    pub fn matches_form(&self, form: &DenseMatrix<Rational>) -> bool {
        let nu = self.composition.nu();
        let r = self.entries.rows();
        form.rows() == r
            && form.cols() == r
            && (0..r).all(|m| (0..r).all(|j| &nu[m] * self.entries.get(m, j) == *form.get(m, j)))
    }
}

/// `Q[m][n] = Σ_x [x_1 = m][x_N = n] μ(x)`, so that
/// `⟨g, K h⟩_ν = Σ_{m,n} g_m Q[m][n] h_n` whenever the two agree.
pub fn k_quadratic_form(g: &Multislice) -> Result<DenseMatrix<Rational>> {
    let n = g.n();
    if n < 2 {
        return Err(Error::TooFewParticles { required: 2, found: n });
    }
    let r = g.composition().r();
    let mut counts = vec![0i64; r * r];
    for v in 0..g.len() {
        let x = g.levels(v);
        counts[x[0] as usize * r + x[n - 1] as usize] += 1;
    }
    let len = g.len() as i64;
    Ok(DenseMatrix::from_fn(r, r, |m, j| Rational::new(counts[m * r + j], len)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(v: &[usize]) -> Composition {
        Composition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn two_level_swap_matrix() {
        let m = k_matrix(&k(&[1, 1])).unwrap();
        let want: Vec<Rational> = [0, 1, 1, 0].iter().map(|&v| Rational::from(v)).collect();
        assert_eq!(m.entries().data(), want.as_slice());
        assert!(k_matrix(&k(&[1])).is_err());
    }

    #[test]
    fn eigen_relations_and_balance() {
        for c in [k(&[2, 1, 1]), k(&[3, 2]), k(&[1, 1, 1, 1]), k(&[2, 0, 3])] {
            let m = k_matrix(&c).unwrap();
            let ones = LevelFunction::new(vec![Rational::from(1); c.r()]);
            assert_eq!(m.apply(&ones).unwrap(), ones);
            let g = LevelFunction::new(
                (0..c.r()).map(|i| Rational::from((i == 0) as i64) - Rational::new(c.counts()[0] as i64, c.n() as i64)).collect(),
            );
            assert!(g.in_kspace(&c, 0.0));
            let lam = Rational::new(-1, c.n() as i64 - 1);
            let kg = m.apply(&g).unwrap();
            let want: Vec<Rational> = g.values().iter().map(|v| v * &lam).collect();
            assert_eq!(kg.values(), want.as_slice());
            assert_eq!(m.self_adjoint_residual(), Rational::from(0));
        }
    }

    #[test]
    fn brute_force_form() {
        for c in [k(&[1, 1]), k(&[2, 1, 1]), k(&[2, 2, 1]), k(&[3, 0, 1])] {
            let g = Multislice::new(&c, 10_000).unwrap();
            assert!(k_matrix(&c).unwrap().matches_form(&k_quadratic_form(&g).unwrap()));
        }
    }
}
