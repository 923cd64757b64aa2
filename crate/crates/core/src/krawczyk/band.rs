//! Banded LU with partial pivoting.
//!
//! The shooting Jacobian is cyclic block-bidiagonal. After moving the last
//! block row to the top and the `h1` column to the end, every nonzero sits
//! within two diagonals of the main one, so elimination only touches a
//! fixed-width band (fill from pivoting widens the upper band to `kl + ku`).

use crate::error::{Error, Result};
use crate::ivl::PointMat;

#[derive(Clone, Debug)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    lu: Vec<f64>,
    piv: Vec<usize>,
}

impl BandLu {
    /// Factors `m`, which must have lower bandwidth `kl` and upper `ku`.
    pub fn new(m: &PointMat, kl: usize, ku: usize) -> Result<Self> {
        let n = m.rows();
        if m.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.cols(),
            });
        }
        let mut lu = vec![0.0; n * n];
        let mut scale = 0.0f64;
        for i in 0..n {
            for j in i.saturating_sub(kl)..n.min(i + ku + 1) {
                lu[i * n + j] = m[(i, j)];
                scale = scale.max(m[(i, j)].abs());
            }
        }
        let tol = scale * f64::EPSILON * n as f64;
        let width = kl + ku;
        let mut piv = vec![0; n];
        for k in 0..n {
            let last = n.min(k + kl + 1);
            let mut p = k;
            for i in k + 1..last {
                if lu[i * n + k].abs() > lu[p * n + k].abs() {
                    p = i;
                }
            }
            let pv = lu[p * n + k];
            if !(pv.abs() > tol) || !pv.is_finite() {
                return Err(Error::SingularMatrix);
            }
            piv[k] = p;
            let jend = n.min(k + width + 1);
            if p != k {
                for j in k..jend {
                    lu.swap(k * n + j, p * n + j);
                }
            }
            let d = lu[k * n + k];
            for i in k + 1..last {
                let f = lu[i * n + k] / d;
                lu[i * n + k] = f;
                if f != 0.0 {
                    for j in k + 1..jend {
                        lu[i * n + j] -= f * lu[k * n + j];
                    }
                }
            }
        }
        Ok(Self { n, kl, ku, lu, piv })
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        let width = self.kl + self.ku;
        for k in 0..n {
            b.swap(k, self.piv[k]);
            let bk = b[k];
            if bk != 0.0 {
                for i in k + 1..n.min(k + self.kl + 1) {
                    b[i] -= self.lu[i * n + k] * bk;
                }
            }
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in i + 1..n.min(i + width + 1) {
                s -= self.lu[i * n + j] * b[j];
            }
            b[i] = s / self.lu[i * n + i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ivl::DenseLu;

    #[test]
    fn matches_dense_solve_on_a_pentadiagonal_system() {
        let n = 9;
        let mut m = PointMat::zeros(n, n);
        for i in 0..n {
            for j in i.saturating_sub(2)..n.min(i + 3) {
                m[(i, j)] = ((i * 7 + j * 3) % 5) as f64 - 2.0 + if i == j { 0.5 } else { 0.0 };
            }
        }
        let b: Vec<f64> = (0..n).map(|i| i as f64 - 3.0).collect();
        let mut x = b.clone();
        BandLu::new(&m, 2, 2).unwrap().solve_in_place(&mut x);
        let y = DenseLu::new(&m).unwrap().solve(&b);
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-10, "{u} vs {v}");
        }
    }
}
