use super::interval::Interval;
use super::vector::IVec;
use crate::error::{Error, Result};

/// Dense row-major interval matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct IMat {
    rows: usize,
    cols: usize,
    data: Vec<Interval>,
}

/// Dense row-major floating-point matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct PointMat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl IMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Interval::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Interval::ONE;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Interval>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    expected: c,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn from_points(p: &PointMat) -> Self {
        Self {
            rows: p.rows,
            cols: p.cols,
            data: p.data.iter().map(|&x| Interval::point(x)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Interval] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mid(&self) -> PointMat {
        PointMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(Interval::mid).collect(),
        }
    }

    pub fn sub(&self, other: &IMat) -> Result<IMat> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(IMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        })
    }
}

impl std::ops::Index<(usize, usize)> for IMat {
    type Output = Interval;
    fn index(&self, (i, j): (usize, usize)) -> &Interval {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Interval {
        &mut self.data[i * self.cols + j]
    }
}

/// Interval dot product of two equally long slices.
pub fn dot(a: &[Interval], b: &[Interval]) -> Interval {
    a.iter()
        .zip(b)
        .fold(Interval::ZERO, |acc, (&x, &y)| acc + x * y)
}

/// Encloses `A v` for every point matrix in `A` and point vector in `v`.
pub fn imat_apply(a: &IMat, v: &IVec) -> Result<IVec> {
    if a.cols != v.len() {
        return Err(Error::DimensionMismatch {
            expected: a.cols,
            found: v.len(),
        });
    }
    Ok((0..a.rows).map(|i| dot(a.row(i), v.as_slice())).collect())
}

pub fn imat_mul(a: &IMat, b: &IMat) -> Result<IMat> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch {
            expected: a.cols,
            found: b.rows,
        });
    }
    let mut out = IMat::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a[(i, k)];
            if aik == Interval::ZERO {
                continue;
            }
            for j in 0..b.cols {
                out[(i, j)] = out[(i, j)] + aik * b[(k, j)];
            }
        }
    }
    Ok(out)
}

impl PointMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    expected: c,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for PointMat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for PointMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Dense LU factorisation with partial pivoting, `P M = L U`.
#[derive(Clone, Debug)]
pub struct DenseLu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl DenseLu {
    pub fn new(m: &PointMat) -> Result<Self> {
        if m.rows != m.cols {
            return Err(Error::DimensionMismatch {
                expected: m.rows,
                found: m.cols,
            });
        }
        let n = m.rows;
        let mut lu = m.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = lu.iter().fold(0.0f64, |s, x| s.max(x.abs()));
        let tol = scale * f64::EPSILON * n as f64;
        for k in 0..n {
            let (p, pv) = (k..n)
                .map(|i| (i, lu[i * n + k].abs()))
                .fold((k, -1.0), |best, c| if c.1 > best.1 { c } else { best });
            if !(pv > tol) || !pv.is_finite() {
                return Err(Error::SingularMatrix);
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let piv = lu[k * n + k];
            for i in k + 1..n {
                let f = lu[i * n + k] / piv;
                lu[i * n + k] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        lu[i * n + j] -= f * lu[k * n + j];
                    }
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        x
    }

    pub fn inverse(&self) -> PointMat {
        let n = self.n;
        let mut inv = PointMat::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            let col = self.solve(&e);
            e[j] = 0.0;
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }
}

/// Floating-point approximation of `M^{-1}`; no rigour is claimed.
pub fn approx_inverse(m: &PointMat) -> Result<PointMat> {
    Ok(DenseLu::new(m)?.inverse())
}

/// Rigorous enclosure of the inverse of a 2x2 interval matrix.
pub fn inverse_2x2(m: &IMat) -> Result<IMat> {
    if m.rows != 2 || m.cols != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: m.rows,
        });
    }
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    if det.contains_zero() {
        return Err(Error::SingularMatrix);
    }
    let r = det.recip()?;
    IMat::from_rows(vec![
        vec![m[(1, 1)] * r, -m[(0, 1)] * r],
        vec![-m[(1, 0)] * r, m[(0, 0)] * r],
    ])
}
