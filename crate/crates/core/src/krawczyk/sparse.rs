use crate::error::{Error, Result};
use crate::ivl::{IMat, IVec, Interval, PointMat};

/// Column-compressed interval matrix. Entries not stored are exact zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseIMat {
    rows: usize,
    cols: Vec<Vec<(usize, Interval)>>,
}

impl SparseIMat {
    pub fn new(rows: usize, ncols: usize) -> Self {
        Self {
            rows,
            cols: vec![Vec::new(); ncols],
        }
    }

    pub fn from_dense(m: &IMat) -> Self {
        let mut s = Self::new(m.rows(), m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                s.push(i, j, m[(i, j)]);
            }
        }
        s
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols.len()
    }

    /// Stores `value` at `(i, j)`; exact zeros are skipped. Each position
    /// is expected at most once.
    pub fn push(&mut self, i: usize, j: usize, value: Interval) {
        debug_assert!(i < self.rows);
        if value != Interval::ZERO {
            self.cols[j].push((i, value));
        }
    }

    pub fn column(&self, j: usize) -> &[(usize, Interval)] {
        &self.cols[j]
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    /// Number of nonzero entries in each row.
    pub fn row_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.rows];
        for col in &self.cols {
            for &(i, _) in col {
                counts[i] += 1;
            }
        }
        counts
    }

    pub fn to_dense(&self) -> IMat {
        let mut m = IMat::zeros(self.rows, self.cols());
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn mid(&self) -> PointMat {
        let mut m = PointMat::zeros(self.rows, self.cols());
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                m[(i, j)] = v.mid();
            }
        }
        m
    }

    pub fn apply(&self, v: &IVec) -> Result<IVec> {
        if v.len() != self.cols() {
            return Err(Error::DimensionMismatch {
                expected: self.cols(),
                found: v.len(),
            });
        }
        let mut out = IVec::zeros(self.rows);
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, a) in col {
                out[i] = out[i] + a * v[j];
            }
        }
        Ok(out)
    }
}

/// Encloses `Id - C [M]` for a point matrix `C`, using the sparsity of `[M]`.
pub fn identity_minus_product(c: &PointMat, m: &SparseIMat) -> Result<IMat> {
    let n = c.rows();
    if c.cols() != m.rows() || m.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m.cols(),
        });
    }
    let mut out = IMat::identity(n);
    for j in 0..n {
        let col = m.column(j);
        for i in 0..n {
            let crow = c.row(i);
            let mut acc = out[(i, j)];
            for &(k, v) in col {
                acc = acc - v.scale(crow[k]);
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}
