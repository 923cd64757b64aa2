//! Parallel shooting: an `m`-step orbit from the line `q0 + h0 v0` to the
//! line `q1 + h1 v1` is a zero of
//!
//! ```text
//! F(h0, h1, p1, ..., p_{m-1}) = ( f(p1) - p2,
//!                                 ...,
//!                                 f(p_{m-1}) - (q1 + h1 v1),
//!                                 f(q0 + h0 v0(z)) - p1 )
//! ```
//!
//! Unknowns are laid out as `X = (h0, h1, p1.x, p1.y, ..., p_{m-1}.y)`.

use serde::{Deserialize, Serialize};

use super::band::BandLu;
use super::sparse::SparseIMat;
use crate::error::{Error, Result};
use crate::ivl::{DenseLu, IMat, IVec, Interval, PointMat};
use crate::maps::{rotating_point, rotating_point_slope, IPoint, MapSpec};

/// Direction of the starting segment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StartDirection {
    Fixed {
        v: [f64; 2],
    },
    /// `v0(z) = A (1, z L)`.
    Family {
        a: [[f64; 2]; 2],
        l: f64,
    },
}

impl StartDirection {
    pub fn at(&self, z: Interval) -> IPoint {
        match self {
            StartDirection::Fixed { v } => [Interval::point(v[0]), Interval::point(v[1])],
            StartDirection::Family { a, l } => {
                let t = z.scale(*l);
                [t.scale(a[0][1]) + a[0][0], t.scale(a[1][1]) + a[1][0]]
            }
        }
    }

    pub fn at_f64(&self, z: f64) -> [f64; 2] {
        match self {
            StartDirection::Fixed { v } => *v,
            StartDirection::Family { a, l } => {
                [a[0][0] + z * l * a[0][1], a[1][0] + z * l * a[1][1]]
            }
        }
    }
}

/// How `q0` depends on the map parameters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Anchor {
    /// `q0` is given and does not move with the parameters.
    #[default]
    Fixed,
    /// `q0` is the rotating point of the inverse dissipative map with
    /// `f(q0) = q0 + (kappa, 0)`.
    Rotating { kappa: i64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShootingProblem {
    pub map: MapSpec,
    pub m: usize,
    pub q0: IPoint,
    pub q1: IPoint,
    pub v0: StartDirection,
    pub v1: [f64; 2],
    /// Approximate zero `X^ = (h0, h1, p1, ..., p_{m-1})`.
    pub candidate: Vec<f64>,
    /// Parameter range for `z` when `v0` is a family.
    pub z_domain: Option<Interval>,
    #[serde(default)]
    pub anchor: Anchor,
}

fn add(p: IPoint, q: IPoint) -> IPoint {
    [p[0] + q[0], p[1] + q[1]]
}

fn scale(h: Interval, v: IPoint) -> IPoint {
    [h * v[0], h * v[1]]
}

impl ShootingProblem {
    /// Builds the problem from a float orbit `orbit[0..=m]` starting at
    /// `q0_mid + h0 v0(z_mid)`. The end line passes through `orbit[m]`.
    pub fn from_orbit(
        map: MapSpec,
        q0: IPoint,
        v0: StartDirection,
        h0: f64,
        orbit: &[[f64; 2]],
        v1: [f64; 2],
        z_domain: Option<Interval>,
    ) -> Result<Self> {
        if orbit.len() < 3 {
            return Err(Error::Precondition("shooting needs m >= 2".into()));
        }
        let m = orbit.len() - 1;
        let mut candidate = Vec::with_capacity(2 * m);
        candidate.extend([h0, 0.0]);
        for p in &orbit[1..m] {
            candidate.extend(p);
        }
        let q1 = [Interval::point(orbit[m][0]), Interval::point(orbit[m][1])];
        Ok(Self {
            map,
            m,
            q0,
            q1,
            v0,
            v1,
            candidate,
            z_domain,
            anchor: Anchor::Fixed,
        })
    }

    pub fn dim(&self) -> usize {
        2 * self.m
    }

    fn check(&self, x: &IVec) -> Result<()> {
        if self.m < 2 {
            return Err(Error::Precondition("shooting needs m >= 2".into()));
        }
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// `z` range used for the evaluation: the stored domain, or `{0}`.
    pub fn z_range(&self) -> Interval {
        self.z_domain.unwrap_or(Interval::ZERO)
    }

    fn p(x: &IVec, k: usize) -> IPoint {
        [x[2 * k], x[2 * k + 1]]
    }

    fn v1(&self) -> IPoint {
        [Interval::point(self.v1[0]), Interval::point(self.v1[1])]
    }

    /// First point of the orbit, `q0 + h0 v0(z)`.
    pub fn start_point(&self, h0: Interval, z: Interval) -> IPoint {
        add(self.q0, scale(h0, self.v0.at(z)))
    }

    /// Last point of the orbit, `q1 + h1 v1`.
    pub fn end_point(&self, h1: Interval) -> IPoint {
        add(self.q1, scale(h1, self.v1()))
    }

    pub fn eval_f(&self, x: &IVec, z: Interval) -> Result<IVec> {
        self.check(x)?;
        let m = self.m;
        let mut out = IVec::zeros(2 * m);
        let mut put = |block: usize, v: IPoint| {
            out[2 * block] = v[0];
            out[2 * block + 1] = v[1];
        };
        for k in 1..m - 1 {
            let fp = self.map.eval(Self::p(x, k))?;
            let next = Self::p(x, k + 1);
            put(k - 1, [fp[0] - next[0], fp[1] - next[1]]);
        }
        let fp = self.map.eval(Self::p(x, m - 1))?;
        let end = self.end_point(x[1]);
        put(m - 2, [fp[0] - end[0], fp[1] - end[1]]);
        let f0 = self.map.eval(self.start_point(x[0], z))?;
        let p1 = Self::p(x, 1);
        put(m - 1, [f0[0] - p1[0], f0[1] - p1[1]]);
        Ok(out)
    }

    /// Encloses `F(x0)` over the whole parameter range through the mean
    /// value form around the parameter midpoints, intersected with the
    /// direct evaluation. Keeps the dependence of `q0` on the map
    /// parameters, which the direct evaluation loses.
    pub fn eval_f_centered(&self, x0: &[f64], z: Interval) -> Result<IVec> {
        let x = IVec::from_points(x0);
        let naive = self.eval_f(&x, z)?;
        let params = self.map.params();
        let wide = params.iter().any(|p| !p.is_degenerate());
        if !wide && z.is_degenerate() {
            return Ok(naive);
        }
        let mids: Vec<Interval> = params.iter().map(|p| Interval::point(p.mid())).collect();
        let devs: Vec<Interval> = params.iter().zip(&mids).map(|(p, c)| *p - *c).collect();
        let z_mid = Interval::point(z.mid());
        let mut centre = self.clone();
        centre.map = self.map.with_params(&mids);
        let slope_q0 = match self.anchor {
            Anchor::Fixed => None,
            Anchor::Rotating { kappa } => {
                let [a, b] = [params[0], params[1]];
                centre.q0 = rotating_point(mids[0], mids[1], kappa)?;
                Some(rotating_point_slope(a, b, kappa)?)
            }
        };
        let mut out = centre.eval_f(&x, z_mid)?;
        let m = self.m;
        let mut acc = |block: usize, d: IPoint, dev: Interval| {
            out[2 * block] = out[2 * block] + d[0] * dev;
            out[2 * block + 1] = out[2 * block + 1] + d[1] * dev;
        };
        for k in 1..m {
            let dp = self.map.param_jac(Self::p(&x, k))?;
            for (d, dev) in dp.into_iter().zip(&devs) {
                acc(k - 1, d, *dev);
            }
        }
        let p0 = self.start_point(x[0], z);
        let j0 = self.map.jac(p0)?;
        let jv = |v: IPoint| {
            [
                j0[0][0] * v[0] + j0[0][1] * v[1],
                j0[1][0] * v[0] + j0[1][1] * v[1],
            ]
        };
        let dp0 = self.map.param_jac(p0)?;
        for (j, (d, dev)) in dp0.into_iter().zip(&devs).enumerate() {
            let total = match &slope_q0 {
                Some(s) => {
                    let t = jv(s[j]);
                    [d[0] + t[0], d[1] + t[1]]
                }
                None => d,
            };
            acc(m - 1, total, *dev);
        }
        if let StartDirection::Family { a, l } = &self.v0 {
            if !z.is_degenerate() {
                let dv = [Interval::point(a[0][1] * l), Interval::point(a[1][1] * l)];
                acc(m - 1, jv(scale(x[0], dv)), z - z_mid);
            }
        }
        let mut res = Vec::with_capacity(out.len());
        for (c, n) in out.iter().zip(naive.iter()) {
            res.push(c.intersect(n).ok_or(Error::Precondition(
                "centred and direct residual enclosures are disjoint".into(),
            ))?);
        }
        Ok(IVec::new(res))
    }

    /// Block-sparse enclosure of `D_X F` over `Z x [X]`.
    pub fn eval_df(&self, x: &IVec, z: Interval) -> Result<SparseIMat> {
        self.check(x)?;
        let m = self.m;
        let n = 2 * m;
        let mut d = SparseIMat::new(n, n);
        let minus_one = -Interval::ONE;
        // Column 0: h0 enters only the last block row.
        let v0 = self.v0.at(z);
        let j0 = self.map.jac(self.start_point(x[0], z))?;
        for r in 0..2 {
            d.push(2 * (m - 1) + r, 0, j0[r][0] * v0[0] + j0[r][1] * v0[1]);
        }
        // Column 1: h1 enters block row m - 2 through -v1.
        for r in 0..2 {
            d.push(2 * (m - 2) + r, 1, Interval::point(-self.v1[r]));
        }
        // Columns of p_k: the map block in row k - 1, the -Id block in the
        // row that consumes p_k (row k - 2, or the last row for p_1).
        for k in 1..m {
            let jk = self.map.jac(Self::p(x, k))?;
            let consumer = if k == 1 { m - 1 } else { k - 2 };
            for c in 0..2 {
                let col = 2 * k + c;
                let mut entries = [
                    (2 * (k - 1), jk[0][c]),
                    (2 * (k - 1) + 1, jk[1][c]),
                    (2 * consumer + c, minus_one),
                ];
                entries.sort_by_key(|e| e.0);
                for (row, v) in entries {
                    d.push(row, col, v);
                }
            }
        }
        Ok(d)
    }

    /// Dense form of [`ShootingProblem::eval_df`].
    pub fn eval_df_dense(&self, x: &IVec, z: Interval) -> Result<IMat> {
        Ok(self.eval_df(x, z)?.to_dense())
    }

    /// Float derivative at a point: midpoint of the enclosure at `X^`.
    pub fn df_mid(&self, x: &[f64], z: f64) -> Result<PointMat> {
        Ok(self
            .eval_df(&IVec::from_points(x), Interval::point(z))?
            .mid())
    }

    /// Row and column orders that make `DF` banded (`kl = ku = 2`): the
    /// last block row moves to the top, the `h1` column to the end.
    fn band_orders(&self) -> (Vec<usize>, Vec<usize>) {
        let m = self.m;
        let rows = (0..2 * m)
            .map(|i| 2 * ((i / 2 + m - 1) % m) + i % 2)
            .collect();
        let mut cols = vec![0];
        cols.extend(2..2 * m);
        cols.push(1);
        (rows, cols)
    }

    /// Approximate inverse of `DF(X^)` through the banded factorisation.
    pub fn preconditioner(&self, x: &[f64], z: f64) -> Result<PointMat> {
        let mid = self.df_mid(x, z)?;
        let n = mid.rows();
        let (rp, cp) = self.band_orders();
        let mut perm = PointMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                perm[(i, j)] = mid[(rp[i], cp[j])];
            }
        }
        let lu = BandLu::new(&perm, 2, 2)?;
        let mut c = PointMat::zeros(n, n);
        let mut col = vec![0.0; n];
        for j in 0..n {
            col.iter_mut().for_each(|v| *v = 0.0);
            col[j] = 1.0;
            lu.solve_in_place(&mut col);
            for i in 0..n {
                c[(cp[i], rp[j])] = col[i];
            }
        }
        Ok(c)
    }

    /// Approximate inverse through dense LU; used by independent audits.
    pub fn preconditioner_dense(&self, x: &[f64], z: f64) -> Result<PointMat> {
        Ok(DenseLu::new(&self.df_mid(x, z)?)?.inverse())
    }

    /// Plain floating-point Newton iteration on `F(z, .)`.
    pub fn newton(&self, x: &[f64], z: f64, iters: usize) -> Result<Vec<f64>> {
        let mut x = x.to_vec();
        for _ in 0..iters {
            let fx = self
                .eval_f(&IVec::from_points(&x), Interval::point(z))?
                .midpoint();
            let dx = DenseLu::new(&self.df_mid(&x, z)?)?.solve(&fx);
            for (xi, di) in x.iter_mut().zip(&dx) {
                *xi -= di;
            }
        }
        Ok(x)
    }
}

/// `eval_F(prob, X, z)`.
pub fn eval_f(prob: &ShootingProblem, x: &IVec, z: Option<Interval>) -> Result<IVec> {
    prob.eval_f(x, z.unwrap_or(Interval::ZERO))
}

/// `eval_DF(prob, X, z)`.
pub fn eval_df(prob: &ShootingProblem, x: &IVec, z: Option<Interval>) -> Result<IMat> {
    prob.eval_df_dense(x, z.unwrap_or(Interval::ZERO))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ivl::imat_mul;

    /// The dissipative inverse is far from affine; the affine checks use
    /// the linear-profile shear with a point start, which is affine in x
    /// only locally, so the tests below rely on structure, not values.
    fn problem(m: usize) -> ShootingProblem {
        let map: MapSpec = "ntsf:a=0.6,b=0.3".parse().unwrap();
        let mut orbit = vec![[0.1, -0.2]];
        for _ in 0..m {
            let last = *orbit.last().unwrap();
            orbit.push(map.eval_f64(last));
        }
        let q0 = [Interval::point(0.1), Interval::point(-0.2)];
        ShootingProblem::from_orbit(
            map,
            q0,
            StartDirection::Fixed { v: [1.0, 0.0] },
            0.0,
            &orbit,
            [1.0, 0.0],
            None,
        )
        .unwrap()
    }

    #[test]
    fn exact_orbit_has_small_residual() {
        let p = problem(6);
        let f = p
            .eval_f(&IVec::from_points(&p.candidate), Interval::ZERO)
            .unwrap();
        for v in f.iter() {
            assert!(v.mag() < 1e-14);
        }
    }

    #[test]
    fn at_most_three_nonzero_blocks_per_block_row() {
        let p = problem(7);
        let d = p
            .eval_df(&IVec::from_points(&p.candidate), Interval::ZERO)
            .unwrap();
        for count in d.row_counts() {
            assert!(count <= 5);
        }
    }

    #[test]
    fn banded_and_dense_preconditioners_agree() {
        for m in [2, 3, 8] {
            let p = problem(m);
            let cb = p.preconditioner(&p.candidate, 0.0).unwrap();
            let cd = p.preconditioner_dense(&p.candidate, 0.0).unwrap();
            for i in 0..cb.rows() {
                for j in 0..cb.cols() {
                    assert!((cb[(i, j)] - cd[(i, j)]).abs() < 1e-8 * (1.0 + cd[(i, j)].abs()));
                }
            }
            let prod = imat_mul(
                &IMat::from_points(&cb),
                &p.eval_df_dense(&IVec::from_points(&p.candidate), Interval::ZERO)
                    .unwrap(),
            )
            .unwrap();
            for i in 0..prod.rows() {
                for j in 0..prod.cols() {
                    let target = if i == j { 1.0 } else { 0.0 };
                    assert!((prod[(i, j)].mid() - target).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn perturbing_one_point_moves_two_rows() {
        let p = problem(6);
        let x0 = IVec::from_points(&p.candidate);
        let mut moved = p.candidate.clone();
        moved[2 * 3] += 1e-3;
        let f0 = p.eval_f(&x0, Interval::ZERO).unwrap();
        let f1 = p
            .eval_f(&IVec::from_points(&moved), Interval::ZERO)
            .unwrap();
        let changed: Vec<usize> = (0..p.m)
            .filter(|&b| (0..2).any(|r| (f1[2 * b + r].mid() - f0[2 * b + r].mid()).abs() > 1e-9))
            .collect();
        // p3 is produced by block row 1 and consumed by block row 2.
        assert_eq!(changed, vec![1, 2]);
        assert!((f1[2].mid() - f0[2].mid() + 1e-3).abs() < 1e-12);
    }
}
