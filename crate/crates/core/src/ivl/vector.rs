use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use super::interval::Interval;
use crate::error::{Error, Result};

/// A fixed-dimension box in R^n.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IVec(Vec<Interval>);

impl IVec {
    pub fn new(entries: Vec<Interval>) -> Self {
        Self(entries)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![Interval::ZERO; n])
    }

    pub fn from_points(xs: &[f64]) -> Self {
        Self(xs.iter().map(|&x| Interval::point(x)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[Interval] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Interval> {
        self.0
    }

    /// Componentwise midpoints.
    pub fn midpoint(&self) -> Vec<f64> {
        self.0.iter().map(Interval::mid).collect()
    }

    /// Largest component width.
    pub fn max_width(&self) -> f64 {
        self.0.iter().map(Interval::width).fold(0.0, f64::max)
    }

    fn check_dim(&self, other: &IVec) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(())
    }

    /// True iff every component of `self` lies strictly inside the matching
    /// component of `outer`.
    pub fn subset_interior(&self, outer: &IVec) -> Result<bool> {
        self.check_dim(outer)?;
        Ok(self
            .0
            .iter()
            .zip(&outer.0)
            .all(|(a, b)| a.subset_interior(b)))
    }

    pub fn subset(&self, outer: &IVec) -> Result<bool> {
        self.check_dim(outer)?;
        Ok(self.0.iter().zip(&outer.0).all(|(a, b)| a.subset(b)))
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        self.len() == x.len() && self.0.iter().zip(x).all(|(a, &v)| a.contains(v))
    }

    pub fn contains_zero(&self) -> bool {
        self.0.iter().all(Interval::contains_zero)
    }

    pub fn add(&self, other: &IVec) -> Result<IVec> {
        self.check_dim(other)?;
        Ok(IVec(
            self.0.iter().zip(&other.0).map(|(&a, &b)| a + b).collect(),
        ))
    }

    pub fn sub(&self, other: &IVec) -> Result<IVec> {
        self.check_dim(other)?;
        Ok(IVec(
            self.0.iter().zip(&other.0).map(|(&a, &b)| a - b).collect(),
        ))
    }

    pub fn hull(&self, other: &IVec) -> Result<IVec> {
        self.check_dim(other)?;
        Ok(IVec(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.hull(b))
                .collect(),
        ))
    }
}

impl Index<usize> for IVec {
    type Output = Interval;
    fn index(&self, i: usize) -> &Interval {
        &self.0[i]
    }
}

impl IndexMut<usize> for IVec {
    fn index_mut(&mut self, i: usize) -> &mut Interval {
        &mut self.0[i]
    }
}

impl FromIterator<Interval> for IVec {
    fn from_iter<T: IntoIterator<Item = Interval>>(iter: T) -> Self {
        IVec(iter.into_iter().collect())
    }
}
