//! Dataset container and the estimate types shared by every estimator.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// An immutable set of `n` points in `D`-dimensional real space.
///
/// Rows are stored contiguously; row order defines the point index.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: Vec<f64>,
    n: usize,
    dim: usize,
}

impl DataMatrix {
    /// Builds a matrix from row-major values. Every coordinate must be finite.
    pub fn from_flat(values: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidData("dimension must be at least 1".into()));
        }
        if values.is_empty() {
            return Err(Error::Empty("a data matrix needs at least one point".into()));
        }
        if !values.len().is_multiple_of(dim) {
            return Err(Error::InvalidData(format!(
                "{} values do not form rows of length {dim}",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidData(format!(
                "non-finite coordinate at row {}, column {}",
                pos / dim,
                pos % dim
            )));
        }
        let n = values.len() / dim;
        Ok(Self { values, n, dim })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut values = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::InvalidData(format!(
                    "row {i} has {} columns, expected {dim}",
                    row.len()
                )));
            }
            values.extend_from_slice(row);
        }
        Self::from_flat(values, dim)
    }

    /// Number of points.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Representational dimensionality.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.values
    }

    /// Returns a new matrix with `f` applied to every row.
    pub fn map_rows(&self, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> Result<Self> {
        let rows: Vec<Vec<f64>> = self.rows().map(&mut f).collect();
        Self::from_rows(&rows)
    }
}

/// Identifies an intrinsic dimensionality estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Estimator {
    Abid,
    Rabid,
    Mle,
    Mom,
    Ged,
}

impl Estimator {
    pub const ALL: [Estimator; 5] = [
        Estimator::Abid,
        Estimator::Rabid,
        Estimator::Mle,
        Estimator::Mom,
        Estimator::Ged,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Estimator::Abid => "abid",
            Estimator::Rabid => "rabid",
            Estimator::Mle => "mle",
            Estimator::Mom => "mom",
            Estimator::Ged => "ged",
        }
    }

    /// Whether the estimator needs the direction vectors rather than only distances.
    pub fn is_angle_based(self) -> bool {
        matches!(self, Estimator::Abid | Estimator::Rabid)
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Estimator::ALL
            .into_iter()
            .find(|e| e.tag().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown estimator tag '{s}'")))
    }
}

/// Conditions attached to an estimate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct EstimateFlags(u8);

impl EstimateFlags {
    pub const CLAMPED_TO_K: Self = Self(1);
    pub const DEGENERATE_ZERO_DENOMINATOR: Self = Self(1 << 1);
    pub const INSUFFICIENT_NEIGHBORS: Self = Self(1 << 2);

    const NAMES: [(Self, &'static str); 3] = [
        (Self::CLAMPED_TO_K, "clamped_to_k"),
        (Self::DEGENERATE_ZERO_DENOMINATOR, "degenerate_zero_denominator"),
        (Self::INSUFFICIENT_NEIGHBORS, "insufficient_neighbors"),
    ];

    pub const fn empty() -> Self {
        Self(0)
    }

    pub const fn union(self, other: Self) -> Self {
        Self(self.0 | other.0)
    }

    pub fn contains(self, other: Self) -> bool {
        self.0 & other.0 == other.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Whether any flag marking the value as unreliable is set.
    pub fn is_degenerate(self) -> bool {
        self.contains(Self::DEGENERATE_ZERO_DENOMINATOR)
            || self.contains(Self::INSUFFICIENT_NEIGHBORS)
    }

    pub fn names(self) -> impl Iterator<Item = &'static str> {
        Self::NAMES
            .into_iter()
            .filter(move |(f, _)| self.contains(*f))
            .map(|(_, name)| name)
    }
}

impl std::ops::BitOr for EstimateFlags {
    type Output = Self;

    fn bitor(self, rhs: Self) -> Self {
        self.union(rhs)
    }
}

/// One intrinsic dimensionality estimate for one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdEstimate {
    pub estimator: Estimator,
    pub value: f64,
    /// Neighborhood size the estimate was computed from.
    pub k: usize,
    pub flags: EstimateFlags,
}

impl IdEstimate {
    pub fn new(estimator: Estimator, value: f64, k: usize) -> Self {
        Self {
            estimator,
            value,
            k,
            flags: EstimateFlags::empty(),
        }
    }

    pub fn with_flags(mut self, flags: EstimateFlags) -> Self {
        self.flags = self.flags | flags;
        self
    }
}

/// Estimates from one neighborhood, all evaluated on the same neighbor list.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborhoodEstimates {
    pub estimates: BTreeMap<Estimator, IdEstimate>,
    /// Mean off-diagonal cosine of the neighbor directions, when angle-based
    /// estimators were evaluated.
    pub mean_cosine: Option<f64>,
}

impl NeighborhoodEstimates {
    pub fn value(&self, estimator: Estimator) -> Option<f64> {
        self.estimates.get(&estimator).map(|e| e.value)
    }
}

/// All requested estimates for one dataset point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointEstimates {
    pub index: usize,
    pub estimates: BTreeMap<Estimator, IdEstimate>,
    /// Mean off-diagonal cosine of the neighbor directions, when angle-based
    /// estimators were evaluated.
    pub mean_cosine: Option<f64>,
}

/// Per-point estimates for a dataset; every row shares the estimator set and `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateTable {
    estimators: Vec<Estimator>,
    k: usize,
    rows: Vec<PointEstimates>,
}

impl EstimateTable {
    pub fn new(estimators: Vec<Estimator>, k: usize, rows: Vec<PointEstimates>) -> Result<Self> {
        for row in &rows {
            let keys: Vec<Estimator> = row.estimates.keys().copied().collect();
            let mut expected = estimators.clone();
            expected.sort();
            expected.dedup();
            if keys != expected {
                return Err(Error::InvalidData(format!(
                    "row {} carries estimators {keys:?}, expected {expected:?}",
                    row.index
                )));
            }
            if let Some(e) = row.estimates.values().find(|e| e.k != k) {
                return Err(Error::InvalidData(format!(
                    "row {} was estimated with k={}, table uses k={k}",
                    row.index, e.k
                )));
            }
        }
        Ok(Self {
            estimators,
            k,
            rows,
        })
    }

    pub fn estimators(&self) -> &[Estimator] {
        &self.estimators
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rows(&self) -> &[PointEstimates] {
        &self.rows
    }

    /// Estimate values of one estimator, in row order.
    pub fn column(&self, estimator: Estimator) -> Option<Vec<f64>> {
        if !self.estimators.contains(&estimator) {
            return None;
        }
        Some(
            self.rows
                .iter()
                .map(|r| r.estimates[&estimator].value)
                .collect(),
        )
    }
}
